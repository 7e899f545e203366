#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "accltl/logic.hpp"
#include "accltl/path.hpp"

namespace accltl {

enum class StructureMode : uint8_t { Full, ZeroAry };

// The Sch_Acc structure associated with one transition: pre/post relation
// copies, the binding predicate of the access method used, and the active
// domain values over which quantifiers range.
struct TransitionStructure {
    StructureMode mode = StructureMode::Full;
    Instance pre;
    Instance post;
    std::string method;
    Tuple binding;              // ascending input positions; empty in 0-ary mode
    std::vector<Value> domain;  // sorted active domain
};

inline bool atom_holds(const TransitionStructure& m, const SAtom& a,
                       const std::vector<Value>& vals) {
    switch (a.kind) {
    case AtomKind::Pre:
        return m.pre.contains(a.target, vals);
    case AtomKind::Post:
        return m.post.contains(a.target, vals);
    case AtomKind::Bind:
        if (m.mode != StructureMode::Full)
            throw Error(ErrorKind::Validation,
                        "full-binding atom evaluated on a 0-ary structure");
        return m.method == a.target && vals == m.binding;
    case AtomKind::Bind0:
        return m.method == a.target;
    case AtomKind::Eq:
        return vals[0] == vals[1];
    case AtomKind::Neq:
        return vals[0] != vals[1];
    }
    return false;
}

inline TransitionStructure structure_of(const Transition& t, StructureMode mode,
                                        const std::set<Value>& extra_constants = {}) {
    TransitionStructure m;
    m.mode = mode;
    m.pre = t.pre;
    m.post = t.post;
    m.method = t.access.method;
    if (mode == StructureMode::Full) m.binding = t.access.binding_tuple();
    std::set<Value> dom = t.pre.active_values();
    for (const Value& v : t.post.active_values()) dom.insert(v);
    for (const auto& [_, v] : t.access.binding) dom.insert(v);
    dom.insert(extra_constants.begin(), extra_constants.end());
    m.domain.assign(dom.begin(), dom.end());
    return m;
}

namespace detail {

enum class Truth : uint8_t { False, True, Unknown };

// Backtracking assignment search over a structure offering atom_holds(m, a,
// values) and a domain vector. Eq/Neq atoms are literal (in)equality. The
// partial three-valued matrix evaluation prunes hopeless branches early.
template <class StructureT>
struct SentenceEval {
    const StructureT& m;
    std::map<std::string, Value> assignment;

    std::optional<Value> term_value(const Term& t) const {
        if (!t.is_var) return t.val;
        auto it = assignment.find(t.var);
        if (it == assignment.end()) return std::nullopt;
        return it->second;
    }

    Truth atom_truth(const SAtom& a) const {
        std::vector<Value> vals;
        for (const Term& t : a.terms) {
            auto v = term_value(t);
            if (!v) return Truth::Unknown;
            vals.push_back(*v);
        }
        return atom_holds(m, a, vals) ? Truth::True : Truth::False;
    }

    Truth matrix_truth(const Matrix& mx) const {
        if (mx.op == Matrix::Op::Leaf) return atom_truth(mx.atom);
        bool unknown = false;
        if (mx.op == Matrix::Op::And) {
            for (const Matrix& k : mx.kids) {
                Truth t = matrix_truth(k);
                if (t == Truth::False) return Truth::False;
                if (t == Truth::Unknown) unknown = true;
            }
            return unknown ? Truth::Unknown : Truth::True;
        }
        for (const Matrix& k : mx.kids) {
            Truth t = matrix_truth(k);
            if (t == Truth::True) return Truth::True;
            if (t == Truth::Unknown) unknown = true;
        }
        return unknown ? Truth::Unknown : Truth::False;
    }

    // First unassigned variable occurring in an atom that is still undecided
    // within an undecided subtree; variables of decided subtrees are never
    // enumerated.
    const std::string* pick_var(const Matrix& mx) const {
        if (matrix_truth(mx) != Truth::Unknown) return nullptr;
        if (mx.op == Matrix::Op::Leaf) {
            for (const Term& t : mx.atom.terms)
                if (t.is_var && !assignment.count(t.var)) return &t.var;
            return nullptr;
        }
        for (const Matrix& k : mx.kids)
            if (const std::string* v = pick_var(k)) return v;
        return nullptr;
    }

    bool search(const PosSentence& s) {
        Truth t = matrix_truth(s.matrix);
        if (t == Truth::True) return true;
        if (t == Truth::False) return false;
        const std::string* var = pick_var(s.matrix);
        if (!var) return false;
        std::string name = *var;
        for (const Value& v : m.domain) {
            assignment[name] = v;
            if (search(s)) return true;
        }
        assignment.erase(name);
        return false;
    }
};

} // namespace detail

// First-order satisfaction of a closed positive sentence on a structure.
// Quantifiers range over the structure's active domain.
template <class StructureT>
inline bool eval_sentence(const PosSentence& s, const StructureT& m) {
    detail::SentenceEval<StructureT> ev{m, {}};
    return ev.search(s);
}

// ---------------------------------------------------------------------------
// AccLTL evaluation over finite paths (Def 2.1 semantics, X false at the
// last position, U requires its witness inside the path).
// ---------------------------------------------------------------------------

class PathEvaluator {
  public:
    PathEvaluator(const AccessPath& path, const Instance& initial, const Schema& schema,
                  StructureMode mode, const std::set<Value>& extra_constants)
        : path_(path), schema_(schema), mode_(mode) {
        if (path.empty()) throw Error(ErrorKind::Domain, "empty path has no positions");
        check_path(path, schema);
        instances_ = instance_sequence(path, initial, schema);
        extra_ = extra_constants;
        structures_.resize(path.length());
    }

    size_t length() const { return path_.length(); }

    const TransitionStructure& structure(size_t position) {
        if (!structures_[position - 1]) {
            Transition t{instances_[position - 1], path_.steps[position - 1].access,
                         instances_[position]};
            structures_[position - 1] = structure_of(t, mode_, extra_);
        }
        return *structures_[position - 1];
    }

    bool eval(const AccFormula& f, size_t position) {
        if (position < 1 || position > length())
            throw Error(ErrorKind::Domain, "position out of range");
        switch (f.op()) {
        case AccFormula::Op::Atom:
            return eval_sentence(f.sentence(), structure(position));
        case AccFormula::Op::Not:
            return !eval(*f.kids()[0], position);
        case AccFormula::Op::And:
            for (const auto& k : f.kids())
                if (!eval(*k, position)) return false;
            return true;
        case AccFormula::Op::Or:
            for (const auto& k : f.kids())
                if (eval(*k, position)) return true;
            return false;
        case AccFormula::Op::Next:
            return position + 1 <= length() && eval(*f.kids()[0], position + 1);
        case AccFormula::Op::Until:
            for (size_t j = position; j <= length(); ++j) {
                if (eval(*f.kids()[1], j)) return true;
                if (!eval(*f.kids()[0], j)) return false;
            }
            return false;
        }
        return false;
    }

  private:
    const AccessPath& path_;
    const Schema& schema_;
    StructureMode mode_;
    std::vector<Instance> instances_;
    std::set<Value> extra_;
    std::vector<std::optional<TransitionStructure>> structures_;
};

inline bool eval_formula(const AccFormula& f, const AccessPath& path, const Instance& initial,
                         const Schema& schema, size_t position = 1,
                         StructureMode mode = StructureMode::Full) {
    std::set<Value> extra = f.constants();
    for (const Value& v : schema.constants()) extra.insert(v);
    PathEvaluator ev(path, initial, schema, mode, extra);
    return ev.eval(f, position);
}

// ---------------------------------------------------------------------------
// Bounded path enumeration (shared by the brute-force oracle and the bounded
// automaton emptiness check)
// ---------------------------------------------------------------------------

struct SearchFilters {
    bool grounded = false;
    std::set<std::string> exact;
    std::set<std::string> idempotent;
};

namespace detail {

// All accesses over the universe, deterministically ordered.
inline std::vector<Access> enumerate_accesses(const Schema& schema,
                                              const std::vector<Value>& universe) {
    std::vector<Access> out;
    for (const auto& [name, m] : schema.methods()) {
        const Relation& rel = schema.relation(m.relation);
        std::vector<size_t> positions(m.inputs.begin(), m.inputs.end());
        std::vector<std::vector<Value>> choices;
        bool feasible = true;
        for (size_t pos : positions) {
            std::vector<Value> vals;
            for (const Value& v : universe)
                if (rel.positions[pos - 1].admits(v)) vals.push_back(v);
            if (vals.empty()) feasible = false;
            choices.push_back(std::move(vals));
        }
        if (!feasible && !positions.empty()) continue;
        std::vector<size_t> idx(positions.size(), 0);
        while (true) {
            Access a;
            a.method = name;
            for (size_t i = 0; i < positions.size(); ++i) a.binding[positions[i]] = choices[i][idx[i]];
            out.push_back(std::move(a));
            size_t k = positions.size();
            while (k > 0 && ++idx[k - 1] == choices[k - 1].size()) idx[--k] = 0;
            if (k == 0) break;
        }
        if (positions.empty() && out.empty()) out.push_back(Access{name, {}});
    }
    return out;
}

struct PathSearch {
    const Schema& schema;
    const Instance& initial;
    const std::vector<Value>& universe;
    size_t max_new;
    const SearchFilters& filters;
    // Called on every candidate path of the current target length. Returns
    // true to stop the search.
    std::function<bool(const AccessPath&)> visit;

    std::vector<Access> accesses;
    AccessPath current;
    std::map<Access, Response> seen; // for idempotence pruning

    bool run(size_t length) {
        accesses = enumerate_accesses(schema, universe);
        current.steps.clear();
        seen.clear();
        if (length == 0) return visit(current);
        return extend(length, initial);
    }

    bool extend(size_t remaining, const Instance& state) {
        std::set<Value> known;
        if (filters.grounded) known = state.active_values();
        for (const Access& a : accesses) {
            if (filters.grounded) {
                bool ok = true;
                for (const auto& [_, v] : a.binding)
                    if (!known.count(v)) ok = false;
                if (!ok) continue;
            }
            bool idem = filters.idempotent.count(a.method) != 0;
            bool exact = filters.exact.count(a.method) != 0;
            auto seen_it = idem ? seen.find(a) : seen.end();
            Response must_contain;
            if (exact) must_contain = matching_tuples(state, a, schema);
            for (const Response& r : enumerate_responses(a, schema, universe, max_new)) {
                if (idem && seen_it != seen.end() && seen_it->second != r) continue;
                if (exact) {
                    bool ok = true;
                    for (const Tuple& t : must_contain)
                        if (!r.count(t)) ok = false; // exactness can never recover
                    if (!ok) continue;
                }
                current.steps.push_back(PathStep{a, r});
                bool inserted = false;
                if (idem && seen_it == seen.end()) {
                    seen.emplace(a, r);
                    inserted = true;
                }
                bool stop;
                if (remaining == 1) {
                    stop = final_check() && visit(current);
                } else {
                    Instance next = state;
                    const std::string& rel = schema.method(a.method).relation;
                    for (const Tuple& t : r) next.add(rel, t);
                    stop = extend(remaining - 1, next);
                }
                current.steps.pop_back();
                if (inserted) seen.erase(a);
                if (stop) return true;
            }
        }
        return false;
    }

    bool final_check() const {
        if (!filters.exact.empty() &&
            !is_exact(current, filters.exact, initial, schema))
            return false;
        return true;
    }
};

} // namespace detail

// Shortest-first enumeration of candidate paths; `visit` returns true to
// accept the path and stop. Deterministic order: length, then method name,
// then binding, then response size.
inline std::optional<AccessPath> search_paths(const Schema& schema, const Instance& initial,
                                              const std::vector<Value>& universe, size_t max_len,
                                              size_t max_new, const SearchFilters& filters,
                                              const std::function<bool(const AccessPath&)>& visit,
                                              size_t min_len = 1) {
    std::optional<AccessPath> found;
    detail::PathSearch search{schema,  initial, universe, max_new, filters,
                              [&](const AccessPath& p) {
                                  if (visit(p)) {
                                      found = p;
                                      return true;
                                  }
                                  return false;
                              },
                              {},      {},      {}};
    for (size_t len = min_len; len <= max_len; ++len)
        if (search.run(len)) break;
    return found;
}

// Reference satisfiability oracle: shortest witness within bounds, or none.
// `none` means no witness within bounds, not unsatisfiability.
inline std::optional<AccessPath> brute_force_sat(const AccFormula& f, const Schema& schema,
                                                 const Instance& initial, size_t max_len,
                                                 const std::vector<Value>& universe,
                                                 size_t max_new,
                                                 const SearchFilters& filters = {},
                                                 StructureMode mode = StructureMode::Full) {
    return search_paths(schema, initial, universe, max_len, max_new, filters,
                        [&](const AccessPath& p) {
                            return !p.empty() && eval_formula(f, p, initial, schema, 1, mode);
                        });
}

} // namespace accltl
