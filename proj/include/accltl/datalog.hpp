#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "accltl/error.hpp"
#include "accltl/instance.hpp"
#include "accltl/logic.hpp"
#include "accltl/sexpr.hpp"

namespace accltl {
namespace dl {

using Database = std::map<std::string, std::set<Tuple>>;

struct DlAtom {
    std::string pred;
    std::vector<Term> terms;

    std::string to_string() const {
        if (terms.empty()) return pred;
        std::ostringstream os;
        os << pred << "(";
        for (size_t i = 0; i < terms.size(); ++i) os << (i ? ", " : "") << terms[i].to_string();
        os << ")";
        return os.str();
    }
};

struct DatalogRule {
    DlAtom head;
    std::vector<DlAtom> body;

    std::string to_string() const {
        std::ostringstream os;
        os << head.to_string();
        if (!body.empty()) {
            os << " :- ";
            for (size_t i = 0; i < body.size(); ++i)
                os << (i ? ", " : "") << body[i].to_string();
        }
        os << ".";
        return os.str();
    }
};

struct DatalogProgram {
    std::vector<DatalogRule> rules;
    std::string goal;
    std::map<std::string, size_t> arity;          // every predicate mentioned
    std::set<std::string> declared_intensional;   // intensional even without rules

    std::set<std::string> intensional() const {
        std::set<std::string> out = declared_intensional;
        for (const DatalogRule& r : rules) out.insert(r.head.pred);
        return out;
    }
    std::set<std::string> extensional() const {
        std::set<std::string> intens = intensional(), out;
        for (const DatalogRule& r : rules)
            for (const DlAtom& a : r.body)
                if (!intens.count(a.pred)) out.insert(a.pred);
        return out;
    }

    // Safety: every head variable occurs in the body; arities consistent.
    void check() const {
        std::map<std::string, size_t> seen;
        auto note = [&](const DlAtom& a) {
            auto [it, inserted] = seen.emplace(a.pred, a.terms.size());
            if (!inserted && it->second != a.terms.size())
                throw Error(ErrorKind::Validation,
                            "predicate " + a.pred + " used with two arities");
        };
        for (const DatalogRule& r : rules) {
            note(r.head);
            std::set<std::string> body_vars;
            for (const DlAtom& a : r.body) {
                note(a);
                for (const Term& t : a.terms)
                    if (t.is_var) body_vars.insert(t.var);
            }
            for (const Term& t : r.head.terms)
                if (t.is_var && !body_vars.count(t.var))
                    throw Error(ErrorKind::Validation, "unsafe rule (head variable " + t.var +
                                                           " not bound in body): " +
                                                           r.to_string());
        }
        if (goal.empty()) throw Error(ErrorKind::Validation, "program lacks a goal predicate");
        if (!intensional().count(goal))
            throw Error(ErrorKind::Validation, "goal predicate must be intensional");
    }
};

// ---------------------------------------------------------------------------
// Fixpoint evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline const std::set<Tuple>& facts_of(const Database& db, const std::string& pred) {
    static const std::set<Tuple> kEmpty;
    auto it = db.find(pred);
    return it == db.end() ? kEmpty : it->second;
}

// Joins the rule body left to right by backtracking. When `delta_index` is
// non-negative, that body atom must match within `delta` (semi-naive step).
struct RuleJoin {
    const DatalogRule& rule;
    const Database& edb;
    const Database& idb;
    const Database* delta = nullptr;
    int delta_index = -1;
    std::map<std::string, Value> bind;
    std::function<void(const Tuple&)> emit;

    const std::set<Tuple>& source(size_t i, const std::string& pred,
                                  const std::set<std::string>& intens) const {
        if (static_cast<int>(i) == delta_index) return facts_of(*delta, pred);
        if (intens.count(pred)) return facts_of(idb, pred);
        return facts_of(edb, pred);
    }

    bool match(const DlAtom& a, const Tuple& fact) {
        std::vector<std::string> bound;
        bool ok = fact.size() == a.terms.size();
        for (size_t i = 0; ok && i < a.terms.size(); ++i) {
            const Term& t = a.terms[i];
            if (!t.is_var) {
                if (!(t.val == fact[i])) ok = false;
            } else {
                auto it = bind.find(t.var);
                if (it == bind.end()) {
                    bind.emplace(t.var, fact[i]);
                    bound.push_back(t.var);
                } else if (!(it->second == fact[i])) {
                    ok = false;
                }
            }
        }
        if (!ok)
            for (const std::string& v : bound) bind.erase(v);
        return ok;
    }

    void unmatch(const DlAtom& a, const Tuple& fact, const std::set<std::string>& before) {
        for (const Term& t : a.terms)
            if (t.is_var && !before.count(t.var)) bind.erase(t.var);
        (void)fact;
    }

    void run(size_t i, const std::set<std::string>& intens) {
        if (i == rule.body.size()) {
            Tuple t;
            for (const Term& term : rule.head.terms)
                t.push_back(term.is_var ? bind.at(term.var) : term.val);
            emit(t);
            return;
        }
        const DlAtom& a = rule.body[i];
        std::set<std::string> before;
        for (const auto& [v, _] : bind) before.insert(v);
        for (const Tuple& fact : source(i, a.pred, intens)) {
            if (!match(a, fact)) continue;
            run(i + 1, intens);
            unmatch(a, fact, before);
        }
    }
};

} // namespace detail

// Least fixpoint by naive iteration (reference implementation).
inline Database fixpoint_naive(const DatalogProgram& p, const Database& edb) {
    p.check();
    std::set<std::string> intens = p.intensional();
    Database idb;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const DatalogRule& r : p.rules) {
            detail::RuleJoin join{r, edb, idb, nullptr, -1, {}, nullptr};
            std::vector<Tuple> found;
            join.emit = [&](const Tuple& t) { found.push_back(t); };
            join.run(0, intens);
            for (Tuple& t : found)
                if (idb[r.head.pred].insert(std::move(t)).second) changed = true;
        }
    }
    return idb;
}

// Semi-naive evaluation: after the first round, a rule instance must use at
// least one freshly derived fact.
inline Database fixpoint(const DatalogProgram& p, const Database& edb) {
    p.check();
    std::set<std::string> intens = p.intensional();
    Database idb, delta;
    // round 0: rules evaluated on the (initially empty) idb
    for (const DatalogRule& r : p.rules) {
        detail::RuleJoin join{r, edb, idb, nullptr, -1, {}, nullptr};
        std::vector<Tuple> found;
        join.emit = [&](const Tuple& t) { found.push_back(t); };
        join.run(0, intens);
        for (Tuple& t : found)
            if (idb[r.head.pred].insert(t).second) delta[r.head.pred].insert(std::move(t));
    }
    while (!delta.empty()) {
        Database next_delta;
        for (const DatalogRule& r : p.rules) {
            for (size_t i = 0; i < r.body.size(); ++i) {
                if (!intens.count(r.body[i].pred)) continue;
                detail::RuleJoin join{r, edb, idb, &delta, static_cast<int>(i), {}, nullptr};
                std::vector<Tuple> found;
                join.emit = [&](const Tuple& t) { found.push_back(t); };
                join.run(0, intens);
                for (Tuple& t : found)
                    if (!detail::facts_of(idb, r.head.pred).count(t))
                        next_delta[r.head.pred].insert(std::move(t));
            }
        }
        for (auto& [pred, ts] : next_delta)
            for (const Tuple& t : ts) idb[pred].insert(t);
        delta = std::move(next_delta);
    }
    return idb;
}

inline bool accepts(const DatalogProgram& p, const Database& edb) {
    Database idb = fixpoint(p, edb);
    return !detail::facts_of(idb, p.goal).empty();
}

// ---------------------------------------------------------------------------
// Positive sentences over a database
// ---------------------------------------------------------------------------

struct PsNode {
    enum class Op : uint8_t { Atom, And, Or, Eq, Neq };
    Op op = Op::And;
    DlAtom atom;                 // Op::Atom
    std::vector<Term> eq_terms;  // Eq/Neq
    std::vector<PsNode> kids;

    std::string to_string() const {
        std::ostringstream os;
        switch (op) {
        case Op::Atom:
            os << "(" << atom.pred;
            for (const Term& t : atom.terms) os << " " << t.to_string();
            os << ")";
            return os.str();
        case Op::Eq:
        case Op::Neq:
            return std::string(op == Op::Eq ? "(= " : "(!= ") + eq_terms[0].to_string() + " " +
                   eq_terms[1].to_string() + ")";
        case Op::And:
        case Op::Or: {
            if (kids.empty()) return op == Op::And ? "true" : "false";
            os << (op == Op::And ? "(and" : "(or");
            for (const PsNode& k : kids) os << " " << k.to_string();
            os << ")";
            return os.str();
        }
        }
        return "?";
    }
};

struct PositiveSentence {
    std::vector<std::string> vars;
    PsNode matrix;

    std::string to_string() const {
        std::ostringstream os;
        os << "(exists (";
        for (size_t i = 0; i < vars.size(); ++i) os << (i ? " " : "") << vars[i];
        os << ") " << matrix.to_string() << ")";
        return os.str();
    }

    std::set<Value> constants() const {
        std::set<Value> out;
        std::function<void(const PsNode&)> walk = [&](const PsNode& n) {
            for (const Term& t : n.atom.terms)
                if (!t.is_var) out.insert(t.val);
            for (const Term& t : n.eq_terms)
                if (!t.is_var) out.insert(t.val);
            for (const PsNode& k : n.kids) walk(k);
        };
        walk(matrix);
        return out;
    }
};

namespace detail {

struct DbEval {
    const Database& db;
    const std::vector<Value>& domain;
    std::map<std::string, Value> bind;

    enum class T : uint8_t { F, True, U };

    std::optional<Value> val(const Term& t) const {
        if (!t.is_var) return t.val;
        auto it = bind.find(t.var);
        if (it == bind.end()) return std::nullopt;
        return it->second;
    }

    T truth(const PsNode& n) const {
        switch (n.op) {
        case PsNode::Op::Atom: {
            Tuple vals;
            for (const Term& t : n.atom.terms) {
                auto v = val(t);
                if (!v) return T::U;
                vals.push_back(*v);
            }
            return facts_of(db, n.atom.pred).count(vals) ? T::True : T::F;
        }
        case PsNode::Op::Eq:
        case PsNode::Op::Neq: {
            auto a = val(n.eq_terms[0]), b = val(n.eq_terms[1]);
            if (!a || !b) return T::U;
            bool eq = *a == *b;
            return (n.op == PsNode::Op::Eq) == eq ? T::True : T::F;
        }
        case PsNode::Op::And: {
            bool unk = false;
            for (const PsNode& k : n.kids) {
                T t = truth(k);
                if (t == T::F) return T::F;
                if (t == T::U) unk = true;
            }
            return unk ? T::U : T::True;
        }
        case PsNode::Op::Or: {
            bool unk = false;
            for (const PsNode& k : n.kids) {
                T t = truth(k);
                if (t == T::True) return T::True;
                if (t == T::U) unk = true;
            }
            return unk ? T::U : T::F;
        }
        }
        return T::F;
    }

    const std::string* pick_var(const PsNode& n) const {
        if (truth(n) != T::U) return nullptr;
        if (n.op == PsNode::Op::Atom || n.op == PsNode::Op::Eq || n.op == PsNode::Op::Neq) {
            const std::vector<Term>& ts =
                n.op == PsNode::Op::Atom ? n.atom.terms : n.eq_terms;
            for (const Term& t : ts)
                if (t.is_var && !bind.count(t.var)) return &t.var;
            return nullptr;
        }
        for (const PsNode& k : n.kids)
            if (const std::string* v = pick_var(k)) return v;
        return nullptr;
    }

    bool search(const PositiveSentence& s) {
        T t = truth(s.matrix);
        if (t == T::True) return true;
        if (t == T::F) return false;
        const std::string* var = pick_var(s.matrix);
        if (!var) return false;
        std::string name = *var;
        for (const Value& v : domain) {
            bind[name] = v;
            if (search(s)) return true;
        }
        bind.erase(name);
        return false;
    }
};

} // namespace detail

inline bool eval_on_db(const PositiveSentence& s, const Database& db) {
    std::set<Value> dom;
    for (const auto& [_, ts] : db)
        for (const Tuple& t : ts) dom.insert(t.begin(), t.end());
    for (const Value& v : s.constants()) dom.insert(v);
    std::vector<Value> domain(dom.begin(), dom.end());
    detail::DbEval ev{db, domain, {}};
    return ev.search(s);
}

// ---------------------------------------------------------------------------
// Bounded containment of a Datalog program in a positive sentence
// ---------------------------------------------------------------------------

struct ContainmentResult {
    std::optional<Database> counterexample; // accepted by p, violating s
    size_t depth = 0;                       // bound that was exhausted otherwise
    size_t expansions = 0;
    bool capped = false; // expansion cap hit: the depth was not fully explored

    bool contained_up_to_depth() const { return !counterexample.has_value(); }
};

inline size_t default_containment_depth(const DatalogProgram& p, size_t height) {
    return 2 * std::max<size_t>(p.rules.size(), 1) * std::max<size_t>(height, 1);
}

namespace detail {

inline std::string canonical_expansion_key(const std::vector<DlAtom>& atoms) {
    // Normalize variable names by first occurrence, then sort atom strings.
    std::map<std::string, std::string> ren;
    std::vector<std::string> parts;
    for (const DlAtom& a : atoms) {
        DlAtom c = a;
        for (Term& t : c.terms)
            if (t.is_var) {
                auto [it, _] = ren.emplace(t.var, "V" + std::to_string(ren.size()));
                t.var = it->second;
            }
        parts.push_back(c.to_string());
    }
    std::sort(parts.begin(), parts.end());
    std::string key;
    for (const std::string& s : parts) key += s + ";";
    return key;
}

struct Expander {
    const DatalogProgram& p;
    std::set<std::string> intens;
    size_t cap;
    size_t counter = 0; // fresh variable counter
    std::vector<std::vector<DlAtom>> results;
    bool capped = false;
    std::map<std::string, size_t> visited; // canonical goal list -> best budget

    static DlAtom rename(const DlAtom& a, size_t tag) {
        DlAtom out = a;
        for (Term& t : out.terms)
            if (t.is_var) t.var = "r" + std::to_string(tag) + "_" + t.var;
        return out;
    }

    static bool unify(std::map<std::string, Term>& sub, const Term& a, const Term& b) {
        Term x = a, y = b;
        while (x.is_var && sub.count(x.var)) x = sub.at(x.var);
        while (y.is_var && sub.count(y.var)) y = sub.at(y.var);
        if (x.is_var) {
            if (!(y.is_var && y.var == x.var)) sub[x.var] = y;
            return true;
        }
        if (y.is_var) {
            sub[y.var] = x;
            return true;
        }
        return x.val == y.val;
    }

    static Term resolve(const std::map<std::string, Term>& sub, Term t) {
        while (t.is_var && sub.count(t.var)) t = sub.at(t.var);
        return t;
    }

    static DlAtom apply(const std::map<std::string, Term>& sub, const DlAtom& a) {
        DlAtom out = a;
        for (Term& t : out.terms) t = resolve(sub, t);
        return out;
    }

    // SLD-style unfolding with a total budget of rule applications. Residual
    // goal lists are memoized (any selection order reaches the same
    // expansions up to renaming), which prunes permuted derivations.
    void expand(std::vector<DlAtom> goals, size_t budget) {
        if (capped) return;
        // conjunction is idempotent: drop exact duplicate goals
        {
            std::set<std::string> seen;
            std::vector<DlAtom> unique;
            for (DlAtom& g : goals)
                if (seen.insert(g.to_string()).second) unique.push_back(std::move(g));
            goals = std::move(unique);
        }
        size_t i = 0;
        while (i < goals.size() && !intens.count(goals[i].pred)) ++i;
        if (i == goals.size()) {
            results.push_back(std::move(goals));
            if (results.size() > cap) capped = true;
            return;
        }
        if (budget == 0) return;
        std::string key = canonical_expansion_key(goals);
        auto it = visited.find(key);
        if (it != visited.end() && it->second >= budget) return;
        visited[key] = budget;
        DlAtom target = goals[i];
        goals.erase(goals.begin() + static_cast<long>(i));
        for (const DatalogRule& r : p.rules) {
            if (r.head.pred != target.pred) continue;
            size_t tag = counter++;
            DlAtom head = rename(r.head, tag);
            std::map<std::string, Term> sub;
            bool ok = true;
            for (size_t k = 0; ok && k < target.terms.size(); ++k)
                ok = unify(sub, head.terms[k], target.terms[k]);
            if (!ok) continue;
            std::vector<DlAtom> next;
            for (const DlAtom& b : r.body) next.push_back(apply(sub, rename(b, tag)));
            for (const DlAtom& g : goals) next.push_back(apply(sub, g));
            expand(std::move(next), budget - 1);
            if (capped) return;
        }
    }
};

} // namespace detail

// Enumerates goal expansions up to `depth` rule applications; each complete
// expansion freezes to a canonical database (fresh distinct literals for
// variables, constants preserved). Returns the first canonical database that
// the program accepts and the sentence rejects. Sound: counterexamples are
// re-verified. Complete only up to the bound.
inline ContainmentResult containment_bounded(const DatalogProgram& p, const PositiveSentence& s,
                                             size_t depth, size_t expansion_cap = 200000) {
    p.check();
    DlAtom goal;
    goal.pred = p.goal;
    size_t ar = 0;
    for (const DatalogRule& r : p.rules)
        if (r.head.pred == p.goal) ar = r.head.terms.size();
    for (size_t i = 0; i < ar; ++i) goal.terms.push_back(Term::variable("g" + std::to_string(i)));

    ContainmentResult res;
    res.depth = depth;
    // Iterative deepening: counterexamples usually live at small depths; only
    // a contained verdict pays for the full bound.
    for (size_t d = std::min<size_t>(4, depth);; d = std::min(d + 4, depth)) {
        detail::Expander ex{p, p.intensional(), expansion_cap, 0, {}, false, {}};
        ex.expand({goal}, d);

        std::map<std::string, std::vector<DlAtom>> canon;
        for (auto& atoms : ex.results) canon.emplace(detail::canonical_expansion_key(atoms), atoms);
        res.expansions = canon.size();
        res.capped = ex.capped;
        for (const auto& [key, atoms] : canon) {
            Database db;
            std::map<std::string, Value> frozen;
            for (const DlAtom& a : atoms) {
                Tuple t;
                for (const Term& term : a.terms) {
                    if (!term.is_var) {
                        t.push_back(term.val);
                        continue;
                    }
                    auto [it, inserted] = frozen.emplace(
                        term.var, Value::sym("@c" + std::to_string(frozen.size())));
                    t.push_back(it->second);
                }
                db[a.pred].insert(std::move(t));
            }
            if (!eval_on_db(s, db) && accepts(p, db)) {
                res.counterexample = std::move(db);
                return res;
            }
        }
        if (d >= depth) break;
    }
    return res;
}

} // namespace dl
} // namespace accltl
