#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "accltl/eval.hpp"
#include "accltl/parser.hpp"

namespace accltl {

// Guard of one transition: psi- (conjunction of negated IsBind-free
// sentences) and psi+ (one positive sentence).
struct Guard {
    PosSentence positive = PosSentence::truth();
    std::vector<PosSentence> negated;

    std::string to_string() const {
        std::ostringstream os;
        if (!negated.empty()) {
            os << "neg:";
            for (const PosSentence& s : negated) os << " " << s.to_string();
            os << " ";
        }
        os << "pos: " << positive.to_string();
        return os.str();
    }
};

inline void check_guard(const Guard& g, const Schema& schema) {
    check_sentence(g.positive, schema);
    if (g.positive.mentions_neq())
        throw Error(ErrorKind::Validation,
                    "guard sentences are positive-existential; '!=' is not allowed");
    for (const PosSentence& s : g.negated) {
        check_sentence(s, schema);
        if (s.mentions_bind())
            throw Error(ErrorKind::Validation,
                        "negated guard part cannot mention IsBind: " + s.to_string());
        if (s.mentions_neq())
            throw Error(ErrorKind::Validation,
                        "guard sentences are positive-existential; '!=' is not allowed");
    }
}

struct AutTransition {
    std::string from, to;
    Guard guard;
};

struct AAutomaton {
    std::vector<std::string> states;
    std::string initial;
    std::set<std::string> accepting;
    std::vector<AutTransition> transitions;
    std::set<Value> constants;

    void check(const Schema& schema) const {
        std::set<std::string> sset(states.begin(), states.end());
        if (sset.size() != states.size())
            throw Error(ErrorKind::Validation, "duplicate automaton states");
        if (!sset.count(initial))
            throw Error(ErrorKind::Validation, "initial state not declared");
        for (const std::string& s : accepting)
            if (!sset.count(s))
                throw Error(ErrorKind::Validation, "accepting state " + s + " not declared");
        for (const AutTransition& t : transitions) {
            if (!sset.count(t.from) || !sset.count(t.to))
                throw Error(ErrorKind::Validation, "transition references unknown state");
            check_guard(t.guard, schema);
        }
    }

    std::set<Value> all_constants(const Schema& schema) const {
        std::set<Value> out = constants;
        for (const Value& v : schema.constants()) out.insert(v);
        for (const AutTransition& t : transitions) {
            for (const Value& v : t.guard.positive.constants()) out.insert(v);
            for (const PosSentence& s : t.guard.negated)
                for (const Value& v : s.constants()) out.insert(v);
        }
        return out;
    }
};

inline bool guard_sat(const Guard& g, const TransitionStructure& m) {
    if (!eval_sentence(g.positive, m)) return false;
    for (const PosSentence& s : g.negated)
        if (eval_sentence(s, m)) return false;
    return true;
}

// Run semantics: some state sequence from the initial state to an accepting
// state whose guards are satisfied by the successive transition structures.
// The empty path is accepted iff the initial state is accepting.
inline bool run_accepts(const AAutomaton& a, const AccessPath& path, const Instance& initial,
                        const Schema& schema) {
    check_path(path, schema);
    std::set<Value> extra = a.all_constants(schema);
    std::set<std::string> current = {a.initial};
    std::vector<Instance> seq = instance_sequence(path, initial, schema);
    for (size_t i = 0; i < path.length() && !current.empty(); ++i) {
        Transition t{seq[i], path.steps[i].access, seq[i + 1]};
        TransitionStructure m = structure_of(t, StructureMode::Full, extra);
        std::set<std::string> next;
        for (const AutTransition& tr : a.transitions) {
            if (!current.count(tr.from) || next.count(tr.to)) continue;
            if (guard_sat(tr.guard, m)) next.insert(tr.to);
        }
        current = std::move(next);
    }
    for (const std::string& s : current)
        if (a.accepting.count(s)) return true;
    return false;
}

// Bounded emptiness: shortest accepted path over the given universe, or none
// (meaning empty up to the bounds). The initial instance is empty, matching
// the emptiness convention used by the Datalog reduction.
inline std::optional<AccessPath> bounded_empty(const AAutomaton& a, const Schema& schema,
                                               size_t max_len,
                                               const std::vector<Value>& universe,
                                               size_t max_new, const SearchFilters& filters = {},
                                               const Instance& initial = {}) {
    std::vector<Value> full_universe = universe;
    std::set<Value> seen(universe.begin(), universe.end());
    for (const Value& v : a.all_constants(schema))
        if (seen.insert(v).second) full_universe.push_back(v);
    std::sort(full_universe.begin(), full_universe.end());
    return search_paths(
        schema, initial, full_universe, max_len, max_new, filters,
        [&](const AccessPath& p) { return run_accepts(a, p, initial, schema); },
        /*min_len=*/0);
}

// ---------------------------------------------------------------------------
// Text format (.aau)
// ---------------------------------------------------------------------------

namespace detail {

// isbind0 in guard sentences is shorthand for an existentially closed isbind.
inline PosSentence expand_bind0(PosSentence s, const Schema& schema) {
    size_t fresh = 0;
    Matrix m = s.matrix.map_atoms([&](const SAtom& a) -> Matrix {
        if (a.kind != AtomKind::Bind0) return Matrix::leaf(a);
        const AccessMethod& method = schema.method(a.target);
        SAtom b;
        b.kind = AtomKind::Bind;
        b.target = a.target;
        for (size_t i = 0; i < method.inputs.size(); ++i) {
            std::string v = "_b0v" + std::to_string(fresh++);
            s.vars.push_back(v);
            b.terms.push_back(Term::variable(v));
        }
        return Matrix::leaf(b);
    });
    s.matrix = std::move(m);
    return s;
}

} // namespace detail

inline AAutomaton parse_automaton(const std::string& text, const Schema& schema,
                                  const std::string& source = "<automaton>") {
    AAutomaton a;
    // Statements are separated by ';' or line breaks; trans statements stay
    // on one line.
    std::vector<std::string> statements;
    for (const std::string& line : detail::logical_lines(text)) {
        std::istringstream is(line);
        std::string piece;
        if (line.rfind("trans", 0) == 0) {
            statements.push_back(line);
            continue;
        }
        std::string cur;
        for (char c : line) {
            if (c == ';') {
                cur = detail::trim(cur);
                if (!cur.empty()) statements.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        cur = detail::trim(cur);
        if (!cur.empty()) statements.push_back(cur);
    }
    for (const std::string& st : statements) {
        std::istringstream is(st);
        std::string kw;
        is >> kw;
        if (kw == "states") {
            std::string s;
            while (is >> s) a.states.push_back(s);
        } else if (kw == "initial") {
            is >> a.initial;
        } else if (kw == "accepting") {
            std::string s;
            while (is >> s) a.accepting.insert(s);
        } else if (kw == "constants") {
            std::string rest;
            std::getline(is, rest);
            rest = detail::trim(rest);
            if (rest.empty() || rest.front() != '{' || rest.back() != '}')
                throw Error::parse(source, "expected constants { lit, ... }");
            std::string body = rest.substr(1, rest.size() - 2);
            std::string spaced;
            bool in_str = false;
            for (char c : body) {
                if (c == '"') in_str = !in_str;
                spaced.push_back((c == ',' && !in_str) ? ' ' : c);
            }
            SexpReader r(spaced, source);
            for (const Sexp& sx : r.read_all()) a.constants.insert(value_from_sexp(sx));
        } else if (kw == "trans") {
            std::string from, arrow, to;
            is >> from >> arrow >> to;
            if (arrow != "->") throw Error::parse(source, "expected: trans s -> s' ...");
            std::string rest;
            std::getline(is, rest);
            rest = detail::trim(rest);
            AutTransition tr;
            tr.from = from;
            tr.to = to;
            size_t pos_at = rest.find("pos:");
            size_t neg_at = rest.find("neg:");
            std::string neg_part, pos_part;
            if (neg_at != std::string::npos) {
                size_t end = pos_at == std::string::npos ? rest.size() : pos_at;
                neg_part = detail::trim(rest.substr(neg_at + 4, end - neg_at - 4));
            }
            if (pos_at != std::string::npos) pos_part = detail::trim(rest.substr(pos_at + 4));
            if (!pos_part.empty()) {
                SexpReader r(pos_part, source);
                auto all = r.read_all();
                if (all.size() != 1)
                    throw Error::parse(source, "pos: takes exactly one sentence");
                tr.guard.positive = detail::expand_bind0(sentence_from_sexp(all[0]), schema);
            }
            if (!neg_part.empty()) {
                SexpReader r(neg_part, source);
                for (const Sexp& sx : r.read_all())
                    tr.guard.negated.push_back(sentence_from_sexp(sx));
            }
            a.transitions.push_back(std::move(tr));
        } else {
            throw Error::parse(source, "unknown automaton statement '" + kw + "'");
        }
    }
    a.check(schema);
    return a;
}

inline std::string automaton_to_string(const AAutomaton& a) {
    std::ostringstream os;
    os << "states";
    for (const std::string& s : a.states) os << " " << s;
    os << ";\ninitial " << a.initial << ";\naccepting";
    for (const std::string& s : a.accepting) os << " " << s;
    os << ";\n";
    if (!a.constants.empty()) {
        os << "constants {";
        bool first = true;
        for (const Value& v : a.constants) {
            os << (first ? " " : ", ") << v.to_string();
            first = false;
        }
        os << " }\n";
    }
    for (const AutTransition& t : a.transitions) {
        os << "trans " << t.from << " -> " << t.to;
        if (!t.guard.negated.empty()) {
            os << " neg:";
            for (const PosSentence& s : t.guard.negated) os << " " << s.to_string();
        }
        os << " pos: " << t.guard.positive.to_string() << "\n";
    }
    return os.str();
}

} // namespace accltl
