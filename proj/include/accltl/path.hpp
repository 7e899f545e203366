#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "accltl/instance.hpp"
#include "accltl/schema.hpp"

namespace accltl {

// An access: a method plus a binding for its input positions.
struct Access {
    std::string method;
    std::map<size_t, Value> binding; // key set = Inp(method)

    friend bool operator==(const Access& a, const Access& b) {
        return a.method == b.method && a.binding == b.binding;
    }
    friend bool operator!=(const Access& a, const Access& b) { return !(a == b); }
    friend bool operator<(const Access& a, const Access& b) {
        if (a.method != b.method) return a.method < b.method;
        return a.binding < b.binding;
    }

    // Binding values in ascending position order.
    Tuple binding_tuple() const {
        Tuple t;
        for (const auto& [_, v] : binding) t.push_back(v);
        return t;
    }

    std::string to_string() const {
        std::ostringstream os;
        os << method << "(";
        bool first = true;
        for (const auto& [_, v] : binding) {
            if (!first) os << ",";
            first = false;
            os << v.to_string();
        }
        os << ")";
        return os.str();
    }
};

using Response = std::set<Tuple>;

struct PathStep {
    Access access;
    Response response;

    friend bool operator==(const PathStep& a, const PathStep& b) {
        return a.access == b.access && a.response == b.response;
    }
    friend bool operator<(const PathStep& a, const PathStep& b) {
        if (!(a.access == b.access)) return a.access < b.access;
        return a.response < b.response;
    }
};

// A finite sequence of accesses and responses. May be empty.
struct AccessPath {
    std::vector<PathStep> steps;

    size_t length() const { return steps.size(); }
    bool empty() const { return steps.empty(); }

    friend bool operator==(const AccessPath& a, const AccessPath& b) {
        return a.steps == b.steps;
    }
};

// One LTS transition: post = pre extended with response tuples in the
// accessed relation only.
struct Transition {
    Instance pre;
    Access access;
    Instance post;

    friend bool operator==(const Transition& a, const Transition& b) {
        return a.pre == b.pre && a.access == b.access && a.post == b.post;
    }
    friend bool operator<(const Transition& a, const Transition& b) {
        if (!(a.pre == b.pre)) return a.pre < b.pre;
        if (!(a.access == b.access)) return a.access < b.access;
        return a.post < b.post;
    }
};

inline void check_access(const Access& a, const Schema& schema) {
    const AccessMethod& m = schema.method(a.method);
    const Relation& rel = schema.relation(m.relation);
    std::set<size_t> keys;
    for (const auto& [pos, v] : a.binding) {
        keys.insert(pos);
        if (pos < 1 || pos > rel.arity())
            throw Error(ErrorKind::Schema, "binding position " + std::to_string(pos) +
                                               " out of range for " + rel.name);
        if (!rel.positions[pos - 1].admits(v))
            throw Error(ErrorKind::Type, "binding value " + v.to_string() +
                                             " not admitted at position " + std::to_string(pos) +
                                             " of " + rel.name);
    }
    if (keys != m.inputs)
        throw Error(ErrorKind::Schema,
                    "binding of " + a.method + " must cover exactly its input positions");
}

// True iff every response tuple is well-typed for the accessed relation and
// agrees with the binding on the input positions. The empty response is
// always well-formed.
inline bool well_formed_response(const Access& access, const Response& response,
                                 const Schema& schema) {
    check_access(access, schema);
    const AccessMethod& m = schema.method(access.method);
    const Relation& rel = schema.relation(m.relation);
    for (const Tuple& t : response) {
        if (!tuple_well_typed(rel, t)) return false;
        for (const auto& [pos, v] : access.binding)
            if (t[pos - 1] != v) return false;
    }
    return true;
}

inline void check_path(const AccessPath& path, const Schema& schema) {
    for (size_t i = 0; i < path.steps.size(); ++i)
        if (!well_formed_response(path.steps[i].access, path.steps[i].response, schema))
            throw Error(ErrorKind::Validation,
                        "step " + std::to_string(i + 1) + " has an ill-formed response");
}

// Conf(p, I0): the initial instance unioned with every returned tuple, stored
// under the accessed relation.
inline Instance conf(const AccessPath& path, const Instance& initial, const Schema& schema) {
    Instance out = initial;
    for (const PathStep& s : path.steps) {
        const std::string& rel = schema.method(s.access.method).relation;
        for (const Tuple& t : s.response) out.add(rel, t);
    }
    return out;
}

// The sequence I_1 .. I_{n+1} of instances along the path, starting from the
// initial instance.
inline std::vector<Instance> instance_sequence(const AccessPath& path, const Instance& initial,
                                               const Schema& schema) {
    std::vector<Instance> out;
    out.push_back(initial);
    for (const PathStep& s : path.steps) {
        Instance next = out.back();
        const std::string& rel = schema.method(s.access.method).relation;
        for (const Tuple& t : s.response) next.add(rel, t);
        out.push_back(std::move(next));
    }
    return out;
}

inline Transition transition_at(const AccessPath& path, size_t position, const Instance& initial,
                                const Schema& schema) {
    if (position < 1 || position > path.length())
        throw Error(ErrorKind::Domain, "position out of range");
    auto seq = instance_sequence(path, initial, schema);
    return Transition{seq[position - 1], path.steps[position - 1].access, seq[position]};
}

// Grounded in I0: every binding value occurs in I0 or in an earlier response.
inline bool is_grounded(const AccessPath& path, const Instance& initial, const Schema& schema) {
    check_path(path, schema);
    std::set<Value> known = initial.active_values();
    for (const PathStep& s : path.steps) {
        for (const auto& [_, v] : s.access.binding)
            if (!known.count(v)) return false;
        for (const Tuple& t : s.response) known.insert(t.begin(), t.end());
    }
    return true;
}

// S-idempotent: any two steps with the same access whose method is in
// `methods` return equal responses.
inline bool is_idempotent(const AccessPath& path, const std::set<std::string>& methods,
                          const Schema& schema) {
    check_path(path, schema);
    std::map<Access, Response> seen;
    for (const PathStep& s : path.steps) {
        if (!methods.count(s.access.method)) continue;
        auto [it, inserted] = seen.emplace(s.access, s.response);
        if (!inserted && it->second != s.response) return false;
    }
    return true;
}

inline Response matching_tuples(const Instance& inst, const Access& access,
                                const Schema& schema) {
    Response out;
    const std::string& rel = schema.method(access.method).relation;
    for (const Tuple& t : inst.tuples(rel)) {
        bool match = true;
        for (const auto& [pos, v] : access.binding)
            if (t[pos - 1] != v) match = false;
        if (match) out.insert(t);
    }
    return out;
}

// S-exact: some instance I makes every response of an S-method access equal
// to the matching tuples of I. It suffices to check I = Conf(p, I0): any
// witness satisfies response = matching set there as well, since responses
// are contained in the configuration and any extra matching tuple of the
// configuration was returned by some access, hence must appear in every
// exact response with that binding.
inline bool is_exact(const AccessPath& path, const std::set<std::string>& methods,
                     const Instance& initial, const Schema& schema) {
    check_path(path, schema);
    Instance witness = conf(path, initial, schema);
    for (const PathStep& s : path.steps) {
        if (!methods.count(s.access.method)) continue;
        if (s.response != matching_tuples(witness, s.access, schema)) return false;
    }
    return true;
}

// All candidate response tuples for an access over a finite literal universe.
inline std::vector<Tuple> candidate_tuples(const Access& access, const Schema& schema,
                                           const std::vector<Value>& universe) {
    const AccessMethod& m = schema.method(access.method);
    const Relation& rel = schema.relation(m.relation);
    std::vector<std::vector<Value>> choices(rel.arity());
    for (size_t pos = 1; pos <= rel.arity(); ++pos) {
        auto it = access.binding.find(pos);
        if (it != access.binding.end()) {
            choices[pos - 1] = {it->second};
        } else {
            for (const Value& v : universe)
                if (rel.positions[pos - 1].admits(v)) choices[pos - 1].push_back(v);
        }
    }
    std::vector<Tuple> out;
    Tuple current(rel.arity());
    // Lexicographic product over per-position choices.
    auto rec = [&](auto&& self, size_t pos) -> void {
        if (pos == rel.arity()) {
            out.push_back(current);
            return;
        }
        for (const Value& v : choices[pos]) {
            current[pos] = v;
            self(self, pos + 1);
        }
    };
    for (const auto& c : choices)
        if (c.empty()) return out; // some position has no admissible value
    rec(rec, 0);
    return out;
}

// All well-formed responses of at most max_new tuples over the universe,
// in deterministic order (by size, then lexicographic).
inline std::vector<Response> enumerate_responses(const Access& access, const Schema& schema,
                                                 const std::vector<Value>& universe,
                                                 size_t max_new) {
    std::vector<Tuple> cands = candidate_tuples(access, schema, universe);
    std::vector<Response> out;
    out.push_back({}); // empty response is always legal
    std::vector<size_t> idx;
    auto rec = [&](auto&& self, size_t start, Response& acc) -> void {
        if (acc.size() == max_new) return;
        for (size_t i = start; i < cands.size(); ++i) {
            acc.insert(cands[i]);
            out.push_back(acc);
            self(self, i + 1, acc);
            acc.erase(cands[i]);
        }
    };
    Response acc;
    if (max_new > 0) rec(rec, 0, acc);
    std::stable_sort(out.begin(), out.end(),
                     [](const Response& a, const Response& b) { return a.size() < b.size(); });
    return out;
}

// All transitions (instance, access, instance ∪ r) for well-formed responses
// r of at most max_new tuples over the universe. Deduplicated as a set.
inline std::set<Transition> successors(const Instance& instance, const Access& access,
                                       const Schema& schema, const std::vector<Value>& universe,
                                       size_t max_new) {
    check_access(access, schema);
    std::set<Transition> out;
    const std::string& rel = schema.method(access.method).relation;
    for (const Response& r : enumerate_responses(access, schema, universe, max_new)) {
        Instance post = instance;
        for (const Tuple& t : r) post.add(rel, t);
        out.insert(Transition{instance, access, std::move(post)});
    }
    return out;
}

} // namespace accltl
