#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "accltl/eval.hpp"
#include "accltl/logic.hpp"

namespace accltl {

// A small fact database over the pre/post/bind vocabulary, used as the
// canonical database of a sentence conjunction.
struct FactDb {
    // key: (0=pre, 1=post, 2=bind, target)
    std::map<std::pair<int, std::string>, std::set<Tuple>> facts;
    std::vector<Value> domain;

    void add(int cls, const std::string& target, Tuple t) {
        facts[{cls, target}].insert(std::move(t));
    }
};

inline bool atom_holds(const FactDb& db, const SAtom& a, const std::vector<Value>& vals) {
    auto has = [&](int cls) {
        auto it = db.facts.find({cls, a.target});
        return it != db.facts.end() && it->second.count(vals) != 0;
    };
    switch (a.kind) {
    case AtomKind::Pre:
        return has(0);
    case AtomKind::Post:
        return has(1);
    case AtomKind::Bind:
        return has(2);
    case AtomKind::Bind0: {
        auto it = db.facts.find({2, a.target});
        return it != db.facts.end() && !it->second.empty();
    }
    case AtomKind::Eq:
        return vals[0] == vals[1];
    case AtomKind::Neq:
        return vals[0] != vals[1];
    }
    return false;
}

namespace detail {

inline void dnf_matrix(const Matrix& m, std::vector<std::vector<SAtom>>& out, size_t cap) {
    switch (m.op) {
    case Matrix::Op::Leaf:
        out = {{m.atom}};
        return;
    case Matrix::Op::And: {
        out = {{}};
        for (const Matrix& k : m.kids) {
            std::vector<std::vector<SAtom>> ks;
            dnf_matrix(k, ks, cap);
            std::vector<std::vector<SAtom>> next;
            for (const auto& a : out)
                for (const auto& b : ks) {
                    std::vector<SAtom> c = a;
                    c.insert(c.end(), b.begin(), b.end());
                    next.push_back(std::move(c));
                    if (next.size() > cap)
                        throw Error(ErrorKind::Resource, "DNF expansion cap exceeded");
                }
            out = std::move(next);
        }
        return;
    }
    case Matrix::Op::Or: {
        out.clear();
        for (const Matrix& k : m.kids) {
            std::vector<std::vector<SAtom>> ks;
            dnf_matrix(k, ks, cap);
            for (auto& d : ks) out.push_back(std::move(d));
            if (out.size() > cap)
                throw Error(ErrorKind::Resource, "DNF expansion cap exceeded");
        }
        return;
    }
    }
}

// Union-find over term names with an optional constant per class.
struct TermUnify {
    std::map<std::string, std::string> parent;
    std::map<std::string, Value> constant;

    std::string find(const std::string& x) {
        auto it = parent.find(x);
        if (it == parent.end()) {
            parent[x] = x;
            return x;
        }
        if (it->second == x) return x;
        std::string r = find(it->second);
        parent[x] = r;
        return r;
    }

    bool merge(const std::string& a, const std::string& b) {
        std::string ra = find(a), rb = find(b);
        if (ra == rb) return true;
        auto ca = constant.find(ra), cb = constant.find(rb);
        if (ca != constant.end() && cb != constant.end() && !(ca->second == cb->second))
            return false;
        parent[ra] = rb;
        if (ca != constant.end() && cb == constant.end()) constant[rb] = ca->second;
        return true;
    }

    bool assign(const std::string& a, const Value& v) {
        std::string ra = find(a);
        auto it = constant.find(ra);
        if (it != constant.end()) return it->second == v;
        constant[ra] = v;
        return true;
    }
};

} // namespace detail

// The canonical databases of a conjunction of positive sentences: one per
// disjunct of the joint DNF, with equalities resolved by unification and the
// remaining variables frozen to fresh distinct literals.
inline std::vector<FactDb> canonical_databases(const std::vector<PosSentence>& sentences,
                                               size_t cap = 4096) {
    std::vector<std::vector<SAtom>> joint = {{}};
    for (size_t i = 0; i < sentences.size(); ++i) {
        PosSentence s = sentences[i].renamed("_cd" + std::to_string(i) + "_");
        std::vector<std::vector<SAtom>> ds;
        detail::dnf_matrix(s.matrix, ds, cap);
        std::vector<std::vector<SAtom>> next;
        for (const auto& a : joint)
            for (const auto& b : ds) {
                std::vector<SAtom> c = a;
                c.insert(c.end(), b.begin(), b.end());
                next.push_back(std::move(c));
                if (next.size() > cap)
                    throw Error(ErrorKind::Resource, "canonical database cap exceeded");
            }
        joint = std::move(next);
    }

    std::vector<FactDb> out;
    for (const auto& conj : joint) {
        detail::TermUnify uf;
        bool consistent = true;
        auto term_key = [&](const Term& t) {
            if (t.is_var) return "v:" + t.var;
            std::string k = "c:" + t.val.to_string();
            uf.assign(k, t.val);
            return k;
        };
        for (const SAtom& a : conj) {
            if (a.kind == AtomKind::Eq) {
                if (!uf.merge(term_key(a.terms[0]), term_key(a.terms[1]))) consistent = false;
            }
            for (const Term& t : a.terms) term_key(t); // register constants
        }
        if (!consistent) continue;
        // Inequalities: frozen classes are distinct, so only same-class or
        // equal-constant sides are inconsistent.
        for (const SAtom& a : conj) {
            if (a.kind != AtomKind::Neq) continue;
            if (uf.find(term_key(a.terms[0])) == uf.find(term_key(a.terms[1])))
                consistent = false;
        }
        if (!consistent) continue;

        FactDb db;
        std::map<std::string, Value> frozen;
        size_t counter = 0;
        std::set<Value> dom;
        auto resolve = [&](const Term& t) {
            std::string r = uf.find(term_key(t));
            auto c = uf.constant.find(r);
            if (c != uf.constant.end()) return c->second;
            auto f = frozen.find(r);
            if (f != frozen.end()) return f->second;
            Value v = Value::sym("@fz" + std::to_string(counter++));
            frozen.emplace(r, v);
            return v;
        };
        for (const SAtom& a : conj) {
            if (a.kind == AtomKind::Eq || a.kind == AtomKind::Neq) {
                for (const Term& t : a.terms) dom.insert(resolve(t));
                continue;
            }
            Tuple vals;
            for (const Term& t : a.terms) {
                Value v = resolve(t);
                dom.insert(v);
                vals.push_back(std::move(v));
            }
            int cls = a.kind == AtomKind::Pre    ? 0
                      : a.kind == AtomKind::Post ? 1
                                                 : 2;
            db.add(cls, a.target, std::move(vals));
        }
        db.domain.assign(dom.begin(), dom.end());
        out.push_back(std::move(db));
    }
    return out;
}

// Does the conjunction of `antecedents` imply `consequent`? Decided exactly
// for positive sentences by checking the consequent on every canonical
// database of the antecedent.
inline bool implies(const std::vector<PosSentence>& antecedents, const PosSentence& consequent,
                    size_t cap = 4096) {
    for (FactDb db : canonical_databases(antecedents, cap)) {
        std::set<Value> dom(db.domain.begin(), db.domain.end());
        for (const Value& v : consequent.constants()) dom.insert(v);
        db.domain.assign(dom.begin(), dom.end());
        if (!eval_sentence(consequent, db)) return false;
    }
    return true;
}

} // namespace accltl
