#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "accltl/automaton.hpp"
#include "accltl/classify.hpp"

namespace accltl {

// Compiles a binding-positive formula (no inequalities) into an equivalent
// A-automaton: negation normal form at the LTL level with the finite-word
// duals of X and U, then a subformula-set tableau. Positively required
// sentences conjoin into psi+, negatively required ones into psi- (IsBind-free
// by binding-positivity). 0-ary binding flags are factored out of atom
// sentences first; a negated flag becomes the disjunction of the other
// methods' flags.
class FormulaCompiler {
  public:
    FormulaCompiler(const Schema& schema, size_t disjunct_cap = 4096, size_t state_cap = 4096)
        : schema_(schema), disjunct_cap_(disjunct_cap), state_cap_(state_cap) {}

    AAutomaton compile(const AccFormula& f) {
        FragmentReport rep = classify(f);
        if (rep.uses_inequalities)
            throw Error(ErrorKind::Fragment, "compile: inequalities are not expressible in "
                                             "A-automaton guards");
        int root = build(f, true);
        return tableau(root, f);
    }

  private:
    // ---- NNF node pool -----------------------------------------------------
    struct Node {
        enum class Kind : uint8_t {
            True,
            False,
            SentPos,
            SentNeg,
            Flag,
            And,
            Or,
            Next,     // strong: false at the last position
            WeakNext, // dual
            Until,
            Release,
        };
        Kind kind;
        int sentence = -1;  // SentPos / SentNeg
        std::string method; // Flag
        std::vector<int> kids;
    };

    const Schema& schema_;
    size_t disjunct_cap_, state_cap_;
    std::vector<Node> pool_;
    std::map<std::string, int> node_index_;
    std::vector<PosSentence> sentences_;
    std::map<std::string, int> sentence_index_;

    int intern_sentence(const PosSentence& s) {
        std::string key = s.to_string();
        auto it = sentence_index_.find(key);
        if (it != sentence_index_.end()) return it->second;
        sentences_.push_back(s);
        sentence_index_.emplace(key, static_cast<int>(sentences_.size() - 1));
        return static_cast<int>(sentences_.size() - 1);
    }

    int intern(Node n) {
        std::string key = std::to_string(static_cast<int>(n.kind)) + "|" +
                          std::to_string(n.sentence) + "|" + n.method + "|";
        for (int k : n.kids) key += std::to_string(k) + ",";
        auto it = node_index_.find(key);
        if (it != node_index_.end()) return it->second;
        pool_.push_back(std::move(n));
        node_index_.emplace(key, static_cast<int>(pool_.size() - 1));
        return static_cast<int>(pool_.size() - 1);
    }

    int mk(Node::Kind k, std::vector<int> kids = {}) {
        Node n;
        n.kind = k;
        n.kids = std::move(kids);
        return intern(std::move(n));
    }
    int mk_sent(const PosSentence& s, bool positive) {
        if (s.is_true()) return mk(positive ? Node::Kind::True : Node::Kind::False);
        if (s.is_false()) return mk(positive ? Node::Kind::False : Node::Kind::True);
        if (!positive && s.mentions_bind())
            throw Error(ErrorKind::Fragment,
                        "compile: formula is not binding-positive (negated sentence mentions "
                        "IsBind): " +
                            s.to_string());
        Node n;
        n.kind = positive ? Node::Kind::SentPos : Node::Kind::SentNeg;
        n.sentence = intern_sentence(s);
        return intern(std::move(n));
    }
    int mk_flag(const std::string& method) {
        Node n;
        n.kind = Node::Kind::Flag;
        n.method = method;
        return intern(std::move(n));
    }

    int negate(int id) {
        const Node n = pool_[id];
        switch (n.kind) {
        case Node::Kind::True:
            return mk(Node::Kind::False);
        case Node::Kind::False:
            return mk(Node::Kind::True);
        case Node::Kind::SentPos:
            return mk_sent(sentences_[n.sentence], false);
        case Node::Kind::SentNeg:
            return mk_sent(sentences_[n.sentence], true);
        case Node::Kind::Flag: {
            // Exactly one method flag holds per transition.
            std::vector<int> others;
            for (const auto& [name, _] : schema_.methods())
                if (name != n.method) others.push_back(mk_flag(name));
            return mk(Node::Kind::Or, std::move(others));
        }
        case Node::Kind::And: {
            std::vector<int> ks;
            for (int k : n.kids) ks.push_back(negate(k));
            return mk(Node::Kind::Or, std::move(ks));
        }
        case Node::Kind::Or: {
            std::vector<int> ks;
            for (int k : n.kids) ks.push_back(negate(k));
            return mk(Node::Kind::And, std::move(ks));
        }
        case Node::Kind::Next:
            return mk(Node::Kind::WeakNext, {negate(n.kids[0])});
        case Node::Kind::WeakNext:
            return mk(Node::Kind::Next, {negate(n.kids[0])});
        case Node::Kind::Until:
            return mk(Node::Kind::Release, {negate(n.kids[0]), negate(n.kids[1])});
        case Node::Kind::Release:
            return mk(Node::Kind::Until, {negate(n.kids[0]), negate(n.kids[1])});
        }
        return id;
    }

    // ---- IsBind0 factoring -------------------------------------------------

    static Matrix substitute_bind0(const Matrix& m, const std::string& method, bool value) {
        return m.map_atoms([&](const SAtom& a) -> Matrix {
            if (a.kind == AtomKind::Bind0 && a.target == method)
                return value ? Matrix::truth() : Matrix::falsity();
            return Matrix::leaf(a);
        });
    }

    static Matrix simplify(const Matrix& m) {
        if (m.op == Matrix::Op::Leaf) return m;
        std::vector<Matrix> kids;
        for (const Matrix& k : m.kids) {
            Matrix s = simplify(k);
            if (m.op == Matrix::Op::And) {
                if (s.is_false()) return Matrix::falsity();
                if (s.is_true()) continue;
            } else {
                if (s.is_true()) return Matrix::truth();
                if (s.is_false()) continue;
            }
            kids.push_back(std::move(s));
        }
        if (kids.size() == 1) return kids[0];
        Matrix out;
        out.op = m.op;
        out.kids = std::move(kids);
        return out;
    }

    // An atom sentence containing 0-ary flags becomes a disjunction over which
    // of its methods (or none) the transition uses; flags move to the LTL
    // level where negation can be resolved by method exclusivity.
    int build_atom(const PosSentence& s) {
        std::set<std::string> methods;
        s.for_each_atom([&](const SAtom& a) {
            if (a.kind == AtomKind::Bind0) methods.insert(a.target);
        });
        if (methods.empty()) return mk_sent(s, true);

        auto variant = [&](const std::string& used) {
            PosSentence v;
            v.vars = s.vars;
            Matrix m = s.matrix;
            for (const std::string& meth : methods)
                m = substitute_bind0(m, meth, meth == used);
            v.matrix = simplify(m);
            return detail::prune_unused_vars(std::move(v));
        };

        std::vector<int> disjuncts;
        for (const std::string& meth : methods)
            disjuncts.push_back(
                mk(Node::Kind::And, {mk_flag(meth), mk_sent(variant(meth), true)}));
        // The access uses none of the mentioned methods.
        std::vector<int> none = {mk_sent(variant(""), true)};
        for (const std::string& meth : methods) none.push_back(negate(mk_flag(meth)));
        disjuncts.push_back(mk(Node::Kind::And, std::move(none)));
        return mk(Node::Kind::Or, std::move(disjuncts));
    }

    // NNF construction with the polarity pushed down, so that even stacks of
    // negations cancel before any binding-positivity complaint.
    int build(const AccFormula& f, bool positive) {
        switch (f.op()) {
        case AccFormula::Op::Atom:
            return positive ? build_atom(f.sentence()) : negate(build_atom(f.sentence()));
        case AccFormula::Op::Not:
            return build(*f.kids()[0], !positive);
        case AccFormula::Op::And:
        case AccFormula::Op::Or: {
            bool conj = (f.op() == AccFormula::Op::And) == positive;
            std::vector<int> ks;
            for (const auto& k : f.kids()) ks.push_back(build(*k, positive));
            return mk(conj ? Node::Kind::And : Node::Kind::Or, std::move(ks));
        }
        case AccFormula::Op::Next:
            return mk(positive ? Node::Kind::Next : Node::Kind::WeakNext,
                      {build(*f.kids()[0], positive)});
        case AccFormula::Op::Until:
            return mk(positive ? Node::Kind::Until : Node::Kind::Release,
                      {build(*f.kids()[0], positive), build(*f.kids()[1], positive)});
        }
        throw Error(ErrorKind::Validation, "unreachable formula op");
    }

    // ---- Tableau -----------------------------------------------------------

    struct Disjunct {
        std::set<int> pos, neg;        // sentence ids
        std::set<std::string> flags;   // required method (at most one)
        std::set<int> next;            // obligations for the next position
        bool strong = false;           // some obligation came through a strong X

        bool merge(const Disjunct& o) {
            for (const std::string& m : o.flags) flags.insert(m);
            if (flags.size() > 1) return false;
            for (int s : o.pos) pos.insert(s);
            for (int s : o.neg) neg.insert(s);
            for (int s : pos)
                if (neg.count(s)) return false;
            for (int n : o.next) next.insert(n);
            strong = strong || o.strong;
            return true;
        }

        std::string key() const {
            std::string k;
            for (int s : pos) k += "p" + std::to_string(s);
            for (int s : neg) k += "n" + std::to_string(s);
            for (const std::string& m : flags) k += "f" + m;
            for (int n : next) k += "x" + std::to_string(n);
            k += strong ? "S" : "W";
            return k;
        }
    };

    std::vector<Disjunct> combine(const std::vector<Disjunct>& a,
                                  const std::vector<Disjunct>& b) {
        std::vector<Disjunct> out;
        std::set<std::string> seen;
        for (const Disjunct& x : a)
            for (const Disjunct& y : b) {
                Disjunct z = x;
                if (!z.merge(y)) continue;
                if (seen.insert(z.key()).second) out.push_back(std::move(z));
                if (out.size() > disjunct_cap_)
                    throw Error(ErrorKind::Resource, "compile: disjunct cap exceeded");
            }
        return out;
    }

    std::vector<Disjunct> dnf(int id) {
        const Node n = pool_[id];
        switch (n.kind) {
        case Node::Kind::True:
            return {Disjunct{}};
        case Node::Kind::False:
            return {};
        case Node::Kind::SentPos: {
            Disjunct d;
            d.pos = {n.sentence};
            return {d};
        }
        case Node::Kind::SentNeg: {
            Disjunct d;
            d.neg = {n.sentence};
            return {d};
        }
        case Node::Kind::Flag: {
            Disjunct d;
            d.flags = {n.method};
            return {d};
        }
        case Node::Kind::And: {
            std::vector<Disjunct> acc = {Disjunct{}};
            for (int k : n.kids) acc = combine(acc, dnf(k));
            return acc;
        }
        case Node::Kind::Or: {
            std::vector<Disjunct> acc;
            std::set<std::string> seen;
            for (int k : n.kids)
                for (const Disjunct& d : dnf(k))
                    if (seen.insert(d.key()).second) acc.push_back(d);
            return acc;
        }
        case Node::Kind::Next: {
            Disjunct d;
            d.next = {n.kids[0]};
            d.strong = true;
            return {d};
        }
        case Node::Kind::WeakNext: {
            Disjunct d;
            d.next = {n.kids[0]};
            return {d};
        }
        case Node::Kind::Until: {
            // f U g  ==  g  \/  (f /\ X(f U g))
            std::vector<Disjunct> out = dnf(n.kids[1]);
            Disjunct cont;
            cont.next = {id};
            cont.strong = true;
            std::vector<Disjunct> rest = combine(dnf(n.kids[0]), {cont});
            std::set<std::string> seen;
            std::vector<Disjunct> merged;
            for (const Disjunct& d : out)
                if (seen.insert(d.key()).second) merged.push_back(d);
            for (const Disjunct& d : rest)
                if (seen.insert(d.key()).second) merged.push_back(d);
            return merged;
        }
        case Node::Kind::Release: {
            // f R g  ==  g /\ (f \/ WX(f R g))
            Disjunct cont;
            cont.next = {id};
            std::vector<Disjunct> right = dnf(n.kids[0]);
            right.push_back(cont);
            return combine(dnf(n.kids[1]), right);
        }
        }
        return {};
    }

    PosSentence flag_sentence(const std::string& method) const {
        const AccessMethod& m = schema_.method(method);
        PosSentence s;
        SAtom a;
        a.kind = AtomKind::Bind;
        a.target = method;
        for (size_t i = 0; i < m.inputs.size(); ++i) {
            std::string v = "_fb" + std::to_string(i);
            s.vars.push_back(v);
            a.terms.push_back(Term::variable(v));
        }
        s.matrix = Matrix::leaf(a);
        return s;
    }

    struct StateKey {
        std::vector<int> obligations;
        bool strong;
        bool operator<(const StateKey& o) const {
            if (obligations != o.obligations) return obligations < o.obligations;
            return strong < o.strong;
        }
    };

    AAutomaton tableau(int root, const AccFormula& f) {
        AAutomaton aut;
        std::map<StateKey, std::string> names;
        std::vector<StateKey> worklist;

        auto state_name = [&](const StateKey& k) {
            auto it = names.find(k);
            if (it != names.end()) return it->second;
            std::string name = "s" + std::to_string(names.size());
            names.emplace(k, name);
            aut.states.push_back(name);
            if (!k.strong) aut.accepting.insert(name);
            worklist.push_back(k);
            if (names.size() > state_cap_)
                throw Error(ErrorKind::Resource, "compile: state cap exceeded");
            return name;
        };

        StateKey init{{root}, true};
        aut.initial = state_name(init);

        for (size_t w = 0; w < worklist.size(); ++w) {
            StateKey key = worklist[w];
            std::string from = names.at(key);
            std::vector<Disjunct> acc = {Disjunct{}};
            for (int ob : key.obligations) acc = combine(acc, dnf(ob));
            std::set<std::string> emitted;
            for (const Disjunct& d : acc) {
                Guard g;
                std::vector<PosSentence> pos_parts;
                for (const std::string& m : d.flags) pos_parts.push_back(flag_sentence(m));
                for (int sid : d.pos) pos_parts.push_back(sentences_[sid]);
                g.positive =
                    pos_parts.empty() ? PosSentence::truth() : sentence_conjunction(pos_parts);
                for (int sid : d.neg) g.negated.push_back(sentences_[sid]);
                StateKey tgt{std::vector<int>(d.next.begin(), d.next.end()), d.strong};
                std::string to = state_name(tgt);
                std::string sig = from + "|" + g.to_string() + "|" + to;
                if (!emitted.insert(sig).second) continue;
                aut.transitions.push_back(AutTransition{from, to, std::move(g)});
            }
        }

        std::set<Value> cs = f.constants();
        for (const Value& v : schema_.constants()) cs.insert(v);
        aut.constants = std::move(cs);
        return aut;
    }
};

inline AAutomaton compile_formula(const AccFormula& f, const Schema& schema) {
    return FormulaCompiler(schema).compile(f);
}

} // namespace accltl
