#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "accltl/classify.hpp"
#include "accltl/eval.hpp"

namespace accltl {

// ---------------------------------------------------------------------------
// Boundedness (instance and binding bounds for the 0-ary fragments)
// ---------------------------------------------------------------------------

struct ZeroAryBounds {
    size_t instance_bound = 0; // total tuples beyond the initial instance
    size_t binding_bound = 0;  // bound + one default binding per method
};

inline ZeroAryBounds bounds_of(const AccFormula& f, const Schema& schema) {
    FragmentReport rep = classify(f);
    if (rep.uses_full_bindings)
        throw Error(ErrorKind::Fragment, "bounds_of requires the 0-ary binding fragment");
    ZeroAryBounds b;
    for (const PosSentence& q : qf_closure(f)) b.instance_bound += q.relational_atom_count();
    b.binding_bound = b.instance_bound + schema.methods().size();
    return b;
}

// ---------------------------------------------------------------------------
// Propositional finite-word LTL
// ---------------------------------------------------------------------------

class PropFormula;
using PropPtr = std::shared_ptr<const PropFormula>;

class PropFormula {
  public:
    enum class Op : uint8_t { Prop, Not, And, Or, Next, Until };

    static PropPtr prop(int id) {
        auto f = std::make_shared<PropFormula>();
        f->op_ = Op::Prop;
        f->prop_ = id;
        return f;
    }
    static PropPtr negation(PropPtr a) {
        auto f = std::make_shared<PropFormula>();
        f->op_ = Op::Not;
        f->kids_ = {std::move(a)};
        return f;
    }
    static PropPtr conj(std::vector<PropPtr> ks) {
        auto f = std::make_shared<PropFormula>();
        f->op_ = Op::And;
        f->kids_ = std::move(ks);
        return f;
    }
    static PropPtr disj(std::vector<PropPtr> ks) {
        auto f = std::make_shared<PropFormula>();
        f->op_ = Op::Or;
        f->kids_ = std::move(ks);
        return f;
    }
    static PropPtr next(PropPtr a) {
        auto f = std::make_shared<PropFormula>();
        f->op_ = Op::Next;
        f->kids_ = {std::move(a)};
        return f;
    }
    static PropPtr until(PropPtr a, PropPtr b) {
        auto f = std::make_shared<PropFormula>();
        f->op_ = Op::Until;
        f->kids_ = {std::move(a), std::move(b)};
        return f;
    }
    static PropPtr truth() { return conj({}); }
    static PropPtr falsity() { return disj({}); }
    static PropPtr finally_(PropPtr a) { return until(truth(), std::move(a)); }
    static PropPtr globally(PropPtr a) {
        return negation(until(truth(), negation(std::move(a))));
    }
    // weak next: true at the last position
    static PropPtr weak_next(PropPtr a) { return negation(next(negation(std::move(a)))); }

    Op op() const { return op_; }
    int prop_id() const { return prop_; }
    const std::vector<PropPtr>& kids() const { return kids_; }

  private:
    Op op_ = Op::And;
    int prop_ = -1;
    std::vector<PropPtr> kids_;
};

// Word = one proposition per position.
inline bool eval_prop(const PropFormula& f, const std::vector<int>& word, size_t pos) {
    switch (f.op()) {
    case PropFormula::Op::Prop:
        return word[pos - 1] == f.prop_id();
    case PropFormula::Op::Not:
        return !eval_prop(*f.kids()[0], word, pos);
    case PropFormula::Op::And:
        for (const auto& k : f.kids())
            if (!eval_prop(*k, word, pos)) return false;
        return true;
    case PropFormula::Op::Or:
        for (const auto& k : f.kids())
            if (eval_prop(*k, word, pos)) return true;
        return false;
    case PropFormula::Op::Next:
        return pos + 1 <= word.size() && eval_prop(*f.kids()[0], word, pos + 1);
    case PropFormula::Op::Until:
        for (size_t j = pos; j <= word.size(); ++j) {
            if (eval_prop(*f.kids()[1], word, j)) return true;
            if (!eval_prop(*f.kids()[0], word, j)) return false;
        }
        return false;
    }
    return false;
}

// Finite-word tableau satisfiability: shortest witness word (single
// proposition per letter), or nullopt for unsatisfiable. Complete when no
// max_len is given (the reachable tableau graph is finite).
class PropTableau {
  public:
    PropTableau(const PropFormula& f, int num_props) : num_props_(num_props) {
        root_ = build(f, true);
    }

    std::optional<std::vector<int>> shortest_witness(std::optional<size_t> max_len = {}) {
        struct StateInfo {
            int prev_state = -1;
            int letter = -1;
            size_t depth = 0;
        };
        std::map<StateKey, int> ids;
        std::vector<StateKey> keys;
        std::vector<StateInfo> info;
        auto intern_state = [&](const StateKey& k) {
            auto it = ids.find(k);
            if (it != ids.end()) return std::pair<int, bool>{it->second, false};
            int id = static_cast<int>(keys.size());
            ids.emplace(k, id);
            keys.push_back(k);
            info.push_back({});
            return std::pair<int, bool>{id, true};
        };

        StateKey init{{root_}, true};
        auto [init_id, _] = intern_state(init);
        std::deque<int> queue = {init_id};
        while (!queue.empty()) {
            int cur = queue.front();
            queue.pop_front();
            const StateKey key = keys[cur];
            size_t depth = info[cur].depth;
            if (max_len && depth >= *max_len) continue;
            std::vector<Disjunct> acc = {Disjunct{}};
            for (int ob : key.obligations) acc = combine(acc, dnf(ob));
            for (const Disjunct& d : acc) {
                std::vector<int> letters;
                if (d.pos.size() > 1) continue;
                if (d.pos.size() == 1) {
                    if (d.neg.count(*d.pos.begin())) continue;
                    letters = {*d.pos.begin()};
                } else {
                    for (int p = 0; p < num_props_; ++p)
                        if (!d.neg.count(p)) letters.push_back(p);
                }
                StateKey tgt{std::vector<int>(d.next.begin(), d.next.end()), d.strong};
                for (int letter : letters) {
                    auto [tid, fresh] = intern_state(tgt);
                    if (!fresh) continue;
                    info[tid] = {cur, letter, depth + 1};
                    if (!tgt.strong) {
                        std::vector<int> word;
                        for (int s = tid; s != init_id && s != -1; s = info[s].prev_state)
                            word.push_back(info[s].letter);
                        std::reverse(word.begin(), word.end());
                        return word;
                    }
                    queue.push_back(tid);
                }
            }
        }
        return std::nullopt;
    }

  private:
    struct Node {
        enum class Kind : uint8_t {
            True,
            False,
            LitPos,
            LitNeg,
            And,
            Or,
            Next,
            WeakNext,
            Until,
            Release
        };
        Kind kind;
        int prop = -1;
        std::vector<int> kids;
    };
    struct Disjunct {
        std::set<int> pos, neg, next;
        bool strong = false;
        bool merge(const Disjunct& o) {
            for (int p : o.pos) pos.insert(p);
            for (int p : o.neg) neg.insert(p);
            for (int p : pos)
                if (neg.count(p)) return false;
            for (int n : o.next) next.insert(n);
            strong = strong || o.strong;
            return true;
        }
        std::string key() const {
            std::string k;
            for (int p : pos) k += "p" + std::to_string(p);
            for (int p : neg) k += "n" + std::to_string(p);
            for (int n : next) k += "x" + std::to_string(n);
            return k + (strong ? "S" : "W");
        }
    };
    struct StateKey {
        std::vector<int> obligations;
        bool strong;
        bool operator<(const StateKey& o) const {
            if (obligations != o.obligations) return obligations < o.obligations;
            return strong < o.strong;
        }
    };

    int num_props_;
    int root_;
    std::vector<Node> pool_;
    std::map<std::string, int> index_;

    int intern(Node n) {
        std::string key = std::to_string(static_cast<int>(n.kind)) + "|" +
                          std::to_string(n.prop) + "|";
        for (int k : n.kids) key += std::to_string(k) + ",";
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        pool_.push_back(std::move(n));
        index_.emplace(key, static_cast<int>(pool_.size() - 1));
        return static_cast<int>(pool_.size() - 1);
    }
    int mk(Node::Kind k, std::vector<int> kids = {}, int prop = -1) {
        Node n;
        n.kind = k;
        n.kids = std::move(kids);
        n.prop = prop;
        return intern(std::move(n));
    }

    int build(const PropFormula& f, bool positive) {
        switch (f.op()) {
        case PropFormula::Op::Prop:
            return mk(positive ? Node::Kind::LitPos : Node::Kind::LitNeg, {}, f.prop_id());
        case PropFormula::Op::Not:
            return build(*f.kids()[0], !positive);
        case PropFormula::Op::And:
        case PropFormula::Op::Or: {
            bool conj = (f.op() == PropFormula::Op::And) == positive;
            std::vector<int> ks;
            for (const auto& k : f.kids()) ks.push_back(build(*k, positive));
            return mk(conj ? Node::Kind::And : Node::Kind::Or, std::move(ks));
        }
        case PropFormula::Op::Next:
            return mk(positive ? Node::Kind::Next : Node::Kind::WeakNext,
                      {build(*f.kids()[0], positive)});
        case PropFormula::Op::Until: {
            int a = build(*f.kids()[0], positive);
            int b = build(*f.kids()[1], positive);
            return mk(positive ? Node::Kind::Until : Node::Kind::Release, {a, b});
        }
        }
        return mk(Node::Kind::False);
    }

    std::vector<Disjunct> combine(const std::vector<Disjunct>& a,
                                  const std::vector<Disjunct>& b) {
        std::vector<Disjunct> out;
        std::set<std::string> seen;
        for (const Disjunct& x : a)
            for (const Disjunct& y : b) {
                Disjunct z = x;
                if (!z.merge(y)) continue;
                if (seen.insert(z.key()).second) out.push_back(std::move(z));
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
        case Node::Kind::LitPos: {
            Disjunct d;
            d.pos = {n.prop};
            return {d};
        }
        case Node::Kind::LitNeg: {
            Disjunct d;
            d.neg = {n.prop};
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
            std::vector<Disjunct> out = dnf(n.kids[1]);
            Disjunct cont;
            cont.next = {id};
            cont.strong = true;
            std::set<std::string> seen;
            for (const Disjunct& d : out) seen.insert(d.key());
            for (const Disjunct& d : combine(dnf(n.kids[0]), {cont}))
                if (seen.insert(d.key()).second) out.push_back(d);
            return out;
        }
        case Node::Kind::Release: {
            Disjunct cont;
            cont.next = {id};
            std::vector<Disjunct> right = dnf(n.kids[0]);
            right.push_back(cont);
            return combine(dnf(n.kids[1]), right);
        }
        }
        return {};
    }
};

inline std::optional<std::vector<int>> prop_sat_finite(const PropFormula& f, int num_props,
                                                       std::optional<size_t> max_len = {}) {
    PropTableau t(f, num_props);
    return t.shortest_witness(max_len);
}

// ---------------------------------------------------------------------------
// The propositional alphabet of an instance chain (section 4.2 construction)
// ---------------------------------------------------------------------------

// A candidate witness skeleton: a strictly increasing instance sequence and
// the advance access connecting each consecutive pair.
struct InstanceChain {
    std::vector<Instance> instances; // I_1 .. I_n
    std::vector<Access> accesses;    // accesses[i] : I_{i+1} = I_i + response
};

struct Proposition {
    bool advance = false;
    size_t index = 0; // 1-based instance index
    Access access;
    Response response; // effective response after exactness adjustment
};

struct PropAlphabet {
    std::vector<Proposition> props;
    const InstanceChain* chain = nullptr;
};

struct ZeroSatOptions {
    std::set<std::string> exact;
    std::set<std::string> idempotent;
    size_t chain_cap = 2000000; // safety valve
};

namespace detail {

// Deterministic typed pools for chain enumeration.
struct ValuePools {
    std::vector<Value> constants;             // schema + formula constants
    std::map<int, std::vector<Value>> fresh;  // per DomainKind::Kind
    std::map<int, Value> default_value;       // reserved for default bindings

    static int kind_key(const DomainKind& d) { return static_cast<int>(d.kind()); }

    std::vector<Value> admitted_constants(const DomainKind& d) const {
        std::vector<Value> out;
        for (const Value& v : constants)
            if (d.admits(v)) out.push_back(v);
        return out;
    }

    // Default binding value per position domain. For unbounded kinds this is
    // a reserved literal no chain value can collide with, which keeps default
    // (empty-response) accesses distinct from the necessary ones under
    // idempotence and exactness.
    std::optional<Value> default_for(const DomainKind& d) const {
        auto it = default_value.find(kind_key(d));
        if (it != default_value.end()) return it->second;
        if (d.kind() == DomainKind::Kind::Boolean) return Value::boolean(false);
        if (d.kind() == DomainKind::Kind::Enum) return Value::sym(d.literals().front());
        return std::nullopt;
    }
};

inline ValuePools make_pools(const Schema& schema, const AccFormula& f, size_t fresh_count) {
    ValuePools pools;
    std::set<Value> cs = f.constants();
    for (const Value& v : schema.constants()) cs.insert(v);
    pools.constants.assign(cs.begin(), cs.end());
    for (size_t k = 0; k < fresh_count; ++k) {
        pools.fresh[static_cast<int>(DomainKind::Kind::String)].push_back(
            Value::str("f" + std::to_string(k)));
        pools.fresh[static_cast<int>(DomainKind::Kind::Integer)].push_back(
            Value::integer(static_cast<int64_t>(1000001 + k)));
    }
    // booleans and enums are finite; they enumerate through "constants"
    pools.fresh[static_cast<int>(DomainKind::Kind::Boolean)] = {};
    pools.fresh[static_cast<int>(DomainKind::Kind::Enum)] = {};
    pools.default_value[static_cast<int>(DomainKind::Kind::String)] = Value::str("zz_default");
    pools.default_value[static_cast<int>(DomainKind::Kind::Integer)] =
        Value::integer(999999999);
    return pools;
}

inline std::vector<std::string> mentioned_relations(const AccFormula& f) {
    std::set<std::string> rels;
    f.for_each_sentence([&](const PosSentence& s, size_t) {
        s.for_each_atom([&](const SAtom& a) {
            if (a.kind == AtomKind::Pre || a.kind == AtomKind::Post) rels.insert(a.target);
        });
    });
    return {rels.begin(), rels.end()};
}

// Enumerates instance chains over canonical value pools: each advance adds
// 1..budget new tuples to one relation, all sharing the input positions of
// the chosen method. Fresh values are introduced in order. The callback sees
// every prefix; returning true stops the enumeration.
class ChainEnumerator {
  public:
    ChainEnumerator(const Schema& schema, const Instance& initial, const ValuePools& pools,
                    const std::vector<std::string>& relations, size_t budget, size_t cap)
        : schema_(schema), pools_(pools), relations_(relations), budget_(budget), cap_(cap) {
        chain_.instances.push_back(initial);
        for (const Value& v : initial.active_values()) used_.insert(v);
        for (const Value& v : pools.constants) used_.insert(v);
    }

    bool run(const std::function<bool(const InstanceChain&)>& visit) {
        visit_ = &visit;
        return extend();
    }

  private:
    const Schema& schema_;
    const ValuePools& pools_;
    std::vector<std::string> relations_;
    size_t budget_, cap_;
    InstanceChain chain_;
    std::set<Value> used_;
    std::map<int, size_t> fresh_used_; // per kind
    const std::function<bool(const InstanceChain&)>* visit_ = nullptr;
    size_t count_ = 0;

    std::vector<Value> position_candidates(const DomainKind& d) const {
        std::vector<Value> out = pools_.admitted_constants(d);
        int key = ValuePools::kind_key(d);
        auto it = pools_.fresh.find(key);
        size_t used = fresh_used_.count(key) ? fresh_used_.at(key) : 0;
        if (it != pools_.fresh.end()) {
            size_t limit = std::min(used + 1, it->second.size()); // canonical order
            for (size_t k = 0; k < limit; ++k) out.push_back(it->second[k]);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    void note_fresh(const Value& v, const DomainKind& d) {
        int key = ValuePools::kind_key(d);
        auto it = pools_.fresh.find(key);
        if (it == pools_.fresh.end()) return;
        size_t& used = fresh_used_[key];
        if (used < it->second.size() && v == it->second[used]) ++used;
    }

    bool extend() {
        if (++count_ > cap_) throw Error(ErrorKind::Resource, "chain enumeration cap exceeded");
        if ((*visit_)(chain_)) return true;
        size_t added = chain_.instances.back().total_size() - chain_.instances.front().total_size();
        if (added >= budget_) return false;
        size_t left = budget_ - added;
        for (const std::string& rel_name : relations_) {
            const Relation& rel = schema_.relation(rel_name);
            for (const auto& [mname, m] : schema_.methods()) {
                if (m.relation != rel_name) continue;
                std::set<Tuple> batch;
                if (grow_batch(rel, m, batch, left, true)) return true;
            }
        }
        return false;
    }

    // Recursively grows a batch of new same-binding tuples, recursing into
    // extend() after each growth step.
    bool grow_batch(const Relation& rel, const AccessMethod& m, std::set<Tuple>& batch,
                    size_t left, bool first) {
        if (left == 0) return false;
        // enumerate one more tuple, lexicographically >= the last batch tuple
        std::vector<std::vector<Value>> cands(rel.arity());
        for (size_t pos = 0; pos < rel.arity(); ++pos) {
            if (!first && m.inputs.count(pos + 1)) {
                // binding fixed by the first tuple
                cands[pos] = {batch.begin()->at(pos)};
            } else {
                cands[pos] = position_candidates(rel.positions[pos]);
                if (cands[pos].empty()) return false;
            }
        }
        Tuple t(rel.arity());
        return grow_tuple(rel, m, batch, left, cands, t, 0);
    }

    bool grow_tuple(const Relation& rel, const AccessMethod& m, std::set<Tuple>& batch,
                    size_t left, std::vector<std::vector<Value>>& cands, Tuple& t, size_t pos) {
        if (pos == rel.arity()) {
            if (chain_.instances.back().contains(rel.name, t) || batch.count(t)) return false;
            if (!batch.empty() && t < *batch.rbegin()) return false; // canonical batch order
            // snapshot fresh bookkeeping
            auto fresh_snapshot = fresh_used_;
            auto used_snapshot = used_;
            for (size_t k = 0; k < t.size(); ++k) {
                note_fresh(t[k], rel.positions[k]);
                used_.insert(t[k]);
            }
            batch.insert(t);
            // commit this batch as an advance step
            Access acc;
            acc.method = m.name;
            for (size_t p : m.inputs) acc.binding[p] = batch.begin()->at(p - 1);
            Instance next = chain_.instances.back();
            for (const Tuple& bt : batch) next.add(rel.name, bt);
            chain_.instances.push_back(std::move(next));
            chain_.accesses.push_back(acc);
            bool stop = extend();
            chain_.instances.pop_back();
            chain_.accesses.pop_back();
            if (stop) return true;
            // or grow the batch further
            if (batch.size() < left)
                if (grow_batch(rel, m, batch, left, false)) return true;
            batch.erase(t);
            fresh_used_ = fresh_snapshot;
            used_ = used_snapshot;
            return false;
        }
        for (const Value& v : cands[pos]) {
            t[pos] = v;
            // fresh canonicity within the tuple: later positions may use the
            // next fresh value only after this one is placed
            auto fresh_snapshot = fresh_used_;
            note_fresh(v, rel.positions[pos]);
            bool stop = grow_tuple(rel, m, batch, left, cands, t, pos + 1);
            fresh_used_ = fresh_snapshot;
            if (stop) return true;
            // refresh candidate lists for later positions is unnecessary: the
            // +1 canonical window was already computed against the pre-tuple
            // state; allowing one fresh value per position keeps enumeration
            // canonical up to renaming.
        }
        return false;
    }
};

} // namespace detail

// Builds the stay/advance alphabet of a chain. Stay bindings come from the
// chain's accesses plus one default binding per method (lexicographically
// least admitted values). Exactness filters illegal propositions out and
// fixes effective responses.
inline std::optional<PropAlphabet> build_alphabet(const InstanceChain& chain,
                                                  const Schema& schema,
                                                  const detail::ValuePools& pools,
                                                  const ZeroSatOptions& opts) {
    PropAlphabet alpha;
    alpha.chain = &chain;
    const Instance& final_inst = chain.instances.back();

    // binding set B: the chain's necessary bindings plus one default per
    // method over reserved values
    std::set<Access> bindings(chain.accesses.begin(), chain.accesses.end());
    for (const auto& [mname, m] : schema.methods()) {
        Access def;
        def.method = mname;
        const Relation& rel = schema.relation(m.relation);
        bool ok = true;
        for (size_t pos : m.inputs) {
            auto v = pools.default_for(rel.positions[pos - 1]);
            if (!v) {
                ok = false;
                break;
            }
            def.binding[pos] = *v;
        }
        if (ok) bindings.insert(def);
    }

    // stay propositions
    for (size_t i = 1; i <= chain.instances.size(); ++i) {
        for (const Access& acc : bindings) {
            if (opts.exact.count(acc.method) &&
                !matching_tuples(final_inst, acc, schema).empty())
                continue; // an exact stay must return every matching tuple
            Proposition p;
            p.advance = false;
            p.index = i;
            p.access = acc;
            alpha.props.push_back(std::move(p));
        }
    }
    // advance propositions
    for (size_t i = 0; i + 1 < chain.instances.size(); ++i) {
        const Access& acc = chain.accesses[i];
        const std::string& rel = schema.method(acc.method).relation;
        Response increment;
        for (const Tuple& t : chain.instances[i + 1].tuples(rel))
            if (!chain.instances[i].contains(rel, t)) increment.insert(t);
        Response effective = increment;
        if (opts.exact.count(acc.method)) {
            Response matching = matching_tuples(final_inst, acc, schema);
            bool ok = true;
            for (const Tuple& t : increment)
                if (!matching.count(t)) ok = false;
            for (const Tuple& t : matching)
                if (!chain.instances[i + 1].contains(rel, t)) ok = false;
            if (!ok) return std::nullopt; // chain unusable under exactness
            effective = matching;
        }
        Proposition p;
        p.advance = true;
        p.index = i + 1;
        p.access = acc;
        p.response = std::move(effective);
        alpha.props.push_back(std::move(p));
    }
    return alpha;
}

inline Transition proposition_transition(const Proposition& p, const InstanceChain& chain) {
    if (p.advance)
        return Transition{chain.instances[p.index - 1], p.access, chain.instances[p.index]};
    return Transition{chain.instances[p.index - 1], p.access, chain.instances[p.index - 1]};
}

// The sanity axioms plus the formula translation over the alphabet.
inline PropPtr build_prop_formula(const AccFormula& f, const PropAlphabet& alpha,
                                  const Schema& schema, const ZeroSatOptions& opts) {
    const InstanceChain& chain = *alpha.chain;
    size_t n = chain.instances.size();
    std::vector<std::vector<int>> stays(n + 1);
    std::vector<int> advance(n + 1, -1);
    for (size_t k = 0; k < alpha.props.size(); ++k) {
        const Proposition& p = alpha.props[k];
        if (p.advance)
            advance[p.index] = static_cast<int>(k);
        else
            stays[p.index].push_back(static_cast<int>(k));
    }

    std::vector<PropPtr> conjuncts;

    // (i) exactly one proposition per position
    {
        std::vector<PropPtr> one;
        for (size_t k = 0; k < alpha.props.size(); ++k) {
            std::vector<PropPtr> c = {PropFormula::prop(static_cast<int>(k))};
            for (size_t j = 0; j < alpha.props.size(); ++j)
                if (j != k)
                    c.push_back(PropFormula::negation(PropFormula::prop(static_cast<int>(j))));
            one.push_back(PropFormula::conj(std::move(c)));
        }
        conjuncts.push_back(PropFormula::globally(PropFormula::disj(std::move(one))));
    }

    // (ii) instance order
    auto stage_disj = [&](size_t i, bool with_advance) {
        std::vector<PropPtr> ps;
        for (int k : stays[i]) ps.push_back(PropFormula::prop(k));
        if (with_advance && advance[i] >= 0) ps.push_back(PropFormula::prop(advance[i]));
        return PropFormula::disj(std::move(ps));
    };
    for (size_t i = 1; i <= n; ++i) {
        if (advance[i] >= 0) {
            // stays of stage i continue until the advance
            for (int k : stays[i]) {
                PropPtr rhs = PropFormula::until(stage_disj(i, false),
                                                 PropFormula::prop(advance[i]));
                conjuncts.push_back(PropFormula::globally(PropFormula::disj(
                    {PropFormula::negation(PropFormula::prop(k)), rhs})));
            }
            // the advance steps into stage i+1
            conjuncts.push_back(PropFormula::globally(PropFormula::disj(
                {PropFormula::negation(PropFormula::prop(advance[i])),
                 PropFormula::weak_next(stage_disj(i + 1, true))})));
        } else {
            // last stage: stays continue forever
            for (int k : stays[i])
                conjuncts.push_back(PropFormula::globally(PropFormula::disj(
                    {PropFormula::negation(PropFormula::prop(k)),
                     PropFormula::weak_next(stage_disj(i, false))})));
        }
    }
    conjuncts.push_back(stage_disj(1, true)); // start at stage 1

    // idempotence: equal accesses must have equal effective responses
    for (size_t x = 0; x < alpha.props.size(); ++x)
        for (size_t y = x + 1; y < alpha.props.size(); ++y) {
            const Proposition& a = alpha.props[x];
            const Proposition& b = alpha.props[y];
            if (!opts.idempotent.count(a.access.method)) continue;
            if (!(a.access == b.access) || a.response == b.response) continue;
            conjuncts.push_back(PropFormula::negation(PropFormula::conj(
                {PropFormula::finally_(PropFormula::prop(static_cast<int>(x))),
                 PropFormula::finally_(PropFormula::prop(static_cast<int>(y)))})));
        }

    // (iii) the formula with positive sentences replaced by proposition sets
    std::set<Value> extra = f.constants();
    for (const Value& v : schema.constants()) extra.insert(v);
    std::vector<TransitionStructure> structures;
    for (const Proposition& p : alpha.props)
        structures.push_back(
            structure_of(proposition_transition(p, chain), StructureMode::ZeroAry, extra));

    std::function<PropPtr(const AccFormula&)> tr = [&](const AccFormula& g) -> PropPtr {
        switch (g.op()) {
        case AccFormula::Op::Atom: {
            std::vector<PropPtr> ds;
            for (size_t k = 0; k < alpha.props.size(); ++k)
                if (eval_sentence(g.sentence(), structures[k]))
                    ds.push_back(PropFormula::prop(static_cast<int>(k)));
            return PropFormula::disj(std::move(ds));
        }
        case AccFormula::Op::Not:
            return PropFormula::negation(tr(*g.kids()[0]));
        case AccFormula::Op::And: {
            std::vector<PropPtr> ks;
            for (const auto& k : g.kids()) ks.push_back(tr(*k));
            return PropFormula::conj(std::move(ks));
        }
        case AccFormula::Op::Or: {
            std::vector<PropPtr> ks;
            for (const auto& k : g.kids()) ks.push_back(tr(*k));
            return PropFormula::disj(std::move(ks));
        }
        case AccFormula::Op::Next:
            return PropFormula::next(tr(*g.kids()[0]));
        case AccFormula::Op::Until:
            return PropFormula::until(tr(*g.kids()[0]), tr(*g.kids()[1]));
        }
        return PropFormula::falsity();
    };
    conjuncts.push_back(tr(f));
    return PropFormula::conj(std::move(conjuncts));
}

inline AccessPath decode_word(const std::vector<int>& word, const PropAlphabet& alpha) {
    AccessPath path;
    for (int letter : word) {
        const Proposition& p = alpha.props[static_cast<size_t>(letter)];
        path.steps.push_back(PathStep{p.access, p.response});
    }
    return path;
}

// ---------------------------------------------------------------------------
// sat_0acc: complete satisfiability for the 0-ary fragments
// ---------------------------------------------------------------------------

inline std::optional<AccessPath> sat_0acc(const AccFormula& f, const Schema& schema,
                                          const Instance& initial = {},
                                          const ZeroSatOptions& opts = {}) {
    FragmentReport rep = classify(f);
    if (rep.uses_full_bindings)
        throw Error(ErrorKind::Fragment, "sat_0acc requires the 0-ary binding fragment");

    ZeroAryBounds bounds = bounds_of(f, schema);
    size_t max_arity = 1;
    for (const auto& [_, r] : schema.relations()) max_arity = std::max(max_arity, r.arity());
    detail::ValuePools pools =
        detail::make_pools(schema, f, std::max<size_t>(1, bounds.instance_bound) * max_arity);
    std::vector<std::string> relations = detail::mentioned_relations(f);

    std::optional<AccessPath> witness;
    detail::ChainEnumerator en(schema, initial, pools, relations, bounds.instance_bound,
                               opts.chain_cap);
    en.run([&](const InstanceChain& chain) {
        auto alpha = build_alphabet(chain, schema, pools, opts);
        if (!alpha || alpha->props.empty()) return false;
        PropPtr pf = build_prop_formula(f, *alpha, schema, opts);
        auto word = prop_sat_finite(*pf, static_cast<int>(alpha->props.size()));
        if (!word) return false;
        AccessPath p = decode_word(*word, *alpha);
        if (!eval_formula(f, p, initial, schema, 1, StructureMode::ZeroAry))
            throw Error(ErrorKind::Validation, "internal: decoded witness fails re-check");
        if (!opts.exact.empty() && !is_exact(p, opts.exact, initial, schema)) return false;
        if (!opts.idempotent.empty() && !is_idempotent(p, opts.idempotent, schema)) return false;
        witness = std::move(p);
        return true;
    });
    return witness;
}

// ---------------------------------------------------------------------------
// sat_x_fragment: LTL_X over the 0-ary vocabulary (fixed-length search)
// ---------------------------------------------------------------------------

inline size_t x_depth(const AccFormula& f) {
    switch (f.op()) {
    case AccFormula::Op::Atom:
        return 0;
    case AccFormula::Op::Next:
        return 1 + x_depth(*f.kids()[0]);
    default: {
        size_t d = 0;
        for (const auto& k : f.kids()) d = std::max(d, x_depth(*k));
        return d;
    }
    }
}

inline std::optional<AccessPath> sat_x_fragment(const AccFormula& f, const Schema& schema,
                                                const Instance& initial = {},
                                                const ZeroSatOptions& opts = {}) {
    FragmentReport rep = classify(f);
    if (rep.uses_full_bindings || !rep.x_only)
        throw Error(ErrorKind::Fragment, "sat_x_fragment requires the X-only 0-ary fragment");

    size_t max_length = x_depth(f) + 1;
    ZeroAryBounds bounds = bounds_of(f, schema);
    size_t max_arity = 1;
    for (const auto& [_, r] : schema.relations()) max_arity = std::max(max_arity, r.arity());
    detail::ValuePools pools =
        detail::make_pools(schema, f, std::max<size_t>(1, bounds.instance_bound) * max_arity);
    std::vector<std::string> relations = detail::mentioned_relations(f);

    std::optional<AccessPath> witness;
    for (size_t len = 1; len <= max_length && !witness; ++len) {
        detail::ChainEnumerator en(schema, initial, pools, relations, bounds.instance_bound,
                                   opts.chain_cap);
        en.run([&](const InstanceChain& chain) {
            if (chain.instances.size() > len + 1) return false;
            auto alpha = build_alphabet(chain, schema, pools, opts);
            if (!alpha || alpha->props.empty()) return false;
            PropPtr pf = build_prop_formula(f, *alpha, schema, opts);
            // exhaustive words of exactly this length
            std::vector<int> word(len, 0);
            size_t count = static_cast<size_t>(alpha->props.size());
            while (true) {
                if (eval_prop(*pf, word, 1)) {
                    AccessPath p = decode_word(word, *alpha);
                    if (!eval_formula(f, p, initial, schema, 1, StructureMode::ZeroAry))
                        throw Error(ErrorKind::Validation,
                                    "internal: decoded witness fails re-check");
                    bool ok = true;
                    if (!opts.exact.empty() && !is_exact(p, opts.exact, initial, schema))
                        ok = false;
                    if (!opts.idempotent.empty() && !is_idempotent(p, opts.idempotent, schema))
                        ok = false;
                    if (ok) {
                        witness = std::move(p);
                        return true;
                    }
                }
                size_t k = 0;
                while (k < word.size() && static_cast<size_t>(++word[k]) == count)
                    word[k++] = 0;
                if (k == word.size()) break;
            }
            return false;
        });
    }
    return witness;
}

} // namespace accltl
