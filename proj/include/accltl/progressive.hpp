#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "accltl/automaton.hpp"
#include "accltl/classify.hpp"
#include "accltl/implication.hpp"

namespace accltl {

// Witness data for the six progressivity conditions: the pure-pre sentence
// for the initial state, the pure-post sentence set Phi, a complete Phi-type
// per state, and the SCC chain.
struct ProgressiveWitness {
    PosSentence pre = PosSentence::truth();
    std::vector<PosSentence> phi;
    std::map<std::string, std::vector<bool>> post_type;
    std::vector<std::vector<std::string>> scc_chain;

    size_t height() const { return scc_chain.size(); }
};

struct ProgressiveReport {
    bool ok = true;
    std::array<bool, 6> condition{true, true, true, true, true, true};
    std::vector<std::string> messages;

    void fail(size_t cond, const std::string& msg) {
        ok = false;
        condition[cond - 1] = false;
        messages.push_back("condition " + std::to_string(cond) + ": " + msg);
    }
};

namespace detail {

inline std::set<std::string> guard_bind_methods(const PosSentence& s) {
    std::set<std::string> methods;
    s.for_each_atom([&](const SAtom& a) {
        if (a.kind == AtomKind::Bind || a.kind == AtomKind::Bind0) methods.insert(a.target);
    });
    return methods;
}

inline bool bind_terms_constant(const PosSentence& s) {
    bool ok = true;
    s.for_each_atom([&](const SAtom& a) {
        if (a.kind != AtomKind::Bind) return;
        for (const Term& t : a.terms)
            if (t.is_var) ok = false;
    });
    return ok;
}

// Tarjan SCCs over an explicit edge list; returns components in reverse
// topological order of the condensation.
inline std::vector<std::vector<int>> tarjan_scc(size_t n,
                                                const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (const auto& [u, v] : edges) adj[u].push_back(v);
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<bool> on_stack(n, false);
    std::vector<std::vector<int>> sccs;
    int counter = 0;
    std::function<void(int)> strongconnect = [&](int v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (int w : adj[v]) {
            if (index[w] == -1) {
                strongconnect(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<int> comp;
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            sccs.push_back(std::move(comp));
        }
    };
    for (size_t v = 0; v < n; ++v)
        if (index[v] == -1) strongconnect(static_cast<int>(v));
    return sccs;
}

} // namespace detail

// Verifies the six progressivity conditions against the witness. Positive
// implication is decided by canonical databases; condition 4's negative side
// is checked through the witness types (a negated type conjunct must cover
// each negated guard sentence in its post reading).
inline ProgressiveReport check_progressive(const AAutomaton& a, const ProgressiveWitness& w,
                                           const Schema& schema) {
    ProgressiveReport rep;

    for (const PosSentence& p : w.phi)
        if (!p.pure_post())
            rep.fail(4, "Phi sentence is not pure-post: " + p.to_string());
    if (!w.pre.pure_pre() || w.pre.mentions_bind())
        rep.fail(3, "pre-sentence must be pure-pre and IsBind-free");

    // Chain structure: a partition of the states into consecutive components.
    std::map<std::string, size_t> stage;
    {
        std::set<std::string> seen;
        for (size_t i = 0; i < w.scc_chain.size(); ++i)
            for (const std::string& s : w.scc_chain[i]) {
                if (!seen.insert(s).second) rep.fail(5, "state " + s + " in two components");
                stage[s] = i;
            }
        for (const std::string& s : a.states)
            if (!stage.count(s)) rep.fail(5, "state " + s + " missing from the chain");
    }
    if (!rep.condition[4]) return rep;

    auto type_of = [&](const std::string& s) -> const std::vector<bool>& {
        auto it = w.post_type.find(s);
        if (it == w.post_type.end() || it->second.size() != w.phi.size())
            throw Error(ErrorKind::Precondition, "witness lacks a complete type for " + s);
        return it->second;
    };

    std::vector<size_t> crossing_count(w.scc_chain.size(), 0);
    for (const AutTransition& t : a.transitions) {
        size_t i = stage.at(t.from), j = stage.at(t.to);

        // (1) single method per guard
        if (detail::guard_bind_methods(t.guard.positive).size() > 1)
            rep.fail(1, "guard of " + t.from + "->" + t.to + " mixes methods");

        // (2) guard implies the target type
        const std::vector<bool>& tau = type_of(t.to);
        for (size_t k = 0; k < w.phi.size(); ++k) {
            if (tau[k]) {
                if (!implies({t.guard.positive}, w.phi[k]))
                    rep.fail(2, t.from + "->" + t.to + " does not imply " + w.phi[k].to_string());
            } else {
                bool covered = false;
                for (const PosSentence& n : t.guard.negated)
                    if (implies({w.phi[k]}, n)) covered = true;
                if (!covered)
                    rep.fail(2, t.from + "->" + t.to + " does not refute " +
                                    w.phi[k].to_string());
            }
        }

        // (3) guards leaving the initial state imply the pre-sentence
        if (t.from == a.initial && !w.pre.is_true() && !implies({t.guard.positive}, w.pre))
            rep.fail(3, t.from + "->" + t.to + " does not imply the pre-sentence");

        if (i == j) {
            // (4) within a component: equal types and type implies the tilde
            // rewrite of the guard
            if (type_of(t.from) != tau)
                rep.fail(4, "types differ inside component of " + t.from);
            std::vector<PosSentence> positives;
            for (size_t k = 0; k < w.phi.size(); ++k)
                if (tau[k]) positives.push_back(w.phi[k]);
            PosSentence tilde = tilde_rewrite(t.guard.positive, schema);
            if (!tilde.is_true() && !implies(positives, tilde))
                rep.fail(4, "type of " + t.to + " does not imply guard rewrite " +
                                tilde.to_string());
            for (const PosSentence& n : t.guard.negated) {
                PosSentence nt = tilde_rewrite(n, schema);
                bool covered = false;
                for (size_t k = 0; k < w.phi.size(); ++k)
                    if (!tau[k] && implies({nt}, w.phi[k])) covered = true;
                if (!covered)
                    rep.fail(4, "type of " + t.to + " does not refute the post reading of " +
                                    n.to_string());
            }
        } else if (j == i + 1) {
            // (5) crossing transitions use constant bindings
            ++crossing_count[i];
            if (!detail::bind_terms_constant(t.guard.positive))
                rep.fail(5, "crossing " + t.from + "->" + t.to + " binds variables");
        } else {
            rep.fail(5, "transition " + t.from + "->" + t.to + " skips or reverses the chain");
        }
    }
    for (size_t i = 0; i + 1 < w.scc_chain.size(); ++i)
        if (crossing_count[i] != 1)
            rep.fail(5, "expected exactly one crossing out of component " + std::to_string(i + 1) +
                            ", found " + std::to_string(crossing_count[i]));

    // components of size > 1 must be strongly connected internally
    {
        std::map<std::string, int> id;
        for (size_t k = 0; k < a.states.size(); ++k) id[a.states[k]] = static_cast<int>(k);
        std::vector<std::pair<int, int>> internal;
        for (const AutTransition& t : a.transitions)
            if (stage.at(t.from) == stage.at(t.to))
                internal.push_back({id[t.from], id[t.to]});
        auto sccs = detail::tarjan_scc(a.states.size(), internal);
        std::map<int, size_t> scc_of;
        for (size_t k = 0; k < sccs.size(); ++k)
            for (int v : sccs[k]) scc_of[v] = k;
        for (const auto& comp : w.scc_chain) {
            if (comp.size() <= 1) continue;
            std::set<size_t> ids;
            for (const std::string& s : comp) ids.insert(scc_of[id[s]]);
            if (ids.size() != 1)
                rep.fail(5, "chain component is not strongly connected");
        }
    }

    // (6) initial in the first component, accepting in the last
    if (!w.scc_chain.empty()) {
        if (stage.at(a.initial) != 0) rep.fail(6, "initial state not in the first component");
        for (const std::string& s : a.accepting)
            if (stage.at(s) + 1 != w.scc_chain.size())
                rep.fail(6, "accepting state " + s + " not in the last component");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Decomposition into progressive automata (emptiness-preserving union)
// ---------------------------------------------------------------------------

struct DecomposeOptions {
    size_t max_phi = 12;
    size_t max_nodes = 4096;
    size_t max_height = 6;
    size_t max_chains = 512;
    size_t max_outputs = 256;
    size_t max_instantiations = 64;
    size_t dnf_cap = 512;
};

namespace detail {

struct NormTransition {
    int from, to; // indices into automaton states
    Guard guard;
    PosSentence tilde; // tilde rewrite of guard.positive
};

// DNF-split guards so every transition uses at most one method, dropping
// inconsistent disjuncts and dead transitions (negated true).
inline std::vector<NormTransition> normalize_transitions(const AAutomaton& a,
                                                         const Schema& schema, size_t dnf_cap) {
    std::map<std::string, int> id;
    for (size_t k = 0; k < a.states.size(); ++k) id[a.states[k]] = static_cast<int>(k);
    std::vector<NormTransition> out;
    for (const AutTransition& t : a.transitions) {
        bool dead = false;
        for (const PosSentence& n : t.guard.negated)
            if (n.is_true()) dead = true;
        if (dead) continue;
        std::vector<std::vector<SAtom>> disjuncts;
        dnf_matrix(t.guard.positive.matrix, disjuncts, dnf_cap);
        std::set<std::string> seen;
        for (const auto& atoms : disjuncts) {
            std::set<std::string> methods;
            for (const SAtom& at : atoms)
                if (at.kind == AtomKind::Bind || at.kind == AtomKind::Bind0)
                    methods.insert(at.target);
            if (methods.size() > 1) continue;
            PosSentence s;
            s.vars = t.guard.positive.vars;
            std::vector<Matrix> kids;
            for (const SAtom& at : atoms) kids.push_back(Matrix::leaf(at));
            s.matrix = Matrix::conj(std::move(kids));
            s = prune_unused_vars(std::move(s));
            if (!seen.insert(s.to_string()).second) continue;
            NormTransition nt{id.at(t.from), id.at(t.to), Guard{s, t.guard.negated},
                              tilde_rewrite(s, schema)};
            out.push_back(std::move(nt));
        }
    }
    return out;
}

inline PosSentence pre_to_post(const PosSentence& s, const Schema& schema) {
    return tilde_rewrite(s, schema); // IsBind-free, so this is just pre->post
}

} // namespace detail

// Splits an automaton into progressive pieces whose union is empty iff the
// automaton's language is empty. States of each piece are typed copies of the
// original states; guards additionally assert the target's Phi-type, which
// makes conditions 2 and 4 hold by construction.
class Decomposer {
  public:
    Decomposer(const AAutomaton& a, const Schema& schema, DecomposeOptions opts = {})
        : a_(a), schema_(schema), opts_(opts) {}

    std::vector<std::pair<AAutomaton, ProgressiveWitness>> run() {
        if (auto trivial = try_trivial()) return {*trivial};
        norm_ = detail::normalize_transitions(a_, schema_, opts_.dnf_cap);
        build_phi();
        build_types();
        build_product();
        enumerate_chains();
        if (capped_)
            throw Error(ErrorKind::Resource,
                        "decompose: enumeration cap exceeded; result would be incomplete");
        return std::move(outputs_);
    }

  private:
    const AAutomaton& a_;
    const Schema& schema_;
    DecomposeOptions opts_;

    std::vector<detail::NormTransition> norm_;
    std::vector<PosSentence> phi_;
    std::map<std::string, int> phi_index_;
    std::vector<std::vector<bool>> types_; // realizable types (plus the all-false entry 0)
    std::map<std::vector<bool>, int> type_index_;

    struct PNode {
        int state;
        int type;
        bool operator<(const PNode& o) const {
            return std::tie(state, type) < std::tie(o.state, o.type);
        }
        bool operator==(const PNode& o) const { return state == o.state && type == o.type; }
    };
    struct PEdge {
        int from, to; // product node ids
        Guard guard;
        bool loopable;
        const detail::NormTransition* src;
    };
    std::vector<PNode> nodes_;
    std::map<PNode, int> node_index_;
    std::vector<PEdge> edges_;
    std::vector<std::vector<int>> out_edges_;
    int initial_node_ = -1;
    std::vector<int> scc_of_;                // loop-SCC id per node
    std::vector<std::vector<int>> scc_nodes_;
    std::vector<std::pair<AAutomaton, ProgressiveWitness>> outputs_;
    size_t chains_seen_ = 0;
    bool capped_ = false;

    std::optional<std::pair<AAutomaton, ProgressiveWitness>> try_trivial() {
        // The automaton may already be progressive with an empty Phi.
        std::map<std::string, int> id;
        for (size_t k = 0; k < a_.states.size(); ++k) id[a_.states[k]] = static_cast<int>(k);
        std::vector<std::pair<int, int>> edges;
        for (const AutTransition& t : a_.transitions) edges.push_back({id[t.from], id[t.to]});
        auto sccs = detail::tarjan_scc(a_.states.size(), edges);
        std::reverse(sccs.begin(), sccs.end()); // topological order
        ProgressiveWitness w;
        for (const auto& comp : sccs) {
            std::vector<std::string> names;
            for (int v : comp) names.push_back(a_.states[v]);
            w.scc_chain.push_back(std::move(names));
        }
        for (const std::string& s : a_.states) w.post_type[s] = {};
        ProgressiveReport rep = check_progressive(a_, w, schema_);
        if (rep.ok) return std::make_pair(a_, w);
        return std::nullopt;
    }

    void build_phi() {
        auto add = [&](const PosSentence& s) {
            if (s.is_true()) return;
            std::string key = s.to_string();
            if (phi_index_.count(key)) return;
            phi_index_[key] = static_cast<int>(phi_.size());
            phi_.push_back(s);
        };
        for (const detail::NormTransition& t : norm_) {
            add(t.tilde);
            for (const PosSentence& n : t.guard.negated)
                add(detail::pre_to_post(n, schema_));
        }
        if (phi_.size() > opts_.max_phi)
            throw Error(ErrorKind::Resource,
                        "decompose: sentence set too large (" + std::to_string(phi_.size()) +
                            " > " + std::to_string(opts_.max_phi) + ")");
    }

    int phi_id(const PosSentence& s) const {
        auto it = phi_index_.find(s.to_string());
        return it == phi_index_.end() ? -1 : it->second;
    }

    void build_types() {
        size_t n = phi_.size();
        std::vector<bool> all_false(n, false);
        type_index_[all_false] = 0;
        types_.push_back(all_false);
        for (size_t mask = 1; mask < (size_t{1} << n); ++mask) {
            std::vector<bool> tau(n, false);
            std::vector<PosSentence> positives;
            for (size_t k = 0; k < n; ++k)
                if (mask & (size_t{1} << k)) {
                    tau[k] = true;
                    positives.push_back(phi_[k]);
                }
            bool realizable = true;
            for (size_t k = 0; k < n && realizable; ++k)
                if (!tau[k] && implies(positives, phi_[k])) realizable = false;
            if (!realizable) continue;
            type_index_[tau] = static_cast<int>(types_.size());
            types_.push_back(std::move(tau));
        }
    }

    int node_id(int state, int type) {
        PNode n{state, type};
        auto it = node_index_.find(n);
        if (it != node_index_.end()) return it->second;
        if (nodes_.size() >= opts_.max_nodes)
            throw Error(ErrorKind::Resource, "decompose: product node cap exceeded");
        int idx = static_cast<int>(nodes_.size());
        nodes_.push_back(n);
        node_index_.emplace(n, idx);
        out_edges_.push_back({});
        return idx;
    }

    void build_product() {
        std::map<std::string, int> id;
        for (size_t k = 0; k < a_.states.size(); ++k) id[a_.states[k]] = static_cast<int>(k);
        initial_node_ = node_id(id.at(a_.initial), 0);
        std::vector<int> worklist = {initial_node_};
        std::set<int> visited = {initial_node_};
        while (!worklist.empty()) {
            int cur = worklist.back();
            worklist.pop_back();
            PNode n = nodes_[cur];
            const std::vector<bool>& tau = types_[n.type];
            for (const detail::NormTransition& t : norm_) {
                if (t.from != n.state) continue;
                int tilde_id = phi_id(t.tilde);
                for (size_t ti = 0; ti < types_.size(); ++ti) {
                    const std::vector<bool>& tau2 = types_[ti];
                    bool mono = true;
                    for (size_t k = 0; k < phi_.size(); ++k)
                        if (tau[k] && !tau2[k]) mono = false;
                    if (!mono) continue;
                    if (tilde_id >= 0 && !tau2[tilde_id]) continue; // guard forces its tilde
                    // strengthen the guard with the target type
                    Guard g;
                    std::vector<PosSentence> pos = {t.guard.positive};
                    std::vector<PosSentence> positives_tau2;
                    for (size_t k = 0; k < phi_.size(); ++k)
                        if (tau2[k]) {
                            pos.push_back(phi_[k]);
                            positives_tau2.push_back(phi_[k]);
                        }
                    g.positive = pos.size() == 1 ? pos[0] : sentence_conjunction(pos);
                    g.negated = t.guard.negated;
                    for (size_t k = 0; k < phi_.size(); ++k)
                        if (!tau2[k]) g.negated.push_back(phi_[k]);
                    // drop edges whose strengthened guard is inconsistent
                    bool unsat = false;
                    std::vector<PosSentence> ante = {t.guard.positive};
                    for (const PosSentence& p : positives_tau2) ante.push_back(p);
                    for (const PosSentence& ng : g.negated)
                        if (implies(ante, ng)) unsat = true;
                    if (unsat) continue;
                    bool loopable = (static_cast<int>(ti) == n.type);
                    if (loopable)
                        for (const PosSentence& ng : t.guard.negated) {
                            int nid = phi_id(detail::pre_to_post(ng, schema_));
                            if (nid < 0 || tau[nid]) loopable = false;
                        }
                    int tgt = node_id(t.to, static_cast<int>(ti));
                    edges_.push_back(PEdge{cur, tgt, std::move(g), loopable, &t});
                    out_edges_[cur].push_back(static_cast<int>(edges_.size() - 1));
                    if (visited.insert(tgt).second) worklist.push_back(tgt);
                }
            }
        }
        // loop-SCCs over loopable edges
        std::vector<std::pair<int, int>> loop_edges;
        for (const PEdge& e : edges_)
            if (e.loopable) loop_edges.push_back({e.from, e.to});
        auto sccs = detail::tarjan_scc(nodes_.size(), loop_edges);
        scc_of_.assign(nodes_.size(), -1);
        scc_nodes_.assign(sccs.size(), {});
        for (size_t k = 0; k < sccs.size(); ++k) {
            scc_nodes_[k] = sccs[k];
            for (int v : sccs[k]) scc_of_[v] = static_cast<int>(k);
        }
    }

    bool node_accepting(int n) const {
        return a_.accepting.count(a_.states[nodes_[n].state]) != 0;
    }

    void enumerate_chains() {
        std::vector<int> sccs = {scc_of_[initial_node_]};
        std::vector<int> crossings;
        dfs_chain(sccs, crossings);
    }

    void dfs_chain(std::vector<int>& sccs, std::vector<int>& crossings) {
        if (chains_seen_ > opts_.max_chains || outputs_.size() >= opts_.max_outputs) {
            capped_ = true;
            return;
        }
        int last = sccs.back();
        bool has_accepting = false;
        for (int v : scc_nodes_[last])
            if (node_accepting(v)) has_accepting = true;
        if (has_accepting) {
            ++chains_seen_;
            emit_chain(sccs, crossings);
        }
        if (sccs.size() >= opts_.max_height) return;
        for (size_t ei = 0; ei < edges_.size(); ++ei) {
            const PEdge& e = edges_[ei];
            if (scc_of_[e.from] != last) continue;
            if (e.loopable && scc_of_[e.to] == last) continue; // stays inside
            sccs.push_back(scc_of_[e.to]);
            crossings.push_back(static_cast<int>(ei));
            dfs_chain(sccs, crossings);
            sccs.pop_back();
            crossings.pop_back();
        }
    }

    // ---- chain packaging ---------------------------------------------------

    struct BindVar {
        std::string name;
        DomainKind domain;
    };

    std::vector<BindVar> crossing_bind_vars(const PosSentence& s) const {
        std::vector<BindVar> out;
        std::set<std::string> seen;
        s.for_each_atom([&](const SAtom& at) {
            if (at.kind != AtomKind::Bind) return;
            const AccessMethod& m = schema_.method(at.target);
            const Relation& rel = schema_.relation(m.relation);
            size_t i = 0;
            for (size_t pos : m.inputs) {
                const Term& t = at.terms[i++];
                if (t.is_var && seen.insert(t.var).second)
                    out.push_back(BindVar{t.var, rel.positions[pos - 1]});
            }
        });
        return out;
    }

    static PosSentence substitute(const PosSentence& s,
                                  const std::map<std::string, Value>& sub) {
        PosSentence out;
        for (const std::string& v : s.vars)
            if (!sub.count(v)) out.vars.push_back(v);
        out.matrix = s.matrix.map_atoms([&](const SAtom& a) {
            SAtom b = a;
            for (Term& t : b.terms)
                if (t.is_var) {
                    auto it = sub.find(t.var);
                    if (it != sub.end()) t = Term::constant(it->second);
                }
            return Matrix::leaf(b);
        });
        return out;
    }

    // Instantiation values for a crossing variable: typed constants plus a
    // small pool of fresh literals per chain position (finite domains are
    // enumerated outright).
    std::vector<Value> instantiation_domain(const DomainKind& d, size_t position,
                                            size_t pool) const {
        std::vector<Value> out;
        switch (d.kind()) {
        case DomainKind::Kind::Boolean:
            return {Value::boolean(false), Value::boolean(true)};
        case DomainKind::Kind::Enum: {
            for (const std::string& l : d.literals()) out.push_back(Value::sym(l));
            return out;
        }
        default:
            break;
        }
        for (const Value& v : a_.all_constants(schema_))
            if (d.admits(v)) out.push_back(v);
        for (size_t p = 1; p <= position; ++p)
            for (size_t k = 0; k < pool; ++k) {
                if (d.kind() == DomainKind::Kind::String)
                    out.push_back(Value::str("@d" + std::to_string(p) + "_" + std::to_string(k)));
                else
                    out.push_back(Value::integer(
                        static_cast<int64_t>(9000000 + 100 * p + static_cast<int64_t>(k))));
            }
        return out;
    }

    void emit_chain(const std::vector<int>& sccs, const std::vector<int>& crossings) {
        // Enumerate instantiations of every crossing's bind variables.
        std::vector<std::map<std::string, Value>> subs = {{}};
        for (size_t c = 0; c < crossings.size(); ++c) {
            const PEdge& e = edges_[crossings[c]];
            auto vars = crossing_bind_vars(e.guard.positive);
            size_t pool = vars.size();
            for (const BindVar& bv : vars) {
                std::vector<std::map<std::string, Value>> next;
                auto domain = instantiation_domain(bv.domain, c + 1, pool);
                for (const auto& sub : subs)
                    for (const Value& v : domain) {
                        auto s2 = sub;
                        s2["x" + std::to_string(c) + ":" + bv.name] = v;
                        next.push_back(std::move(s2));
                        if (next.size() > opts_.max_instantiations) {
                            capped_ = true;
                            return;
                        }
                    }
                subs = std::move(next);
            }
        }
        for (const auto& sub : subs) {
            if (outputs_.size() >= opts_.max_outputs) return;
            package(sccs, crossings, sub);
        }
    }

    void package(const std::vector<int>& sccs, const std::vector<int>& crossings,
                 const std::map<std::string, Value>& sub) {
        AAutomaton out;
        ProgressiveWitness w;
        w.phi = phi_;
        out.constants = a_.all_constants(schema_);
        for (const auto& [_, v] : sub) out.constants.insert(v);

        auto state_name = [&](size_t pos, int node) {
            return "q" + std::to_string(pos) + "_" + a_.states[nodes_[node].state] + "_t" +
                   std::to_string(nodes_[node].type);
        };
        std::vector<bool> accept_last;
        for (size_t pos = 0; pos < sccs.size(); ++pos) {
            std::vector<std::string> comp;
            for (int v : scc_nodes_[sccs[pos]]) {
                std::string name = state_name(pos, v);
                out.states.push_back(name);
                comp.push_back(name);
                std::vector<bool> tau = types_[nodes_[v].type];
                w.post_type[name] = tau;
                if (pos + 1 == sccs.size() && node_accepting(v)) out.accepting.insert(name);
            }
            w.scc_chain.push_back(std::move(comp));
            // internal loopable edges of this component
            for (const PEdge& e : edges_) {
                if (!e.loopable) continue;
                if (scc_of_[e.from] != sccs[pos] || scc_of_[e.to] != sccs[pos]) continue;
                out.transitions.push_back(
                    AutTransition{state_name(pos, e.from), state_name(pos, e.to), e.guard});
            }
        }
        out.initial = state_name(0, initial_node_);
        for (size_t c = 0; c < crossings.size(); ++c) {
            const PEdge& e = edges_[crossings[c]];
            Guard g = e.guard;
            std::map<std::string, Value> local;
            for (const auto& [key, v] : sub) {
                std::string prefix = "x" + std::to_string(c) + ":";
                if (key.rfind(prefix, 0) == 0) local[key.substr(prefix.size())] = v;
            }
            g.positive = substitute(g.positive, local);
            out.transitions.push_back(
                AutTransition{state_name(c, e.from), state_name(c + 1, e.to), std::move(g)});
        }
        ProgressiveReport rep = check_progressive(out, w, schema_);
        if (!rep.ok)
            throw Error(ErrorKind::Validation,
                        "internal: decomposition output failed progressivity: " +
                            (rep.messages.empty() ? "?" : rep.messages.front()));
        outputs_.push_back({std::move(out), std::move(w)});
    }
};

inline std::vector<std::pair<AAutomaton, ProgressiveWitness>> decompose(
    const AAutomaton& a, const Schema& schema, const DecomposeOptions& opts = {}) {
    return Decomposer(a, schema, opts).run();
}

} // namespace accltl
