#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "accltl/datalog.hpp"
#include "accltl/progressive.hpp"

namespace accltl {

// Output of the progressive-automaton-to-Datalog reduction. The automaton's
// language is non-empty iff the program is NOT contained in the sentence:
// some database accepted by the program must violate it. The program carries
// the positive constraints (view evolution gated by guards and 0-ary state
// predicates), the sentence the negative ones (violation patterns over the
// stage contents, plus the one-relation-per-crossing exclusion).
struct ReductionOutput {
    dl::DatalogProgram program;
    dl::PositiveSentence sentence;
    std::map<std::string, std::string> legend; // predicate -> description
    size_t height = 0;
};

namespace detail {

inline std::string sanitize_pred(const std::string& s) {
    std::string out;
    for (char c : s)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#'
                          ? c
                          : '_');
    return out;
}

} // namespace detail

class ProgressiveReducer {
  public:
    ProgressiveReducer(const AAutomaton& a, const ProgressiveWitness& w, const Schema& schema,
                       size_t dnf_cap = 512)
        : a_(a), w_(w), schema_(schema), dnf_cap_(dnf_cap) {
        ProgressiveReport rep = check_progressive(a, w, schema);
        if (!rep.ok)
            throw Error(ErrorKind::Precondition,
                        "reduce_progressive requires a progressive automaton: " +
                            (rep.messages.empty() ? "?" : rep.messages.front()));
    }

    ReductionOutput run() {
        height_ = w_.scc_chain.size();
        for (size_t i = 0; i < height_; ++i)
            for (const std::string& s : w_.scc_chain[i]) stage_[s] = i + 1; // stages 1-based
        find_crossings();
        declare_predicates();
        seed_rules();
        for (const AutTransition& t : a_.transitions) translate_transition(t);
        crossing_copy_rules();
        goal_rules();
        build_sentence();
        finish();
        return std::move(out_);
    }

  private:
    const AAutomaton& a_;
    const ProgressiveWitness& w_;
    const Schema& schema_;
    size_t dnf_cap_;
    size_t height_ = 0;
    std::map<std::string, size_t> stage_;
    std::vector<const AutTransition*> crossing_; // index i: stage i+1 -> i+2
    ReductionOutput out_;
    std::set<std::string> rule_keys_;

    // ---- names -------------------------------------------------------------

    std::string at_pred(const std::string& state) const {
        return "At_" + detail::sanitize_pred(state);
    }
    std::string view_pred(const std::string& rel, size_t i) const {
        return "View_" + detail::sanitize_pred(rel) + "_" + std::to_string(i);
    }
    std::string bg_pred(const std::string& rel, size_t i) const {
        return "Background_" + detail::sanitize_pred(rel) + "_" + std::to_string(i);
    }
    std::string intbg_pred(const std::string& rel, size_t i) const {
        return "IntBackground_" + detail::sanitize_pred(rel) + "_" + std::to_string(i);
    }

    void add_rule(dl::DatalogRule r) {
        std::string key = r.to_string();
        if (rule_keys_.insert(key).second) out_.program.rules.push_back(std::move(r));
    }

    void find_crossings() {
        crossing_.assign(height_ > 0 ? height_ - 1 : 0, nullptr);
        for (const AutTransition& t : a_.transitions) {
            size_t i = stage_.at(t.from), j = stage_.at(t.to);
            if (j == i + 1) crossing_[i - 1] = &t;
        }
    }

    void declare_predicates() {
        for (const auto& [rel, _] : schema_.relations()) {
            for (size_t i = 1; i <= height_; ++i) {
                out_.legend[view_pred(rel, i)] =
                    "view of " + rel + " during stage " + std::to_string(i);
                out_.legend[bg_pred(rel, i)] =
                    "part of " + rel + " revealed within stage " + std::to_string(i);
            }
            for (size_t i = 1; i + 1 <= height_; ++i)
                out_.legend[intbg_pred(rel, i)] =
                    "part of " + rel + " revealed when crossing stage " + std::to_string(i) +
                    " to " + std::to_string(i + 1);
        }
        for (const std::string& s : a_.states)
            out_.legend[at_pred(s)] = "control: run has reached state " + s;
        out_.legend["Dom"] = "active domain values";
        out_.legend["Goal"] = "acceptance";
        out_.program.goal = "Goal";
        // the intensional schema is fixed up front: control and view
        // predicates stay intensional even when no rule happens to derive them
        for (const std::string& s : a_.states)
            out_.program.declared_intensional.insert(at_pred(s));
        for (const auto& [rel, _] : schema_.relations())
            for (size_t i = 1; i <= height_; ++i)
                out_.program.declared_intensional.insert(view_pred(rel, i));
        out_.program.declared_intensional.insert("Dom");
        out_.program.declared_intensional.insert("Goal");
    }

    void seed_rules() {
        // Dom collects every value of the extensional database plus the
        // automaton constants.
        for (const auto& [rel, r] : schema_.relations()) {
            for (size_t i = 1; i <= height_; ++i) {
                for (size_t k = 0; k < r.arity(); ++k) {
                    dl::DatalogRule rule;
                    rule.head = {"Dom", {Term::variable("X" + std::to_string(k))}};
                    dl::DlAtom body{bg_pred(rel, i), {}};
                    for (size_t j = 0; j < r.arity(); ++j)
                        body.terms.push_back(Term::variable("X" + std::to_string(j)));
                    rule.body = {body};
                    add_rule(rule);
                    if (i + 1 <= height_) {
                        rule.body[0].pred = intbg_pred(rel, i);
                        add_rule(rule);
                    }
                }
            }
        }
        for (const Value& c : a_.all_constants(schema_))
            add_rule(dl::DatalogRule{{"Dom", {Term::constant(c)}}, {}});

        // Initial control fact, provided the pre-sentence holds of the empty
        // initial instance.
        TransitionStructure empty;
        empty.mode = StructureMode::Full;
        for (const Value& c : w_.pre.constants()) empty.domain.push_back(c);
        if (eval_sentence(w_.pre, empty))
            add_rule(dl::DatalogRule{{at_pred(a_.initial), {}}, {}});
    }

    // ---- guard translation ---------------------------------------------------

    struct DisjunctContext {
        detail::TermUnify uf;
        std::vector<SAtom> pre_atoms, post_atoms, bind_atoms;
        std::string method; // from bind atoms; empty if none
        bool ok = true;
    };

    static std::string term_key(detail::TermUnify& uf, const Term& t) {
        if (t.is_var) return "v:" + t.var;
        std::string k = "c:" + t.val.to_string();
        uf.assign(k, t.val);
        return k;
    }

    DisjunctContext analyze(const std::vector<SAtom>& atoms) const {
        DisjunctContext ctx;
        for (const SAtom& a : atoms) {
            switch (a.kind) {
            case AtomKind::Eq:
                if (!ctx.uf.merge(term_key(ctx.uf, a.terms[0]), term_key(ctx.uf, a.terms[1])))
                    ctx.ok = false;
                break;
            case AtomKind::Neq:
                throw Error(ErrorKind::Validation, "inequality in automaton guard");
            case AtomKind::Pre:
                ctx.pre_atoms.push_back(a);
                break;
            case AtomKind::Post:
                ctx.post_atoms.push_back(a);
                break;
            case AtomKind::Bind:
            case AtomKind::Bind0:
                ctx.bind_atoms.push_back(a);
                if (ctx.method.empty())
                    ctx.method = a.target;
                else if (ctx.method != a.target)
                    ctx.ok = false;
                break;
            }
            for (const Term& t : a.terms) term_key(ctx.uf, t);
        }
        return ctx;
    }

    Term resolved(detail::TermUnify& uf, const Term& t,
                  const std::map<std::string, std::string>& rep_var) const {
        std::string r = uf.find(term_key(uf, t));
        auto c = uf.constant.find(r);
        if (c != uf.constant.end()) return Term::constant(c->second);
        return Term::variable(rep_var.at(r));
    }

    // Emits the rules of one DNF disjunct of one transition.
    // reveal_rel empty => traversal (empty response).
    void emit_disjunct(const AutTransition& t, const std::vector<SAtom>& atoms, size_t stage,
                       bool crossing, const std::string& reveal_method) {
        DisjunctContext ctx = analyze(atoms);
        if (!ctx.ok) return;
        if (!reveal_method.empty() && !ctx.method.empty() && ctx.method != reveal_method) return;

        std::string reveal_rel =
            reveal_method.empty() ? "" : schema_.method(reveal_method).relation;
        size_t reveal_ar = reveal_rel.empty() ? 0 : schema_.relation(reveal_rel).arity();

        // Head-tuple variables X0..; bind atoms unify with the input positions.
        if (!reveal_rel.empty()) {
            const AccessMethod& m = schema_.method(reveal_method);
            for (const SAtom& b : ctx.bind_atoms) {
                if (b.kind == AtomKind::Bind0) continue;
                size_t i = 0;
                for (size_t pos : m.inputs) {
                    if (!ctx.uf.merge(term_key(ctx.uf, b.terms[i]),
                                      "v:__X" + std::to_string(pos - 1)))
                        ctx.ok = false;
                    ++i;
                }
            }
        } else {
            // Traversal: binding values are unconstrained domain values.
        }
        if (!ctx.ok) return;

        // Choose, per post atom, how it is witnessed: the current view, the
        // revealed tuple itself, or a same-binding tuple destined for the same
        // response.
        size_t n_post = ctx.post_atoms.size();
        std::vector<int> choice(n_post, 0);
        while (true) {
            emit_choice(t, ctx, choice, stage, crossing, reveal_method, reveal_rel, reveal_ar);
            size_t k = 0;
            while (k < n_post) {
                int max_choice = (reveal_rel.empty() || ctx.post_atoms[k].target != reveal_rel)
                                     ? 0
                                     : 2;
                if (++choice[k] <= max_choice) break;
                choice[k] = 0;
                ++k;
            }
            if (k == n_post) break;
            if (n_post == 0) break;
        }
    }

    void emit_choice(const AutTransition& t, DisjunctContext ctx, const std::vector<int>& choice,
                     size_t stage, bool crossing, const std::string& reveal_method,
                     const std::string& reveal_rel, size_t reveal_ar) {
        const AccessMethod* method =
            reveal_method.empty() ? nullptr : &schema_.method(reveal_method);
        size_t view_stage = stage; // stage whose views witness pre/post atoms
        size_t target_stage = crossing ? stage + 1 : stage;
        std::string tuple_src =
            reveal_rel.empty() ? "" : (crossing ? intbg_pred(reveal_rel, stage)
                                                : bg_pred(reveal_rel, stage));

        // All unifications first: post atoms read as the revealed tuple, and
        // same-response background witnesses sharing the binding.
        for (size_t k = 0; k < ctx.post_atoms.size(); ++k) {
            const SAtom& a = ctx.post_atoms[k];
            if (choice[k] == 1) {
                for (size_t j = 0; j < a.terms.size(); ++j)
                    if (!ctx.uf.merge(term_key(ctx.uf, a.terms[j]),
                                      "v:__X" + std::to_string(j)))
                        return;
            } else if (choice[k] == 2 && method) {
                for (size_t pos : method->inputs)
                    if (!ctx.uf.merge(term_key(ctx.uf, a.terms[pos - 1]),
                                      "v:__X" + std::to_string(pos - 1)))
                        return;
            }
        }

        // Representative names for every variable class.
        std::map<std::string, std::string> rep_var;
        size_t counter = 0;
        auto ensure_rep = [&](const Term& term) {
            std::string r = ctx.uf.find(term_key(ctx.uf, term));
            if (ctx.uf.constant.count(r)) return;
            if (!rep_var.count(r)) rep_var[r] = "V" + std::to_string(counter++);
        };
        for (size_t j = 0; j < reveal_ar; ++j)
            ensure_rep(Term::variable("__X" + std::to_string(j)));
        for (const SAtom& a : ctx.pre_atoms)
            for (const Term& term : a.terms) ensure_rep(term);
        for (const SAtom& a : ctx.post_atoms)
            for (const Term& term : a.terms) ensure_rep(term);
        for (const SAtom& a : ctx.bind_atoms)
            for (const Term& term : a.terms) ensure_rep(term);

        std::vector<dl::DlAtom> body;
        body.push_back({at_pred(t.from), {}});
        std::set<std::string> covered;

        auto add_atom = [&](const std::string& pred, const std::vector<Term>& raw) {
            dl::DlAtom a{pred, {}};
            for (const Term& term : raw) {
                Term r = resolved(ctx.uf, term, rep_var);
                if (r.is_var) covered.insert(r.var);
                a.terms.push_back(std::move(r));
            }
            body.push_back(std::move(a));
        };

        std::vector<Term> head_tuple;
        if (!reveal_rel.empty()) {
            std::vector<Term> xs;
            for (size_t j = 0; j < reveal_ar; ++j)
                xs.push_back(Term::variable("__X" + std::to_string(j)));
            add_atom(tuple_src, xs);
            for (const Term& x : xs) head_tuple.push_back(resolved(ctx.uf, x, rep_var));
        }
        for (const SAtom& a : ctx.pre_atoms) add_atom(view_pred(a.target, view_stage), a.terms);
        for (size_t k = 0; k < ctx.post_atoms.size(); ++k) {
            const SAtom& a = ctx.post_atoms[k];
            if (choice[k] == 0)
                add_atom(view_pred(a.target, view_stage), a.terms);
            else if (choice[k] == 2)
                add_atom(tuple_src, a.terms);
            // choice 1: the atom is the revealed tuple itself
        }

        // Binding values with no other occurrence range over Dom.
        for (const SAtom& a : ctx.bind_atoms)
            for (const Term& term : a.terms) {
                Term r = resolved(ctx.uf, term, rep_var);
                if (r.is_var && !covered.count(r.var)) {
                    body.push_back({"Dom", {r}});
                    covered.insert(r.var);
                }
            }

        add_rule(dl::DatalogRule{{at_pred(t.to), {}}, body});
        if (!reveal_rel.empty())
            add_rule(dl::DatalogRule{{view_pred(reveal_rel, target_stage), head_tuple}, body});
    }

    void translate_transition(const AutTransition& t) {
        size_t i = stage_.at(t.from), j = stage_.at(t.to);
        bool crossing = (j == i + 1);
        std::vector<std::vector<SAtom>> disjuncts;
        detail::dnf_matrix(t.guard.positive.matrix, disjuncts, dnf_cap_);
        for (const auto& atoms : disjuncts) {
            // traversal (empty response)
            emit_disjunct(t, atoms, i, crossing, "");
            // reveal via the guard's method, or any method when unconstrained
            std::set<std::string> methods;
            for (const SAtom& a : atoms)
                if (a.kind == AtomKind::Bind || a.kind == AtomKind::Bind0)
                    methods.insert(a.target);
            if (methods.empty())
                for (const auto& [name, _] : schema_.methods()) methods.insert(name);
            for (const std::string& m : methods) emit_disjunct(t, atoms, i, crossing, m);
        }
    }

    void crossing_copy_rules() {
        for (size_t i = 1; i + 1 <= height_; ++i) {
            const AutTransition* cross = crossing_[i - 1];
            if (!cross) continue;
            std::string gate = at_pred(cross->to);
            // cumulative views
            for (const auto& [rel, r] : schema_.relations()) {
                dl::DatalogRule rule;
                std::vector<Term> xs;
                for (size_t k = 0; k < r.arity(); ++k)
                    xs.push_back(Term::variable("X" + std::to_string(k)));
                rule.head = {view_pred(rel, i + 1), xs};
                rule.body = {{view_pred(rel, i), xs}, {gate, {}}};
                add_rule(rule);
            }
            // binding mates of a constant-bound crossing access
            std::set<std::string> methods;
            std::map<std::string, std::map<size_t, Value>> const_binding;
            cross->guard.positive.for_each_atom([&](const SAtom& a) {
                if (a.kind != AtomKind::Bind) return;
                methods.insert(a.target);
                const AccessMethod& m = schema_.method(a.target);
                size_t idx = 0;
                for (size_t pos : m.inputs) {
                    if (!a.terms[idx].is_var) const_binding[a.target][pos] = a.terms[idx].val;
                    ++idx;
                }
            });
            for (const std::string& mname : methods) {
                const AccessMethod& m = schema_.method(mname);
                const Relation& r = schema_.relation(m.relation);
                dl::DatalogRule rule;
                std::vector<Term> xs;
                for (size_t k = 0; k < r.arity(); ++k) {
                    auto it = const_binding[mname].find(k + 1);
                    xs.push_back(it != const_binding[mname].end()
                                     ? Term::constant(it->second)
                                     : Term::variable("X" + std::to_string(k)));
                }
                rule.head = {view_pred(m.relation, i + 1), xs};
                rule.body = {{intbg_pred(m.relation, i), xs}, {gate, {}}};
                add_rule(rule);
            }
        }
    }

    void goal_rules() {
        for (const std::string& f : a_.accepting)
            add_rule(dl::DatalogRule{{"Goal", {}}, {{at_pred(f), {}}}});
    }

    // ---- the positive sentence (violation patterns) -------------------------

    dl::PsNode content_atom(const std::string& rel, const std::vector<Term>& terms, size_t stage,
                            bool include_crossing) const {
        dl::PsNode out;
        out.op = dl::PsNode::Op::Or;
        for (size_t j = 1; j <= stage; ++j) {
            dl::PsNode leaf;
            leaf.op = dl::PsNode::Op::Atom;
            leaf.atom = {bg_pred(rel, j), terms};
            out.kids.push_back(std::move(leaf));
        }
        for (size_t j = 1; j < stage; ++j) {
            dl::PsNode leaf;
            leaf.op = dl::PsNode::Op::Atom;
            leaf.atom = {intbg_pred(rel, j), terms};
            out.kids.push_back(std::move(leaf));
        }
        if (include_crossing && stage < height_) {
            dl::PsNode leaf;
            leaf.op = dl::PsNode::Op::Atom;
            leaf.atom = {intbg_pred(rel, stage), terms};
            out.kids.push_back(std::move(leaf));
        }
        return out;
    }

    dl::PsNode translate_violation(const Matrix& m, size_t stage, bool crossing,
                                   std::vector<std::string>& vars, size_t disjunct_id) const {
        switch (m.op) {
        case Matrix::Op::Leaf: {
            const SAtom& a = m.atom;
            std::vector<Term> terms;
            for (const Term& t : a.terms) {
                Term r = t;
                if (r.is_var) r.var = "W" + std::to_string(disjunct_id) + "_" + r.var;
                terms.push_back(std::move(r));
            }
            switch (a.kind) {
            case AtomKind::Pre:
                return content_atom(a.target, terms, stage, false);
            case AtomKind::Post:
                return content_atom(a.target, terms, stage, crossing);
            case AtomKind::Eq:
            case AtomKind::Neq: {
                dl::PsNode n;
                n.op = a.kind == AtomKind::Eq ? dl::PsNode::Op::Eq : dl::PsNode::Op::Neq;
                n.eq_terms = terms;
                return n;
            }
            default:
                throw Error(ErrorKind::Validation, "IsBind inside a negated guard sentence");
            }
        }
        case Matrix::Op::And:
        case Matrix::Op::Or: {
            dl::PsNode n;
            n.op = m.op == Matrix::Op::And ? dl::PsNode::Op::And : dl::PsNode::Op::Or;
            for (const Matrix& k : m.kids)
                n.kids.push_back(translate_violation(k, stage, crossing, vars, disjunct_id));
            return n;
        }
        }
        throw Error(ErrorKind::Validation, "unreachable");
    }

    void build_sentence() {
        dl::PsNode root;
        root.op = dl::PsNode::Op::Or;
        size_t disjunct_id = 0;
        std::set<std::string> seen;
        for (const AutTransition& t : a_.transitions) {
            size_t i = stage_.at(t.from), j = stage_.at(t.to);
            bool crossing = (j == i + 1);
            for (const PosSentence& n : t.guard.negated) {
                std::vector<std::string> vars;
                dl::PsNode node = translate_violation(n.matrix, i, crossing, vars, disjunct_id);
                for (const std::string& v : n.vars)
                    out_.sentence.vars.push_back("W" + std::to_string(disjunct_id) + "_" + v);
                std::string key = std::to_string(i) + "|" + std::to_string(crossing) + "|" +
                                  n.to_string();
                if (seen.insert(key).second) {
                    root.kids.push_back(std::move(node));
                    ++disjunct_id;
                } else {
                    // drop the duplicate's variables again
                    for (size_t k = 0; k < n.vars.size(); ++k) out_.sentence.vars.pop_back();
                }
            }
        }
        // one relation per crossing
        for (size_t i = 1; i + 1 <= height_; ++i) {
            std::vector<std::string> rels;
            for (const auto& [rel, _] : schema_.relations()) rels.push_back(rel);
            for (size_t x = 0; x < rels.size(); ++x)
                for (size_t y = x + 1; y < rels.size(); ++y) {
                    dl::PsNode conj;
                    conj.op = dl::PsNode::Op::And;
                    auto mk = [&](const std::string& rel) {
                        dl::PsNode leaf;
                        leaf.op = dl::PsNode::Op::Atom;
                        leaf.atom.pred = intbg_pred(rel, i);
                        size_t ar = schema_.relation(rel).arity();
                        for (size_t k = 0; k < ar; ++k) {
                            std::string v = "M" + std::to_string(disjunct_id) + "_" +
                                            std::to_string(k);
                            leaf.atom.terms.push_back(Term::variable(v));
                            out_.sentence.vars.push_back(v);
                        }
                        ++disjunct_id;
                        return leaf;
                    };
                    conj.kids.push_back(mk(rels[x]));
                    conj.kids.push_back(mk(rels[y]));
                    root.kids.push_back(std::move(conj));
                }
        }
        out_.sentence.matrix = std::move(root);
    }

    void finish() {
        out_.height = height_;
        // arities for the printer
        for (const dl::DatalogRule& r : out_.program.rules) {
            out_.program.arity[r.head.pred] = r.head.terms.size();
            for (const dl::DlAtom& a : r.body) out_.program.arity[a.pred] = a.terms.size();
        }
        out_.program.check();
    }
};

inline ReductionOutput reduce_progressive(const AAutomaton& a, const ProgressiveWitness& w,
                                          const Schema& schema) {
    return ProgressiveReducer(a, w, schema).run();
}

// ---------------------------------------------------------------------------
// .dl serialization
// ---------------------------------------------------------------------------

inline std::string reduction_to_string(const ReductionOutput& r) {
    std::ostringstream os;
    os << "% legend:\n";
    for (const auto& [pred, desc] : r.legend) os << "%   " << pred << " = " << desc << "\n";
    os << "% height: " << r.height << "\n";
    std::set<std::string> intens = r.program.intensional();
    os << "intensional";
    for (const std::string& name : intens) os << " " << name;
    os << ".\n";
    for (const dl::DatalogRule& rule : r.program.rules) os << rule.to_string() << "\n";
    os << "goal " << r.program.goal << ".\n";
    os << "sentence " << r.sentence.to_string() << "\n";
    return os.str();
}

inline std::string program_to_string(const dl::DatalogProgram& p) {
    std::ostringstream os;
    std::set<std::string> intens = p.intensional();
    if (!intens.empty()) {
        os << "intensional";
        for (const std::string& name : intens) os << " " << name;
        os << ".\n";
    }
    for (const dl::DatalogRule& rule : p.rules) os << rule.to_string() << "\n";
    os << "goal " << p.goal << ".\n";
    return os.str();
}

namespace detail {

inline Term dl_term_from_token(const std::string& tok, const std::string& where) {
    if (tok.empty()) throw Error::parse(where, "empty term");
    if (std::isupper(static_cast<unsigned char>(tok[0])) || tok[0] == '_')
        return Term::variable(tok);
    return Term::constant(parse_literal(tok, where));
}

inline dl::DlAtom parse_dl_atom(const std::string& text, const std::string& where) {
    std::string s = trim(text);
    size_t open = s.find('(');
    dl::DlAtom atom;
    if (open == std::string::npos) {
        atom.pred = s;
        return atom;
    }
    if (s.back() != ')') throw Error::parse(where, "malformed atom: " + s);
    atom.pred = trim(s.substr(0, open));
    std::string body = s.substr(open + 1, s.size() - open - 2);
    std::string cur;
    bool in_str = false;
    std::vector<std::string> parts;
    for (char c : body) {
        if (c == '"') in_str = !in_str;
        if (c == ',' && !in_str) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty() || !parts.empty()) parts.push_back(cur);
    for (const std::string& p : parts) {
        std::string t = trim(p);
        if (!t.empty()) atom.terms.push_back(dl_term_from_token(t, where));
    }
    return atom;
}

inline dl::PsNode ps_from_sexp(const Sexp& s, const std::set<std::string>& scope);

inline dl::PsNode ps_atom_from_sexp(const Sexp& s, const std::set<std::string>& scope) {
    dl::PsNode n;
    const std::string& head = s.kids[0].text;
    if (head == "=" || head == "!=") {
        n.op = head == "=" ? dl::PsNode::Op::Eq : dl::PsNode::Op::Neq;
        for (size_t i = 1; i < s.kids.size(); ++i)
            n.eq_terms.push_back(term_from_sexp(s.kids[i], scope));
        if (n.eq_terms.size() != 2) throw Error::parse(s.where(), "(in)equality takes two terms");
        return n;
    }
    n.op = dl::PsNode::Op::Atom;
    n.atom.pred = head;
    for (size_t i = 1; i < s.kids.size(); ++i)
        n.atom.terms.push_back(term_from_sexp(s.kids[i], scope));
    return n;
}

inline dl::PsNode ps_from_sexp(const Sexp& s, const std::set<std::string>& scope) {
    if (s.kind == Sexp::Kind::Sym) {
        dl::PsNode n;
        if (s.text == "true") {
            n.op = dl::PsNode::Op::And;
            return n;
        }
        if (s.text == "false") {
            n.op = dl::PsNode::Op::Or;
            return n;
        }
        throw Error::parse(s.where(), "expected a sentence node");
    }
    if (s.kind != Sexp::Kind::List || s.kids.empty() || s.kids[0].kind != Sexp::Kind::Sym)
        throw Error::parse(s.where(), "expected a sentence node");
    const std::string& head = s.kids[0].text;
    if (head == "and" || head == "or") {
        dl::PsNode n;
        n.op = head == "and" ? dl::PsNode::Op::And : dl::PsNode::Op::Or;
        for (size_t i = 1; i < s.kids.size(); ++i) n.kids.push_back(ps_from_sexp(s.kids[i], scope));
        return n;
    }
    return ps_atom_from_sexp(s, scope);
}

} // namespace detail

inline dl::PositiveSentence parse_db_sentence(const std::string& text,
                                              const std::string& source = "<sentence>") {
    SexpReader r(text, source);
    auto all = r.read_all();
    if (all.size() != 1) throw Error::parse(source, "expected one sentence");
    const Sexp& s = all[0];
    dl::PositiveSentence out;
    if (s.kind == Sexp::Kind::List && !s.kids.empty() && s.kids[0].is_sym("exists")) {
        if (s.kids.size() != 3 || s.kids[1].kind != Sexp::Kind::List)
            throw Error::parse(s.where(), "expected (exists (v ...) matrix)");
        std::set<std::string> scope;
        for (const Sexp& v : s.kids[1].kids) {
            scope.insert(v.text);
            out.vars.push_back(v.text);
        }
        out.matrix = detail::ps_from_sexp(s.kids[2], scope);
    } else {
        out.matrix = detail::ps_from_sexp(s, {});
    }
    return out;
}

// Parses a .dl file: rules, a goal directive, and an optional sentence
// directive. Variables start with an uppercase letter or '_'.
inline std::pair<dl::DatalogProgram, std::optional<dl::PositiveSentence>> parse_datalog(
    const std::string& text, const std::string& source = "<datalog>") {
    dl::DatalogProgram p;
    std::optional<dl::PositiveSentence> sentence;
    size_t lineno = 0;
    std::istringstream is(text);
    std::string raw;
    while (std::getline(is, raw)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        // strip % comments outside strings
        std::string line;
        bool in_str = false;
        for (char c : raw) {
            if (c == '"') in_str = !in_str;
            if (c == '%' && !in_str) break;
            line.push_back(c);
        }
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.rfind("goal", 0) == 0) {
            std::string g = detail::trim(line.substr(4));
            if (!g.empty() && g.back() == '.') g.pop_back();
            p.goal = detail::trim(g);
            continue;
        }
        if (line.rfind("intensional", 0) == 0) {
            std::string names = detail::trim(line.substr(11));
            if (!names.empty() && names.back() == '.') names.pop_back();
            std::istringstream ns(names);
            std::string name;
            while (ns >> name) p.declared_intensional.insert(name);
            continue;
        }
        if (line.rfind("sentence", 0) == 0) {
            sentence = parse_db_sentence(detail::trim(line.substr(8)), where);
            continue;
        }
        if (line.back() != '.') throw Error::parse(where, "rule must end with '.'");
        line.pop_back();
        size_t sep = line.find(":-");
        dl::DatalogRule rule;
        if (sep == std::string::npos) {
            rule.head = detail::parse_dl_atom(line, where);
        } else {
            rule.head = detail::parse_dl_atom(line.substr(0, sep), where);
            // split body on commas at paren depth 0
            std::string body = line.substr(sep + 2);
            std::string cur;
            int depth = 0;
            bool instr = false;
            std::vector<std::string> parts;
            for (char c : body) {
                if (c == '"') instr = !instr;
                if (!instr) {
                    if (c == '(') ++depth;
                    if (c == ')') --depth;
                    if (c == ',' && depth == 0) {
                        parts.push_back(cur);
                        cur.clear();
                        continue;
                    }
                }
                cur.push_back(c);
            }
            if (!detail::trim(cur).empty()) parts.push_back(cur);
            for (const std::string& part : parts)
                rule.body.push_back(detail::parse_dl_atom(part, where));
        }
        p.rules.push_back(std::move(rule));
    }
    for (const dl::DatalogRule& r : p.rules) {
        p.arity[r.head.pred] = r.head.terms.size();
        for (const dl::DlAtom& a : r.body) p.arity[a.pred] = a.terms.size();
    }
    p.check();
    return {std::move(p), std::move(sentence)};
}

} // namespace accltl
