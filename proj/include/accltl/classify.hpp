#pragma once

#include <set>
#include <string>
#include <vector>

#include "accltl/logic.hpp"

namespace accltl {

enum class Fragment : uint8_t {
    AccLTL_full,
    AccLTL_plus,
    AccLTL_plus_neq,
    Acc0,
    Acc0_neq,
    Acc0_X,
    Acc0_X_neq,
};

struct FragmentReport {
    bool uses_full_bindings = false;
    bool uses_0ary_bindings_only = true;
    bool binding_positive = true;
    bool x_only = true;
    bool uses_inequalities = false;
    Fragment verdict = Fragment::Acc0;
    std::string capability;
};

inline std::string fragment_name(Fragment f) {
    switch (f) {
    case Fragment::AccLTL_full:
        return "AccLTL(FO∃+Acc)";
    case Fragment::AccLTL_plus:
        return "AccLTL+ (binding-positive)";
    case Fragment::AccLTL_plus_neq:
        return "AccLTL+(≠) (binding-positive, inequalities)";
    case Fragment::Acc0:
        return "AccLTL(FO∃+0-Acc)";
    case Fragment::Acc0_neq:
        return "AccLTL(FO∃+,≠0-Acc)";
    case Fragment::Acc0_X:
        return "AccLTL(X)(FO∃+0-Acc)";
    case Fragment::Acc0_X_neq:
        return "AccLTL(X)(FO∃+,≠0-Acc)";
    }
    return "?";
}

inline std::string fragment_capability(Fragment f) {
    switch (f) {
    case Fragment::AccLTL_full:
    case Fragment::AccLTL_plus_neq:
        return "undecidable — bounded search only";
    case Fragment::AccLTL_plus:
        return "decidable, 3EXPTIME upper bound (A-automaton pipeline, emptiness "
               "2EXPTIME-compl.)";
    case Fragment::Acc0:
    case Fragment::Acc0_neq:
        return "decidable, PSPACE-compl. (finite-word LTL reduction)";
    case Fragment::Acc0_X:
    case Fragment::Acc0_X_neq:
        return "decidable, Σ2P-compl. (fixed-length search)";
    }
    return "?";
}

// Fragment classification: the least class of the inclusion diagram that
// contains the formula. binding_positive counts Not nodes above each atom
// sentence that mentions a binding predicate.
inline FragmentReport classify(const AccFormula& f) {
    FragmentReport r;
    bool any_until = false;
    std::function<void(const AccFormula&)> scan_ops = [&](const AccFormula& g) {
        if (g.op() == AccFormula::Op::Until) any_until = true;
        for (const auto& k : g.kids()) scan_ops(*k);
    };
    scan_ops(f);
    r.x_only = !any_until;

    f.for_each_sentence([&](const PosSentence& s, size_t negations) {
        bool has_bind = false;
        s.for_each_atom([&](const SAtom& a) {
            if (a.kind == AtomKind::Bind) {
                r.uses_full_bindings = true;
                has_bind = true;
            }
            if (a.kind == AtomKind::Bind0) has_bind = true;
            if (a.kind == AtomKind::Neq) r.uses_inequalities = true;
        });
        if (has_bind && negations % 2 == 1) r.binding_positive = false;
    });
    r.uses_0ary_bindings_only = !r.uses_full_bindings;

    if (r.uses_0ary_bindings_only) {
        if (r.x_only)
            r.verdict = r.uses_inequalities ? Fragment::Acc0_X_neq : Fragment::Acc0_X;
        else
            r.verdict = r.uses_inequalities ? Fragment::Acc0_neq : Fragment::Acc0;
    } else if (r.binding_positive) {
        r.verdict = r.uses_inequalities ? Fragment::AccLTL_plus_neq : Fragment::AccLTL_plus;
    } else {
        r.verdict = Fragment::AccLTL_full;
    }
    r.capability = fragment_capability(r.verdict);
    return r;
}

// ---------------------------------------------------------------------------
// Qf(phi): the IsBind-free closure of the formula's positive sentences
// (rewrites IsBind0 /\ psi -> psi and IsBind0 \/ psi -> psi to fixpoint).
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_bind0_leaf(const Matrix& m) {
    return m.op == Matrix::Op::Leaf && m.atom.kind == AtomKind::Bind0;
}

inline Matrix strip_bind0(const Matrix& m) {
    if (m.op == Matrix::Op::Leaf)
        return is_bind0_leaf(m) ? Matrix::truth() : m; // bare flag: vacuous
    Matrix out;
    out.op = m.op;
    for (const Matrix& k : m.kids) {
        if (is_bind0_leaf(k)) continue;
        out.kids.push_back(strip_bind0(k));
    }
    if (out.kids.size() == 1) return out.kids[0];
    return out;
}

inline std::set<std::string> used_vars(const Matrix& m) {
    std::set<std::string> out;
    m.for_each_atom([&](const SAtom& a) {
        for (const Term& t : a.terms)
            if (t.is_var) out.insert(t.var);
    });
    return out;
}

inline PosSentence prune_unused_vars(PosSentence s) {
    std::set<std::string> used = used_vars(s.matrix);
    std::vector<std::string> keep;
    for (const std::string& v : s.vars)
        if (used.count(v)) keep.push_back(v);
    s.vars = std::move(keep);
    return s;
}

} // namespace detail

inline std::vector<PosSentence> qf_closure(const AccFormula& f) {
    bool full = false;
    f.for_each_sentence([&](const PosSentence& s, size_t) {
        s.for_each_atom([&](const SAtom& a) {
            if (a.kind == AtomKind::Bind) full = true;
        });
    });
    if (full)
        throw Error(ErrorKind::Fragment, "qf_closure requires the 0-ary binding fragment");

    std::vector<PosSentence> out;
    std::set<std::string> seen;
    f.for_each_sentence([&](const PosSentence& s, size_t) {
        PosSentence q;
        q.vars = s.vars;
        q.matrix = detail::strip_bind0(s.matrix);
        q = detail::prune_unused_vars(std::move(q));
        if (seen.insert(q.to_string()).second) out.push_back(std::move(q));
    });
    return out;
}

// ---------------------------------------------------------------------------
// The tilde rewrite: IsBind_AcM(t) atoms become t = x for a shared fresh
// tuple of variables, and every pre-relation becomes its post copy.
// ---------------------------------------------------------------------------

inline PosSentence tilde_rewrite(const PosSentence& guard, const Schema& schema) {
    std::set<std::string> methods;
    guard.for_each_atom([&](const SAtom& a) {
        if (a.kind == AtomKind::Bind || a.kind == AtomKind::Bind0) methods.insert(a.target);
    });
    if (methods.size() > 1)
        throw Error(ErrorKind::Precondition,
                    "guard mixes IsBind atoms of distinct methods");

    std::vector<std::string> shared;
    if (!methods.empty()) {
        size_t arity = schema.method(*methods.begin()).inputs.size();
        for (size_t i = 0; i < arity; ++i) shared.push_back("_tx" + std::to_string(i));
    }

    PosSentence out;
    out.vars = guard.vars;
    for (const std::string& v : shared) out.vars.push_back(v);
    out.matrix = guard.matrix.map_atoms([&](const SAtom& a) -> Matrix {
        switch (a.kind) {
        case AtomKind::Pre: {
            SAtom b = a;
            b.kind = AtomKind::Post;
            return Matrix::leaf(b);
        }
        case AtomKind::Bind: {
            std::vector<Matrix> eqs;
            for (size_t i = 0; i < a.terms.size(); ++i) {
                SAtom eq;
                eq.kind = AtomKind::Eq;
                eq.terms = {a.terms[i], Term::variable(shared[i])};
                eqs.push_back(Matrix::leaf(eq));
            }
            return Matrix::conj(std::move(eqs));
        }
        case AtomKind::Bind0:
            return Matrix::truth();
        default:
            return Matrix::leaf(a);
        }
    });
    return detail::prune_unused_vars(std::move(out));
}

} // namespace accltl
