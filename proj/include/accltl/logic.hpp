#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "accltl/schema.hpp"

namespace accltl {

// ---------------------------------------------------------------------------
// Terms and atoms of the Sch_Acc vocabulary
// ---------------------------------------------------------------------------

struct Term {
    bool is_var = false;
    std::string var;
    Value val;

    static Term variable(std::string name) {
        Term t;
        t.is_var = true;
        t.var = std::move(name);
        return t;
    }
    static Term constant(Value v) {
        Term t;
        t.is_var = false;
        t.val = std::move(v);
        return t;
    }

    friend bool operator==(const Term& a, const Term& b) {
        if (a.is_var != b.is_var) return false;
        return a.is_var ? a.var == b.var : a.val == b.val;
    }
    friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
    friend bool operator<(const Term& a, const Term& b) {
        if (a.is_var != b.is_var) return a.is_var < b.is_var;
        return a.is_var ? a.var < b.var : a.val < b.val;
    }

    std::string to_string() const { return is_var ? var : val.to_string(); }
};

enum class AtomKind : uint8_t { Pre, Post, Bind, Bind0, Eq, Neq };

// One atom over the pre/post/IsBind vocabulary, or an (in)equality.
struct SAtom {
    AtomKind kind = AtomKind::Pre;
    std::string target; // relation name (Pre/Post) or method name (Bind/Bind0)
    std::vector<Term> terms;

    friend bool operator==(const SAtom& a, const SAtom& b) {
        return a.kind == b.kind && a.target == b.target && a.terms == b.terms;
    }
    friend bool operator<(const SAtom& a, const SAtom& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        if (a.target != b.target) return a.target < b.target;
        return a.terms < b.terms;
    }

    std::string to_string() const {
        std::ostringstream os;
        switch (kind) {
        case AtomKind::Pre:
            os << "(pre " << target;
            break;
        case AtomKind::Post:
            os << "(post " << target;
            break;
        case AtomKind::Bind:
            os << "(isbind " << target;
            break;
        case AtomKind::Bind0:
            return "(isbind0 " + target + ")";
        case AtomKind::Eq:
            os << "(=";
            break;
        case AtomKind::Neq:
            os << "(!=";
            break;
        }
        for (const Term& t : terms) os << " " << t.to_string();
        os << ")";
        return os.str();
    }
};

// ---------------------------------------------------------------------------
// Positive matrices and sentences
// ---------------------------------------------------------------------------

// Positive boolean combination of atoms. And{} is true, Or{} is false.
struct Matrix {
    enum class Op : uint8_t { Leaf, And, Or };
    Op op = Op::And;
    SAtom atom;
    std::vector<Matrix> kids;

    static Matrix leaf(SAtom a) {
        Matrix m;
        m.op = Op::Leaf;
        m.atom = std::move(a);
        return m;
    }
    static Matrix conj(std::vector<Matrix> ks) {
        Matrix m;
        m.op = Op::And;
        m.kids = std::move(ks);
        return m;
    }
    static Matrix disj(std::vector<Matrix> ks) {
        Matrix m;
        m.op = Op::Or;
        m.kids = std::move(ks);
        return m;
    }
    static Matrix truth() { return conj({}); }
    static Matrix falsity() { return disj({}); }

    bool is_true() const { return op == Op::And && kids.empty(); }
    bool is_false() const { return op == Op::Or && kids.empty(); }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        if (a.op != b.op) return false;
        if (a.op == Op::Leaf) return a.atom == b.atom;
        return a.kids == b.kids;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    void for_each_atom(const std::function<void(const SAtom&)>& fn) const {
        if (op == Op::Leaf) {
            fn(atom);
            return;
        }
        for (const Matrix& k : kids) k.for_each_atom(fn);
    }

    Matrix map_atoms(const std::function<Matrix(const SAtom&)>& fn) const {
        if (op == Op::Leaf) return fn(atom);
        Matrix out;
        out.op = op;
        for (const Matrix& k : kids) out.kids.push_back(k.map_atoms(fn));
        return out;
    }

    std::string to_string() const {
        if (op == Op::Leaf) return atom.to_string();
        if (is_true()) return "true";
        if (is_false()) return "false";
        std::ostringstream os;
        os << (op == Op::And ? "(and" : "(or");
        for (const Matrix& k : kids) os << " " << k.to_string();
        os << ")";
        return os.str();
    }
};

// Closed positive existential sentence over Sch_Acc.
struct PosSentence {
    std::vector<std::string> vars; // existential prefix
    Matrix matrix;

    static PosSentence truth() { return PosSentence{{}, Matrix::truth()}; }
    static PosSentence falsity() { return PosSentence{{}, Matrix::falsity()}; }

    bool is_true() const { return matrix.is_true(); }
    bool is_false() const { return matrix.is_false(); }

    friend bool operator==(const PosSentence& a, const PosSentence& b) {
        return a.vars == b.vars && a.matrix == b.matrix;
    }
    friend bool operator!=(const PosSentence& a, const PosSentence& b) { return !(a == b); }

    void for_each_atom(const std::function<void(const SAtom&)>& fn) const {
        matrix.for_each_atom(fn);
    }

    bool mentions_bind() const {
        bool found = false;
        for_each_atom([&](const SAtom& a) {
            if (a.kind == AtomKind::Bind || a.kind == AtomKind::Bind0) found = true;
        });
        return found;
    }

    bool mentions_neq() const {
        bool found = false;
        for_each_atom([&](const SAtom& a) {
            if (a.kind == AtomKind::Neq) found = true;
        });
        return found;
    }

    bool pure_pre() const {
        bool ok = true;
        for_each_atom([&](const SAtom& a) {
            if (a.kind == AtomKind::Post || a.kind == AtomKind::Bind || a.kind == AtomKind::Bind0)
                ok = false;
        });
        return ok;
    }

    bool pure_post() const {
        bool ok = true;
        for_each_atom([&](const SAtom& a) {
            if (a.kind == AtomKind::Pre || a.kind == AtomKind::Bind || a.kind == AtomKind::Bind0)
                ok = false;
        });
        return ok;
    }

    std::set<Value> constants() const {
        std::set<Value> out;
        for_each_atom([&](const SAtom& a) {
            for (const Term& t : a.terms)
                if (!t.is_var) out.insert(t.val);
        });
        return out;
    }

    size_t relational_atom_count() const {
        size_t n = 0;
        for_each_atom([&](const SAtom& a) {
            if (a.kind == AtomKind::Pre || a.kind == AtomKind::Post) ++n;
        });
        return n;
    }

    std::string to_string() const {
        if (vars.empty() && (is_true() || is_false())) return matrix.to_string();
        std::ostringstream os;
        os << "(exists (";
        for (size_t i = 0; i < vars.size(); ++i) os << (i ? " " : "") << vars[i];
        os << ") " << matrix.to_string() << ")";
        return os.str();
    }

    // Rename variables with a fresh prefix so two sentences can be combined.
    PosSentence renamed(const std::string& prefix) const {
        std::map<std::string, std::string> ren;
        PosSentence out;
        for (size_t i = 0; i < vars.size(); ++i) {
            ren[vars[i]] = prefix + std::to_string(i);
            out.vars.push_back(ren[vars[i]]);
        }
        out.matrix = matrix.map_atoms([&](const SAtom& a) {
            SAtom b = a;
            for (Term& t : b.terms)
                if (t.is_var) t.var = ren.at(t.var);
            return Matrix::leaf(b);
        });
        return out;
    }
};

// Conjunction of closed sentences, renamed apart.
inline PosSentence sentence_conjunction(const std::vector<PosSentence>& parts) {
    if (parts.size() == 1) return parts[0];
    PosSentence out;
    std::vector<Matrix> kids;
    for (size_t i = 0; i < parts.size(); ++i) {
        PosSentence p = parts[i].renamed("_c" + std::to_string(i) + "_");
        for (const std::string& v : p.vars) out.vars.push_back(v);
        if (!p.matrix.is_true()) kids.push_back(p.matrix);
    }
    if (kids.size() == 1 && out.vars.empty()) {
        out.matrix = kids[0];
    } else {
        out.matrix = Matrix::conj(std::move(kids));
    }
    return out;
}

// ---------------------------------------------------------------------------
// AccLTL formulas (Def 2.1 grammar; G/F are parser sugar)
// ---------------------------------------------------------------------------

class AccFormula;
using FormulaPtr = std::shared_ptr<const AccFormula>;

class AccFormula {
  public:
    enum class Op : uint8_t { Atom, Not, And, Or, Next, Until };

    static FormulaPtr atom(PosSentence s) {
        auto f = std::make_shared<AccFormula>();
        f->op_ = Op::Atom;
        f->sentence_ = std::move(s);
        return f;
    }
    static FormulaPtr truth() { return atom(PosSentence::truth()); }
    static FormulaPtr negation(FormulaPtr a) {
        auto f = std::make_shared<AccFormula>();
        f->op_ = Op::Not;
        f->kids_ = {std::move(a)};
        return f;
    }
    static FormulaPtr conj(std::vector<FormulaPtr> ks) {
        auto f = std::make_shared<AccFormula>();
        f->op_ = Op::And;
        f->kids_ = std::move(ks);
        return f;
    }
    static FormulaPtr disj(std::vector<FormulaPtr> ks) {
        auto f = std::make_shared<AccFormula>();
        f->op_ = Op::Or;
        f->kids_ = std::move(ks);
        return f;
    }
    static FormulaPtr next(FormulaPtr a) {
        auto f = std::make_shared<AccFormula>();
        f->op_ = Op::Next;
        f->kids_ = {std::move(a)};
        return f;
    }
    static FormulaPtr until(FormulaPtr a, FormulaPtr b) {
        auto f = std::make_shared<AccFormula>();
        f->op_ = Op::Until;
        f->kids_ = {std::move(a), std::move(b)};
        return f;
    }
    // F phi == true U phi
    static FormulaPtr finally(FormulaPtr a) { return until(truth(), std::move(a)); }
    // G phi == not (true U not phi)
    static FormulaPtr globally(FormulaPtr a) {
        return negation(until(truth(), negation(std::move(a))));
    }

    Op op() const { return op_; }
    const PosSentence& sentence() const { return sentence_; }
    const std::vector<FormulaPtr>& kids() const { return kids_; }

    bool equals(const AccFormula& other) const {
        if (op_ != other.op_) return false;
        if (op_ == Op::Atom) return sentence_ == other.sentence_;
        if (kids_.size() != other.kids_.size()) return false;
        for (size_t i = 0; i < kids_.size(); ++i)
            if (!kids_[i]->equals(*other.kids_[i])) return false;
        return true;
    }

    std::string to_string() const {
        switch (op_) {
        case Op::Atom:
            return sentence_.to_string();
        case Op::Not:
            return "(not " + kids_[0]->to_string() + ")";
        case Op::And:
        case Op::Or: {
            std::ostringstream os;
            os << (op_ == Op::And ? "(and" : "(or");
            for (const auto& k : kids_) os << " " << k->to_string();
            os << ")";
            return os.str();
        }
        case Op::Next:
            return "(X " + kids_[0]->to_string() + ")";
        case Op::Until:
            return "(U " + kids_[0]->to_string() + " " + kids_[1]->to_string() + ")";
        }
        return "?";
    }

    void for_each_sentence(const std::function<void(const PosSentence&, size_t)>& fn,
                           size_t negations = 0) const {
        if (op_ == Op::Atom) {
            fn(sentence_, negations);
            return;
        }
        size_t n = negations + (op_ == Op::Not ? 1 : 0);
        for (const auto& k : kids_) k->for_each_sentence(fn, n);
    }

    std::set<Value> constants() const {
        std::set<Value> out;
        for_each_sentence([&](const PosSentence& s, size_t) {
            auto cs = s.constants();
            out.insert(cs.begin(), cs.end());
        });
        return out;
    }

  private:
    Op op_ = Op::Atom;
    PosSentence sentence_ = PosSentence::truth();
    std::vector<FormulaPtr> kids_;
};

// ---------------------------------------------------------------------------
// Typing
// ---------------------------------------------------------------------------

namespace detail {

inline std::optional<DomainKind> domain_meet(const DomainKind& a, const DomainKind& b) {
    if (a.kind() != b.kind()) return std::nullopt;
    if (a.kind() != DomainKind::Kind::Enum) return a;
    std::vector<std::string> common;
    for (const std::string& l : a.literals())
        if (std::binary_search(b.literals().begin(), b.literals().end(), l))
            common.push_back(l);
    if (common.empty()) return std::nullopt;
    return DomainKind::enumeration(common);
}

} // namespace detail

// Validates a sentence against a schema: arities, constant typing, variable
// kind-consistency, and closedness under the given bound variables.
inline void check_sentence(const PosSentence& s, const Schema& schema) {
    std::set<std::string> bound(s.vars.begin(), s.vars.end());
    std::map<std::string, DomainKind> var_domain;

    auto constrain = [&](const Term& t, const DomainKind& d, const std::string& where) {
        if (t.is_var) {
            if (!bound.count(t.var))
                throw Error(ErrorKind::Validation,
                            "free variable " + t.var + " in atom " + where);
            auto it = var_domain.find(t.var);
            if (it == var_domain.end()) {
                var_domain.emplace(t.var, d);
            } else {
                auto meet = detail::domain_meet(it->second, d);
                if (!meet)
                    throw Error(ErrorKind::Type, "variable " + t.var +
                                                     " used at incompatible domains in atom " +
                                                     where);
                it->second = *meet;
            }
        } else if (!d.admits(t.val)) {
            throw Error(ErrorKind::Type, "constant " + t.val.to_string() +
                                             " not admitted in atom " + where);
        }
    };

    s.for_each_atom([&](const SAtom& a) {
        const std::string where = a.to_string();
        switch (a.kind) {
        case AtomKind::Pre:
        case AtomKind::Post: {
            const Relation& rel = schema.relation(a.target);
            if (a.terms.size() != rel.arity())
                throw Error(ErrorKind::Schema, "arity mismatch in atom " + where);
            for (size_t i = 0; i < a.terms.size(); ++i)
                constrain(a.terms[i], rel.positions[i], where);
            break;
        }
        case AtomKind::Bind: {
            const AccessMethod& m = schema.method(a.target);
            const Relation& rel = schema.relation(m.relation);
            if (a.terms.size() != m.inputs.size())
                throw Error(ErrorKind::Schema,
                            "isbind arity must equal the number of input positions in atom " +
                                where);
            size_t i = 0;
            for (size_t pos : m.inputs) constrain(a.terms[i++], rel.positions[pos - 1], where);
            break;
        }
        case AtomKind::Bind0:
            schema.method(a.target); // existence check
            if (!a.terms.empty())
                throw Error(ErrorKind::Schema, "isbind0 carries no terms: " + where);
            break;
        case AtomKind::Eq:
        case AtomKind::Neq:
            if (a.terms.size() != 2)
                throw Error(ErrorKind::Schema, "(in)equality takes two terms: " + where);
            for (const Term& t : a.terms) {
                if (t.is_var && !bound.count(t.var))
                    throw Error(ErrorKind::Validation, "free variable " + t.var + " in " + where);
                if (!t.is_var && t.val.kind() == Value::Kind::Sym) {
                    // a bare identifier must name an enum literal somewhere
                    bool known = false;
                    for (const auto& [_, rel] : schema.relations())
                        for (const DomainKind& d : rel.positions)
                            if (d.admits(t.val)) known = true;
                    if (!known)
                        throw Error(ErrorKind::Validation,
                                    "'" + t.val.as_string() +
                                        "' is neither a bound variable nor an enum literal in " +
                                        where);
                }
            }
            break;
        }
    });
}

inline void check_formula(const AccFormula& f, const Schema& schema) {
    f.for_each_sentence([&](const PosSentence& s, size_t) { check_sentence(s, schema); });
}

} // namespace accltl
