#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "accltl/logic.hpp"
#include "accltl/path.hpp"
#include "accltl/schema.hpp"
#include "accltl/sexpr.hpp"

namespace accltl {

// ---------------------------------------------------------------------------
// Shared line utilities (.acs / .apt / constraint files)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string strip_comment(const std::string& line) {
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '#' &&
            (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1]))))
            return line.substr(0, i);
    }
    return line;
}

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> logical_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::string l = trim(strip_comment(line));
        if (!l.empty()) out.push_back(l);
    }
    return out;
}

} // namespace detail

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Validation, "cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// ---------------------------------------------------------------------------
// Literal syntax shared by all formats
// ---------------------------------------------------------------------------

inline Value value_from_sexp(const Sexp& s) {
    switch (s.kind) {
    case Sexp::Kind::Int:
        return Value::integer(s.num);
    case Sexp::Kind::Str:
        return Value::str(s.text);
    case Sexp::Kind::Sym:
        if (s.text == "true") return Value::boolean(true);
        if (s.text == "false") return Value::boolean(false);
        return Value::sym(s.text);
    default:
        throw Error::parse(s.where(), "expected a literal");
    }
}

// Parses a literal from a raw token (line-based formats).
inline Value parse_literal(const std::string& tok, const std::string& where) {
    SexpReader r(tok, where);
    Sexp s = r.read();
    if (s.kind == Sexp::Kind::List) throw Error::parse(where, "expected a literal");
    return value_from_sexp(s);
}

// ---------------------------------------------------------------------------
// Formula / sentence parsing (.acl)
// ---------------------------------------------------------------------------

namespace detail {

inline Term term_from_sexp(const Sexp& s, const std::set<std::string>& scope) {
    if (s.kind == Sexp::Kind::Sym && scope.count(s.text)) return Term::variable(s.text);
    return Term::constant(value_from_sexp(s));
}

inline Matrix matrix_from_sexp(const Sexp& s, const std::set<std::string>& scope);

inline Matrix atom_from_sexp(const Sexp& s, const std::set<std::string>& scope) {
    const std::string& head = s.kids[0].text;
    SAtom a;
    size_t term_start = 1;
    if (head == "pre" || head == "post") {
        a.kind = head == "pre" ? AtomKind::Pre : AtomKind::Post;
        if (s.kids.size() < 2 || s.kids[1].kind != Sexp::Kind::Sym)
            throw Error::parse(s.where(), "expected (" + head + " Relation term ...)");
        a.target = s.kids[1].text;
        term_start = 2;
    } else if (head == "isbind") {
        a.kind = AtomKind::Bind;
        if (s.kids.size() < 2 || s.kids[1].kind != Sexp::Kind::Sym)
            throw Error::parse(s.where(), "expected (isbind Method term ...)");
        a.target = s.kids[1].text;
        term_start = 2;
    } else if (head == "isbind0") {
        a.kind = AtomKind::Bind0;
        if (s.kids.size() != 2 || s.kids[1].kind != Sexp::Kind::Sym)
            throw Error::parse(s.where(), "expected (isbind0 Method)");
        a.target = s.kids[1].text;
        return Matrix::leaf(a);
    } else if (head == "=" || head == "!=") {
        a.kind = head == "=" ? AtomKind::Eq : AtomKind::Neq;
        if (s.kids.size() != 3) throw Error::parse(s.where(), "expected (" + head + " t t)");
    } else {
        throw Error::parse(s.where(), "unknown atom head '" + head + "'");
    }
    for (size_t i = term_start; i < s.kids.size(); ++i)
        a.terms.push_back(term_from_sexp(s.kids[i], scope));
    return Matrix::leaf(a);
}

inline Matrix matrix_from_sexp(const Sexp& s, const std::set<std::string>& scope) {
    if (s.kind == Sexp::Kind::Sym) {
        if (s.text == "true") return Matrix::truth();
        if (s.text == "false") return Matrix::falsity();
        throw Error::parse(s.where(), "expected a matrix, got '" + s.text + "'");
    }
    if (s.kind != Sexp::Kind::List || s.kids.empty() || s.kids[0].kind != Sexp::Kind::Sym)
        throw Error::parse(s.where(), "expected a matrix");
    const std::string& head = s.kids[0].text;
    if (head == "and" || head == "or") {
        std::vector<Matrix> kids;
        for (size_t i = 1; i < s.kids.size(); ++i)
            kids.push_back(matrix_from_sexp(s.kids[i], scope));
        return head == "and" ? Matrix::conj(std::move(kids)) : Matrix::disj(std::move(kids));
    }
    return atom_from_sexp(s, scope);
}

inline bool is_sentence_head(const std::string& h) {
    return h == "exists" || h == "pre" || h == "post" || h == "isbind" || h == "isbind0" ||
           h == "=" || h == "!=";
}

} // namespace detail

inline PosSentence sentence_from_sexp(const Sexp& s) {
    if (s.kind == Sexp::Kind::Sym) {
        if (s.text == "true") return PosSentence::truth();
        if (s.text == "false") return PosSentence::falsity();
        throw Error::parse(s.where(), "expected a sentence, got '" + s.text + "'");
    }
    if (s.kind != Sexp::Kind::List || s.kids.empty() || s.kids[0].kind != Sexp::Kind::Sym)
        throw Error::parse(s.where(), "expected a sentence");
    if (s.kids[0].text == "exists") {
        if (s.kids.size() != 3 || s.kids[1].kind != Sexp::Kind::List)
            throw Error::parse(s.where(), "expected (exists (v ...) matrix)");
        PosSentence out;
        std::set<std::string> scope;
        for (const Sexp& v : s.kids[1].kids) {
            if (v.kind != Sexp::Kind::Sym)
                throw Error::parse(v.where(), "quantified variables must be identifiers");
            if (!scope.insert(v.text).second)
                throw Error::parse(v.where(), "duplicate quantified variable " + v.text);
            out.vars.push_back(v.text);
        }
        out.matrix = detail::matrix_from_sexp(s.kids[2], scope);
        return out;
    }
    // Bare matrix with no quantifier prefix.
    PosSentence out;
    out.matrix = detail::matrix_from_sexp(s, {});
    return out;
}

inline FormulaPtr formula_from_sexp(const Sexp& s) {
    if (s.kind == Sexp::Kind::Sym) {
        if (s.text == "true") return AccFormula::truth();
        if (s.text == "false") return AccFormula::atom(PosSentence::falsity());
        throw Error::parse(s.where(), "expected a formula, got '" + s.text + "'");
    }
    if (s.kind != Sexp::Kind::List || s.kids.empty() || s.kids[0].kind != Sexp::Kind::Sym)
        throw Error::parse(s.where(), "expected a formula");
    const std::string& head = s.kids[0].text;
    auto expect_arity = [&](size_t n) {
        if (s.kids.size() != n + 1)
            throw Error::parse(s.where(),
                               "'" + head + "' takes " + std::to_string(n) + " argument(s)");
    };
    if (head == "not") {
        expect_arity(1);
        return AccFormula::negation(formula_from_sexp(s.kids[1]));
    }
    if (head == "X") {
        expect_arity(1);
        return AccFormula::next(formula_from_sexp(s.kids[1]));
    }
    if (head == "G") {
        expect_arity(1);
        return AccFormula::globally(formula_from_sexp(s.kids[1]));
    }
    if (head == "F") {
        expect_arity(1);
        return AccFormula::finally(formula_from_sexp(s.kids[1]));
    }
    if (head == "U") {
        expect_arity(2);
        return AccFormula::until(formula_from_sexp(s.kids[1]), formula_from_sexp(s.kids[2]));
    }
    if (head == "and" || head == "or") {
        std::vector<FormulaPtr> kids;
        for (size_t i = 1; i < s.kids.size(); ++i) kids.push_back(formula_from_sexp(s.kids[i]));
        return head == "and" ? AccFormula::conj(std::move(kids))
                             : AccFormula::disj(std::move(kids));
    }
    if (detail::is_sentence_head(head)) return AccFormula::atom(sentence_from_sexp(s));
    throw Error::parse(s.where(), "unknown formula head '" + head + "'");
}

// Parses one formula (.acl content) and type-checks it against the schema.
inline FormulaPtr parse_formula(const std::string& text, const Schema& schema,
                                const std::string& source = "<formula>") {
    SexpReader r(text, source);
    auto all = r.read_all();
    if (all.size() != 1)
        throw Error::parse(source, "expected exactly one formula, found " +
                                       std::to_string(all.size()));
    FormulaPtr f = formula_from_sexp(all[0]);
    check_formula(*f, schema);
    return f;
}

inline PosSentence parse_sentence(const std::string& text, const Schema& schema,
                                  const std::string& source = "<sentence>") {
    SexpReader r(text, source);
    auto all = r.read_all();
    if (all.size() != 1) throw Error::parse(source, "expected exactly one sentence");
    PosSentence s = sentence_from_sexp(all[0]);
    check_sentence(s, schema);
    return s;
}

// ---------------------------------------------------------------------------
// Schema parsing (.acs)
// ---------------------------------------------------------------------------

inline DomainKind parse_domain(const std::string& tok, const std::string& where) {
    std::string t = detail::trim(tok);
    if (t == "int" || t == "integer") return DomainKind::integer();
    if (t == "bool" || t == "boolean") return DomainKind::boolean();
    if (t == "string" || t == "str") return DomainKind::string();
    if (t.rfind("enum{", 0) == 0 && t.back() == '}') {
        std::vector<std::string> lits;
        std::string body = t.substr(5, t.size() - 6);
        std::istringstream is(body);
        std::string lit;
        while (std::getline(is, lit, ',')) {
            lit = detail::trim(lit);
            if (!lit.empty()) lits.push_back(lit);
        }
        if (lits.empty()) throw Error::parse(where, "enum domain must list literals");
        return DomainKind::enumeration(lits);
    }
    throw Error::parse(where, "unknown type '" + t + "'");
}

inline Schema parse_schema(const std::string& text, const std::string& source = "<schema>") {
    Schema schema;
    std::vector<std::string> deferred_constants;
    size_t lineno = 0;
    for (const std::string& line : detail::logical_lines(text)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        std::istringstream is(line);
        std::string kw;
        is >> kw;
        if (kw == "relation") {
            std::string rest;
            std::getline(is, rest);
            rest = detail::trim(rest);
            size_t open = rest.find('(');
            if (open == std::string::npos || rest.back() != ')')
                throw Error::parse(where, "expected relation Name(pos:type, ...)");
            Relation rel;
            rel.name = detail::trim(rest.substr(0, open));
            std::string body = rest.substr(open + 1, rest.size() - open - 2);
            std::istringstream cols(body);
            std::string col;
            while (std::getline(cols, col, ',')) {
                // enum{a,b} contains commas; re-join until braces balance
                while (std::count(col.begin(), col.end(), '{') >
                       std::count(col.begin(), col.end(), '}')) {
                    std::string more;
                    if (!std::getline(cols, more, ','))
                        throw Error::parse(where, "unbalanced '{' in column type");
                    col += "," + more;
                }
                size_t colon = col.find(':');
                if (colon == std::string::npos)
                    throw Error::parse(where, "expected pos:type in relation columns");
                rel.positions.push_back(parse_domain(col.substr(colon + 1), where));
            }
            schema.add_relation(std::move(rel));
        } else if (kw == "access") {
            AccessMethod m;
            std::string on, inputs_kw;
            is >> m.name >> on >> m.relation >> inputs_kw;
            if (on != "on" || inputs_kw != "inputs")
                throw Error::parse(where,
                                   "expected access Name on Relation inputs (i,...) [flags]");
            std::string rest;
            std::getline(is, rest);
            rest = detail::trim(rest);
            size_t open = rest.find('('), close = rest.find(')');
            if (open == std::string::npos || close == std::string::npos || close < open)
                throw Error::parse(where, "expected input position list (i,...)");
            std::string body = rest.substr(open + 1, close - open - 1);
            std::istringstream ps(body);
            std::string p;
            while (std::getline(ps, p, ',')) {
                p = detail::trim(p);
                if (!p.empty()) m.inputs.insert(static_cast<size_t>(std::stoul(p)));
            }
            std::istringstream flags(rest.substr(close + 1));
            std::string flag;
            while (flags >> flag) {
                if (flag == "exact")
                    m.exact = true;
                else if (flag == "idempotent")
                    m.idempotent = true;
                else
                    throw Error::parse(where, "unknown access flag '" + flag + "'");
            }
            schema.add_method(std::move(m));
        } else if (kw == "constants") {
            std::string rest;
            std::getline(is, rest);
            deferred_constants.push_back(rest); // validate after all relations load
        } else if (kw == "option") {
            std::string opt;
            is >> opt;
            if (opt == "grounded")
                schema.set_require_grounded(true);
            else
                throw Error::parse(where, "unknown option '" + opt + "'");
        } else {
            throw Error::parse(where, "unknown schema statement '" + kw + "'");
        }
    }
    for (const std::string& rest : deferred_constants) {
        std::string body = detail::trim(rest);
        if (body.empty() || body.front() != '{' || body.back() != '}')
            throw Error(ErrorKind::Parse, source + ": expected constants { lit, ... }");
        body = body.substr(1, body.size() - 2);
        // Literals may contain commas inside quotes; use the sexp reader on a
        // comma-to-space rewrite outside quotes.
        std::string spaced;
        bool in_str = false;
        for (char c : body) {
            if (c == '"') in_str = !in_str;
            spaced.push_back((c == ',' && !in_str) ? ' ' : c);
        }
        SexpReader r(spaced, source);
        for (const Sexp& s : r.read_all()) schema.add_constant(value_from_sexp(s));
    }
    return schema;
}

// ---------------------------------------------------------------------------
// Path trace parsing and printing (.apt)
// ---------------------------------------------------------------------------

inline AccessPath parse_path(const std::string& text, const Schema& schema,
                             const std::string& source = "<path>") {
    AccessPath path;
    size_t lineno = 0;
    for (const std::string& line : detail::logical_lines(text)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        std::istringstream is(line);
        std::string kw, method;
        is >> kw >> method;
        if (kw != "access")
            throw Error::parse(where, "expected: access Method (lit,...) -> { (lit,...), ... }");
        std::string rest;
        std::getline(is, rest);
        size_t arrow = rest.find("->");
        if (arrow == std::string::npos) throw Error::parse(where, "missing '->'");
        std::string bind_part = detail::trim(rest.substr(0, arrow));
        std::string resp_part = detail::trim(rest.substr(arrow + 2));

        auto parse_value_list = [&](const std::string& body) {
            std::string spaced;
            bool in_str = false;
            for (char c : body) {
                if (c == '"') in_str = !in_str;
                spaced.push_back((c == ',' && !in_str) ? ' ' : c);
            }
            SexpReader r(spaced, where);
            std::vector<Value> vals;
            for (const Sexp& s : r.read_all()) vals.push_back(value_from_sexp(s));
            return vals;
        };

        if (bind_part.empty() || bind_part.front() != '(' || bind_part.back() != ')')
            throw Error::parse(where, "expected binding list (lit,...)");
        std::vector<Value> bind_vals =
            parse_value_list(bind_part.substr(1, bind_part.size() - 2));

        const AccessMethod& m = schema.method(method);
        if (bind_vals.size() != m.inputs.size())
            throw Error::parse(where, "binding arity mismatch for " + method);
        Access acc;
        acc.method = method;
        size_t i = 0;
        for (size_t pos : m.inputs) acc.binding[pos] = bind_vals[i++];

        if (resp_part.empty() || resp_part.front() != '{' || resp_part.back() != '}')
            throw Error::parse(where, "expected response set { (lit,...), ... }");
        std::string inner = detail::trim(resp_part.substr(1, resp_part.size() - 2));
        Response resp;
        if (!inner.empty()) {
            std::string spaced;
            bool in_str = false;
            for (char c : inner) {
                if (c == '"') in_str = !in_str;
                spaced.push_back((c == ',' && !in_str) ? ' ' : c);
            }
            SexpReader r(spaced, where);
            for (const Sexp& s : r.read_all()) {
                if (s.kind != Sexp::Kind::List)
                    throw Error::parse(where, "response tuples must be parenthesized");
                Tuple t;
                for (const Sexp& v : s.kids) t.push_back(value_from_sexp(v));
                resp.insert(std::move(t));
            }
        }
        if (!well_formed_response(acc, resp, schema))
            throw Error::parse(where, "response is not well-formed for the access");
        path.steps.push_back(PathStep{std::move(acc), std::move(resp)});
    }
    return path;
}

inline std::string path_to_string(const AccessPath& path) {
    std::ostringstream os;
    for (const PathStep& s : path.steps) {
        os << "access " << s.access.method << " (";
        bool first = true;
        for (const auto& [_, v] : s.access.binding) {
            if (!first) os << ",";
            first = false;
            os << v.to_string();
        }
        os << ") -> {";
        first = true;
        for (const Tuple& t : s.response) {
            os << (first ? " " : ", ") << tuple_to_string(t);
            first = false;
        }
        os << (first ? "}" : " }") << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Conjunctive queries (.cq): (exists (v ...) (and (R t ...) ...))
// ---------------------------------------------------------------------------

struct ConjQuery {
    std::vector<std::string> vars;
    std::vector<SAtom> atoms; // AtomKind::Pre stands for the plain relation here
    std::vector<SAtom> eqs;   // optional equality atoms

    std::string to_string() const {
        std::ostringstream os;
        os << "(exists (";
        for (size_t i = 0; i < vars.size(); ++i) os << (i ? " " : "") << vars[i];
        os << ") (and";
        for (const SAtom& a : atoms) {
            os << " (" << a.target;
            for (const Term& t : a.terms) os << " " << t.to_string();
            os << ")";
        }
        for (const SAtom& a : eqs) os << " " << a.to_string();
        os << "))";
        return os.str();
    }
};

inline ConjQuery parse_query(const std::string& text, const Schema& schema,
                             const std::string& source = "<query>") {
    SexpReader r(text, source);
    auto all = r.read_all();
    if (all.size() != 1) throw Error::parse(source, "expected exactly one query");
    const Sexp& s = all[0];
    if (s.kind != Sexp::Kind::List || s.kids.size() != 3 || !s.kids[0].is_sym("exists") ||
        s.kids[1].kind != Sexp::Kind::List)
        throw Error::parse(s.where(), "expected (exists (v ...) (and (R t ...) ...))");
    ConjQuery q;
    std::set<std::string> scope;
    for (const Sexp& v : s.kids[1].kids) {
        if (v.kind != Sexp::Kind::Sym)
            throw Error::parse(v.where(), "variables must be identifiers");
        scope.insert(v.text);
        q.vars.push_back(v.text);
    }
    std::vector<const Sexp*> atoms;
    const Sexp& body = s.kids[2];
    if (body.kind == Sexp::Kind::List && !body.kids.empty() && body.kids[0].is_sym("and")) {
        for (size_t i = 1; i < body.kids.size(); ++i) atoms.push_back(&body.kids[i]);
    } else {
        atoms.push_back(&body);
    }
    for (const Sexp* ap : atoms) {
        const Sexp& a = *ap;
        if (a.kind != Sexp::Kind::List || a.kids.empty() || a.kids[0].kind != Sexp::Kind::Sym)
            throw Error::parse(a.where(), "expected (Relation t ...) or (= t t)");
        if (a.kids[0].text == "=") {
            if (a.kids.size() != 3) throw Error::parse(a.where(), "expected (= t t)");
            SAtom atom;
            atom.kind = AtomKind::Eq;
            atom.terms = {detail::term_from_sexp(a.kids[1], scope),
                          detail::term_from_sexp(a.kids[2], scope)};
            q.eqs.push_back(std::move(atom));
            continue;
        }
        const Relation& rel = schema.relation(a.kids[0].text);
        if (a.kids.size() != rel.arity() + 1)
            throw Error::parse(a.where(), "arity mismatch for relation " + rel.name);
        SAtom atom;
        atom.kind = AtomKind::Pre; // placeholder; rewritten to pre/post on use
        atom.target = rel.name;
        for (size_t i = 1; i < a.kids.size(); ++i)
            atom.terms.push_back(detail::term_from_sexp(a.kids[i], scope));
        q.atoms.push_back(std::move(atom));
    }
    return q;
}

// Q^pre / Q^post: the query over the pre (or post) copies of the relations.
inline PosSentence query_sentence(const ConjQuery& q, bool post) {
    PosSentence s;
    s.vars = q.vars;
    std::vector<Matrix> kids;
    for (SAtom a : q.atoms) {
        a.kind = post ? AtomKind::Post : AtomKind::Pre;
        kids.push_back(Matrix::leaf(std::move(a)));
    }
    for (const SAtom& a : q.eqs) kids.push_back(Matrix::leaf(a));
    s.matrix = Matrix::conj(std::move(kids));
    return s;
}

} // namespace accltl
