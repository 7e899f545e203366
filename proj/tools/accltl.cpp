// Command-line front end: parsing, classification, evaluation, satisfiability
// engines, automaton pipeline, Datalog export/containment, and the built-in
// analyses. Output is byte-deterministic for fixed inputs and bounds.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "accltl/analyses.hpp"
#include "accltl/automaton.hpp"
#include "accltl/classify.hpp"
#include "accltl/compile.hpp"
#include "accltl/datalog.hpp"
#include "accltl/eval.hpp"
#include "accltl/ltl0.hpp"
#include "accltl/parser.hpp"
#include "accltl/progressive.hpp"
#include "accltl/reduce.hpp"

using namespace accltl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUnknown = 2;

struct CommonArgs {
    std::string schema_path;
    std::string format = "text";
    size_t jobs = 1;
};

Schema load_schema(const std::string& path) {
    return parse_schema(read_file(path), path);
}

FormulaPtr load_formula(const std::string& path, const Schema& schema) {
    return parse_formula(read_file(path), schema, path);
}

std::vector<Value> parse_universe_list(const std::string& text) {
    std::vector<Value> out;
    std::string spaced;
    bool in_str = false;
    for (char c : text) {
        if (c == '"') in_str = !in_str;
        spaced.push_back((c == ',' && !in_str) ? ' ' : c);
    }
    SexpReader r(spaced, "<universe>");
    for (const Sexp& s : r.read_all()) out.push_back(value_from_sexp(s));
    return out;
}

std::set<std::string> parse_method_list(const std::string& text) {
    std::set<std::string> out;
    std::istringstream is(text);
    std::string m;
    while (std::getline(is, m, ','))
        if (!detail::trim(m).empty()) out.insert(detail::trim(m));
    return out;
}

Access parse_access_spec(const std::string& text, const Schema& schema) {
    size_t open = text.find('(');
    if (open == std::string::npos || text.back() != ')')
        throw Error(ErrorKind::Parse, "expected AcM(v,...) for --access");
    std::string name = detail::trim(text.substr(0, open));
    std::vector<Value> vals = parse_universe_list(text.substr(open + 1, text.size() - open - 2));
    const AccessMethod& m = schema.method(name);
    if (vals.size() != m.inputs.size())
        throw Error(ErrorKind::Parse, "binding arity mismatch for " + name);
    Access a;
    a.method = name;
    size_t i = 0;
    for (size_t pos : m.inputs) a.binding[pos] = vals[i++];
    return a;
}

void emit(const CommonArgs& common, const std::string& key, const std::string& value) {
    if (common.format == "records")
        std::cout << key << "=" << value << "\n";
    else
        std::cout << value << "\n";
}

std::string verdict_word(VerdictKind k, const char* yes, const char* no, const char* unknown) {
    switch (k) {
    case VerdictKind::Yes:
        return yes;
    case VerdictKind::No:
        return no;
    default:
        return unknown;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"accltl: schemas with limited access patterns, AccLTL formulas, and "
                 "satisfiability engines"};
    app.require_subcommand(1);

    CommonArgs common;
    app.add_option("--format", common.format, "output format: text | records")
        ->check(CLI::IsMember({"text", "records"}));
    app.add_option("--jobs", common.jobs, "worker cap (engines are sequential)");
    if (const char* env = std::getenv("ACCPATH_JOBS")) common.jobs = std::stoul(env);

    // ---- parse -------------------------------------------------------------
    auto* cmd_parse = app.add_subcommand("parse", "parse inputs and print canonical forms");
    std::string p_schema, p_formula, p_path, p_query, p_automaton;
    cmd_parse->add_option("--schema", p_schema)->required();
    cmd_parse->add_option("--formula", p_formula);
    cmd_parse->add_option("--path", p_path);
    cmd_parse->add_option("--query", p_query);
    cmd_parse->add_option("--automaton", p_automaton);

    // ---- classify ----------------------------------------------------------
    auto* cmd_classify = app.add_subcommand("classify", "fragment classification");
    std::string c_schema, c_formula, c_automaton;
    cmd_classify->add_option("--schema", c_schema)->required();
    cmd_classify->add_option("--formula", c_formula);
    cmd_classify->add_option("--automaton", c_automaton);

    // ---- eval --------------------------------------------------------------
    auto* cmd_eval = app.add_subcommand("eval", "evaluate a formula on a path");
    std::string e_schema, e_formula, e_path, e_mode = "full", e_positions = "first";
    cmd_eval->add_option("--schema", e_schema)->required();
    cmd_eval->add_option("--formula", e_formula)->required();
    cmd_eval->add_option("--path", e_path)->required();
    cmd_eval->add_option("--mode", e_mode)->check(CLI::IsMember({"full", "zero"}));
    cmd_eval->add_option("--positions", e_positions)->check(CLI::IsMember({"first", "all"}));

    // ---- sat ---------------------------------------------------------------
    auto* cmd_sat = app.add_subcommand("sat", "satisfiability");
    std::string s_schema, s_formula, s_engine = "auto", s_exact, s_idem, s_out;
    size_t s_max_fresh = 2, s_max_len = 3, s_max_new = 1;
    bool s_grounded = false;
    cmd_sat->add_option("--schema", s_schema)->required();
    cmd_sat->add_option("--formula", s_formula)->required();
    cmd_sat->add_option("--engine", s_engine)
        ->check(CLI::IsMember({"zero", "x", "bounded", "auto"}));
    cmd_sat->add_option("--max-fresh", s_max_fresh);
    cmd_sat->add_option("--max-len", s_max_len);
    cmd_sat->add_option("--max-new", s_max_new);
    cmd_sat->add_flag("--grounded", s_grounded);
    cmd_sat->add_option("--exact", s_exact, "comma-separated method names");
    cmd_sat->add_option("--idempotent", s_idem, "comma-separated method names");
    cmd_sat->add_option("--out", s_out, "write the witness path (.apt) here");

    // ---- empty -------------------------------------------------------------
    auto* cmd_empty = app.add_subcommand("empty", "bounded A-automaton emptiness");
    std::string m_schema, m_automaton, m_universe, m_exact, m_idem, m_out;
    size_t m_max_len = 3, m_max_new = 1;
    bool m_grounded = false;
    cmd_empty->add_option("--schema", m_schema)->required();
    cmd_empty->add_option("--automaton", m_automaton)->required();
    cmd_empty->add_option("--max-len", m_max_len);
    cmd_empty->add_option("--max-new", m_max_new);
    cmd_empty->add_option("--universe", m_universe, "comma-separated literals");
    cmd_empty->add_flag("--grounded", m_grounded);
    cmd_empty->add_option("--exact", m_exact);
    cmd_empty->add_option("--idempotent", m_idem);
    cmd_empty->add_option("--out", m_out);

    // ---- compile-automaton --------------------------------------------------
    auto* cmd_compile = app.add_subcommand("compile-automaton",
                                           "compile a binding-positive formula");
    std::string k_schema, k_formula, k_out;
    cmd_compile->add_option("--schema", k_schema)->required();
    cmd_compile->add_option("--formula", k_formula)->required();
    cmd_compile->add_option("--out", k_out, "write the automaton (.aau) here");

    // ---- decompose ---------------------------------------------------------
    auto* cmd_decompose = app.add_subcommand("decompose",
                                             "split into progressive automata");
    std::string d_schema, d_automaton, d_formula, d_prefix;
    cmd_decompose->add_option("--schema", d_schema)->required();
    cmd_decompose->add_option("--automaton", d_automaton);
    cmd_decompose->add_option("--formula", d_formula);
    cmd_decompose->add_option("--out-prefix", d_prefix, "write piece k to <prefix>k.aau");

    // ---- to-datalog ---------------------------------------------------------
    auto* cmd_datalog = app.add_subcommand("to-datalog",
                                           "reduce progressive pieces to Datalog (.dl)");
    std::string g_schema, g_automaton, g_formula, g_prefix;
    cmd_datalog->add_option("--schema", g_schema)->required();
    cmd_datalog->add_option("--automaton", g_automaton);
    cmd_datalog->add_option("--formula", g_formula);
    cmd_datalog->add_option("--out-prefix", g_prefix, "write piece k to <prefix>k.dl");

    // ---- check-containment ---------------------------------------------------
    auto* cmd_cont = app.add_subcommand("check-containment",
                                        "query containment, or Datalog-in-sentence mode");
    std::vector<std::string> n_files;
    std::string n_schema, n_constraints;
    size_t n_depth = 0, n_max_len = 3, n_max_new = 1, n_fresh = 2;
    bool n_grounded = false;
    cmd_cont->add_option("files", n_files, "q1.cq q2.cq, or one .dl file")->required();
    cmd_cont->add_option("--schema", n_schema);
    cmd_cont->add_option("--constraints", n_constraints);
    cmd_cont->add_flag("--grounded", n_grounded);
    cmd_cont->add_option("--depth", n_depth);
    cmd_cont->add_option("--max-len", n_max_len);
    cmd_cont->add_option("--max-new", n_max_new);
    cmd_cont->add_option("--max-fresh", n_fresh);

    // ---- check-ltr -----------------------------------------------------------
    auto* cmd_ltr = app.add_subcommand("check-ltr", "long-term relevance of an access");
    std::string l_schema, l_access, l_query, l_constraints, l_out;
    size_t l_max_len = 3, l_max_new = 1, l_fresh = 2, l_depth = 0;
    bool l_grounded = false;
    cmd_ltr->add_option("--schema", l_schema)->required();
    cmd_ltr->add_option("--access", l_access, "boolean access, e.g. AcM(\"v\",7)")->required();
    cmd_ltr->add_option("--query", l_query)->required();
    cmd_ltr->add_option("--constraints", l_constraints);
    cmd_ltr->add_flag("--grounded", l_grounded);
    cmd_ltr->add_option("--max-len", l_max_len);
    cmd_ltr->add_option("--max-new", l_max_new);
    cmd_ltr->add_option("--max-fresh", l_fresh);
    cmd_ltr->add_option("--depth", l_depth);
    cmd_ltr->add_option("--out", l_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (common.jobs == 0)
            throw Error(ErrorKind::Validation, "--jobs must be at least 1");

        if (cmd_parse->parsed()) {
            Schema schema = load_schema(p_schema);
            emit(common, "schema", "schema ok: " + std::to_string(schema.relations().size()) +
                                       " relation(s), " +
                                       std::to_string(schema.methods().size()) + " method(s)");
            if (!p_formula.empty()) {
                FormulaPtr f = load_formula(p_formula, schema);
                emit(common, "formula", f->to_string());
            }
            if (!p_path.empty()) {
                AccessPath path = parse_path(read_file(p_path), schema, p_path);
                emit(common, "path",
                     "path ok: " + std::to_string(path.length()) + " step(s)");
                std::cout << path_to_string(path);
            }
            if (!p_query.empty()) {
                ConjQuery q = parse_query(read_file(p_query), schema, p_query);
                emit(common, "query", q.to_string());
            }
            if (!p_automaton.empty()) {
                AAutomaton a = parse_automaton(read_file(p_automaton), schema, p_automaton);
                emit(common, "automaton",
                     "automaton ok: " + std::to_string(a.states.size()) + " state(s), " +
                         std::to_string(a.transitions.size()) + " transition(s)");
            }
            return kExitOk;
        }

        if (cmd_classify->parsed()) {
            Schema schema = load_schema(c_schema);
            if (!c_automaton.empty()) {
                AAutomaton a = parse_automaton(read_file(c_automaton), schema, c_automaton);
                (void)a;
                emit(common, "classification",
                     "A-automaton: emptiness 2EXPTIME-compl. (decidable via Datalog "
                     "containment; bounded witness search available)");
                return kExitOk;
            }
            if (c_formula.empty()) throw Error(ErrorKind::Validation, "need --formula or --automaton");
            FormulaPtr f = load_formula(c_formula, schema);
            FragmentReport rep = classify(*f);
            emit(common, "classification", fragment_name(rep.verdict) + ": " + rep.capability);
            if (common.format == "records") {
                std::cout << "uses_full_bindings=" << rep.uses_full_bindings << "\n"
                          << "uses_0ary_bindings_only=" << rep.uses_0ary_bindings_only << "\n"
                          << "binding_positive=" << rep.binding_positive << "\n"
                          << "x_only=" << rep.x_only << "\n"
                          << "uses_inequalities=" << rep.uses_inequalities << "\n";
            }
            return kExitOk;
        }

        if (cmd_eval->parsed()) {
            Schema schema = load_schema(e_schema);
            FormulaPtr f = load_formula(e_formula, schema);
            AccessPath path = parse_path(read_file(e_path), schema, e_path);
            StructureMode mode = e_mode == "zero" ? StructureMode::ZeroAry : StructureMode::Full;
            size_t last = e_positions == "all" ? path.length() : 1;
            for (size_t pos = 1; pos <= last; ++pos) {
                bool r = eval_formula(*f, path, {}, schema, pos, mode);
                std::ostringstream os;
                os << "position " << pos << ": " << (r ? "true" : "false");
                emit(common, "position_" + std::to_string(pos), os.str());
            }
            return kExitOk;
        }

        if (cmd_sat->parsed()) {
            Schema schema = load_schema(s_schema);
            FormulaPtr f = load_formula(s_formula, schema);
            FragmentReport rep = classify(*f);
            std::string engine = s_engine;
            if (engine == "auto") {
                if (s_grounded)
                    engine = "bounded"; // grounded 0-ary routes through bounded search
                else if (rep.uses_0ary_bindings_only && rep.x_only && !s_grounded)
                    engine = "x";
                else if (rep.uses_0ary_bindings_only)
                    engine = "zero";
                else
                    engine = "bounded";
            }
            ZeroSatOptions zopts;
            zopts.exact = parse_method_list(s_exact);
            zopts.idempotent = parse_method_list(s_idem);
            std::optional<AccessPath> witness;
            bool complete = false;
            if (engine == "zero" || engine == "x") {
                if (s_grounded)
                    throw Error(ErrorKind::Fragment,
                                "grounded satisfiability is routed through the bounded engine "
                                "(use --engine bounded)");
                witness = engine == "zero" ? sat_0acc(*f, schema, {}, zopts)
                                           : sat_x_fragment(*f, schema, {}, zopts);
                complete = true;
            } else {
                std::vector<Value> universe = make_universe(schema, *f, s_max_fresh);
                SearchFilters filters;
                filters.grounded = s_grounded;
                filters.exact = zopts.exact;
                filters.idempotent = zopts.idempotent;
                witness =
                    brute_force_sat(*f, schema, {}, s_max_len, universe, s_max_new, filters);
            }
            if (witness) {
                emit(common, "verdict", "SAT");
                std::string apt = path_to_string(*witness);
                if (!s_out.empty()) {
                    std::ofstream out(s_out);
                    out << apt;
                } else {
                    std::cout << apt;
                }
                return kExitOk;
            }
            if (complete) {
                emit(common, "verdict", "UNSAT");
                return kExitOk;
            }
            emit(common, "verdict",
                 "UNKNOWN(max-len=" + std::to_string(s_max_len) + ")");
            return kExitUnknown;
        }

        if (cmd_empty->parsed()) {
            Schema schema = load_schema(m_schema);
            AAutomaton a = parse_automaton(read_file(m_automaton), schema, m_automaton);
            std::vector<Value> universe =
                m_universe.empty() ? std::vector<Value>{} : parse_universe_list(m_universe);
            SearchFilters filters;
            filters.grounded = m_grounded;
            filters.exact = parse_method_list(m_exact);
            filters.idempotent = parse_method_list(m_idem);
            auto w = bounded_empty(a, schema, m_max_len, universe, m_max_new, filters);
            if (w) {
                emit(common, "verdict", "NONEMPTY");
                std::string apt = path_to_string(*w);
                if (!m_out.empty()) {
                    std::ofstream out(m_out);
                    out << apt;
                } else {
                    std::cout << apt;
                }
                return kExitOk;
            }
            emit(common, "verdict", "EMPTY-UP-TO(max-len=" + std::to_string(m_max_len) + ")");
            return kExitUnknown;
        }

        if (cmd_compile->parsed()) {
            Schema schema = load_schema(k_schema);
            FormulaPtr f = load_formula(k_formula, schema);
            AAutomaton a = compile_formula(*f, schema);
            std::string text = automaton_to_string(a);
            if (!k_out.empty()) {
                std::ofstream out(k_out);
                out << text;
                emit(common, "automaton",
                     "wrote " + std::to_string(a.states.size()) + " state(s) to " + k_out);
            } else {
                std::cout << text;
            }
            return kExitOk;
        }

        if (cmd_decompose->parsed() || cmd_datalog->parsed()) {
            bool to_dl = cmd_datalog->parsed();
            Schema schema = load_schema(to_dl ? g_schema : d_schema);
            std::string aut_path = to_dl ? g_automaton : d_automaton;
            std::string formula_path = to_dl ? g_formula : d_formula;
            std::string prefix = to_dl ? g_prefix : d_prefix;
            AAutomaton a;
            if (!aut_path.empty()) {
                a = parse_automaton(read_file(aut_path), schema, aut_path);
            } else if (!formula_path.empty()) {
                a = compile_formula(*load_formula(formula_path, schema), schema);
            } else {
                throw Error(ErrorKind::Validation, "need --automaton or --formula");
            }
            auto pieces = decompose(a, schema);
            emit(common, "pieces", std::to_string(pieces.size()) + " piece(s)");
            for (size_t i = 0; i < pieces.size(); ++i) {
                std::string text;
                std::string ext;
                if (to_dl) {
                    ReductionOutput red =
                        reduce_progressive(pieces[i].first, pieces[i].second, schema);
                    text = reduction_to_string(red);
                    ext = ".dl";
                } else {
                    text = automaton_to_string(pieces[i].first);
                    ext = ".aau";
                }
                if (!prefix.empty()) {
                    std::ofstream out(prefix + std::to_string(i) + ext);
                    out << text;
                } else {
                    std::cout << "# piece " << i << "\n" << text;
                }
            }
            return kExitOk;
        }

        if (cmd_cont->parsed()) {
            if (n_files.size() == 1 && n_files[0].size() > 3 &&
                n_files[0].substr(n_files[0].size() - 3) == ".dl") {
                auto [program, sentence] = parse_datalog(read_file(n_files[0]), n_files[0]);
                if (!sentence)
                    throw Error(ErrorKind::Validation,
                                n_files[0] + " lacks a sentence directive");
                size_t depth = n_depth ? n_depth : dl::default_containment_depth(program, 1);
                dl::ContainmentResult cr = dl::containment_bounded(program, *sentence, depth);
                if (cr.counterexample) {
                    emit(common, "verdict", "NOT-CONTAINED");
                    for (const auto& [pred, ts] : *cr.counterexample)
                        for (const Tuple& t : ts)
                            std::cout << pred << tuple_to_string(t) << "\n";
                    return kExitOk;
                }
                emit(common, "verdict",
                     "CONTAINED-UP-TO(depth=" + std::to_string(depth) + ")");
                return kExitUnknown;
            }
            if (n_files.size() != 2 || n_schema.empty())
                throw Error(ErrorKind::Validation,
                            "expected: check-containment q1.cq q2.cq --schema s.acs");
            Schema schema = load_schema(n_schema);
            ConjQuery q1 = parse_query(read_file(n_files[0]), schema, n_files[0]);
            ConjQuery q2 = parse_query(read_file(n_files[1]), schema, n_files[1]);
            AnalysisOptions opts;
            opts.grounded = n_grounded;
            opts.max_len = n_max_len;
            opts.max_new = n_max_new;
            opts.fresh_values = n_fresh;
            opts.datalog_depth = n_depth;
            if (!n_constraints.empty())
                opts.constraints = parse_constraints(read_file(n_constraints), n_constraints);
            AnalysisVerdict v = check_containment(q1, q2, schema, opts);
            emit(common, "verdict",
                 verdict_word(v.kind, "CONTAINED", "NOT-CONTAINED", "CONTAINED-UP-TO-BOUND"));
            emit(common, "detail", v.detail);
            if (v.witness) std::cout << path_to_string(*v.witness);
            return v.kind == VerdictKind::NoUpToBound ? kExitUnknown : kExitOk;
        }

        if (cmd_ltr->parsed()) {
            Schema schema = load_schema(l_schema);
            Access access = parse_access_spec(l_access, schema);
            ConjQuery q = parse_query(read_file(l_query), schema, l_query);
            AnalysisOptions opts;
            opts.grounded = l_grounded;
            opts.max_len = l_max_len;
            opts.max_new = l_max_new;
            opts.fresh_values = l_fresh;
            opts.datalog_depth = l_depth;
            if (!l_constraints.empty())
                opts.constraints = parse_constraints(read_file(l_constraints), l_constraints);
            AnalysisVerdict v = check_ltr(access, q, schema, opts);
            emit(common, "verdict", verdict_word(v.kind, "LTR", "NOT-LTR", "NOT-LTR-UP-TO-BOUND"));
            emit(common, "detail", v.detail);
            if (v.witness) {
                std::string apt = path_to_string(*v.witness);
                if (!l_out.empty()) {
                    std::ofstream out(l_out);
                    out << apt;
                } else {
                    std::cout << apt;
                }
            }
            return v.kind == VerdictKind::NoUpToBound ? kExitUnknown : kExitOk;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
