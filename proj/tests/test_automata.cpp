#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"

using namespace accltl;
using testutil::acm1;
using testutil::acm2;
using testutil::jones_tuple;

namespace {

AAutomaton aut(const std::string& text, const Schema& s) {
    return parse_automaton(text, s, "<test>");
}

// Exhaustively compares run_accepts(compile(f)) with eval_formula(f) over all
// paths up to the given bounds.
void check_equivalence(const AccFormula& f, const Schema& s, const std::vector<Value>& universe,
                       size_t max_len, size_t max_new) {
    AAutomaton a = compile_formula(f, s);
    size_t paths = 0;
    search_paths(s, {}, universe, max_len, max_new, {}, [&](const AccessPath& p) {
        ++paths;
        bool by_eval = !p.empty() && eval_formula(f, p, {}, s, 1);
        bool by_run = run_accepts(a, p, {}, s);
        EXPECT_EQ(by_eval, by_run) << f.to_string() << "\non\n" << path_to_string(p);
        return false; // keep enumerating
    });
    EXPECT_GT(paths, 0u);
}

} // namespace

TEST(RunAccepts, SpecExamples) {
    Schema s = testutil::s0();

    AAutomaton empty_ok = aut("states s0; initial s0; accepting s0;", s);
    EXPECT_TRUE(run_accepts(empty_ok, AccessPath{}, {}, s));

    AAutomaton needs_bind = aut(
        "states s0 s1; initial s0; accepting s1;\n"
        "trans s0 -> s1 pos: (exists (n) (isbind AcM1 n))",
        s);
    AccessPath p_acm2;
    p_acm2.steps.push_back(PathStep{acm2("Parks Rd", "OX13QD"), {}});
    EXPECT_FALSE(run_accepts(needs_bind, p_acm2, {}, s));
    AccessPath p_acm1;
    p_acm1.steps.push_back(PathStep{acm1("Jones"), {}});
    EXPECT_TRUE(run_accepts(needs_bind, p_acm1, {}, s));

    AAutomaton neg_guard = aut(
        "states s0 s1; initial s0; accepting s1;\n"
        "trans s0 -> s1 neg: (exists (n p st ph) (pre Mobile# n p st ph)) pos: true",
        s);
    EXPECT_TRUE(run_accepts(neg_guard, p_acm2, {}, s));
    Instance has_mobile;
    has_mobile.add("Mobile#", jones_tuple());
    EXPECT_FALSE(run_accepts(neg_guard, p_acm2, has_mobile, s));
}

TEST(AutomatonFormat, RoundTripAndValidation) {
    Schema s = testutil::s0();
    AAutomaton a = aut(
        "states s0 s1; initial s0; accepting s1;\n"
        "constants { \"Jones\" }\n"
        "trans s0 -> s0 pos: true\n"
        "trans s0 -> s1 neg: (exists (n p st ph) (pre Mobile# n p st ph)) "
        "pos: (exists (n) (isbind AcM1 n))",
        s);
    AAutomaton b = aut(automaton_to_string(a), s);
    EXPECT_EQ(automaton_to_string(a), automaton_to_string(b));

    // negated guard parts cannot mention IsBind
    EXPECT_THROW(aut("states s0; initial s0; accepting s0;\n"
                     "trans s0 -> s0 neg: (exists (n) (isbind AcM1 n)) pos: true",
                     s),
                 Error);
    // inequalities are not positive-existential
    EXPECT_THROW(aut("states s0; initial s0; accepting s0;\n"
                     "trans s0 -> s0 pos: (exists (n m) (and (isbind AcM1 n) (!= n m)))",
                     s),
                 Error);
    // isbind0 in guards expands to an existential isbind
    AAutomaton c = aut("states s0; initial s0; accepting s0;\n"
                       "trans s0 -> s0 pos: (isbind0 AcM1)",
                       s);
    bool has_full_bind = false;
    c.transitions[0].guard.positive.for_each_atom([&](const SAtom& at) {
        if (at.kind == AtomKind::Bind) has_full_bind = true;
    });
    EXPECT_TRUE(has_full_bind);
}

TEST(Compile, TrueAcceptsEveryNonEmptyPath) {
    Schema s = testutil::tiny_schema();
    AAutomaton a = compile_formula(*parse_formula("true", s, "x"), s);
    EXPECT_FALSE(run_accepts(a, AccessPath{}, {}, s));
    std::vector<Value> uni = {Value::str("a")};
    size_t seen = 0;
    search_paths(s, {}, uni, 2, 1, {}, [&](const AccessPath& p) {
        if (!p.empty()) {
            EXPECT_TRUE(run_accepts(a, p, {}, s));
            ++seen;
        }
        return false;
    });
    EXPECT_GT(seen, 4u);
}

TEST(Compile, RejectsOutsideFragment) {
    Schema s = testutil::s0();
    EXPECT_THROW(compile_formula(*AccFormula::negation(parse_formula(
                                     "(exists (n) (isbind AcM1 n))", s, "x")),
                                 s),
                 Error);
    EXPECT_THROW(compile_formula(*parse_formula(
                                     "(exists (s p n h) (and (post Address s p n h) "
                                     "(!= n \"Jones\")))",
                                     s, "x"),
                                 s),
                 Error);
}

TEST(Compile, NegativeGuardPartsAreBindFree) {
    Schema s = testutil::s0();
    FormulaPtr f = parse_formula(testutil::fixture("until_intro.acl"), s, "u");
    AAutomaton a = compile_formula(*f, s);
    for (const AutTransition& t : a.transitions)
        for (const PosSentence& n : t.guard.negated) EXPECT_FALSE(n.mentions_bind());
}

TEST(Compile, Ex23ShapeRequiresTheFlip) {
    Schema s = testutil::s0();
    // F(not Q_pre /\ IsBind_AcM1("Jones") /\ Q_post) with Q = some Mobile# row
    FormulaPtr f = parse_formula(
        "(F (and (not (exists (n p st ph) (pre Mobile# n p st ph))) "
        "(exists (n p st ph) (and (isbind AcM1 \"Jones\") (post Mobile# n p st ph)))))",
        s, "x");
    AAutomaton a = compile_formula(*f, s);

    AccessPath flip;
    flip.steps.push_back(PathStep{acm1("Jones"), {jones_tuple()}});
    EXPECT_TRUE(run_accepts(a, flip, {}, s));

    AccessPath no_flip;
    no_flip.steps.push_back(PathStep{acm1("Jones"), {}});
    EXPECT_FALSE(run_accepts(a, no_flip, {}, s));

    AccessPath other;
    other.steps.push_back(PathStep{
        acm1("Smith"),
        {{Value::str("Smith"), Value::str("p"), Value::str("s"), Value::str("7")}}});
    EXPECT_FALSE(run_accepts(a, other, {}, s));
}

TEST(Compile, EquivalenceOnTinyPaths) {
    Schema s = testutil::tiny_schema();
    std::vector<Value> uni = {Value::str("a"), Value::str("b")};
    std::vector<std::string> corpus = {
        "(X (exists (x) (post R x)))",
        "(U (not (exists (x) (pre R x))) (exists (x) (isbind getR x)))",
        "(G (exists (x) (isbind getR x)))",
        "(F (exists (x y) (and (post S x y) (= x y))))",
        "(and (isbind0 getR) (X (isbind0 getS)))",
        "(or (not true) (F (exists (x) (and (isbind getR x) (pre R x)))))",
        "(not (F (exists (x) (post R x))))",
    };
    for (const std::string& text : corpus) {
        FormulaPtr f = parse_formula(text, s, "t");
        check_equivalence(*f, s, uni, 2, 1);
    }
}

TEST(CheckProgressive, SpecExamples) {
    Schema s = testutil::s0();

    AAutomaton loop = aut("states s0; initial s0; accepting s0;\n"
                          "trans s0 -> s0 pos: true",
                          s);
    ProgressiveWitness w;
    w.scc_chain = {{"s0"}};
    w.post_type["s0"] = {};
    EXPECT_TRUE(check_progressive(loop, w, s).ok);

    AAutomaton twice = aut("states s0 s1; initial s0; accepting s1;\n"
                           "trans s0 -> s1 pos: true\n"
                           "trans s0 -> s1 pos: (isbind0 AcM1)",
                           s);
    ProgressiveWitness w2;
    w2.scc_chain = {{"s0"}, {"s1"}};
    w2.post_type["s0"] = {};
    w2.post_type["s1"] = {};
    ProgressiveReport rep = check_progressive(twice, w2, s);
    EXPECT_FALSE(rep.ok);
    EXPECT_FALSE(rep.condition[4]);

    PosSentence q = parse_sentence("(exists (n p st ph) (post Mobile# n p st ph))", s);
    PosSentence q_and_r = parse_sentence(
        "(exists (n p st ph s2 p2 n2 h2) (and (post Mobile# n p st ph) "
        "(post Address s2 p2 n2 h2)))",
        s);
    EXPECT_TRUE(implies({q_and_r}, q));
    EXPECT_FALSE(implies({q}, q_and_r));
}

TEST(CheckProgressive, ConstantCrossing) {
    Schema s = testutil::s0();
    AAutomaton var_cross = aut("states s0 s1; initial s0; accepting s1;\n"
                               "trans s0 -> s1 pos: (exists (n) (isbind AcM1 n))",
                               s);
    ProgressiveWitness w;
    w.scc_chain = {{"s0"}, {"s1"}};
    w.post_type["s0"] = {};
    w.post_type["s1"] = {};
    ProgressiveReport rep = check_progressive(var_cross, w, s);
    EXPECT_FALSE(rep.ok);
    EXPECT_FALSE(rep.condition[4]);

    AAutomaton const_cross = aut("states s0 s1; initial s0; accepting s1;\n"
                                 "trans s0 -> s1 pos: (isbind AcM1 \"Jones\")",
                                 s);
    EXPECT_TRUE(check_progressive(const_cross, w, s).ok);
}

TEST(Decompose, AlreadyProgressiveIsSingleton) {
    Schema s = testutil::s0();
    AAutomaton simple = aut("states s0 s1; initial s0; accepting s1;\n"
                            "trans s0 -> s0 pos: true\n"
                            "trans s0 -> s1 pos: (isbind AcM1 \"Jones\")\n"
                            "trans s1 -> s1 pos: true",
                            s);
    auto pieces = decompose(simple, s);
    ASSERT_EQ(pieces.size(), 1u);
    EXPECT_TRUE(check_progressive(pieces[0].first, pieces[0].second, s).ok);
}

TEST(Decompose, OutputsPassCheckAndAgreeOnEmptiness) {
    Schema s = testutil::tiny_schema();
    std::vector<Value> uni = {Value::str("a")};
    std::vector<std::string> formulas = {
        "(F (exists (x) (post R x)))",
        "(U (not (exists (x) (pre R x))) (isbind0 getS))",
        "(and (F (isbind0 getR)) (F (isbind0 getS)))",
        "(F (and (exists (x) (pre R x)) (not (exists (x y) (pre S x y)))))",
        "(F (and (exists (x) (pre R x)) (not (pre R \"a\"))))",
    };
    for (const std::string& text : formulas) {
        FormulaPtr f = parse_formula(text, s, "t");
        AAutomaton a = compile_formula(*f, s);
        auto pieces = decompose(a, s);
        bool whole = bounded_empty(a, s, 3, uni, 1).has_value();
        bool any_piece = false;
        for (const auto& [piece, wit] : pieces) {
            EXPECT_TRUE(check_progressive(piece, wit, s).ok) << text;
            if (bounded_empty(piece, s, 3, uni, 1)) any_piece = true;
        }
        EXPECT_EQ(whole, any_piece) << text;
    }
}

TEST(Decompose, MixedMethodGuardsAreDropped) {
    Schema s = testutil::s0();
    AAutomaton mixed = aut(
        "states s0 s1; initial s0; accepting s1;\n"
        "trans s0 -> s1 pos: (exists (n s p) (and (isbind AcM1 n) (isbind AcM2 s p)))",
        s);
    std::vector<Value> uni = {Value::str("Jones")};
    EXPECT_FALSE(bounded_empty(mixed, s, 2, uni, 1).has_value());
    for (const auto& [piece, wit] : decompose(mixed, s))
        EXPECT_FALSE(bounded_empty(piece, s, 2, uni, 1).has_value());
}

TEST(Decompose, ContradictoryConstantsStayEmpty) {
    Schema s = testutil::s0();
    AAutomaton contra = aut(
        "states s0 s1; initial s0; accepting s1;\n"
        "trans s0 -> s1 pos: (exists (n) (and (isbind AcM1 n) (= n \"a\") (= n \"b\")))",
        s);
    std::vector<Value> uni = {Value::str("a"), Value::str("b")};
    EXPECT_FALSE(bounded_empty(contra, s, 2, uni, 1).has_value());
    for (const auto& [piece, wit] : decompose(contra, s))
        EXPECT_FALSE(bounded_empty(piece, s, 2, uni, 1).has_value());
}

TEST(BoundedEmpty, SpecExamples) {
    Schema s = testutil::s0();
    AAutomaton all = compile_formula(*parse_formula("true", s, "x"), s);
    std::vector<Value> uni = {Value::str("x")};
    auto w = bounded_empty(all, s, 2, uni, 1);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(w->length(), 1u);

    // the required constant comes from C, not the universe
    AAutomaton needs_jones = aut("states s0 s1; initial s0; accepting s1;\n"
                                 "trans s0 -> s1 pos: (isbind AcM1 \"Jones\")",
                                 s);
    auto w2 = bounded_empty(needs_jones, s, 2, {}, 1);
    ASSERT_TRUE(w2.has_value());
    EXPECT_EQ(w2->steps[0].access.binding.at(1), Value::str("Jones"));

    // F(Q /\ not Q) is unsatisfiable
    FormulaPtr contradiction = parse_formula(
        "(F (and (exists (n p st ph) (pre Mobile# n p st ph)) "
        "(not (exists (n p st ph) (pre Mobile# n p st ph)))))",
        s, "x");
    AAutomaton never = compile_formula(*contradiction, s);
    EXPECT_FALSE(bounded_empty(never, s, 3, uni, 1).has_value());
}
