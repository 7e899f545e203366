#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"

using namespace accltl;
using testutil::acm1;
using testutil::acm2;
using testutil::jones_tuple;

namespace {

AccessPath intro_path() {
    // step 1: AcM2("Parks Rd","OX13QD") reveals Jones' address
    // step 2: AcM1("Jones") returns nothing
    AccessPath p;
    p.steps.push_back(PathStep{
        acm2("Parks Rd", "OX13QD"),
        {{Value::str("Parks Rd"), Value::str("OX13QD"), Value::str("Jones"),
          Value::integer(7)}}});
    p.steps.push_back(PathStep{acm1("Jones"), {}});
    return p;
}

} // namespace

TEST(StructureOf, SpecExamples) {
    Schema s = testutil::s0();
    Instance post;
    post.add("Mobile#", jones_tuple());
    Transition t{Instance{}, acm1("Jones"), post};

    TransitionStructure full = structure_of(t, StructureMode::Full);
    EXPECT_EQ(full.method, "AcM1");
    EXPECT_EQ(full.binding, Tuple{Value::str("Jones")});
    EXPECT_TRUE(full.pre.empty());
    EXPECT_TRUE(full.post.contains("Mobile#", jones_tuple()));

    TransitionStructure zero = structure_of(t, StructureMode::ZeroAry);
    EXPECT_EQ(zero.method, "AcM1");
    EXPECT_TRUE(zero.binding.empty());

    Transition ident{post, acm1("Jones"), post};
    TransitionStructure mi = structure_of(ident, StructureMode::Full);
    EXPECT_EQ(mi.pre, mi.post);

    // full-binding atoms cannot be evaluated on a 0-ary structure
    PosSentence bind = parse_sentence("(exists (n) (isbind AcM1 n))", s);
    EXPECT_THROW(eval_sentence(bind, zero), Error);
    EXPECT_TRUE(eval_sentence(bind, full));
}

TEST(EvalSentence, IntroExamples) {
    Schema s = testutil::s0();
    AccessPath p = intro_path();
    PathEvaluator ev(p, Instance{}, s, StructureMode::Full, s.constants());

    PosSentence mobile_pre = parse_sentence("(exists (n p st ph) (pre Mobile# n p st ph))", s);
    EXPECT_FALSE(eval_sentence(mobile_pre, ev.structure(1)));
    EXPECT_FALSE(eval_sentence(mobile_pre, ev.structure(2))); // still nothing revealed

    PosSentence intro_right = parse_sentence(
        "(exists (n s p h) (and (isbind AcM1 n) (pre Address s p n h)))", s);
    EXPECT_FALSE(eval_sentence(intro_right, ev.structure(1)));
    EXPECT_TRUE(eval_sentence(intro_right, ev.structure(2)));

    // determinism
    EXPECT_EQ(eval_sentence(intro_right, ev.structure(2)),
              eval_sentence(intro_right, ev.structure(2)));
}

TEST(EvalFormula, SpecExamples) {
    Schema s = testutil::s0();
    AccessPath p = intro_path();

    EXPECT_TRUE(eval_formula(*parse_formula("true", s, "x"), p, {}, s, 1));
    EXPECT_TRUE(eval_formula(*parse_formula("true", s, "x"), p, {}, s, 2));

    FormulaPtr intro = parse_formula(testutil::fixture("until_intro.acl"), s, "u");
    EXPECT_TRUE(eval_formula(*intro, p, {}, s, 1));

    // X true is false at the last position
    FormulaPtr xtrue = parse_formula("(X true)", s, "x");
    EXPECT_TRUE(eval_formula(*xtrue, p, {}, s, 1));
    EXPECT_FALSE(eval_formula(*xtrue, p, {}, s, 2));

    AccessPath empty;
    EXPECT_THROW(eval_formula(*xtrue, empty, {}, s, 1), Error);
}

TEST(EvalFormula, ConstantsInActiveDomain) {
    Schema s = testutil::s0();
    AccessPath p;
    p.steps.push_back(PathStep{acm1("Smith"), {}});
    // the constant "Jones" is not on the path, yet the sentence must evaluate
    FormulaPtr f = parse_formula("(exists (x) (and (= x \"Jones\") (= x x)))", s, "x");
    EXPECT_TRUE(eval_formula(*f, p, {}, s, 1));
}

TEST(EvalFormula, GloballyFinallyAgreeWithDesugaring) {
    Schema s = testutil::tiny_schema();
    std::vector<Value> uni = {Value::str("a"), Value::str("b")};
    std::mt19937 rng(11);
    auto accesses = detail::enumerate_accesses(s, uni);
    FormulaPtr body = parse_formula("(exists (x) (post R x))", s, "x");
    FormulaPtr g = AccFormula::globally(body);
    FormulaPtr f = AccFormula::finally(body);
    for (int trial = 0; trial < 120; ++trial) {
        AccessPath p;
        size_t len = 1 + rng() % 3;
        for (size_t i = 0; i < len; ++i) {
            const Access& a = accesses[rng() % accesses.size()];
            auto rs = enumerate_responses(a, s, uni, 1);
            p.steps.push_back(PathStep{a, rs[rng() % rs.size()]});
        }
        bool all = true, some = false;
        for (size_t pos = 1; pos <= p.length(); ++pos) {
            bool b = eval_formula(*body, p, {}, s, pos);
            all = all && b;
            some = some || b;
        }
        EXPECT_EQ(eval_formula(*g, p, {}, s, 1), all);
        EXPECT_EQ(eval_formula(*f, p, {}, s, 1), some);
    }
}

TEST(EvalFormula, PurePostMonotoneAlongPath) {
    Schema s = testutil::tiny_schema();
    std::vector<Value> uni = {Value::str("a"), Value::str("b")};
    std::mt19937 rng(13);
    auto accesses = detail::enumerate_accesses(s, uni);
    PosSentence post_s = parse_sentence("(exists (x y) (post S x y))", s);
    PosSentence pre_s = parse_sentence("(exists (x y) (pre S x y))", s);
    for (int trial = 0; trial < 120; ++trial) {
        AccessPath p;
        size_t len = 1 + rng() % 4;
        for (size_t i = 0; i < len; ++i) {
            const Access& a = accesses[rng() % accesses.size()];
            auto rs = enumerate_responses(a, s, uni, 1);
            p.steps.push_back(PathStep{a, rs[rng() % rs.size()]});
        }
        PathEvaluator ev(p, Instance{}, s, StructureMode::Full, {});
        for (size_t i = 1; i <= p.length(); ++i) {
            if (!eval_sentence(post_s, ev.structure(i))) continue;
            for (size_t j = i + 1; j <= p.length(); ++j) {
                EXPECT_TRUE(eval_sentence(post_s, ev.structure(j)));
                EXPECT_TRUE(eval_sentence(pre_s, ev.structure(j)));
            }
        }
    }
}

TEST(BruteForce, SpecExamples) {
    Schema s = testutil::s0();
    std::vector<Value> uni = {Value::str("Jones")};

    auto w1 = brute_force_sat(*parse_formula("true", s, "x"), s, {}, 3, uni, 1);
    ASSERT_TRUE(w1.has_value());
    EXPECT_EQ(w1->length(), 1u);

    FormulaPtr f2 = parse_formula("(F (exists (n p st ph) (post Mobile# n p st ph)))", s, "x");
    auto w2 = brute_force_sat(*f2, s, {}, 2, uni, 1);
    ASSERT_TRUE(w2.has_value());
    bool revealed = false;
    for (const PathStep& st : w2->steps)
        if (s.method(st.access.method).relation == "Mobile#" && !st.response.empty())
            revealed = true;
    EXPECT_TRUE(revealed);
    // self-consistency: the witness satisfies the formula
    EXPECT_TRUE(eval_formula(*f2, *w2, {}, s, 1));

    // a grounded path from the empty instance can never bind AcM1
    SearchFilters grounded;
    grounded.grounded = true;
    FormulaPtr f3 = parse_formula("(exists (n p st ph) (pre Mobile# n p st ph))", s, "x");
    EXPECT_FALSE(brute_force_sat(*f3, s, {}, 3, uni, 1, grounded).has_value());
}

TEST(BruteForce, RespectsFilters) {
    Schema s = testutil::tiny_schema();
    std::vector<Value> uni = {Value::str("a")};
    FormulaPtr f = parse_formula("(F (exists (x) (post R x)))", s, "x");
    SearchFilters filters;
    filters.exact = {"getR", "allR"};
    filters.idempotent = {"getR", "allR", "getS"};
    auto w = brute_force_sat(*f, s, {}, 3, uni, 1, filters);
    ASSERT_TRUE(w.has_value());
    EXPECT_TRUE(is_exact(*w, filters.exact, {}, s));
    EXPECT_TRUE(is_idempotent(*w, filters.idempotent, s));
}

TEST(BruteForce, ShortestWitnessFirst) {
    Schema s = testutil::tiny_schema();
    std::vector<Value> uni = {Value::str("a")};
    // needs two positions: X(something)
    FormulaPtr f = parse_formula("(X true)", s, "x");
    auto w = brute_force_sat(*f, s, {}, 4, uni, 1);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(w->length(), 2u);
}
