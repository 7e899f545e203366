#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace accltl;

namespace {

// verdict-level agreement helper: sat_0acc vs the brute-force oracle at
// bounds derived from bounds_of
void check_against_oracle(const std::string& text, const Schema& s,
                          const ZeroSatOptions& opts = {}) {
    FormulaPtr f = parse_formula(text, s, "t");
    auto engine = sat_0acc(*f, s, {}, opts);
    ZeroAryBounds b = bounds_of(*f, s);
    std::vector<Value> uni = make_universe(s, *f, std::max<size_t>(1, b.instance_bound));
    SearchFilters filters;
    filters.exact = opts.exact;
    filters.idempotent = opts.idempotent;
    auto oracle = brute_force_sat(*f, s, {}, b.instance_bound + 2, uni, 1, filters,
                                  StructureMode::ZeroAry);
    EXPECT_EQ(engine.has_value(), oracle.has_value()) << text;
    if (engine) {
        EXPECT_TRUE(eval_formula(*f, *engine, {}, s, 1, StructureMode::ZeroAry)) << text;
        if (!opts.exact.empty()) EXPECT_TRUE(is_exact(*engine, opts.exact, {}, s));
        if (!opts.idempotent.empty()) EXPECT_TRUE(is_idempotent(*engine, opts.idempotent, s));
    }
}

} // namespace

TEST(Bounds, SpecExamples) {
    Schema s = testutil::s0();
    // one sentence of 3 relational atoms
    FormulaPtr three = parse_formula(
        "(F (exists (n p st ph s2 p2 n2 h2) (and (post Mobile# n p st ph) "
        "(pre Address s2 p2 n2 h2) (post Address s2 p2 n2 h2))))",
        s, "x");
    EXPECT_EQ(bounds_of(*three, s).instance_bound, 3u);

    FormulaPtr truthy = parse_formula("true", s, "x");
    EXPECT_EQ(bounds_of(*truthy, s).instance_bound, 0u);
    EXPECT_EQ(bounds_of(*truthy, s).binding_bound, s.methods().size());

    // two sentences with 2 and 3 atoms
    FormulaPtr twofive = parse_formula(
        "(U (exists (n p st ph) (and (pre Mobile# n p st ph) (post Mobile# n p st ph))) "
        "(exists (n p st ph s2 p2 n2 h2) (and (post Mobile# n p st ph) "
        "(pre Address s2 p2 n2 h2) (post Address s2 p2 n2 h2))))",
        s, "x");
    EXPECT_EQ(bounds_of(*twofive, s).instance_bound, 5u);

    // full bindings are outside the fragment
    EXPECT_THROW(bounds_of(*parse_formula("(exists (n) (isbind AcM1 n))", s, "x"), s), Error);
}

TEST(PropSat, SpecExamples) {
    // G(p) /\ F(not p) is unsatisfiable
    PropPtr p = PropFormula::prop(0);
    PropPtr gp_fnp = PropFormula::conj(
        {PropFormula::globally(p), PropFormula::finally_(PropFormula::negation(p))});
    EXPECT_FALSE(prop_sat_finite(*gp_fnp, 2).has_value());

    // p U q has the one-letter witness "q"
    PropPtr q = PropFormula::prop(1);
    auto w = prop_sat_finite(*PropFormula::until(p, q), 2);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(*w, std::vector<int>{1});

    // X p needs two letters with p at position 2
    auto w2 = prop_sat_finite(*PropFormula::next(p), 2);
    ASSERT_TRUE(w2.has_value());
    ASSERT_EQ(w2->size(), 2u);
    EXPECT_EQ((*w2)[1], 0);

    // the witness satisfies the formula per the word semantics
    EXPECT_TRUE(eval_prop(*PropFormula::next(p), *w2, 1));

    // max_len caps the search
    EXPECT_FALSE(prop_sat_finite(*PropFormula::next(p), 2, 1).has_value());
}

TEST(PropSat, WeakNextAndRelease) {
    PropPtr p = PropFormula::prop(0);
    // WX false holds only at a last position: witness length 1
    auto w = prop_sat_finite(*PropFormula::weak_next(PropFormula::falsity()), 1);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(w->size(), 1u);
    // G p has the single-letter witness p
    auto w2 = prop_sat_finite(*PropFormula::globally(p), 2);
    ASSERT_TRUE(w2.has_value());
    EXPECT_EQ(*w2, std::vector<int>{0});
}

TEST(Sat0, SpecExamples) {
    Schema s = testutil::s0();

    FormulaPtr f1 = parse_formula("(F (exists (n p st ph) (post Mobile# n p st ph)))", s, "x");
    auto w1 = sat_0acc(*f1, s);
    ASSERT_TRUE(w1.has_value());
    EXPECT_TRUE(eval_formula(*f1, *w1, {}, s, 1, StructureMode::ZeroAry));

    FormulaPtr f2 = parse_formula(
        "(and (exists (n p st ph) (pre Mobile# n p st ph)) "
        "(not (exists (n p st ph) (pre Mobile# n p st ph))))",
        s, "x");
    EXPECT_FALSE(sat_0acc(*f2, s).has_value());

    // only AcM1 accesses can never add Address tuples
    FormulaPtr f3 = parse_formula(
        "(and (G (isbind0 AcM1)) (F (exists (st p n h) (post Address st p n h))))", s, "x");
    EXPECT_FALSE(sat_0acc(*f3, s).has_value());

    // full-binding formulas are rejected
    EXPECT_THROW(sat_0acc(*parse_formula("(exists (n) (isbind AcM1 n))", s, "x"), s), Error);
}

TEST(Sat0, OracleAgreementMiniCorpus) {
    Schema s = testutil::tiny_schema();
    std::vector<std::string> corpus = {
        "(F (exists (x) (post R x)))",
        "(G (exists (x) (post R x)))",
        "(and (isbind0 getR) (X (isbind0 getS)))",
        "(U (not (exists (x) (pre R x))) (isbind0 getS))",
        "(and (F (exists (x) (pre R x))) (G (isbind0 getS)))",
        "(not (F (exists (x y) (post S x y))))",
        "(F (exists (x y) (and (post S x y) (!= x y))))",
        "(F (exists (x) (and (post R x) (!= x x))))",
        "(X (X (exists (x) (post R x))))",
        "(or (isbind0 allR) (X true))",
    };
    for (const std::string& text : corpus) check_against_oracle(text, s);
}

TEST(Sat0, ExactAndIdempotentVariants) {
    Schema s = testutil::tiny_schema();
    ZeroSatOptions exact_opts;
    exact_opts.exact = {"getR", "allR"};
    check_against_oracle("(F (exists (x) (post R x)))", s, exact_opts);
    check_against_oracle("(and (isbind0 getR) (X (isbind0 getR)))", s, exact_opts);

    ZeroSatOptions idem_opts;
    idem_opts.idempotent = {"getR", "getS", "allR"};
    check_against_oracle("(F (exists (x y) (post S x y)))", s, idem_opts);
    check_against_oracle("(and (isbind0 getR) (X (and (isbind0 getR) "
                         "(exists (x) (post R x)))))",
                         s, idem_opts);
}

TEST(Sat0, WitnessInstancesGrowMonotonically) {
    Schema s = testutil::tiny_schema();
    FormulaPtr f = parse_formula(
        "(F (and (exists (x) (post R x)) (X (exists (x y) (post S x y)))))", s, "x");
    auto w = sat_0acc(*f, s);
    ASSERT_TRUE(w.has_value());
    auto seq = instance_sequence(*w, {}, s);
    for (size_t i = 0; i + 1 < seq.size(); ++i) EXPECT_TRUE(seq[i].subset_of(seq[i + 1]));
}

TEST(SatX, SpecExamples) {
    Schema s = testutil::tiny_schema();
    FormulaPtr xx = parse_formula("(X (X true))", s, "x");
    auto w = sat_x_fragment(*xx, s);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(w->length(), 3u); // X-depth 2 plus one

    FormulaPtr contra = parse_formula(
        "(and (exists (x) (post R x)) (not (exists (x) (post R x))))", s, "x");
    EXPECT_FALSE(sat_x_fragment(*contra, s).has_value());

    // U-formulas are rejected
    EXPECT_THROW(sat_x_fragment(*parse_formula("(F true)", s, "x"), s), Error);
}

TEST(SatX, AgreesWithSat0OnXCorpus) {
    Schema s = testutil::tiny_schema();
    std::vector<std::string> corpus = {
        "(X (exists (x) (post R x)))",
        "(and (isbind0 getR) (X (isbind0 getS)))",
        "(X (and (exists (x) (pre R x)) (isbind0 getS)))",
        "(not (X (exists (x) (post R x))))",
        "(X (exists (x y) (and (post S x y) (!= x y))))",
        "(or (isbind0 allR) (X (isbind0 allR)))",
    };
    for (const std::string& text : corpus) {
        FormulaPtr f = parse_formula(text, s, "t");
        auto via_x = sat_x_fragment(*f, s);
        auto via_zero = sat_0acc(*f, s);
        EXPECT_EQ(via_x.has_value(), via_zero.has_value()) << text;
        if (via_x) EXPECT_TRUE(eval_formula(*f, *via_x, {}, s, 1, StructureMode::ZeroAry));
    }
}
