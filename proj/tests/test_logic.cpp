#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace accltl;

namespace {

std::string collapse_ws(const std::string& s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = true;
            continue;
        }
        if (space && !out.empty()) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

// Ex 2.3 shape over S0: F(not Q_pre /\ IsBind_AcM1("Jones") /\ Q_post)
FormulaPtr ex23_formula(const Schema& s) {
    PosSentence qpre = parse_sentence("(exists (n p st ph) (pre Mobile# n p st ph))", s);
    PosSentence right = parse_sentence(
        "(exists (n p st ph) (and (isbind AcM1 \"Jones\") (post Mobile# n p st ph)))", s);
    return AccFormula::finally(AccFormula::conj(
        {AccFormula::negation(AccFormula::atom(qpre)), AccFormula::atom(right)}));
}

} // namespace

TEST(Parser, IntroUntilFormula) {
    Schema s = testutil::s0();
    FormulaPtr f = parse_formula(testutil::fixture("until_intro.acl"), s, "until_intro.acl");
    EXPECT_EQ(f->op(), AccFormula::Op::Until);
    // left operand is the negated Mobile#-pre emptiness test
    EXPECT_EQ(f->kids()[0]->op(), AccFormula::Op::Not);
}

TEST(Parser, Errors) {
    Schema s = testutil::s0();
    EXPECT_THROW(parse_formula("(G (not (exists () false-free", s, "x"), Error);
    EXPECT_THROW(parse_formula("(frobnicate a)", s, "x"), Error);
    EXPECT_THROW(parse_formula("(exists (n) (pre Nope n))", s, "x"), Error);
    // arity mismatch
    EXPECT_THROW(parse_formula("(exists (n) (pre Mobile# n))", s, "x"), Error);
    // isbind arity must match the input positions
    EXPECT_THROW(parse_formula("(exists (a b) (isbind AcM1 a b))", s, "x"), Error);
    // free variable
    EXPECT_THROW(parse_formula("(exists (n) (= n m))", s, "x"), Error);
    // kind conflict: houseno is an int position, Mobile# positions are strings
    EXPECT_THROW(
        parse_formula("(exists (x s p n) (and (post Address s p n x) (pre Mobile# x x x x)))",
                      s, "x"),
        Error);
}

TEST(Parser, BindArity) {
    Schema s = testutil::s0();
    FormulaPtr f = parse_formula("(exists (n) (isbind AcM1 n))", s, "x");
    EXPECT_EQ(f->op(), AccFormula::Op::Atom);
    size_t arity = 0;
    f->sentence().for_each_atom([&](const SAtom& a) {
        if (a.kind == AtomKind::Bind) arity = a.terms.size();
    });
    EXPECT_EQ(arity, 1u);
}

TEST(Parser, RoundTrips) {
    Schema s = testutil::s0();
    std::vector<std::string> corpus = {
        "(U (exists () true) (exists (n) (isbind AcM1 n)))",
        "(not (X (exists (n p st ph) (post Mobile# n p st ph))))",
        "(and (isbind0 AcM1) (or true false))",
        "(exists (n) (and (isbind AcM1 n) (= n \"Jones\")))",
        "(exists (s p n h) (and (pre Address s p n h) (!= n \"Jones\")))",
    };
    for (const std::string& text : corpus) {
        FormulaPtr f = parse_formula(text, s, "t");
        // parse . print is the identity on ASTs
        FormulaPtr g = parse_formula(f->to_string(), s, "t2");
        EXPECT_TRUE(f->equals(*g)) << text;
    }
    // print . parse is the identity up to whitespace on canonical text
    std::string fixture_text = testutil::fixture("until_intro.acl");
    FormulaPtr f = parse_formula(fixture_text, s, "until_intro.acl");
    // strip comment lines for the comparison
    std::string no_comments;
    std::istringstream is(fixture_text);
    std::string line;
    while (std::getline(is, line))
        if (line.empty() || line[0] != '#') no_comments += line + "\n";
    EXPECT_EQ(collapse_ws(f->to_string()), collapse_ws(no_comments));
}

TEST(Parser, GAndFDesugar) {
    Schema s = testutil::s0();
    FormulaPtr g = parse_formula("(G (isbind0 AcM1))", s, "x");
    FormulaPtr manual = AccFormula::negation(AccFormula::until(
        AccFormula::truth(),
        AccFormula::negation(parse_formula("(isbind0 AcM1)", s, "y"))));
    EXPECT_TRUE(g->equals(*manual));
    FormulaPtr f = parse_formula("(F (isbind0 AcM1))", s, "x");
    EXPECT_EQ(f->op(), AccFormula::Op::Until);
}

TEST(Classify, SpecExamples) {
    Schema s = testutil::s0();
    FragmentReport r23 = classify(*ex23_formula(s));
    EXPECT_TRUE(r23.binding_positive);
    EXPECT_TRUE(r23.uses_full_bindings);
    EXPECT_EQ(r23.verdict, Fragment::AccLTL_plus);

    FormulaPtr neg = AccFormula::negation(
        parse_formula("(exists (n) (isbind AcM1 n))", s, "x"));
    FragmentReport rneg = classify(*neg);
    EXPECT_FALSE(rneg.binding_positive);
    EXPECT_EQ(rneg.verdict, Fragment::AccLTL_full);
    EXPECT_NE(rneg.capability.find("undecidable"), std::string::npos);

    // Ex 2.4 shape: LTR formula conjoined with a negated F containing an
    // inequality
    FormulaPtr fd = parse_formula(
        "(and (F (exists (n p st ph) (and (isbind AcM1 \"Jones\") (post Mobile# n p st ph)))) "
        "(not (F (exists (s p n h s2 p2 n2 h2) (and (pre Address s p n h) "
        "(pre Address s2 p2 n2 h2) (= s s2) (= p p2) (!= n n2))))))",
        s, "x");
    FragmentReport rfd = classify(*fd);
    EXPECT_TRUE(rfd.binding_positive);
    EXPECT_TRUE(rfd.uses_inequalities);
    EXPECT_EQ(rfd.verdict, Fragment::AccLTL_plus_neq);
    EXPECT_NE(rfd.capability.find("bounded search only"), std::string::npos);
}

TEST(Classify, ZeroAryAndXOnly) {
    Schema s = testutil::s0();
    EXPECT_EQ(classify(*parse_formula("(G (isbind0 AcM1))", s, "x")).verdict, Fragment::Acc0);
    EXPECT_EQ(classify(*parse_formula("(X (isbind0 AcM1))", s, "x")).verdict, Fragment::Acc0_X);
    EXPECT_EQ(classify(*parse_formula(
                           "(X (exists (a b) (and (post R2 a b) (!= a b))))",
                           parse_schema("relation R2(a:string, b:string)\n"
                                        "access m on R2 inputs (1)",
                                        "x"),
                           "x"))
                  .verdict,
              Fragment::Acc0_X_neq);
    // a negated 0-ary flag stays in the 0-ary fragment
    FragmentReport r = classify(*parse_formula("(not (isbind0 AcM1))", s, "x"));
    EXPECT_EQ(r.verdict, Fragment::Acc0_X);
    EXPECT_FALSE(r.binding_positive);
}

TEST(Classify, MonotoneUnderBindFreeNegation) {
    Schema s = testutil::s0();
    std::vector<std::string> bind_free = {
        "(exists (n p st ph) (pre Mobile# n p st ph))",
        "(U (exists (s p n h) (post Address s p n h)) true)",
    };
    for (const std::string& text : bind_free) {
        FormulaPtr f = parse_formula(text, s, "x");
        FragmentReport before = classify(*f);
        FragmentReport after = classify(*AccFormula::negation(f));
        EXPECT_EQ(before.binding_positive, after.binding_positive) << text;
    }
}

TEST(QfClosure, SpecExamples) {
    Schema s = testutil::s0();
    auto strings = [](const std::vector<PosSentence>& qs) {
        std::vector<std::string> out;
        for (const PosSentence& q : qs) out.push_back(q.to_string());
        return out;
    };

    // IsBind0 /\ q -> q
    auto qs1 = qf_closure(*parse_formula(
        "(exists (n p st ph) (and (isbind0 AcM1) (pre Mobile# n p st ph)))", s, "x"));
    ASSERT_EQ(qs1.size(), 1u);
    EXPECT_EQ(qs1[0].to_string(), "(exists (n p st ph) (pre Mobile# n p st ph))");

    // plain q is untouched
    auto qs2 = qf_closure(*parse_formula("(exists (n p st ph) (pre Mobile# n p st ph))", s, "x"));
    EXPECT_EQ(strings(qs2),
              std::vector<std::string>{"(exists (n p st ph) (pre Mobile# n p st ph))"});

    // IsBind0 \/ q -> q
    auto qs3 = qf_closure(*parse_formula(
        "(exists (n p st ph) (or (isbind0 AcM1) (pre Mobile# n p st ph)))", s, "x"));
    ASSERT_EQ(qs3.size(), 1u);
    EXPECT_EQ(qs3[0].to_string(), "(exists (n p st ph) (pre Mobile# n p st ph))");

    // no IsBind0 left anywhere
    for (const PosSentence& q : qs1) EXPECT_FALSE(q.mentions_bind());

    // full-binding formulas are outside the fragment
    EXPECT_THROW(qf_closure(*parse_formula("(exists (n) (isbind AcM1 n))", s, "x")), Error);
}

TEST(TildeRewrite, SpecExamples) {
    Schema s = testutil::s0();
    PosSentence guard = parse_sentence(
        "(exists (n st p h) (and (isbind AcM1 n) (pre Address st p n h)))", s);
    PosSentence t = tilde_rewrite(guard, s);
    EXPECT_TRUE(t.pure_post());
    EXPECT_FALSE(t.mentions_bind());
    check_sentence(t, s); // still closed and well-typed
    // evaluates like the "post copy" of the guard: a structure whose post
    // contains an Address tuple satisfies it
    Instance post;
    post.add("Address", {Value::str("Parks Rd"), Value::str("OX13QD"), Value::str("Jones"),
                         Value::integer(7)});
    Transition tr{Instance{}, testutil::acm2("Parks Rd", "OX13QD"), post};
    EXPECT_TRUE(eval_sentence(t, structure_of(tr, StructureMode::Full)));

    // pure-post guards rewrite to themselves (up to variable pruning)
    PosSentence pure = parse_sentence("(exists (s p n h) (post Address s p n h))", s);
    EXPECT_EQ(tilde_rewrite(pure, s).to_string(), pure.to_string());

    // mixed methods violate condition 1
    PosSentence mixed = parse_sentence(
        "(exists (n s p) (and (isbind AcM1 n) (isbind AcM2 s p)))", s);
    EXPECT_THROW(tilde_rewrite(mixed, s), Error);
}

TEST(Sentences, ConjunctionRenamesApart) {
    Schema s = testutil::s0();
    PosSentence a = parse_sentence("(exists (n) (isbind AcM1 n))", s);
    PosSentence b = parse_sentence("(exists (n p st ph) (pre Mobile# n p st ph))", s);
    PosSentence c = sentence_conjunction({a, b});
    check_sentence(c, s);
    EXPECT_EQ(c.vars.size(), 5u);
}
