#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"

using namespace accltl;
using namespace accltl::dl;

namespace {

DatalogProgram transitive_closure() {
    auto [p, _] = parse_datalog(R"(
path(X, Y) :- edge(X, Y).
path(X, Z) :- path(X, Y), edge(Y, Z).
goal path.
)",
                                "tc.dl");
    return p;
}

Database chain_abc() {
    Database d;
    d["edge"].insert({Value::sym("a"), Value::sym("b")});
    d["edge"].insert({Value::sym("b"), Value::sym("c")});
    return d;
}

} // namespace

TEST(Fixpoint, TransitiveClosureByHand) {
    DatalogProgram p = transitive_closure();
    Database idb = fixpoint(p, chain_abc());
    // hand-computed closure of a->b->c
    std::set<Tuple> expect = {{Value::sym("a"), Value::sym("b")},
                              {Value::sym("b"), Value::sym("c")},
                              {Value::sym("a"), Value::sym("c")}};
    EXPECT_EQ(idb["path"], expect);
}

TEST(Fixpoint, NoRulesAndIrreflexive) {
    DatalogProgram none;
    none.goal = "g";
    none.rules.push_back(DatalogRule{{"g", {}}, {{"seed", {}}}});
    Database empty_idb = fixpoint(none, Database{});
    EXPECT_TRUE(empty_idb["g"].empty());

    auto [p, _] = parse_datalog("g :- e(X, X).\ngoal g.", "x.dl");
    Database irreflexive;
    irreflexive["e"].insert({Value::sym("a"), Value::sym("b")});
    irreflexive["e"].insert({Value::sym("b"), Value::sym("a")});
    EXPECT_FALSE(accepts(p, irreflexive));
    Database reflexive = irreflexive;
    reflexive["e"].insert({Value::sym("a"), Value::sym("a")});
    EXPECT_TRUE(accepts(p, reflexive));
}

TEST(Fixpoint, UnsafeRuleRejected) {
    DatalogProgram p;
    p.goal = "g";
    p.rules.push_back(DatalogRule{{"g", {Term::variable("X")}}, {}});
    EXPECT_THROW(p.check(), Error);
}

TEST(Accepts, SpecExamples) {
    EXPECT_TRUE(accepts(transitive_closure(), chain_abc()));
    EXPECT_FALSE(accepts(transitive_closure(), Database{}));
    auto [fact_goal, _] = parse_datalog("g.\ngoal g.", "x.dl");
    EXPECT_TRUE(accepts(fact_goal, Database{}));
}

TEST(Fixpoint, SemiNaiveMatchesNaiveOnRandomPrograms) {
    std::mt19937 rng(23);
    std::vector<std::string> ext = {"e", "f"};
    std::vector<std::string> intens = {"p", "q", "g"};
    std::vector<Value> dom = {Value::sym("a"), Value::sym("b"), Value::sym("c")};
    for (int trial = 0; trial < 40; ++trial) {
        DatalogProgram p;
        p.goal = "g";
        size_t nrules = 2 + rng() % 5;
        auto var = [&](size_t i) { return Term::variable("V" + std::to_string(i)); };
        for (size_t r = 0; r < nrules; ++r) {
            DatalogRule rule;
            std::string head = intens[rng() % intens.size()];
            size_t head_ar = head == "g" ? 0 : 2;
            size_t nbody = 1 + rng() % 3;
            std::vector<size_t> vars;
            for (size_t b = 0; b < nbody; ++b) {
                bool use_ext = rng() % 2 == 0 || r == 0;
                std::string pred = use_ext ? ext[rng() % ext.size()]
                                           : intens[rng() % 2]; // p or q
                DlAtom atom{pred, {var(rng() % 4), var(rng() % 4)}};
                for (const Term& t : atom.terms) vars.push_back(std::stoul(t.var.substr(1)));
                rule.body.push_back(std::move(atom));
            }
            rule.head.pred = head;
            for (size_t i = 0; i < head_ar; ++i)
                rule.head.terms.push_back(var(vars[rng() % vars.size()]));
            p.rules.push_back(std::move(rule));
        }
        // ensure the goal is derivable in principle
        p.rules.push_back(DatalogRule{{"g", {}}, {{"p", {var(0), var(1)}}}});
        Database d;
        for (const std::string& e : ext)
            for (int k = 0; k < 4; ++k)
                d[e].insert({dom[rng() % dom.size()], dom[rng() % dom.size()]});
        EXPECT_EQ(fixpoint(p, d), fixpoint_naive(p, d)) << "trial " << trial;
    }
}

TEST(Containment, SpecExamples) {
    DatalogProgram tc = transitive_closure();

    // every accepted database has an edge
    PositiveSentence has_edge = parse_db_sentence("(exists (X Y) (edge X Y))");
    ContainmentResult r1 = containment_bounded(tc, has_edge, 8);
    EXPECT_TRUE(r1.contained_up_to_depth());
    EXPECT_GT(r1.expansions, 0u);

    // ... but not necessarily a self-loop
    PositiveSentence has_loop = parse_db_sentence("(exists (X) (edge X X))");
    ContainmentResult r2 = containment_bounded(tc, has_loop, 8);
    ASSERT_TRUE(r2.counterexample.has_value());
    EXPECT_TRUE(accepts(tc, *r2.counterexample));
    EXPECT_FALSE(eval_on_db(has_loop, *r2.counterexample));

    // two-hop goal: the shared middle is forced, edge(x,x) is not
    auto [two_hop, unused1] = parse_datalog("g :- e(X, Y), e(Y, Z).\ngoal g.", "x.dl");
    PositiveSentence shared = parse_db_sentence("(exists (X Y Z) (and (e X Y) (e Y Z)))");
    EXPECT_TRUE(containment_bounded(two_hop, shared, 4).contained_up_to_depth());
    PositiveSentence self = parse_db_sentence("(exists (X) (e X X))");
    ASSERT_TRUE(containment_bounded(two_hop, self, 4).counterexample.has_value());

    // unconditional goal: the empty database is a counterexample
    auto [fact_goal, unused2] = parse_datalog("g.\ngoal g.", "x.dl");
    PositiveSentence some_r = parse_db_sentence("(exists (X) (r X))");
    ContainmentResult r3 = containment_bounded(fact_goal, some_r, 2);
    ASSERT_TRUE(r3.counterexample.has_value());
    size_t facts = 0;
    for (const auto& [pred, ts] : *r3.counterexample) facts += ts.size();
    EXPECT_EQ(facts, 0u);
}

TEST(Containment, CounterexamplesAreVerified) {
    DatalogProgram tc = transitive_closure();
    std::vector<std::string> sentences = {
        "(exists (X) (edge X X))",
        "(exists (X Y) (and (edge X Y) (edge Y X)))",
        "false",
    };
    for (const std::string& stext : sentences) {
        PositiveSentence s = parse_db_sentence(stext);
        ContainmentResult r = containment_bounded(tc, s, 6);
        if (r.counterexample) {
            EXPECT_TRUE(accepts(tc, *r.counterexample)) << stext;
            EXPECT_FALSE(eval_on_db(s, *r.counterexample)) << stext;
        }
    }
}

TEST(DatalogFormat, RoundTrip) {
    DatalogProgram p = transitive_closure();
    std::string text = program_to_string(p);
    auto [q, unused1] = parse_datalog(text, "rt.dl");
    EXPECT_EQ(program_to_string(q), text);
    auto [r, unused2] = parse_datalog(
        "start.\np(X) :- start, e(X, \"lit\"), f(X, 7).\ngoal p.\n"
        "sentence (exists (X) (e X X))",
        "c.dl");
    EXPECT_EQ(r.rules.size(), 2u);
    auto [r2, s2] = parse_datalog(program_to_string(r) + "sentence (exists (X) (e X X))\n",
                                  "c2.dl");
    EXPECT_EQ(program_to_string(r2), program_to_string(r));
    ASSERT_TRUE(s2.has_value());
    EXPECT_EQ(s2->to_string(), "(exists (X) (e X X))");
}

// ---------------------------------------------------------------------------
// reduce_progressive
// ---------------------------------------------------------------------------

namespace {

AAutomaton aut(const std::string& text, const Schema& s) {
    return parse_automaton(text, s, "<test>");
}

ProgressiveWitness trivial_witness(const AAutomaton& a,
                                   std::vector<std::vector<std::string>> chain) {
    ProgressiveWitness w;
    w.scc_chain = std::move(chain);
    for (const std::string& st : a.states) w.post_type[st] = {};
    return w;
}

} // namespace

TEST(Reduce, ImmediateAcceptance) {
    Schema s = testutil::tiny_schema();
    AAutomaton a = aut("states s0; initial s0; accepting s0;\n"
                       "trans s0 -> s0 pos: true",
                       s);
    ProgressiveWitness w = trivial_witness(a, {{"s0"}});
    ReductionOutput red = reduce_progressive(a, w, s);
    // goal derivable from the empty database; with no negative constraints
    // the sentence is the empty disjunction
    EXPECT_TRUE(accepts(red.program, Database{}));
    ContainmentResult cr = containment_bounded(red.program, red.sentence, 4);
    ASSERT_TRUE(cr.counterexample.has_value());
}

TEST(Reduce, UnsatisfiableGuardStaysContained) {
    Schema s = testutil::tiny_schema();
    AAutomaton a = aut(
        "states s0 s1; initial s0; accepting s1;\n"
        "trans s0 -> s1 pos: (exists (x) (and (isbind getR x) (= x \"a\") (= x \"b\")))",
        s);
    auto pieces = decompose(a, s);
    for (const auto& [piece, wit] : pieces) {
        ReductionOutput red = reduce_progressive(piece, wit, s);
        ContainmentResult cr = containment_bounded(red.program, red.sentence, 10);
        EXPECT_FALSE(cr.counterexample.has_value());
    }
}

TEST(Reduce, LegendNamesStagePredicates) {
    Schema s = testutil::s0();
    AAutomaton a = aut("states s0 s1; initial s0; accepting s1;\n"
                       "trans s0 -> s0 pos: true\n"
                       "trans s0 -> s1 pos: (isbind AcM1 \"Jones\")\n"
                       "trans s1 -> s1 pos: true",
                       s);
    ProgressiveWitness w = trivial_witness(a, {{"s0"}, {"s1"}});
    ASSERT_TRUE(check_progressive(a, w, s).ok);
    ReductionOutput red = reduce_progressive(a, w, s);
    EXPECT_EQ(red.height, 2u);
    // IntBackground predicates exist only for the single crossing 1 -> 2
    for (const auto& [pred, desc] : red.legend) {
        if (pred.rfind("IntBackground_", 0) == 0)
            EXPECT_EQ(pred.substr(pred.size() - 2), "_1") << pred;
    }
    EXPECT_TRUE(red.legend.count("View_Mobile#_1"));
    EXPECT_TRUE(red.legend.count("Background_Address_2"));
}

TEST(Reduce, RequiresProgressiveInput) {
    Schema s = testutil::s0();
    AAutomaton bad = aut("states s0 s1; initial s0; accepting s1;\n"
                         "trans s0 -> s1 pos: true\n"
                         "trans s0 -> s1 pos: (isbind0 AcM1)",
                         s);
    ProgressiveWitness w = trivial_witness(bad, {{"s0"}, {"s1"}});
    EXPECT_THROW(reduce_progressive(bad, w, s), Error);
}

// End-to-end Lemma 4.10 on small compiled formulas: the Datalog chain agrees
// with bounded emptiness.
TEST(Reduce, EndToEndAgreesWithBoundedEmptiness) {
    Schema s = testutil::tiny_schema();
    std::vector<Value> uni = {Value::str("a")};
    std::vector<std::string> formulas = {
        "(F (exists (x) (post R x)))",
        "(and (F (isbind0 getR)) (F (isbind0 getS)))",
        "(F (and (exists (x) (pre R x)) (not (exists (x y) (pre S x y)))))",
        "(not (F (exists (x) (post R x))))",
        "(F (and (exists (x) (post R x)) (not (exists (x) (pre R x)))))",
    };
    for (const std::string& text : formulas) {
        FormulaPtr f = parse_formula(text, s, "t");
        AAutomaton a = compile_formula(*f, s);
        bool oracle = bounded_empty(a, s, 3, uni, 1).has_value();
        bool datalog_nonempty = false;
        for (const auto& [piece, wit] : decompose(a, s)) {
            ReductionOutput red = reduce_progressive(piece, wit, s);
            ContainmentResult cr = containment_bounded(red.program, red.sentence, 14);
            if (cr.counterexample) datalog_nonempty = true;
        }
        EXPECT_EQ(oracle, datalog_nonempty) << text;
    }
}
