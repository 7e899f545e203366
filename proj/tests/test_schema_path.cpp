#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"

using namespace accltl;
using testutil::acm1;
using testutil::acm2;
using testutil::jones_tuple;

namespace {

Schema boolean_schema() {
    return parse_schema(R"(
relation S(a:string, b:string)
access checkS on S inputs (1,2)
access getS on S inputs (1)
)",
                        "bool.acs");
}

AccessPath path_of(std::initializer_list<PathStep> steps) {
    AccessPath p;
    p.steps = steps;
    return p;
}

} // namespace

TEST(Schema, ParsesS0) {
    Schema s = testutil::s0();
    EXPECT_EQ(s.relations().size(), 2u);
    EXPECT_EQ(s.relation("Mobile#").arity(), 4u);
    EXPECT_EQ(s.method("AcM2").inputs, (std::set<size_t>{1, 2}));
    EXPECT_EQ(s.constants().size(), 1u);
    EXPECT_FALSE(s.is_boolean_method("AcM1"));
}

TEST(Schema, RejectsIllFormed) {
    EXPECT_THROW(parse_schema("relation R()", "x"), Error);
    EXPECT_THROW(parse_schema("relation R(a:string)\naccess m on R inputs (2)", "x"), Error);
    EXPECT_THROW(parse_schema("relation R(a:string)\nconstants { 7 }", "x"), Error);
    EXPECT_THROW(parse_schema("relation R(a:string)\nrelation R(b:string)", "x"), Error);
}

TEST(WellFormedResponse, SpecExamples) {
    Schema s = testutil::s0();
    EXPECT_TRUE(well_formed_response(acm1("Jones"), {jones_tuple()}, s));
    EXPECT_TRUE(well_formed_response(acm1("Jones"), {}, s));
    Tuple smith = {Value::str("Smith"), Value::str("x"), Value::str("y"), Value::str("z")};
    EXPECT_FALSE(well_formed_response(acm1("Jones"), {smith}, s));
    Tuple bad = {Value::str("Jones"), Value::integer(1), Value::str("y"), Value::str("z")};
    EXPECT_FALSE(well_formed_response(acm1("Jones"), {bad}, s));
    Access unknown;
    unknown.method = "Nope";
    EXPECT_THROW(well_formed_response(unknown, {}, s), Error);
}

TEST(Conf, SpecExamples) {
    Schema s = testutil::s0();
    Instance i0;
    i0.add("Address", {Value::str("Parks Rd"), Value::str("OX13QD"), Value::str("Jones"),
                       Value::integer(7)});
    EXPECT_EQ(conf(AccessPath{}, i0, s), i0);

    AccessPath one = path_of({PathStep{acm1("Jones"), {jones_tuple()}}});
    Instance expect_one;
    expect_one.add("Mobile#", jones_tuple());
    EXPECT_EQ(conf(one, Instance{}, s), expect_one);

    // two steps returning t_J then a disjoint Address tuple: fold by hand
    Tuple addr = {Value::str("Parks Rd"), Value::str("OX13QD"), Value::str("Smith"),
                  Value::integer(5)};
    AccessPath two = path_of({PathStep{acm1("Jones"), {jones_tuple()}},
                              PathStep{acm2("Parks Rd", "OX13QD"), {addr}}});
    Instance manual = expect_one;
    Instance second;
    second.add("Address", addr);
    manual = manual.union_with(second);
    EXPECT_EQ(conf(two, Instance{}, s), manual);
}

TEST(Grounded, SpecExamples) {
    Schema s = testutil::s0();
    AccessPath one = path_of({PathStep{acm1("Jones"), {}}});
    EXPECT_FALSE(is_grounded(one, Instance{}, s));

    Instance i0;
    i0.add("Address", {Value::str("Parks Rd"), Value::str("OX13QD"), Value::str("Jones"),
                       Value::integer(7)});
    EXPECT_TRUE(is_grounded(one, i0, s));

    Instance seed;
    seed.add("Address", {Value::str("Parks Rd"), Value::str("OX13QD"), Value::str("X"),
                         Value::integer(1)});
    Tuple revealed = {Value::str("Parks Rd"), Value::str("OX13QD"), Value::str("Jones"),
                      Value::integer(7)};
    AccessPath two = path_of(
        {PathStep{acm2("Parks Rd", "OX13QD"), {revealed}}, PathStep{acm1("Jones"), {}}});
    EXPECT_TRUE(is_grounded(two, seed, s));
}

TEST(Idempotent, SpecExamples) {
    Schema s = testutil::s0();
    std::set<std::string> methods = {"AcM1", "AcM2"};
    AccessPath no_repeat = path_of({PathStep{acm1("Jones"), {jones_tuple()}},
                                    PathStep{acm2("Parks Rd", "OX13QD"), {}}});
    EXPECT_TRUE(is_idempotent(no_repeat, methods, s));

    AccessPath same = path_of(
        {PathStep{acm1("Jones"), {jones_tuple()}}, PathStep{acm1("Jones"), {jones_tuple()}}});
    EXPECT_TRUE(is_idempotent(same, methods, s));

    AccessPath differ =
        path_of({PathStep{acm1("Jones"), {jones_tuple()}}, PathStep{acm1("Jones"), {}}});
    EXPECT_FALSE(is_idempotent(differ, methods, s));
    EXPECT_TRUE(is_idempotent(differ, {"AcM2"}, s));
}

TEST(Exact, SpecExamples) {
    Schema s = testutil::s0();
    std::set<std::string> methods = {"AcM1", "AcM2"};
    // repeated access first returning nothing, then t_J: the configuration
    // contains t_J, so the first response missed a matching tuple
    AccessPath miss =
        path_of({PathStep{acm1("Jones"), {}}, PathStep{acm1("Jones"), {jones_tuple()}}});
    EXPECT_FALSE(is_exact(miss, methods, Instance{}, s));

    Schema bs = boolean_schema();
    Access check;
    check.method = "checkS";
    check.binding[1] = Value::str("a");
    check.binding[2] = Value::str("b");
    AccessPath boolean_path = path_of({PathStep{check, {{Value::str("a"), Value::str("b")}}}});
    EXPECT_TRUE(is_exact(boolean_path, {"checkS"}, Instance{}, bs));

    EXPECT_TRUE(is_exact(AccessPath{}, methods, Instance{}, s));
}

// The derived characterization (exactness against the final configuration)
// matches a brute-force existential search over instances assembled from the
// returned tuples plus up to two extra tuples.
TEST(Exact, BruteForceCrossCheck) {
    Schema s = boolean_schema();
    std::set<std::string> methods = {"checkS", "getS"};
    std::vector<Value> universe = {Value::str("a"), Value::str("b")};

    std::vector<Tuple> all_tuples;
    for (const Value& x : universe)
        for (const Value& y : universe) all_tuples.push_back({x, y});

    auto exact_by_search = [&](const AccessPath& p) {
        std::set<Tuple> returned;
        for (const PathStep& st : p.steps)
            for (const Tuple& t : st.response) returned.insert(t);
        for (size_t i = 0; i <= all_tuples.size(); ++i)
            for (size_t j = i; j <= all_tuples.size(); ++j) {
                Instance cand;
                for (const Tuple& t : returned) cand.add("S", t);
                if (i < all_tuples.size()) cand.add("S", all_tuples[i]);
                if (j < all_tuples.size()) cand.add("S", all_tuples[j]);
                bool ok = true;
                for (const PathStep& st : p.steps) {
                    if (!methods.count(st.access.method)) continue;
                    if (st.response != matching_tuples(cand, st.access, s)) ok = false;
                }
                if (ok) return true;
            }
        return false;
    };

    std::vector<Access> accesses;
    for (const Value& x : universe) {
        Access g;
        g.method = "getS";
        g.binding[1] = x;
        accesses.push_back(g);
        for (const Value& y : universe) {
            Access c;
            c.method = "checkS";
            c.binding[1] = x;
            c.binding[2] = y;
            accesses.push_back(c);
        }
    }
    size_t checked = 0;
    for (const Access& a1 : accesses)
        for (const Response& r1 : enumerate_responses(a1, s, universe, 1))
            for (const Access& a2 : accesses)
                for (const Response& r2 : enumerate_responses(a2, s, universe, 1)) {
                    AccessPath p = path_of({PathStep{a1, r1}, PathStep{a2, r2}});
                    EXPECT_EQ(is_exact(p, methods, Instance{}, s), exact_by_search(p))
                        << path_to_string(p);
                    ++checked;
                }
    EXPECT_GT(checked, 100u);
}

TEST(Successors, SpecExamples) {
    Schema s = testutil::s0();
    Instance empty;
    Tuple jt = jones_tuple();
    std::vector<Value> tj(jt.begin(), jt.end());
    EXPECT_EQ(successors(empty, acm1("Jones"), s, tj, 0).size(), 1u);

    std::vector<Value> uni = {Value::str("Jones"), Value::str("a")};
    // 1 empty response + 2*2*2 singleton responses with the name pinned
    EXPECT_EQ(successors(empty, acm1("Jones"), s, uni, 1).size(), 9u);

    // Address needs an int in position 4; an all-string universe builds none
    EXPECT_EQ(successors(empty, acm2("x", "y"), s, uni, 2).size(), 1u);
}

// Independent combinatorial count: on an empty pre-instance, distinct
// responses give distinct posts, so |successors| = sum_k C(candidates, k).
TEST(Successors, CountMatchesCombinatorics) {
    Schema s = testutil::tiny_schema();
    std::vector<Value> uni = {Value::str("a"), Value::str("b"), Value::str("c")};
    Access g;
    g.method = "getS";
    g.binding[1] = Value::str("a");
    size_t candidates = 3; // (a,a) (a,b) (a,c)
    auto choose = [](size_t n, size_t k) {
        size_t r = 1;
        for (size_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
        return r;
    };
    for (size_t max_new = 0; max_new <= 3; ++max_new) {
        size_t expected = 0;
        for (size_t k = 0; k <= max_new && k <= candidates; ++k)
            expected += choose(candidates, k);
        EXPECT_EQ(successors(Instance{}, g, s, uni, max_new).size(), expected);
    }
}

TEST(PathProperties, ConfMonotoneAndDiff) {
    Schema s = testutil::tiny_schema();
    std::vector<Value> uni = {Value::str("a"), Value::str("b")};
    std::mt19937 rng(7);
    std::vector<Access> accesses = detail::enumerate_accesses(s, uni);
    for (int trial = 0; trial < 200; ++trial) {
        AccessPath p;
        size_t len = rng() % 4;
        for (size_t i = 0; i < len; ++i) {
            const Access& a = accesses[rng() % accesses.size()];
            auto rs = enumerate_responses(a, s, uni, 2);
            p.steps.push_back(PathStep{a, rs[rng() % rs.size()]});
        }
        size_t cut = p.steps.empty() ? 0 : rng() % (p.steps.size() + 1);
        AccessPath prefix;
        prefix.steps.assign(p.steps.begin(), p.steps.begin() + static_cast<long>(cut));
        Instance i0;
        if (rng() % 2) i0.add("R", {Value::str("a")});

        EXPECT_TRUE(conf(prefix, i0, s).subset_of(conf(p, i0, s)));

        Instance full = conf(p, i0, s);
        for (const auto& [rel, _] : s.relations()) {
            std::set<Tuple> diff;
            for (const Tuple& t : full.tuples(rel))
                if (!i0.contains(rel, t)) diff.insert(t);
            // responses may legally re-return tuples of I0
            std::set<Tuple> responses;
            for (const PathStep& st : p.steps)
                if (s.method(st.access.method).relation == rel)
                    for (const Tuple& t : st.response)
                        if (!i0.contains(rel, t)) responses.insert(t);
            EXPECT_EQ(diff, responses);
        }

        if (is_grounded(p, i0, s)) EXPECT_TRUE(is_grounded(prefix, i0, s));
    }
}

TEST(Transitions, PostExtendsPre) {
    Schema s = testutil::s0();
    AccessPath p = path_of({PathStep{acm1("Jones"), {jones_tuple()}}});
    Transition t = transition_at(p, 1, Instance{}, s);
    EXPECT_TRUE(t.pre.subset_of(t.post));
    EXPECT_TRUE(t.post.contains("Mobile#", jones_tuple()));
    EXPECT_THROW(transition_at(p, 2, Instance{}, s), Error);
}

TEST(PathFormat, RoundTrip) {
    Schema s = testutil::s0();
    AccessPath p = path_of({PathStep{acm1("Jones"), {jones_tuple()}},
                            PathStep{acm2("Parks Rd", "OX13QD"), {}}});
    std::string text = path_to_string(p);
    AccessPath q = parse_path(text, s, "roundtrip");
    EXPECT_EQ(p, q);
    EXPECT_THROW(parse_path("access AcM1 (\"J\") -> { (\"K\",\"x\",\"y\",\"z\") }", s, "x"),
                 Error);
}
