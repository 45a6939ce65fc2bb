#include <doctest.h>

#include "support.hpp"

using namespace sygra;
using namespace sygra::testing;

namespace {

const OverlapEntry* shared_attr_entry(const PairReport& rep) {
    for (const auto& e : rep.entries)
        if (e.overlap.context.graph->node_attrs().size() == 1 && e.classification != Classification::FormulaUnsatisfiable)
            return &e;
    return nullptr;
}

}  // namespace

TEST_CASE("overlaps of the two increments") {
    auto doc = rules("running.sygra");
    BuiltinSolver s;
    auto ov = enumerate_overlaps(*doc.find_rule("inc1"), *doc.find_rule("inc2"), &s);
    CHECK(ov.size() == 9);
    std::size_t shared = 0;
    for (const auto& o : ov) {
        CHECK(is_valid_morphism(o.o1));
        CHECK(is_valid_morphism(o.o2));
        CHECK(o.o1.at(Sort::Node, "n") == o.o2.at(Sort::Node, "n"));
        if (o.context.graph->node_attrs().size() == 1 && o.satisfiable == Verdict::Sat) {
            ++shared;
            CHECK(s.check_equiv(o.context.formula, parse_formula("x' = x + 1 && x'' = x + 2")).valid());
        }
    }
    CHECK(shared == 1);
}

TEST_CASE("rules without a common node do not overlap") {
    auto doc = rules("pool.sygra");
    Rule empty = Rule::make("nothing", EGraph{}, EGraph{}, EGraph{}, Formula::truth());
    CHECK(enumerate_overlaps(*doc.find_rule("inc1"), empty).empty());
}

TEST_CASE("deleting the same attribute makes two derivations dependent") {
    auto doc = rules("running.sygra");
    BuiltinSolver s;
    auto [d1, d2] = aligned_pair(*doc.find_rule("inc1"), *doc.find_rule("inc2"), doc.find_host("g42")->graph, s);
    auto dep = parallel_dependence(d1, d2);
    CHECK(dep.dependent);
    REQUIRE(dep.evidence.size() == 2);
    CHECK(dep.evidence[0].missing == "i");
    CHECK(dep.evidence[0].deleting_rule == "inc2");
    CHECK(dep.evidence[0].element == "a");
    CHECK(dep.evidence[1].missing == "j");
    CHECK(dep.evidence[1].deleting_rule == "inc1");
}

TEST_CASE("attributes of different nodes are independent") {
    auto doc = rules("running.sygra");
    BuiltinSolver s;
    EGraph shape;
    shape.add_node("p");
    shape.add_node("q");
    shape.add_label("u");
    shape.add_label("w");
    shape.add_node_attr("a", "p", "u");
    shape.add_node_attr("b", "q", "w");
    auto host = grounded_graph(shape, {{"u", 1}, {"w", 2}});
    const Rule& inc1 = *doc.find_rule("inc1");
    auto ms = find_symbolic_matches(inc1, host, s);
    REQUIRE(ms.matches.size() == 2);
    auto [a, b] = align_matches(ms.matches[0], ms.matches[1]);
    auto d1 = apply_symbolic(inc1, a);
    auto d2 = apply_symbolic(inc1, b);
    CHECK_FALSE(parallel_dependence(*d1.derivation, *d2.derivation).dependent);
}

TEST_CASE("grounded pair closes at 45") {
    auto doc = rules("running.sygra");
    BuiltinSolver s;
    auto [d1, d2] = aligned_pair(*doc.find_rule("inc1"), *doc.find_rule("inc2"), doc.find_host("g42")->graph, s);
    auto c = check_direct_confluence(d1, d2, s, {ConfluenceMode::Symbolic, {}, false});
    REQUIRE(c.witness);
    CHECK(single_value(c.witness->close1.output) == 45);
    CHECK(single_value(c.witness->close2.output) == 45);
    CHECK(c.witness->z->nodes() == std::set<std::string>{"n"});
    CHECK(c.witness->z->node_attrs().empty());
}

TEST_CASE("critical pair closes only by narrowing") {
    auto doc = rules("running.sygra");
    BuiltinSolver s;
    auto rep = classify_pair(*doc.find_rule("inc1"), *doc.find_rule("inc2"), s);
    const OverlapEntry* cp = shared_attr_entry(rep);
    REQUIRE(cp);
    REQUIRE(cp->d1);
    CHECK(cp->classification == Classification::DirectlyConfluent);
    CHECK_FALSE(check_direct_confluence(*cp->d1, *cp->d2, s, {ConfluenceMode::Symbolic, {}, false}).witness);
    auto nar = check_direct_confluence(*cp->d1, *cp->d2, s, {ConfluenceMode::Narrowing, {}, false});
    REQUIRE(nar.witness);
    CHECK(nar.witness->close1.kind == DerivationKind::Narrowing);
    CHECK_FALSE(rep.conflicting);
}

TEST_CASE("increment and reset conflict") {
    auto doc = rules("conflict.sygra");
    BuiltinSolver s;
    auto rep = classify_pair(*doc.find_rule("inc1"), *doc.find_rule("setZero"), s);
    CHECK(rep.conflicting);
    const OverlapEntry* cp = shared_attr_entry(rep);
    REQUIRE(cp);
    CHECK(cp->classification == Classification::NcpPair);
    CHECK_FALSE(cp->indeterminate);
}

TEST_CASE("reset commutes with doubling") {
    auto doc = rules("pool.sygra");
    BuiltinSolver s;
    CHECK_FALSE(classify_pair(*doc.find_rule("setZero"), *doc.find_rule("dbl"), s).conflicting);
    CHECK_FALSE(classify_pair(*doc.find_rule("addEdge"), *doc.find_rule("deleteEdge"), s).conflicting);
    CHECK(classify_pair(*doc.find_rule("deleteEdge"), *doc.find_rule("deleteEdge"), s).conflicting);
}

TEST_CASE("classification names round trip") {
    for (auto c : {Classification::FormulaUnsatisfiable, Classification::ParallelIndependent,
                   Classification::DirectlyConfluent, Classification::NcpPair})
        CHECK(parse_classification(to_string(c)) == c);
    CHECK_FALSE(parse_classification("Conflict"));
}

TEST_CASE("stats are per pair") {
    auto doc = rules("running.sygra");
    BuiltinSolver s;
    auto a = classify_pair(*doc.find_rule("inc1"), *doc.find_rule("inc2"), s);
    auto b = classify_pair(*doc.find_rule("inc1"), *doc.find_rule("inc2"), s);
    CHECK(a.stats.queries > 0);
    CHECK(a.stats.queries == b.stats.queries);
    CHECK(s.stats().queries == a.stats.queries + b.stats.queries);
}

TEST_CASE("the critical pair embeds into the grounded derivations") {
    auto doc = rules("running.sygra");
    BuiltinSolver s;
    const Rule& inc1 = *doc.find_rule("inc1");
    const Rule& inc2 = *doc.find_rule("inc2");
    auto rep = classify_pair(inc1, inc2, s);
    const OverlapEntry* cp = shared_attr_entry(rep);
    REQUIRE(cp);
    auto [g1, g2] = aligned_pair(inc1, inc2, doc.find_host("g42")->graph, s);
    auto emb = embeds(*cp->d1, *cp->d2, g1, g2, s);
    REQUIRE(emb);
    CHECK(emb->f.at(Sort::Label, "x") == "c_42");
}

TEST_CASE("a critical pair of other rules does not embed") {
    auto conflict = rules("conflict.sygra");
    auto running = rules("running.sygra");
    BuiltinSolver s;
    auto rep = classify_pair(*conflict.find_rule("inc1"), *conflict.find_rule("setZero"), s);
    const OverlapEntry* cp = shared_attr_entry(rep);
    REQUIRE(cp);
    auto [g1, g2] =
        aligned_pair(*running.find_rule("inc1"), *running.find_rule("inc2"), running.find_host("g42")->graph, s);
    CHECK_FALSE(embeds(*cp->d1, *cp->d2, g1, g2, s));
}
