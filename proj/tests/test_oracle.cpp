#include <doctest.h>

#include "support.hpp"
#include "sygra/oracle.hpp"

using namespace sygra;
using namespace sygra::testing;
namespace o = sygra::oracle;

namespace {

o::Graph single(std::int64_t v) {
    o::Graph g;
    g.nodes.insert("n");
    g.node_attrs["a"] = {"n", v, std::nullopt};
    return g;
}

std::int64_t value(const o::Graph& g) { return g.node_attrs.begin()->second.value; }

std::vector<Rule> without(const std::vector<Rule>& pool, const std::string& name) {
    std::vector<Rule> out;
    for (const auto& r : pool)
        if (r.name != name) out.push_back(r);
    return out;
}

}  // namespace

TEST_CASE("oracle applies the increment") {
    auto doc = rules("running.sygra");
    auto steps = o::derivations(*doc.find_rule("inc1"), single(42));
    REQUIRE(steps.size() == 1);
    CHECK(value(steps[0].output) == 43);
    CHECK(steps[0].preserved == std::set<o::Key>{{0, "n"}});
}

TEST_CASE("oracle respects guards and the dangling condition") {
    auto pool = rules("pool.sygra");
    CHECK(o::derivations(*pool.find_rule("guardedInc"), single(4)).empty());
    CHECK(o::derivations(*pool.find_rule("guardedInc"), single(3)).size() == 1);

    EGraph l;
    l.add_node("n");
    Rule drop = Rule::make("drop", l, EGraph{}, EGraph{}, Formula::truth());
    CHECK(o::find_matches(drop, single(1)).size() == 1);
    CHECK(o::derivations(drop, single(1)).empty());
}

TEST_CASE("oracle isomorphism fixes the given elements") {
    o::Graph a;
    a.nodes = {"p", "q"};
    a.node_attrs["x"] = {"p", 1, std::nullopt};
    o::Graph b;
    b.nodes = {"p", "q"};
    b.node_attrs["y"] = {"q", 1, std::nullopt};
    CHECK(o::isomorphic(a, b));
    CHECK_FALSE(o::isomorphic(a, b, {{0, "p"}}));
    CHECK_FALSE(o::isomorphic(single(0), single(1)));
}

TEST_CASE("increments commute on every value") {
    auto doc = rules("running.sygra");
    const Rule& inc1 = *doc.find_rule("inc1");
    const Rule& inc2 = *doc.find_rule("inc2");
    for (std::int64_t v = -3; v <= 3; ++v) {
        auto s1 = o::derivations(inc1, single(v));
        auto s2 = o::derivations(inc2, single(v));
        auto c = o::directly_confluent(inc1, s1.at(0), inc2, s2.at(0));
        CHECK(c.confluent);
        CHECK(value(c.x1.at(0)) == v + 3);
    }
}

TEST_CASE("increment and reset do not commute") {
    auto doc = rules("conflict.sygra");
    const Rule& inc1 = *doc.find_rule("inc1");
    const Rule& set0 = *doc.find_rule("setZero");
    auto c = o::directly_confluent(inc1, o::derivations(inc1, single(5)).at(0), set0,
                                   o::derivations(set0, single(5)).at(0));
    CHECK_FALSE(c.confluent);
    CHECK(value(c.x1.at(0)) == 0);
    CHECK(value(c.x2.at(0)) == 1);
}

TEST_CASE("random hosts stay within the requested shape") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        auto g = o::random_host(rng);
        CHECK(g.nodes.size() >= 1);
        CHECK(g.nodes.size() <= 4);
        CHECK(g.node_attrs.size() + g.edge_attrs.size() <= 3);
        for (const auto& [id, a] : g.node_attrs) {
            CHECK(a.value >= 0);
            CHECK(a.value <= 5);
        }
    }
}

TEST_CASE("bridge produces a valid grounded graph and match") {
    auto doc = rules("running.sygra");
    const Rule& inc1 = *doc.find_rule("inc1");
    o::Graph g = single(7);
    auto sg = o::to_symbolic(g);
    CHECK_NOTHROW(sg.validate());
    auto m = o::to_symbolic_match(inc1, g, o::find_matches(inc1, g).at(0));
    CHECK(is_valid_morphism(m.morphism));
    CHECK(m.morphism.at(Sort::Label, "x'") == "c_8");
}

TEST_CASE("every conflict of increment and reset is covered") {
    auto doc = rules("conflict.sygra");
    BuiltinSolver s;
    o::FuzzOptions opts;
    opts.trials = 100;
    auto rep = o::completeness_fuzz(doc.rules, s, opts);
    CHECK(rep.nonconfluent > 0);
    CHECK(rep.violations == 0);
}

TEST_CASE("pool without guards is covered") {
    auto pool = without(rules("pool.sygra").rules, "guardedInc");
    BuiltinSolver s;
    o::FuzzOptions opts;
    opts.trials = 500;
    opts.seed = 99;
    auto rep = o::completeness_fuzz(pool, s, opts);
    CHECK(rep.nonconfluent > 0);
    CHECK(rep.violations == 0);
}

TEST_CASE("a guard applied twice escapes narrowing-based closing") {
    // On value 3 both copies of the guarded increment produce 4, where the
    // guard no longer holds, so the concrete pair has no closing steps. The
    // critical pair still closes by narrowing because the closing steps add
    // the guard to the formula on both sides alike.
    auto pool = rules("pool.sygra");
    const Rule& g = *pool.find_rule("guardedInc");
    auto s = o::derivations(g, single(3)).at(0);
    CHECK_FALSE(o::directly_confluent(g, s, g, s).confluent);

    BuiltinSolver solver;
    auto rep = classify_pair(g, g, solver);
    CHECK_FALSE(rep.conflicting);

    o::FuzzOptions opts;
    opts.trials = 200;
    opts.pairs = {{"guardedInc", "guardedInc"}};
    opts.shape.max_value = 3;
    auto fz = o::completeness_fuzz(pool.rules, solver, opts);
    CHECK(fz.violations > 0);
}
