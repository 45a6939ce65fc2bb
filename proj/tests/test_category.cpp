#include <doctest.h>

#include "laws.hpp"
#include "support.hpp"

using namespace sygra;
using namespace sygra::testing;

namespace {

EGraph node_with(const std::vector<std::pair<std::string, std::string>>& attrs) {
    EGraph g;
    g.add_node("n");
    for (const auto& [a, x] : attrs) {
        if (!g.contains(Sort::Label, x)) g.add_label(x);
        g.add_node_attr(a, "n", x);
    }
    return g;
}

}  // namespace

TEST_CASE("pushout glues along the apex and prefers the right leg's names") {
    auto A = share(node_with({}));
    auto B = share(node_with({{"a", "x"}}));
    auto C = share(node_with({{"a", "y"}}));
    Cospan co = pushout(Span{A, inclusion(A, B), inclusion(A, C)});
    CHECK(co.target->nodes().size() == 1);
    CHECK(co.target->node_attrs().size() == 2);
    CHECK(co.target->contains(Sort::NodeAttr, "a"));
    CHECK(co.target->contains(Sort::NodeAttr, "a_1"));
    CHECK(co.left.at(Sort::NodeAttr, "a") == "a_1");
    CHECK(co.right.at(Sort::NodeAttr, "a") == "a");
}

TEST_CASE("fresh variants keep trailing primes") {
    std::set<std::string> taken{"x'", "x_1'"};
    auto is_taken = [&](const std::string& s) { return taken.count(s) > 0; };
    CHECK(fresh_variant("x'", is_taken) == "x_2'");
    CHECK(fresh_variant("y", is_taken) == "y");
}

TEST_CASE("pushout complement detects dangling edges") {
    EGraph l;
    l.add_node("n");
    EGraph g;
    g.add_node("n");
    g.add_node("m");
    g.add_edge("e", "m", "n");
    auto L = share(l), K = share(EGraph{}), G = share(g);
    auto res = pushout_complement(inclusion(K, L), inclusion(L, G));
    REQUIRE(std::holds_alternative<GluingViolation>(res));
    const auto& v = std::get<GluingViolation>(res);
    CHECK(v.kind == GluingViolation::Kind::Dangling);
    CHECK(v.sort == Sort::Edge);
    CHECK(v.element == "e");
}

TEST_CASE("pushout complement removes the deleted attribute") {
    auto L = share(node_with({{"a", "x"}}));
    EGraph k;
    k.add_node("n");
    k.add_label("x");
    auto K = share(k);
    auto G = share(node_with({{"a", "x"}, {"b", "y"}}));
    auto res = pushout_complement(inclusion(K, L), inclusion(L, G));
    REQUIRE(std::holds_alternative<Complement>(res));
    const auto& c = std::get<Complement>(res);
    CHECK_FALSE(c.context->contains(Sort::NodeAttr, "a"));
    CHECK(c.context->contains(Sort::NodeAttr, "b"));
    CHECK(c.context->labels() == G->labels());
}

TEST_CASE("pullback keeps what both sides preserve") {
    // D1 and D2 each lose a different attribute of G.
    auto G = share(node_with({{"a", "x"}, {"b", "y"}}));
    auto D1 = share(node_with({{"b", "y"}}));
    auto D2 = share(node_with({{"a", "x"}}));
    EGraph d1 = *D1, d2 = *D2;
    d1.add_label("x");
    d2.add_label("y");
    auto D1x = share(d1), D2x = share(d2);
    Span pb = pullback(Cospan{G, inclusion(D1x, G), inclusion(D2x, G)});
    CHECK(pb.apex->nodes() == std::set<std::string>{"n"});
    CHECK(pb.apex->labels() == std::set<std::string>{"x", "y"});
    CHECK(pb.apex->node_attrs().empty());
}

TEST_CASE("symbolic pushout conjoins the formulas") {
    EGraph k;
    k.add_node("n");
    k.add_label("x");
    EGraph b = k, c = k;
    b.add_label("x'");
    c.add_label("x''");
    auto K = share(k), B = share(b), C = share(c);
    SymbolicSpan span{SymbolicGraph{K}, inclusion(K, B), inclusion(K, C),
                      SymbolicGraph{B, parse_formula("x' = x + 1")}, SymbolicGraph{C, parse_formula("x'' = x + 2")}};
    SymbolicCospan co = symbolic_pushout(span);
    BuiltinSolver s;
    CHECK(s.check_equiv(co.target.formula, parse_formula("x' = x + 1 && x'' = x + 2")).valid());
}

TEST_CASE("symbolic pullback is weaker than both sides") {
    EGraph g;
    g.add_node("n");
    g.add_label("x");
    g.add_label("y");
    EGraph d1 = g, d2 = g;
    auto G = share(g), D1 = share(d1), D2 = share(d2);
    SymbolicGraph b{D1, parse_formula("x = 1")};
    SymbolicGraph c{D2, parse_formula("y = 2")};
    SymbolicCospan cos{SymbolicGraph{G, parse_formula("x = 1 && y = 2")}, inclusion(D1, G), inclusion(D2, G)};
    SymbolicSpan pb = symbolic_pullback(b, c, cos);
    CHECK(commutes(compose(cos.left, pb.left), compose(cos.right, pb.right)));
    if (have_z3()) {
        auto z3 = make_solver(z3_config());
        CHECK(z3->check_implies(parse_formula("x = 1"), pb.apex.formula).valid());
        CHECK(z3->check_implies(parse_formula("y = 2"), pb.apex.formula).valid());
    }
}

TEST_CASE("random spans satisfy the pushout and pullback laws") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        Span span = random_span(rng);
        CAPTURE(to_string(*span.apex));
        CHECK(check_pushout(span) == "");
        CHECK(check_pullback(span) == "");
    }
}

TEST_CASE("random derivations can be undone") {
    std::mt19937_64 rng(12);
    int applied = 0;
    for (int i = 0; i < 400; ++i) {
        auto t = check_dpo_reversible(rng);
        if (!t.applicable) continue;
        ++applied;
        CHECK(t.failure == "");
    }
    CHECK(applied > 50);
}
