#include <doctest.h>

#include "sygra/error.hpp"
#include "sygra/formula.hpp"

using namespace sygra;

TEST_CASE("printing and parsing round trip") {
    for (const char* s : {"x' = x + 1", "x'' = x + 2 && x' = x + 1", "x <= 3 || !(y < 2)", "x = 2 * y - 3",
                          "(a = 0 => b = 1) <=> c = 0", "exists z. x = z + 1", "forall u v. u + v = v + u",
                          "true", "false && x = -4"}) {
        Formula f = parse_formula(s);
        CAPTURE(s);
        CHECK(parse_formula(to_string(f)) == f);
    }
}

TEST_CASE("unicode spellings parse like ASCII ones") {
    CHECK(parse_formula("x′ = x + 1 ∧ y ≤ 2") == parse_formula("x' = x + 1 && y <= 2"));
    CHECK(parse_formula("¬(a ≠ b) ⇒ c ≥ d") == parse_formula("!(a != b) => c >= d"));
}

TEST_CASE("parse errors report positions") {
    try {
        parse_formula("x' = x +\n  * 1");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 3);
    }
    try {
        parse_formula("x = y", 7, 10);
        parse_formula("x = = y", 7, 10);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 7);
        CHECK(e.column() == 14);
    }
}

TEST_CASE("nonlinear products are rejected") { CHECK_THROWS(parse_formula("x * y = 1")); }

TEST_CASE("evaluation") {
    Formula f = parse_formula("x' = x + 1");
    CHECK(evaluate(f, {{"x", 42}, {"x'", 43}}));
    CHECK_FALSE(evaluate(f, {{"x", 42}, {"x'", 44}}));
    CHECK_THROWS_AS(evaluate(f, {{"x", 42}}), InvalidInput);
    CHECK(evaluate(parse_term("3 * x - -2"), {{"x", 4}}) == 14);
}

TEST_CASE("renaming is simultaneous") {
    Formula f = parse_formula("x = y + 1");
    CHECK(rename(f, {{"x", "y"}, {"y", "x"}}) == parse_formula("y = x + 1"));
    CHECK(free_vars(rename(f, {{"x", "z"}})) == std::set<std::string>{"y", "z"});
}

TEST_CASE("renaming does not touch bound variables") {
    Formula f = parse_formula("exists y. x = y + 1");
    CHECK(rename(f, {{"y", "q"}}) == f);
    CHECK_THROWS_AS(rename(f, {{"x", "y"}}), InvalidInput);
}

TEST_CASE("substitution") {
    Formula f = parse_formula("x' = x + 1");
    Formula g = substitute(f, {{"x", parse_term("y + 2")}});
    CHECK(evaluate(g, {{"y", 1}, {"x'", 4}}));
    CHECK(has_quantifier(parse_formula("forall x. x = x")));
    CHECK_FALSE(has_quantifier(g));
}

TEST_CASE("conjoin flattens and keeps order") {
    Formula a = parse_formula("x' = x + 1");
    Formula b = parse_formula("x'' = x + 2");
    CHECK(conjoin({a, b}) == parse_formula("x' = x + 1 && x'' = x + 2"));
    CHECK(conjoin({}) == Formula::truth());
    CHECK(conjoin({a}) == a);
    CHECK(conjoin({conjoin({a, b}), a}).children().size() == 3);
}

TEST_CASE("simplify folds constants") {
    CHECK(simplify(parse_formula("true && x = 1")) == parse_formula("x = 1"));
    CHECK(simplify(parse_formula("1 = 2 || x = 1")) == parse_formula("x = 1"));
    CHECK(simplify(parse_formula("!!(x = 1)")) == parse_formula("x = 1"));
    CHECK(simplify(parse_formula("x = 1 && x = 1")) == parse_formula("x = 1"));
}

TEST_CASE("linearization collects coefficients") {
    LinearExpr e = linearize(parse_term("2 * (x - y) + 3 - -x"));
    CHECK(e.coeffs.at("x") == 3);
    CHECK(e.coeffs.at("y") == -2);
    CHECK(e.constant == 3);
}

TEST_CASE("identifiers") {
    CHECK(is_identifier("x''"));
    CHECK(is_identifier("c_42"));
    CHECK_FALSE(is_identifier("42"));
    CHECK_FALSE(is_identifier("true"));
    CHECK_FALSE(is_identifier("'x"));
}
