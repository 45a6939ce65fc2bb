#include <doctest.h>

#include "support.hpp"
#include "sygra/error.hpp"
#include "sygra/omega.hpp"
#include "sygra/solver.hpp"

using namespace sygra;
using namespace sygra::testing;

namespace {

Verdict sat(Solver& s, const char* f) { return s.check_sat(parse_formula(f)).verdict; }

}  // namespace

TEST_CASE("builtin decides small linear problems") {
    BuiltinSolver s;
    CHECK(sat(s, "x' = x + 1 && x'' = x + 2") == Verdict::Sat);
    CHECK(sat(s, "x' = x + 1 && x' = x + 2") == Verdict::Unsat);
    CHECK(sat(s, "2 * x = 1") == Verdict::Unsat);
    CHECK(sat(s, "3 * x + 6 * y = 4") == Verdict::Unsat);
    CHECK(sat(s, "x <= 3 && 4 <= x") == Verdict::Unsat);
    CHECK(sat(s, "x < y && y < x + 1") == Verdict::Unsat);
    CHECK(sat(s, "x != 1 && 0 <= x && x <= 1") == Verdict::Sat);
    CHECK(sat(s, "x != 0 && x != 1 && 0 <= x && x <= 1") == Verdict::Unsat);
}

TEST_CASE("integer reasoning beyond the rational relaxation") {
    BuiltinSolver s;
    // Rationally satisfiable, no integer point.
    CHECK(sat(s, "1 <= 3 * x - 2 * y && 3 * x - 2 * y <= 1 && 2 <= 2 * x && 2 * x <= 3 && y >= 1") == Verdict::Sat);
    CHECK(sat(s, "27 <= 11 * x + 13 * y && 11 * x + 13 * y <= 45 && -10 <= 7 * x - 9 * y && 7 * x - 9 * y <= 4") ==
          Verdict::Unsat);
}

TEST_CASE("models satisfy the query") {
    BuiltinSolver s;
    Formula f = parse_formula("x'' = x + 2 && x >= 40 && x' = x + 1 || x < -7");
    auto v = s.check_sat(f, true);
    REQUIRE(v.verdict == Verdict::Sat);
    REQUIRE(v.model);
    CHECK(evaluate(f, *v.model));
}

TEST_CASE("implication and equivalence") {
    BuiltinSolver s;
    auto a = parse_formula("x' = x + 1 && x'' = x + 2 && v = x' + 2");
    auto b = parse_formula("x' = x + 1 && x'' = x + 2 && v = x'' + 1");
    CHECK(s.check_equiv(a, b).valid());
    auto c = parse_formula("x <= 3");
    auto d = parse_formula("x <= 4");
    CHECK(s.check_implies(c, d).valid());
    auto inv = s.check_implies(d, c);
    CHECK(inv.validity == Validity::Invalid);
    REQUIRE(inv.counterexample);
    CHECK(inv.counterexample->at("x") == 4);
}

TEST_CASE("quantified queries are unknown to the builtin backend") {
    BuiltinSolver s;
    CHECK(sat(s, "exists y. x = 2 * y") == Verdict::Unknown);
    CHECK(s.stats().unknown == 1);
}

TEST_CASE("omega test on raw constraints") {
    // x + y = 5, x - y >= 1, y >= 2
    std::vector<LinearConstraint> cs{
        {{1, 1}, -5, true},
        {{1, -1}, -1, false},
        {{0, 1}, -2, false},
    };
    auto out = omega_solve(2, cs);
    REQUIRE(out.result == OmegaOutcome::Result::Sat);
    const auto& m = out.model;
    CHECK(m[0] + m[1] == 5);
    CHECK(m[0] - m[1] >= 1);
    CHECK(m[1] >= 2);
    cs.push_back({{0, 1}, -3, false});
    CHECK(omega_solve(2, cs).result == OmegaOutcome::Result::Unsat);
}

TEST_CASE("SMT-LIB rendering") {
    CHECK(smt_symbol("x") == "x");
    CHECK(smt_symbol("x'") == "|x'|");
    CHECK(to_smtlib(parse_formula("x' = x + 1")) == "(= |x'| (+ x 1))");
}

TEST_CASE("missing external solver is a launch error") {
    SolverConfig cfg;
    cfg.backend = Backend::External;
    cfg.command = "/nonexistent/solver -in";
    auto s = make_solver(cfg);
    try {
        s->check_sat(parse_formula("x = 1"));
        FAIL("expected a launch error");
    } catch (const SolverError& e) {
        CHECK(e.kind() == SolverError::Kind::Launch);
    }
}

TEST_CASE("command resolution") {
    SolverConfig cfg;
    cfg.command = "cvc5 --lang smt2";
    CHECK(resolve_smt_command(cfg) == "cvc5 --lang smt2");
}

TEST_CASE("external backend agrees with builtin") {
    if (!have_z3()) return;
    BuiltinSolver builtin;
    auto z3 = make_solver(z3_config());
    std::mt19937_64 rng(3);
    for (int i = 0; i < 60; ++i) {
        Formula f = random_conjunction(rng);
        CAPTURE(to_string(f));
        auto a = builtin.check_sat(f, true);
        auto b = z3->check_sat(f, true);
        CHECK(a.verdict != Verdict::Unknown);
        CHECK(a.verdict == b.verdict);
        if (b.verdict == Verdict::Sat) {
            REQUIRE(b.model);
            CHECK(evaluate(f, *b.model));
        }
    }
    CHECK(z3->check_sat(parse_formula("exists y. x = 2 * y && x = 3")).verdict == Verdict::Unsat);
}

TEST_CASE("external solver survives many queries in one process") {
    if (!have_z3()) return;
    auto z3 = make_solver(z3_config());
    for (int i = 0; i < 50; ++i)
        CHECK(z3->check_sat(parse_formula("x = " + std::to_string(i) + " && x' = x + 1")).verdict == Verdict::Sat);
    CHECK(z3->stats().queries == 50);
}
