#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sygra {

/// sum(coeffs[i] * x_i) + constant  (== 0 | >= 0)
struct LinearConstraint {
    std::vector<std::int64_t> coeffs;
    std::int64_t constant = 0;
    bool equality = false;
};

struct OmegaOutcome {
    enum class Result { Sat, Unsat, Unknown };
    Result result = Result::Unknown;
    /// One value per variable when Sat.
    std::vector<std::int64_t> model;
    std::string diagnostic;
};

/// Decides integer feasibility of a conjunction of linear constraints over
/// `num_vars` variables (Pugh's Omega test: exact equality elimination, then
/// real/dark shadows with splintering). Unknown only on coefficient overflow
/// or when `step_budget` recursive steps are exhausted.
OmegaOutcome omega_solve(std::size_t num_vars, const std::vector<LinearConstraint>& constraints,
                         std::size_t step_budget = 200000);

}  // namespace sygra
