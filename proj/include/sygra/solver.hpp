#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "sygra/formula.hpp"

namespace sygra {

enum class Verdict : std::uint8_t { Sat, Unsat, Unknown };
enum class Validity : std::uint8_t { Valid, Invalid, Unknown };

std::string_view to_string(Verdict v);
std::string_view to_string(Validity v);

struct SolverVerdict {
    Verdict verdict = Verdict::Unknown;
    /// Present when Sat and a model was requested; satisfies the query.
    std::optional<Assignment> model;
    std::string diagnostic;
};

struct ValidityVerdict {
    Validity validity = Validity::Unknown;
    /// Falsifying assignment when Invalid.
    std::optional<Assignment> counterexample;
    std::string diagnostic;

    bool valid() const { return validity == Validity::Valid; }
};

enum class Backend : std::uint8_t { Builtin, External };

struct SolverConfig {
    Backend backend = Backend::Builtin;
    /// Shell-style command line for the external solver. Empty means
    /// $SYGRA_SMT_CMD, falling back to "z3 -in".
    std::string command;
    int timeout_ms = 10000;
    std::string logic = "LIA";
    /// Builtin only: hand Unknown queries to the external command.
    bool escalate = false;
};

/// Resolves the command for the external backend.
std::string resolve_smt_command(const SolverConfig& config);

struct SolverStats {
    std::uint64_t queries = 0;
    std::uint64_t sat = 0;
    std::uint64_t unsat = 0;
    std::uint64_t unknown = 0;
    std::uint64_t escalated = 0;
};

class Solver {
public:
    virtual ~Solver() = default;

    SolverVerdict check_sat(const Formula& phi, bool want_model = false);
    /// Validity of phi => psi.
    ValidityVerdict check_implies(const Formula& phi, const Formula& psi);
    /// Validity of phi <=> psi.
    ValidityVerdict check_equiv(const Formula& phi, const Formula& psi);
    ValidityVerdict check_valid(const Formula& phi);

    const SolverStats& stats() const { return stats_; }
    virtual std::string name() const = 0;

protected:
    virtual SolverVerdict do_check_sat(const Formula& phi, bool want_model) = 0;
    SolverStats stats_;
};

/// Case-splits to conjunctions of linear atoms and runs the Omega test on each.
/// Quantified input yields Unknown.
class BuiltinSolver : public Solver {
public:
    explicit BuiltinSolver(std::size_t branch_budget = 1 << 16) : branch_budget_(branch_budget) {}
    std::string name() const override { return "builtin"; }

protected:
    SolverVerdict do_check_sat(const Formula& phi, bool want_model) override;

private:
    std::size_t branch_budget_;
};

class SmtProcess;

/// One long-lived SMT-LIB process; every query runs inside push/pop.
class ExternalSolver : public Solver {
public:
    explicit ExternalSolver(SolverConfig config);
    ~ExternalSolver() override;
    std::string name() const override { return "external"; }

protected:
    SolverVerdict do_check_sat(const Formula& phi, bool want_model) override;

private:
    SolverConfig config_;
    std::unique_ptr<SmtProcess> proc_;
    void start();
};

std::unique_ptr<Solver> make_solver(const SolverConfig& config);

/// SMT-LIB rendering of a formula; identifiers are |quoted| when needed.
std::string to_smtlib(const Formula& f);
std::string smt_symbol(const std::string& name);

}  // namespace sygra
