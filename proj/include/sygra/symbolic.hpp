#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sygra/category.hpp"
#include "sygra/egraph.hpp"
#include "sygra/formula.hpp"
#include "sygra/solver.hpp"
#include "sygra/symbolic_graph.hpp"

namespace sygra {

/// L <-l- K -r-> R with one formula over the shared label nodes.
struct Rule {
    std::string name;
    GraphRef lhs;
    GraphRef interface;
    GraphRef rhs;
    Morphism l;
    Morphism r;
    Formula formula = Formula::truth();

    /// Builds a rule whose span morphisms are the inclusions given by shared
    /// ids. Throws InvalidInput if the result is not a valid rule.
    static Rule make(std::string name, EGraph lhs, EGraph interface, EGraph rhs, Formula formula);

    void validate() const;

    /// Label nodes of L without an attribution edge.
    std::vector<std::string> unattached_labels() const;
};

enum class DerivationKind : std::uint8_t { Symbolic, Narrowing };
std::string_view to_string(DerivationKind k);

/// A DPO step: input <- context -> output with match L -> input and comatch
/// R -> output.
struct Derivation {
    Rule rule;
    DerivationKind kind = DerivationKind::Symbolic;
    SymbolicGraph input;
    SymbolicGraph context;
    SymbolicGraph output;
    Morphism match;
    Morphism comatch;
    Morphism k_to_d;
    Morphism d_to_g;
    Morphism d_to_h;
};

/// A match together with the host it lands in. Matching may add implicit
/// label nodes (constants of a grounded host, fresh variables) to the host.
struct Match {
    SymbolicGraph host;
    Morphism morphism;
};

struct MatchSet {
    std::vector<Match> matches;
    /// Candidates the solver could not decide.
    std::size_t indeterminate = 0;
};

struct NarrowingOptions {
    /// Most fresh variables one match may introduce.
    std::size_t max_fresh = SIZE_MAX;
};

/// Match with the host's pending label nodes: cod is host.graph.
Match retarget(const Match& m, const SymbolicGraph& host);

/// Validity of Phi_dst => h(Phi_src).
Validity validate_symbolic_morphism(const Morphism& h, const SymbolicGraph& src, const SymbolicGraph& dst,
                                    Solver& solver);

/// Matches injective except on labels whose host formula implies the
/// translated rule formula. On a grounded host, labels that are not attached
/// in L range over the host's constants and one solver-proposed value each.
MatchSet find_symbolic_matches(const Rule& rule, const SymbolicGraph& host, Solver& solver);

/// All E-graph matches where each unattached rule label maps to an existing
/// host label or to its own fresh variable. No formula check.
MatchSet find_narrowing_matches(const Rule& rule, const SymbolicGraph& host, const NarrowingOptions& options = {});

enum class ApplyOutcome : std::uint8_t { Ok, Gluing, Inconsistent, Indeterminate };
std::string_view to_string(ApplyOutcome o);

struct ApplyResult {
    ApplyOutcome outcome = ApplyOutcome::Ok;
    /// Set for Ok and Indeterminate.
    std::optional<Derivation> derivation;
    std::optional<GluingViolation> violation;
    std::string diagnostic;
};

/// Output formula equals the input formula.
ApplyResult apply_symbolic(const Rule& rule, const Match& match);

/// Output formula is the input formula and the translated rule formula,
/// required to be satisfiable.
ApplyResult apply_narrowing(const Rule& rule, const Match& match, Solver& solver);

struct Grounding {
    SymbolicGraph graph;
    /// sg -> graph
    Morphism instance;
};

/// Instance of `sg` under `sigma`; sigma must cover every label and satisfy
/// the formula.
Grounding ground(const SymbolicGraph& sg, const Assignment& sigma);

/// Concrete graph in grounded form: `values` gives the value of each label.
SymbolicGraph grounded_graph(const EGraph& shape, const std::map<std::string, std::int64_t>& values);

struct IsoOptions {
    /// Elements whose images are fixed in advance.
    std::array<IdMap, 5> pins{};
};

struct IsoResult {
    std::optional<Morphism> witness;
    bool indeterminate = false;
    /// The graphs actually compared (irrelevant labels dropped, constants
    /// unified).
    SymbolicGraph lhs;
    SymbolicGraph rhs;
};

/// E-graph isomorphism whose label map makes the formulas equivalent. Label
/// nodes that are unattached, unmentioned and unpinned are ignored; constant
/// labels only map to themselves.
IsoResult symbolic_iso(const SymbolicGraph& g1, const SymbolicGraph& g2, Solver& solver,
                       const IsoOptions& options = {});

}  // namespace sygra
