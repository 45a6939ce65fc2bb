#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sygra/symbolic.hpp"

namespace sygra {

/// Minimal context SK with the two jointly surjective matches.
struct OverlapCandidate {
    SymbolicGraph context;
    Morphism o1;  // L1 -> SK
    Morphism o2;  // L2 -> SK
    Verdict satisfiable = Verdict::Unknown;
};

/// Every gluing of L1 and L2 along a partial injective correspondence that
/// shares at least one graph node. Elements of one rule are never merged with
/// each other. With a solver, each candidate's formula is checked.
std::vector<OverlapCandidate> enumerate_overlaps(const Rule& r1, const Rule& r2, Solver* solver = nullptr);

struct DependenceEvidence {
    /// "i" (L1 -> D2) or "j" (L2 -> D1).
    std::string missing;
    /// Rule whose deletion breaks the other match.
    std::string deleting_rule;
    Sort sort = Sort::Node;
    /// Host element matched by the other rule and deleted.
    std::string element;
};

struct DependenceResult {
    bool dependent = false;
    std::vector<DependenceEvidence> evidence;
};

DependenceResult parallel_dependence(const Derivation& d1, const Derivation& d2);

enum class ConfluenceMode : std::uint8_t { Symbolic, Narrowing };
std::string_view to_string(ConfluenceMode m);

struct ConfluenceWitness {
    Derivation close1;  // r2 on d1's output
    Derivation close2;  // r1 on d2's output
    /// Elements preserved by both original derivations.
    GraphRef z;
    Morphism iso;  // X1 -> X2 (on the compared graphs)
};

struct ConfluenceOptions {
    ConfluenceMode mode = ConfluenceMode::Narrowing;
    NarrowingOptions narrowing;
    /// Also look for closers that ignore element tracking when the tracked
    /// search fails.
    bool check_untracked = false;
};

struct ConfluenceResult {
    std::optional<ConfluenceWitness> witness;
    bool indeterminate = false;
    /// Only meaningful when check_untracked was requested and no witness exists.
    bool untracked_confluent = false;
    std::size_t closers1 = 0;
    std::size_t closers2 = 0;
};

ConfluenceResult check_direct_confluence(const Derivation& d1, const Derivation& d2, Solver& solver,
                                         const ConfluenceOptions& options = {});

enum class Classification : std::uint8_t { FormulaUnsatisfiable, ParallelIndependent, DirectlyConfluent, NcpPair };
std::string_view to_string(Classification c);
std::optional<Classification> parse_classification(std::string_view s);

struct OverlapEntry {
    OverlapCandidate overlap;
    Classification classification = Classification::NcpPair;
    std::optional<Derivation> d1;
    std::optional<Derivation> d2;
    DependenceResult dependence;
    std::optional<ConfluenceWitness> witness;
    /// A solver Unknown forced the conservative answer.
    bool indeterminate = false;
    /// Closers exist when tracking is ignored (reported when it differs).
    bool untracked_confluent = false;
};

struct PairReport {
    std::string rule1;
    std::string rule2;
    std::vector<OverlapEntry> entries;
    std::size_t gluing_skipped = 0;
    bool conflicting = false;
    SolverStats stats;
};

struct ClassifyOptions {
    ConfluenceOptions confluence{ConfluenceMode::Narrowing, {}, true};
};

PairReport classify_pair(const Rule& r1, const Rule& r2, Solver& solver, const ClassifyOptions& options = {});

struct Embedding {
    Morphism f;  // SK -> SG
    Morphism g;  // SP1 -> SH1
    Morphism h;  // SP2 -> SH2
};

/// Embeds the pair over SK into the pair over SG: f is forced by the matches
/// and g, h by the derivation squares; all three must be symbolic morphisms.
std::optional<Embedding> embeds(const Derivation& k1, const Derivation& k2, const Derivation& g1,
                                const Derivation& g2, Solver& solver);

/// Same-input derivation pair for two matches found on `host` separately:
/// the host is extended by every label node either match needs.
std::pair<Match, Match> align_matches(const Match& a, const Match& b);

}  // namespace sygra
