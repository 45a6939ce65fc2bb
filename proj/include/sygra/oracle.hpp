#pragma once

// Reference semantics on concrete attributed graphs: every attribute carries an
// integer, matching is brute force and rules are applied by plain set
// operations. Shares only the rule representation and formula evaluation with
// the symbolic engine.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sygra/conflict.hpp"
#include "sygra/symbolic.hpp"

namespace sygra::oracle {

struct Attr {
    std::string owner;
    std::int64_t value = 0;
    std::optional<std::string> tag;

    bool operator==(const Attr&) const = default;
};

struct Graph {
    std::set<std::string> nodes;
    std::map<std::string, std::pair<std::string, std::string>> edges;
    std::map<std::string, Attr> node_attrs;
    std::map<std::string, Attr> edge_attrs;
    /// Source of ids for created elements ("+k").
    std::uint64_t next_id = 0;

    std::size_t size() const { return nodes.size() + edges.size() + node_attrs.size() + edge_attrs.size(); }
};

std::string to_string(const Graph& g);

/// Element key: sort index (0 node, 1 edge, 2 node attr, 3 edge attr) and id.
using Key = std::pair<int, std::string>;

struct Match {
    std::map<std::string, std::string> nodes;
    std::map<std::string, std::string> edges;
    std::map<std::string, std::string> node_attrs;
    std::map<std::string, std::string> edge_attrs;
    Assignment values;
};

/// Values of unattached labels are searched in [-window, window].
inline constexpr std::int64_t kValueWindow = 64;

std::vector<Match> find_matches(const Rule& rule, const Graph& g, std::int64_t window = kValueWindow);

struct Step {
    std::string rule;
    Graph input;
    Graph output;
    Match match;
    /// Input elements that survive into the output under their own ids.
    std::set<Key> preserved;
};

/// Nullopt when the gluing condition fails.
std::optional<Step> apply(const Rule& rule, const Graph& g, const Match& m);

/// Every derivation of `rule` on `g`.
std::vector<Step> derivations(const Rule& rule, const Graph& g, std::int64_t window = kValueWindow);

/// Isomorphism preserving values and tags that is the identity on `fixed`.
bool isomorphic(const Graph& a, const Graph& b, const std::set<Key>& fixed = {});

struct ConfluenceCheck {
    bool confluent = false;
    /// Results of the closing steps that were tried (r2 on H1, r1 on H2).
    std::vector<Graph> x1;
    std::vector<Graph> x2;
};

/// One closing step on each side; the closers must keep every element
/// preserved by both original steps, and the results must be isomorphic by a
/// map fixing those elements.
ConfluenceCheck directly_confluent(const Rule& r1, const Step& s1, const Rule& r2, const Step& s2,
                                   std::int64_t window = kValueWindow);

struct HostShape {
    std::size_t max_nodes = 4;
    std::size_t max_edges = 3;
    std::size_t max_attrs = 3;
    std::int64_t min_value = 0;
    std::int64_t max_value = 5;
};

Graph random_host(std::mt19937_64& rng, const HostShape& shape = {});

// ---------------------------------------------------------------------------
// Bridge to the symbolic engine

/// Grounded symbolic graph with the same element ids; attribute targets are
/// the constants of their values.
SymbolicGraph to_symbolic(const Graph& g);

/// The concrete match as a symbolic match into `to_symbolic(g)` (with the
/// constants the valuation needs).
sygra::Match to_symbolic_match(const Rule& rule, const Graph& g, const Match& m);

struct FuzzOptions {
    std::uint64_t seed = 1;
    std::size_t trials = 500;
    HostShape shape;
    /// Restrict to these rule pairs (names); empty means all ordered pairs.
    std::vector<std::pair<std::string, std::string>> pairs;
};

struct PairTally {
    std::size_t trials = 0;
    std::size_t derivation_pairs = 0;
    std::size_t nonconfluent = 0;
    std::size_t covered = 0;
};

struct FuzzReport {
    std::size_t trials = 0;
    std::size_t derivation_pairs = 0;
    std::size_t nonconfluent = 0;
    std::size_t violations = 0;
    /// One line per violation.
    std::vector<std::string> details;
    std::map<std::pair<std::string, std::string>, PairTally> per_pair;
};

/// Checks on random hosts that every concrete non-confluent derivation pair is
/// embedded by some critical pair reported by classify_pair.
FuzzReport completeness_fuzz(const std::vector<Rule>& pool, Solver& solver, const FuzzOptions& options,
                             const ClassifyOptions& classify = {});

}  // namespace sygra::oracle
