#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "sygra/egraph.hpp"
#include "sygra/formula.hpp"

namespace sygra {

/// Name of the constant label standing for `v` in grounded graphs:
/// c_42, c_n3 for -3.
std::string constant_name(std::int64_t v);
std::optional<std::int64_t> constant_value(std::string_view name);

/// E-graph plus formula over its label variables.
///
/// Label nodes beyond those present exist implicitly: `fresh_var` hands out
/// names `_v<k>` from a counter that derived graphs inherit, and a grounded
/// graph has one constant label per integer, materialized on demand together
/// with its binding `c_v = v`.
struct SymbolicGraph {
    GraphRef graph = share(EGraph{});
    Formula formula = Formula::truth();
    bool grounded = false;
    std::uint64_t fresh_counter = 0;

    /// Next unused fresh name; advances the counter.
    std::string fresh_var();

    /// Throws InvalidInput when the formula mentions a variable that is not a
    /// label node, or a grounded graph has a non-constant or unbound label.
    void validate() const;
};

/// Grounded graph containing exactly the constants for `values` in addition to
/// those already present.
SymbolicGraph materialize(const SymbolicGraph& g, const std::set<std::int64_t>& values);

/// Conjunction of c_v = v over the constant labels of `g`.
Formula constant_bindings(const EGraph& g);

/// Values of the constants present in a grounded graph.
std::set<std::int64_t> constants_of(const EGraph& g);

/// Rebuilds a grounded graph's formula from its labels (drops everything but
/// the bindings).
SymbolicGraph regrounded(const SymbolicGraph& g);

std::string to_string(const SymbolicGraph& g);

}  // namespace sygra
