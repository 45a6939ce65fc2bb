#pragma once

#include <string>
#include <variant>

#include "sygra/egraph.hpp"
#include "sygra/symbolic_graph.hpp"

namespace sygra {

/// B <-left- apex -right-> C
struct Span {
    GraphRef apex;
    Morphism left;
    Morphism right;
};

/// B -left-> target <-right- C
struct Cospan {
    GraphRef target;
    Morphism left;
    Morphism right;
};

/// Gluing of B and C along the apex. Elements of C keep their ids; elements
/// only in B keep theirs unless taken, in which case a numeric suffix is
/// inserted before any trailing primes (x' -> x_1').
Cospan pushout(const Span& span);

struct GluingViolation {
    enum class Kind { Dangling, Identification };
    Kind kind;
    Sort sort;
    /// Offending host element.
    std::string element;
    std::string detail;
};

std::string_view to_string(GluingViolation::Kind k);

struct Complement {
    GraphRef context;   // D
    Morphism k_to_d;    // K -> D
    Morphism d_to_g;    // D -> G, an inclusion
};

/// Context graph D for the square K -l-> L -m-> G, or the violated gluing
/// condition. `l` must be injective on non-label sorts.
std::variant<Complement, GluingViolation> pushout_complement(const Morphism& l, const Morphism& m);

/// Elements of B and C with a common image in the target. Ids are those of B
/// when unambiguous.
Span pullback(const Cospan& cospan);

/// Smallest variant of `id` (suffix _1, _2, ... before trailing primes) for
/// which `taken` is false.
std::string fresh_variant(const std::string& id, const std::function<bool(const std::string&)>& taken);

struct SymbolicSpan {
    SymbolicGraph apex;
    Morphism left;
    Morphism right;
    SymbolicGraph b;
    SymbolicGraph c;
};

struct SymbolicCospan {
    SymbolicGraph target;
    Morphism left;
    Morphism right;
};

/// E-graph pushout with formula left(Phi_B) && right(Phi_C).
SymbolicCospan symbolic_pushout(const SymbolicSpan& span);

/// E-graph pullback; the formula is the disjunction of the two translated
/// formulas, with variables outside the apex existentially bound.
SymbolicSpan symbolic_pullback(const SymbolicGraph& b, const SymbolicGraph& c, const SymbolicCospan& cospan);

}  // namespace sygra
