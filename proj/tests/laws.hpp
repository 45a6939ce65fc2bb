#pragma once

// Randomized checks of the categorical constructions. Each check returns an
// empty string on success and a description of the failure otherwise.

#include <random>
#include <string>

#include "support.hpp"

namespace sygra::testing {

inline bool iso_with(const GraphRef& a, const GraphRef& b, const std::function<bool(const Morphism&)>& ok) {
    for (const auto& iso : enumerate_isomorphisms(a, b))
        if (ok(iso)) return true;
    return false;
}

/// Commuting square, and uniqueness up to iso: glueing in the other order gives
/// an isomorphic object compatible with both injections.
inline std::string check_pushout(const Span& span) {
    Cospan co = pushout(span);
    if (!is_valid_morphism(co.left) || !is_valid_morphism(co.right)) return "pushout injections are not morphisms";
    if (!commutes(compose(co.left, span.left), compose(co.right, span.right))) return "pushout square does not commute";
    Cospan swapped = pushout(Span{span.apex, span.right, span.left});
    bool unique = iso_with(co.target, swapped.target, [&](const Morphism& phi) {
        return commutes(compose(phi, co.left), swapped.right) && commutes(compose(phi, co.right), swapped.left);
    });
    return unique ? "" : "pushouts of the same span are not isomorphic:\n  " + to_string(*co.target) + "\n  " +
                             to_string(*swapped.target);
}

/// The pullback square commutes, and since one leg is a monomorphism the
/// pushout square is also a pullback.
inline std::string check_pullback(const Span& span) {
    Cospan co = pushout(span);
    Span pb = pullback(co);
    if (!is_valid_morphism(pb.left) || !is_valid_morphism(pb.right)) return "pullback projections are not morphisms";
    if (!commutes(compose(co.left, pb.left), compose(co.right, pb.right))) return "pullback square does not commute";
    bool recovered = iso_with(span.apex, pb.apex, [&](const Morphism& psi) {
        return commutes(compose(pb.left, psi), span.left) && commutes(compose(pb.right, psi), span.right);
    });
    return recovered ? "" : "pushout along a mono is not a pullback: apex " + to_string(*span.apex) + " vs " +
                                to_string(*pb.apex);
}

struct DpoTrial {
    bool applicable = false;
    std::string failure;
};

/// G => H with a random rule, then H => G' with the inverted rule at the
/// comatch; G' must be isomorphic to G.
inline DpoTrial check_dpo_reversible(std::mt19937_64& rng) {
    EGraph g = random_graph(rng, "g");
    EGraph l = random_subgraph(g, rng, false);
    EGraph k = random_subgraph(l, rng, true);
    for (const auto& x : l.labels())
        if (!k.contains(Sort::Label, x)) k.add_label(x);
    EGraph r = k;
    grow(r, rng, "r", pick(rng, 0, 2), 0, pick(rng, 0, 1), 0);
    {
        // Created arrows may hang off preserved or created nodes.
        auto ns = r.ids(Sort::Node);
        auto ls = r.ids(Sort::Label);
        if (!ns.empty()) {
            for (std::size_t i = 0, n = pick(rng, 0, 2); i < n; ++i)
                r.add_edge("re" + std::to_string(i), ns[pick(rng, 0, ns.size() - 1)], ns[pick(rng, 0, ns.size() - 1)]);
            if (!ls.empty())
                for (std::size_t i = 0, n = pick(rng, 0, 2); i < n; ++i)
                    r.add_node_attr("ra" + std::to_string(i), ns[pick(rng, 0, ns.size() - 1)],
                                    ls[pick(rng, 0, ls.size() - 1)]);
        }
    }
    for (const auto& x : r.labels())
        if (!l.contains(Sort::Label, x)) {
            l.add_label(x);
            k.add_label(x);
            if (!g.contains(Sort::Label, x)) g.add_label(x);
        }
    GraphRef G = share(std::move(g));
    GraphRef L = share(std::move(l));
    GraphRef K = share(std::move(k));
    GraphRef R = share(std::move(r));
    Morphism lk = inclusion(K, L);
    Morphism rk = inclusion(K, R);
    Morphism m = inclusion(L, G);

    DpoTrial out;
    auto c = pushout_complement(lk, m);
    if (!std::holds_alternative<Complement>(c)) return out;
    out.applicable = true;
    const Complement& fwd = std::get<Complement>(c);
    Cospan h = pushout(Span{K, rk, fwd.k_to_d});
    if (!commutes(compose(h.left, rk), compose(h.right, fwd.k_to_d))) {
        out.failure = "forward square does not commute";
        return out;
    }
    auto back = pushout_complement(rk, h.left);
    if (!std::holds_alternative<Complement>(back)) {
        out.failure = "inverse rule not applicable at the comatch";
        return out;
    }
    const Complement& bwd = std::get<Complement>(back);
    Cospan g2 = pushout(Span{K, lk, bwd.k_to_d});
    if (enumerate_isomorphisms(G, g2.target).empty())
        out.failure = "round trip changed the graph:\n  " + to_string(*G) + "\n  " + to_string(*g2.target);
    return out;
}

}  // namespace sygra::testing
