#pragma once

// Shared fixtures and random generators for the test programs.

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "sygra/category.hpp"
#include "sygra/conflict.hpp"
#include "sygra/document.hpp"
#include "sygra/formula.hpp"
#include "sygra/solver.hpp"

namespace sygra::testing {

inline RuleSetDocument rules(const std::string& file) { return load_rule_set(std::string(SYGRA_RULES_DIR) + "/" + file); }

inline bool have_z3() {
    if (std::FILE* f = std::fopen(SYGRA_Z3, "r")) {
        std::fclose(f);
        return true;
    }
    return false;
}

inline SolverConfig z3_config() {
    SolverConfig cfg;
    cfg.backend = Backend::External;
    cfg.command = std::string(SYGRA_Z3) + " -in";
    return cfg;
}

/// Value a grounded graph's attribute points at.
inline std::optional<std::int64_t> attr_value(const SymbolicGraph& g, const std::string& attr) {
    const auto& attrs = g.graph->node_attrs();
    auto it = attrs.find(attr);
    if (it == attrs.end()) return std::nullopt;
    return constant_value(it->second.target);
}

/// Only attribute in the graph, by value.
inline std::optional<std::int64_t> single_value(const SymbolicGraph& g) {
    if (g.graph->node_attrs().size() != 1) return std::nullopt;
    return constant_value(g.graph->node_attrs().begin()->second.target);
}

/// Output of the rule applied symbolically to a host at its first match.
inline std::optional<Derivation> derive(const Rule& r, const SymbolicGraph& host, Solver& solver) {
    auto ms = find_symbolic_matches(r, host, solver);
    if (ms.matches.empty()) return std::nullopt;
    return apply_symbolic(r, ms.matches.front()).derivation;
}

/// inc1 and inc2 on the same grounded host, sharing one input graph.
inline std::pair<Derivation, Derivation> aligned_pair(const Rule& r1, const Rule& r2, const SymbolicGraph& host,
                                                      Solver& solver) {
    auto m1 = find_symbolic_matches(r1, host, solver);
    auto m2 = find_symbolic_matches(r2, host, solver);
    auto [a, b] = align_matches(m1.matches.at(0), m2.matches.at(0));
    return {*apply_symbolic(r1, a).derivation, *apply_symbolic(r2, b).derivation};
}

// ---------------------------------------------------------------------------
// Random E-graphs and spans

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Adds random elements to `g` with ids `<prefix><kind><k>`.
inline void grow(EGraph& g, std::mt19937_64& rng, const std::string& prefix, std::size_t nodes, std::size_t edges,
                 std::size_t labels, std::size_t attrs) {
    for (std::size_t i = 0; i < nodes; ++i) g.add_node(prefix + "n" + std::to_string(i));
    for (std::size_t i = 0; i < labels; ++i) g.add_label(prefix + "x" + std::to_string(i));
    auto ns = g.ids(Sort::Node);
    auto ls = g.ids(Sort::Label);
    if (ns.empty()) return;
    for (std::size_t i = 0; i < edges; ++i)
        g.add_edge(prefix + "e" + std::to_string(i), ns[pick(rng, 0, ns.size() - 1)], ns[pick(rng, 0, ns.size() - 1)]);
    if (ls.empty()) return;
    auto es = g.ids(Sort::Edge);
    for (std::size_t i = 0; i < attrs; ++i) {
        const std::string& l = ls[pick(rng, 0, ls.size() - 1)];
        if (!es.empty() && pick(rng, 0, 2) == 0)
            g.add_edge_attr(prefix + "b" + std::to_string(i), es[pick(rng, 0, es.size() - 1)], l);
        else
            g.add_node_attr(prefix + "a" + std::to_string(i), ns[pick(rng, 0, ns.size() - 1)], l);
    }
}

inline EGraph random_graph(std::mt19937_64& rng, const std::string& prefix = "") {
    EGraph g;
    grow(g, rng, prefix, pick(rng, 1, 3), pick(rng, 0, 3), pick(rng, 0, 2), pick(rng, 0, 3));
    return g;
}

/// Random subgraph closed under sources and targets.
inline EGraph random_subgraph(const EGraph& g, std::mt19937_64& rng, bool keep_labels) {
    EGraph s;
    for (const auto& n : g.nodes())
        if (pick(rng, 0, 3) != 0) s.add_node(n);
    for (const auto& l : g.labels())
        if (keep_labels || pick(rng, 0, 3) != 0) s.add_label(l);
    for (Sort sort : {Sort::Edge, Sort::NodeAttr, Sort::EdgeAttr}) {
        for (const auto& [id, a] : g.arrows(sort)) {
            if (!s.contains(source_sort(sort), a.source) || !s.contains(target_sort(sort), a.target)) continue;
            if (pick(rng, 0, 3) != 0) s.add(sort, id, a);
        }
    }
    return s;
}

/// Copy of `g` where node `from` is merged into node `into`; returns the
/// quotient map as a morphism from g.
inline Morphism merge_nodes(const GraphRef& g, const std::string& from, const std::string& into) {
    EGraph q;
    Morphism m{g, nullptr, {}};
    for (const auto& n : g->nodes()) {
        const std::string& img = n == from ? into : n;
        if (!q.contains(Sort::Node, img)) q.add_node(img);
        m.map(Sort::Node)[n] = img;
    }
    for (const auto& l : g->labels()) {
        q.add_label(l);
        m.map(Sort::Label)[l] = l;
    }
    for (Sort sort : {Sort::Edge, Sort::NodeAttr, Sort::EdgeAttr}) {
        for (const auto& [id, a] : g->arrows(sort)) {
            Arrow b = a;
            b.source = m.at(source_sort(sort), a.source);
            b.target = m.at(target_sort(sort), a.target);
            q.add(sort, id, b);
            m.map(sort)[id] = id;
        }
    }
    m.cod = share(std::move(q));
    return m;
}

/// A -> B an inclusion, A -> C an inclusion possibly followed by a node merge.
/// The extras of B and C may reuse each other's ids.
inline Span random_span(std::mt19937_64& rng) {
    EGraph a = random_graph(rng, "s");
    EGraph b = a;
    EGraph c = a;
    grow(b, rng, "t", pick(rng, 0, 2), pick(rng, 0, 2), pick(rng, 0, 1), pick(rng, 0, 2));
    grow(c, rng, "t", pick(rng, 0, 2), pick(rng, 0, 2), pick(rng, 0, 1), pick(rng, 0, 2));
    GraphRef A = share(std::move(a));
    GraphRef B = share(std::move(b));
    GraphRef C = share(std::move(c));
    Morphism right = inclusion(A, C);
    auto cn = C->ids(Sort::Node);
    if (cn.size() >= 2 && pick(rng, 0, 2) == 0) {
        Morphism q = merge_nodes(C, cn[1], cn[0]);
        right = compose(q, right);
    }
    return Span{A, inclusion(A, B), right};
}

// ---------------------------------------------------------------------------
// Random linear constraints

inline Term random_linear_term(std::mt19937_64& rng, const std::vector<std::string>& vars) {
    std::uniform_int_distribution<int> coeff(-4, 4);
    Term t = Term::constant(std::uniform_int_distribution<int>(-10, 10)(rng));
    for (const auto& v : vars) {
        int c = coeff(rng);
        if (c != 0 && pick(rng, 0, 1) == 0) t = Term::add(Term::mul(c, Term::var(v)), t);
    }
    return t;
}

/// Conjunction of 1 to 4 atoms over at most five variables.
inline Formula random_conjunction(std::mt19937_64& rng) {
    std::vector<std::string> vars;
    const std::size_t n = pick(rng, 1, 5);
    for (std::size_t i = 0; i < n; ++i) vars.push_back("v" + std::to_string(i));
    std::vector<Formula> atoms;
    const std::size_t k = pick(rng, 1, 4);
    for (std::size_t i = 0; i < k; ++i) {
        Term lhs = random_linear_term(rng, vars);
        Term rhs = Term::constant(0);
        switch (pick(rng, 0, 2)) {
        case 0:
            atoms.push_back(Formula::eq(lhs, rhs));
            break;
        case 1:
            atoms.push_back(Formula::le(lhs, rhs));
            break;
        default:
            atoms.push_back(Formula::lt(lhs, rhs));
            break;
        }
    }
    return Formula::conjunction(std::move(atoms));
}

}  // namespace sygra::testing
