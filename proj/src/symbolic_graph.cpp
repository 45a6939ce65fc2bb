#include "sygra/symbolic_graph.hpp"

#include <charconv>

#include "sygra/error.hpp"

namespace sygra {

std::string constant_name(std::int64_t v) {
    if (v >= 0) return "c_" + std::to_string(v);
    std::string digits = std::to_string(v).substr(1);
    return "c_n" + digits;
}

std::optional<std::int64_t> constant_value(std::string_view name) {
    if (name.substr(0, 2) != "c_") return std::nullopt;
    std::string_view rest = name.substr(2);
    bool negative = false;
    if (!rest.empty() && rest[0] == 'n') {
        negative = true;
        rest.remove_prefix(1);
    }
    if (rest.empty() || (rest.size() > 1 && rest[0] == '0')) return std::nullopt;
    std::uint64_t mag = 0;
    auto [p, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), mag);
    if (ec != std::errc() || p != rest.data() + rest.size()) return std::nullopt;
    if (negative) {
        if (mag == 0 || mag > (std::uint64_t{1} << 63)) return std::nullopt;
        return mag == (std::uint64_t{1} << 63) ? INT64_MIN : -static_cast<std::int64_t>(mag);
    }
    if (mag > static_cast<std::uint64_t>(INT64_MAX)) return std::nullopt;
    return static_cast<std::int64_t>(mag);
}

std::string SymbolicGraph::fresh_var() {
    for (;;) {
        std::string name = "_v" + std::to_string(fresh_counter++);
        if (!graph->contains(Sort::Label, name)) return name;
    }
}

void SymbolicGraph::validate() const {
    graph->validate();
    for (const auto& v : free_vars(formula))
        if (!graph->contains(Sort::Label, v)) throw InvalidInput("formula variable '" + v + "' is not a label node");
    if (grounded) {
        for (const auto& l : graph->labels())
            if (!constant_value(l)) throw InvalidInput("grounded graph has non-constant label '" + l + "'");
    }
}

Formula constant_bindings(const EGraph& g) {
    std::vector<Formula> parts;
    for (const auto& l : g.labels())
        if (auto v = constant_value(l)) parts.push_back(Formula::eq(Term::var(l), Term::constant(*v)));
    return Formula::conjunction(std::move(parts));
}

std::set<std::int64_t> constants_of(const EGraph& g) {
    std::set<std::int64_t> out;
    for (const auto& l : g.labels())
        if (auto v = constant_value(l)) out.insert(*v);
    return out;
}

SymbolicGraph materialize(const SymbolicGraph& g, const std::set<std::int64_t>& values) {
    EGraph e = *g.graph;
    bool changed = false;
    for (auto v : values) {
        const std::string name = constant_name(v);
        if (!e.contains(Sort::Label, name)) {
            e.add_label(name);
            changed = true;
        }
    }
    if (!changed) return g;
    SymbolicGraph out = g;
    out.graph = share(std::move(e));
    out.formula = g.grounded ? constant_bindings(*out.graph) : g.formula;
    return out;
}

SymbolicGraph regrounded(const SymbolicGraph& g) {
    SymbolicGraph out = g;
    out.formula = constant_bindings(*g.graph);
    return out;
}

std::string to_string(const SymbolicGraph& g) {
    return to_string(*g.graph) + (g.grounded ? "grounded\n" : "") + "formula " + to_string(g.formula) + "\n";
}

}  // namespace sygra
