#include "sygra/egraph.hpp"

#include <algorithm>
#include <sstream>

#include "sygra/error.hpp"

namespace sygra {

std::string_view sort_name(Sort s) {
    switch (s) {
        case Sort::Node: return "node";
        case Sort::Edge: return "edge";
        case Sort::Label: return "label";
        case Sort::NodeAttr: return "attr";
        case Sort::EdgeAttr: return "eattr";
    }
    return "?";
}

std::optional<Sort> parse_sort(std::string_view name) {
    for (Sort s : kAllSorts)
        if (sort_name(s) == name) return s;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// EGraph

std::map<std::string, Arrow>& EGraph::arrows_mut(Sort s) {
    switch (s) {
        case Sort::Edge: return arrows_[0];
        case Sort::NodeAttr: return arrows_[1];
        case Sort::EdgeAttr: return arrows_[2];
        default: throw InvalidInput("sort " + std::string(sort_name(s)) + " has no arrows");
    }
}

const std::map<std::string, Arrow>& EGraph::arrows(Sort s) const {
    return const_cast<EGraph*>(this)->arrows_mut(s);
}

void EGraph::add_node(std::string id) { add(Sort::Node, id); }
void EGraph::add_label(std::string var) { add(Sort::Label, var); }

void EGraph::add_edge(std::string id, std::string source, std::string target) {
    add(Sort::Edge, id, Arrow{std::move(source), std::move(target), std::nullopt});
}

void EGraph::add_node_attr(std::string id, std::string node, std::string label, std::optional<std::string> tag) {
    add(Sort::NodeAttr, id, Arrow{std::move(node), std::move(label), std::move(tag)});
}

void EGraph::add_edge_attr(std::string id, std::string edge, std::string label, std::optional<std::string> tag) {
    add(Sort::EdgeAttr, id, Arrow{std::move(edge), std::move(label), std::move(tag)});
}

void EGraph::add(Sort sort, const std::string& id, const Arrow& arrow) {
    if (id.empty()) throw InvalidInput("empty element id");
    if (contains(sort, id)) throw InvalidInput("duplicate " + std::string(sort_name(sort)) + " id '" + id + "'");
    switch (sort) {
        case Sort::Node: nodes_.insert(id); break;
        case Sort::Label: labels_.insert(id); break;
        default: {
            Arrow a = arrow;
            if (sort == Sort::Edge) a.tag.reset();
            arrows_mut(sort).emplace(id, std::move(a));
        }
    }
}

void EGraph::remove(Sort sort, const std::string& id) {
    switch (sort) {
        case Sort::Node: nodes_.erase(id); break;
        case Sort::Label: labels_.erase(id); break;
        default: arrows_mut(sort).erase(id);
    }
}

bool EGraph::contains(Sort s, const std::string& id) const {
    switch (s) {
        case Sort::Node: return nodes_.count(id) != 0;
        case Sort::Label: return labels_.count(id) != 0;
        default: return arrows(s).count(id) != 0;
    }
}

std::size_t EGraph::size(Sort s) const {
    switch (s) {
        case Sort::Node: return nodes_.size();
        case Sort::Label: return labels_.size();
        default: return arrows(s).size();
    }
}

std::size_t EGraph::element_count() const {
    std::size_t n = 0;
    for (Sort s : kAllSorts) n += size(s);
    return n;
}

std::vector<std::string> EGraph::ids(Sort s) const {
    std::vector<std::string> out;
    if (s == Sort::Node) return {nodes_.begin(), nodes_.end()};
    if (s == Sort::Label) return {labels_.begin(), labels_.end()};
    for (const auto& [id, _] : arrows(s)) out.push_back(id);
    return out;
}

const Arrow& EGraph::arrow(Sort s, const std::string& id) const {
    const auto& m = arrows(s);
    auto it = m.find(id);
    if (it == m.end()) throw InvalidInput("no " + std::string(sort_name(s)) + " '" + id + "'");
    return it->second;
}

std::set<std::string> EGraph::attached_labels() const {
    std::set<std::string> out;
    for (const auto& [_, a] : node_attrs()) out.insert(a.target);
    for (const auto& [_, a] : edge_attrs()) out.insert(a.target);
    return out;
}

void EGraph::validate() const {
    for (Sort s : {Sort::Edge, Sort::NodeAttr, Sort::EdgeAttr}) {
        for (const auto& [id, a] : arrows(s)) {
            if (!contains(source_sort(s), a.source))
                throw InvalidInput(std::string(sort_name(s)) + " '" + id + "' has unknown source '" + a.source + "'");
            if (!contains(target_sort(s), a.target))
                throw InvalidInput(std::string(sort_name(s)) + " '" + id + "' has unknown target '" + a.target + "'");
        }
    }
}

std::string to_string(const EGraph& g) {
    std::ostringstream os;
    os << "{";
    const char* sep = "";
    for (Sort s : kAllSorts) {
        for (const auto& id : g.ids(s)) {
            os << sep << sort_name(s) << " " << id;
            if (is_arrow(s)) {
                const auto& a = g.arrow(s, id);
                os << ": " << a.source << " -> " << a.target;
                if (a.tag) os << " @" << *a.tag;
            }
            sep = "; ";
        }
    }
    os << "}";
    return os.str();
}

// ---------------------------------------------------------------------------
// Morphisms

const std::string& Morphism::at(Sort s, const std::string& id) const {
    const auto& m = map(s);
    auto it = m.find(id);
    if (it == m.end()) throw InvalidInput("morphism undefined on " + std::string(sort_name(s)) + " '" + id + "'");
    return it->second;
}

std::optional<std::string> Morphism::find(Sort s, const std::string& id) const {
    const auto& m = map(s);
    auto it = m.find(id);
    if (it == m.end()) return std::nullopt;
    return it->second;
}

Morphism identity(const GraphRef& g) { return inclusion(g, g); }

Morphism inclusion(const GraphRef& sub, const GraphRef& super) {
    Morphism m{sub, super, {}};
    for (Sort s : kAllSorts) {
        for (const auto& id : sub->ids(s)) {
            if (!super->contains(s, id))
                throw InvalidInput("not a subgraph: missing " + std::string(sort_name(s)) + " '" + id + "'");
            m.map(s).emplace(id, id);
        }
    }
    return m;
}

bool is_valid_morphism(const Morphism& m) {
    if (!m.dom || !m.cod) return false;
    for (Sort s : kAllSorts) {
        const auto& f = m.map(s);
        if (f.size() != m.dom->size(s)) return false;
        for (const auto& [x, y] : f) {
            if (!m.dom->contains(s, x) || !m.cod->contains(s, y)) return false;
            if (!is_arrow(s)) continue;
            const Arrow& a = m.dom->arrow(s, x);
            const Arrow& b = m.cod->arrow(s, y);
            auto src = m.find(source_sort(s), a.source);
            auto tgt = m.find(target_sort(s), a.target);
            if (!src || *src != b.source || !tgt || *tgt != b.target) return false;
            if (a.tag && b.tag && *a.tag != *b.tag) return false;
        }
    }
    return true;
}

InjectivitySpec InjectivitySpec::rule_morphism() {
    using I = Injectivity;
    return {{I::Injective, I::Injective, I::Bijective, I::Injective, I::Injective}};
}

InjectivitySpec InjectivitySpec::match() {
    using I = Injectivity;
    return {{I::Injective, I::Injective, I::Unrestricted, I::Injective, I::Injective}};
}

bool satisfies(const Morphism& m, const InjectivitySpec& spec) {
    for (Sort s : kAllSorts) {
        if (spec[s] == Injectivity::Unrestricted) continue;
        std::set<std::string> image;
        for (const auto& [_, y] : m.map(s)) image.insert(y);
        if (image.size() != m.map(s).size()) return false;
        if (spec[s] == Injectivity::Bijective && image.size() != m.cod->size(s)) return false;
    }
    return true;
}

namespace {

class Matcher {
public:
    Matcher(const GraphRef& pattern, const GraphRef& host, const InjectivitySpec& spec, const MatchOptions& options)
        : p_(*pattern), h_(*host), spec_(spec), options_(options), pattern_(pattern), host_(host) {
        // Arrows first: assigning one forces its endpoints, which prunes early.
        for (Sort s : {Sort::Edge, Sort::EdgeAttr, Sort::NodeAttr, Sort::Node, Sort::Label})
            for (const auto& id : p_.ids(s)) order_.emplace_back(s, id);
    }

    std::vector<Morphism> run() {
        for (Sort s : kAllSorts) {
            if (spec_[s] == Injectivity::Bijective && p_.size(s) != h_.size(s)) return {};
            if (spec_[s] != Injectivity::Unrestricted && p_.size(s) > h_.size(s)) return {};
        }
        std::vector<std::pair<Sort, std::string>> trail;
        for (Sort s : kAllSorts)
            for (const auto& [x, y] : options_.seed[index_of(s)])
                if (!p_.contains(s, x) || !assign(s, x, y, trail)) return {};
        search(0);
        std::sort(results_.begin(), results_.end(),
                  [](const Morphism& a, const Morphism& b) { return a.maps < b.maps; });
        return std::move(results_);
    }

private:
    const EGraph& p_;
    const EGraph& h_;
    const InjectivitySpec& spec_;
    const MatchOptions& options_;
    GraphRef pattern_, host_;
    std::vector<std::pair<Sort, std::string>> order_;
    std::array<IdMap, 5> assigned_{};
    std::array<std::set<std::string>, 5> used_{};
    std::vector<Morphism> results_;

    bool done() const { return options_.limit != 0 && results_.size() >= options_.limit; }

    bool assign(Sort s, const std::string& pid, const std::string& hid,
                std::vector<std::pair<Sort, std::string>>& trail) {
        auto& m = assigned_[index_of(s)];
        if (auto it = m.find(pid); it != m.end()) return it->second == hid;
        if (!h_.contains(s, hid)) return false;
        if (options_.filter && !options_.filter(s, pid, hid)) return false;
        const bool injective = spec_[s] != Injectivity::Unrestricted;
        if (injective && used_[index_of(s)].count(hid)) return false;
        if (is_arrow(s)) {
            const Arrow& a = p_.arrow(s, pid);
            const Arrow& b = h_.arrow(s, hid);
            if (a.tag && b.tag && *a.tag != *b.tag) return false;
        }
        m.emplace(pid, hid);
        if (injective) used_[index_of(s)].insert(hid);
        trail.emplace_back(s, pid);
        if (is_arrow(s)) {
            const Arrow& a = p_.arrow(s, pid);
            const Arrow& b = h_.arrow(s, hid);
            if (!assign(source_sort(s), a.source, b.source, trail)) return false;
            if (!assign(target_sort(s), a.target, b.target, trail)) return false;
        }
        return true;
    }

    void undo(std::vector<std::pair<Sort, std::string>>& trail) {
        for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
            auto& m = assigned_[index_of(it->first)];
            auto found = m.find(it->second);
            if (spec_[it->first] != Injectivity::Unrestricted) used_[index_of(it->first)].erase(found->second);
            m.erase(found);
        }
        trail.clear();
    }

    void search(std::size_t i) {
        if (done()) return;
        while (i < order_.size() && assigned_[index_of(order_[i].first)].count(order_[i].second)) ++i;
        if (i == order_.size()) {
            results_.push_back(Morphism{pattern_, host_, assigned_});
            return;
        }
        const auto& [s, pid] = order_[i];
        std::vector<std::pair<Sort, std::string>> trail;
        for (const auto& hid : h_.ids(s)) {
            if (assign(s, pid, hid, trail)) search(i + 1);
            undo(trail);
            if (done()) return;
        }
    }
};

}  // namespace

std::vector<Morphism> find_morphisms(const GraphRef& pattern, const GraphRef& host, const InjectivitySpec& spec,
                                     const MatchOptions& options) {
    return Matcher(pattern, host, spec, options).run();
}

std::vector<Morphism> enumerate_isomorphisms(const GraphRef& g1, const GraphRef& g2) {
    return find_morphisms(g1, g2, InjectivitySpec::isomorphism());
}

Morphism compose(const Morphism& f, const Morphism& g) {
    if (!g.cod || !f.dom || !(*g.cod == *f.dom)) throw InvalidInput("compose: codomain/domain mismatch");
    Morphism out{g.dom, f.cod, {}};
    for (Sort s : kAllSorts)
        for (const auto& [x, y] : g.map(s)) out.map(s).emplace(x, f.at(s, y));
    return out;
}

bool commutes(const Morphism& a, const Morphism& b) {
    if (!a.dom || !b.dom || !a.cod || !b.cod) return false;
    if (!(*a.dom == *b.dom) || !(*a.cod == *b.cod)) return false;
    return a.maps == b.maps;
}

}  // namespace sygra
