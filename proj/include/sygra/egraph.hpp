#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sygra {

/// The five element sorts of an E-graph. The enumeration order is also the
/// canonical ordering used wherever results must be deterministic.
enum class Sort : std::uint8_t { Node, Edge, Label, NodeAttr, EdgeAttr };

inline constexpr std::array<Sort, 5> kAllSorts{Sort::Node, Sort::Edge, Sort::Label, Sort::NodeAttr,
                                               Sort::EdgeAttr};

inline constexpr std::size_t index_of(Sort s) { return static_cast<std::size_t>(s); }
std::string_view sort_name(Sort s);
std::optional<Sort> parse_sort(std::string_view name);

/// Edge-like sorts have a source and a target.
inline constexpr bool is_arrow(Sort s) { return s == Sort::Edge || s == Sort::NodeAttr || s == Sort::EdgeAttr; }
inline constexpr Sort source_sort(Sort s) { return s == Sort::EdgeAttr ? Sort::Edge : Sort::Node; }
inline constexpr Sort target_sort(Sort s) { return s == Sort::Edge ? Sort::Node : Sort::Label; }

/// Source/target of a graph edge or an attribution edge. `tag` is the optional
/// attribute name; graph edges never carry one.
struct Arrow {
    std::string source;
    std::string target;
    std::optional<std::string> tag;

    bool operator==(const Arrow&) const = default;
};

/// Graph nodes and edges plus label nodes and the two kinds of attribution
/// edges. Label nodes are identified by their variable name; the data sort is
/// always the integers.
///
/// Built incrementally through the add_* functions, then shared immutably via
/// GraphRef.
class EGraph {
public:
    void add_node(std::string id);
    void add_edge(std::string id, std::string source, std::string target);
    void add_label(std::string var);
    void add_node_attr(std::string id, std::string node, std::string label,
                       std::optional<std::string> tag = std::nullopt);
    void add_edge_attr(std::string id, std::string edge, std::string label,
                       std::optional<std::string> tag = std::nullopt);

    /// Generic insertion; `arrow` is ignored for Node and Label.
    void add(Sort sort, const std::string& id, const Arrow& arrow = {});
    void remove(Sort sort, const std::string& id);

    const std::set<std::string>& nodes() const { return nodes_; }
    const std::set<std::string>& labels() const { return labels_; }
    const std::map<std::string, Arrow>& edges() const { return arrows_[0]; }
    const std::map<std::string, Arrow>& node_attrs() const { return arrows_[1]; }
    const std::map<std::string, Arrow>& edge_attrs() const { return arrows_[2]; }
    const std::map<std::string, Arrow>& arrows(Sort s) const;

    bool contains(Sort s, const std::string& id) const;
    std::size_t size(Sort s) const;
    std::size_t element_count() const;
    bool empty() const { return element_count() == 0; }

    /// Ids of one sort in canonical (lexicographic) order.
    std::vector<std::string> ids(Sort s) const;
    const Arrow& arrow(Sort s, const std::string& id) const;

    /// Label nodes targeted by at least one attribution edge.
    std::set<std::string> attached_labels() const;

    /// Throws InvalidInput if a dangling reference exists.
    void validate() const;

    bool operator==(const EGraph&) const = default;

private:
    std::set<std::string> nodes_;
    std::set<std::string> labels_;
    std::array<std::map<std::string, Arrow>, 3> arrows_;  // Edge, NodeAttr, EdgeAttr

    std::map<std::string, Arrow>& arrows_mut(Sort s);
};

using GraphRef = std::shared_ptr<const EGraph>;

inline GraphRef share(EGraph g) { return std::make_shared<const EGraph>(std::move(g)); }

using IdMap = std::map<std::string, std::string>;

/// A total, structure-preserving map between two E-graphs, one function per
/// sort.
struct Morphism {
    GraphRef dom;
    GraphRef cod;
    std::array<IdMap, 5> maps;

    IdMap& map(Sort s) { return maps[index_of(s)]; }
    const IdMap& map(Sort s) const { return maps[index_of(s)]; }

    /// Image of an element; throws InvalidInput when undefined.
    const std::string& at(Sort s, const std::string& id) const;
    std::optional<std::string> find(Sort s, const std::string& id) const;

    const IdMap& label_map() const { return map(Sort::Label); }

    /// Same function graphs; endpoints compared by value.
    bool same_maps(const Morphism& other) const { return maps == other.maps; }
};

Morphism identity(const GraphRef& g);

/// Inclusion of `sub` into `super` (same ids). Throws when `sub` is not a
/// subgraph.
Morphism inclusion(const GraphRef& sub, const GraphRef& super);

/// Totality and structure preservation (sources, targets, present tags).
bool is_valid_morphism(const Morphism& m);

enum class Injectivity : std::uint8_t { Unrestricted, Injective, Bijective };

/// One injectivity requirement per sort.
struct InjectivitySpec {
    std::array<Injectivity, 5> per_sort{};

    Injectivity operator[](Sort s) const { return per_sort[index_of(s)]; }

    static InjectivitySpec uniform(Injectivity i) { return {{i, i, i, i, i}}; }
    /// Rule span morphisms: injective on graph nodes and edges, bijective on labels.
    static InjectivitySpec rule_morphism();
    /// Matches: injective on everything except label nodes.
    static InjectivitySpec match();
    static InjectivitySpec isomorphism() { return uniform(Injectivity::Bijective); }
};

bool satisfies(const Morphism& m, const InjectivitySpec& spec);

/// Optional veto on individual element assignments during enumeration.
using AssignmentFilter = std::function<bool(Sort, const std::string& pattern_id, const std::string& host_id)>;

struct MatchOptions {
    /// Pre-assigned images; enumeration only extends these.
    std::array<IdMap, 5> seed{};
    AssignmentFilter filter;
    /// Stop after this many results (0 = all).
    std::size_t limit = 0;
};

/// All structure-preserving morphisms pattern -> host satisfying `spec`,
/// sorted by their image tuples in canonical element order.
std::vector<Morphism> find_morphisms(const GraphRef& pattern, const GraphRef& host, const InjectivitySpec& spec,
                                     const MatchOptions& options = {});

std::vector<Morphism> enumerate_isomorphisms(const GraphRef& g1, const GraphRef& g2);

/// f after g. Throws InvalidInput unless g's codomain equals f's domain.
Morphism compose(const Morphism& f, const Morphism& g);

/// True iff both morphisms share domain and codomain and agree everywhere.
bool commutes(const Morphism& a, const Morphism& b);

std::string to_string(const EGraph& g);

}  // namespace sygra
