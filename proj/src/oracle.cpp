#include "sygra/oracle.hpp"

#include <algorithm>
#include <sstream>

#include "sygra/error.hpp"

namespace sygra::oracle {

std::string to_string(const Graph& g) {
    std::ostringstream os;
    os << "{";
    const char* sep = "";
    for (const auto& n : g.nodes) {
        os << sep << "node " << n;
        sep = "; ";
    }
    for (const auto& [id, st] : g.edges) {
        os << sep << "edge " << id << ": " << st.first << " -> " << st.second;
        sep = "; ";
    }
    for (const auto* attrs : {&g.node_attrs, &g.edge_attrs}) {
        for (const auto& [id, a] : *attrs) {
            os << sep << (attrs == &g.node_attrs ? "attr " : "eattr ") << id << ": " << a.owner << " = " << a.value;
            if (a.tag) os << " @" << *a.tag;
            sep = "; ";
        }
    }
    os << "}";
    return os.str();
}

// ---------------------------------------------------------------------------
// Matching

namespace {

bool tag_ok(const std::optional<std::string>& pattern, const std::optional<std::string>& host) {
    return !pattern || pattern == host;
}

class Matcher {
public:
    Matcher(const Rule& rule, const Graph& g, std::int64_t window)
        : rule_(rule), L_(*rule.lhs), g_(g), window_(window) {
        ln_ = L_.ids(Sort::Node);
        le_ = L_.ids(Sort::Edge);
        la_ = L_.ids(Sort::NodeAttr);
        lb_ = L_.ids(Sort::EdgeAttr);
        const auto attached = L_.attached_labels();
        for (const auto& l : L_.labels())
            if (!attached.count(l)) free_.push_back(l);
    }

    std::vector<Match> run() {
        nodes(0);
        return std::move(out_);
    }

private:
    const Rule& rule_;
    const EGraph& L_;
    const Graph& g_;
    std::int64_t window_;
    std::vector<std::string> ln_, le_, la_, lb_, free_;
    Match cur_;
    std::set<std::string> used_;
    std::vector<Match> out_;

    static bool used_in(const std::map<std::string, std::string>& m, const std::string& v) {
        for (const auto& [k, x] : m)
            if (x == v) return true;
        return false;
    }

    void nodes(std::size_t i) {
        if (i == ln_.size()) return edges(0);
        for (const auto& n : g_.nodes) {
            if (used_in(cur_.nodes, n)) continue;
            cur_.nodes[ln_[i]] = n;
            nodes(i + 1);
            cur_.nodes.erase(ln_[i]);
        }
    }

    void edges(std::size_t i) {
        if (i == le_.size()) return nattrs(0);
        const Arrow& a = L_.arrow(Sort::Edge, le_[i]);
        for (const auto& [id, st] : g_.edges) {
            if (used_in(cur_.edges, id)) continue;
            if (st.first != cur_.nodes.at(a.source) || st.second != cur_.nodes.at(a.target)) continue;
            cur_.edges[le_[i]] = id;
            edges(i + 1);
            cur_.edges.erase(le_[i]);
        }
    }

    void nattrs(std::size_t i) {
        if (i == la_.size()) return eattrs(0);
        const Arrow& a = L_.arrow(Sort::NodeAttr, la_[i]);
        for (const auto& [id, at] : g_.node_attrs) {
            if (used_in(cur_.node_attrs, id)) continue;
            if (at.owner != cur_.nodes.at(a.source) || !tag_ok(a.tag, at.tag)) continue;
            cur_.node_attrs[la_[i]] = id;
            nattrs(i + 1);
            cur_.node_attrs.erase(la_[i]);
        }
    }

    void eattrs(std::size_t i) {
        if (i == lb_.size()) return values();
        const Arrow& a = L_.arrow(Sort::EdgeAttr, lb_[i]);
        for (const auto& [id, at] : g_.edge_attrs) {
            if (used_in(cur_.edge_attrs, id)) continue;
            if (at.owner != cur_.edges.at(a.source) || !tag_ok(a.tag, at.tag)) continue;
            cur_.edge_attrs[lb_[i]] = id;
            eattrs(i + 1);
            cur_.edge_attrs.erase(lb_[i]);
        }
    }

    void values() {
        Assignment sigma;
        auto bind = [&](const std::string& label, std::int64_t v) {
            auto [it, inserted] = sigma.emplace(label, v);
            return inserted || it->second == v;
        };
        for (const auto& [p, h] : cur_.node_attrs)
            if (!bind(L_.arrow(Sort::NodeAttr, p).target, g_.node_attrs.at(h).value)) return;
        for (const auto& [p, h] : cur_.edge_attrs)
            if (!bind(L_.arrow(Sort::EdgeAttr, p).target, g_.edge_attrs.at(h).value)) return;
        free_values(0, sigma);
    }

    void free_values(std::size_t i, Assignment& sigma) {
        if (i == free_.size()) {
            if (evaluate(rule_.formula, sigma)) {
                Match m = cur_;
                m.values = sigma;
                out_.push_back(std::move(m));
            }
            return;
        }
        for (std::int64_t v = -window_; v <= window_; ++v) {
            sigma[free_[i]] = v;
            free_values(i + 1, sigma);
        }
        sigma.erase(free_[i]);
    }
};

}  // namespace

std::vector<Match> find_matches(const Rule& rule, const Graph& g, std::int64_t window) {
    return Matcher(rule, g, window).run();
}

// ---------------------------------------------------------------------------
// Rule application

std::optional<Step> apply(const Rule& rule, const Graph& g, const Match& m) {
    const EGraph& L = *rule.lhs;
    const EGraph& K = *rule.interface;
    const EGraph& R = *rule.rhs;

    std::set<std::string> del_nodes, del_edges, del_nattrs, del_eattrs;
    for (const auto& n : L.nodes())
        if (!K.contains(Sort::Node, n)) del_nodes.insert(m.nodes.at(n));
    for (const auto& [e, a] : L.edges())
        if (!K.contains(Sort::Edge, e)) del_edges.insert(m.edges.at(e));
    for (const auto& [e, a] : L.node_attrs())
        if (!K.contains(Sort::NodeAttr, e)) del_nattrs.insert(m.node_attrs.at(e));
    for (const auto& [e, a] : L.edge_attrs())
        if (!K.contains(Sort::EdgeAttr, e)) del_eattrs.insert(m.edge_attrs.at(e));

    // Nothing may be left pointing at a deleted element.
    for (const auto& [id, st] : g.edges)
        if ((del_nodes.count(st.first) || del_nodes.count(st.second)) && !del_edges.count(id)) return std::nullopt;
    for (const auto& [id, a] : g.node_attrs)
        if (del_nodes.count(a.owner) && !del_nattrs.count(id)) return std::nullopt;
    for (const auto& [id, a] : g.edge_attrs)
        if (del_edges.count(a.owner) && !del_eattrs.count(id)) return std::nullopt;

    Step s;
    s.rule = rule.name;
    s.input = g;
    s.match = m;
    Graph& h = s.output;
    h = g;
    for (const auto& n : del_nodes) h.nodes.erase(n);
    for (const auto& e : del_edges) h.edges.erase(e);
    for (const auto& e : del_nattrs) h.node_attrs.erase(e);
    for (const auto& e : del_eattrs) h.edge_attrs.erase(e);
    for (const auto& n : h.nodes) s.preserved.insert({0, n});
    for (const auto& [e, st] : h.edges) s.preserved.insert({1, e});
    for (const auto& [e, a] : h.node_attrs) s.preserved.insert({2, e});
    for (const auto& [e, a] : h.edge_attrs) s.preserved.insert({3, e});

    auto fresh = [&h] { return "+" + std::to_string(h.next_id++); };
    std::map<std::string, std::string> node_of, edge_of;
    for (const auto& n : R.nodes()) node_of[n] = K.contains(Sort::Node, n) ? m.nodes.at(n) : "";
    for (auto& [n, img] : node_of) {
        if (!img.empty()) continue;
        img = fresh();
        h.nodes.insert(img);
    }
    for (const auto& [e, a] : R.edges()) {
        if (K.contains(Sort::Edge, e)) {
            edge_of[e] = m.edges.at(e);
            continue;
        }
        edge_of[e] = fresh();
        h.edges[edge_of[e]] = {node_of.at(a.source), node_of.at(a.target)};
    }
    for (const auto& [e, a] : R.node_attrs())
        if (!K.contains(Sort::NodeAttr, e)) h.node_attrs[fresh()] = Attr{node_of.at(a.source), m.values.at(a.target), a.tag};
    for (const auto& [e, a] : R.edge_attrs())
        if (!K.contains(Sort::EdgeAttr, e)) h.edge_attrs[fresh()] = Attr{edge_of.at(a.source), m.values.at(a.target), a.tag};
    return s;
}

std::vector<Step> derivations(const Rule& rule, const Graph& g, std::int64_t window) {
    std::vector<Step> out;
    for (const auto& m : find_matches(rule, g, window))
        if (auto s = apply(rule, g, m)) out.push_back(std::move(*s));
    return out;
}

// ---------------------------------------------------------------------------
// Isomorphism

namespace {

using AttrBag = std::multiset<std::pair<std::int64_t, std::optional<std::string>>>;

class IsoSearch {
public:
    IsoSearch(const Graph& a, const Graph& b, const std::set<Key>& fixed) : a_(a), b_(b), fixed_(fixed) {
        an_.assign(a.nodes.begin(), a.nodes.end());
        for (const auto& [e, st] : a.edges) ae_.push_back(e);
    }

    bool run() {
        if (a_.nodes.size() != b_.nodes.size() || a_.edges.size() != b_.edges.size() ||
            a_.node_attrs.size() != b_.node_attrs.size() || a_.edge_attrs.size() != b_.edge_attrs.size())
            return false;
        for (const auto& [sort, id] : fixed_) {
            if (sort == 2 && (!a_.node_attrs.count(id) || !b_.node_attrs.count(id) ||
                              !(a_.node_attrs.at(id) == b_.node_attrs.at(id))))
                return false;
            if (sort == 3 && (!a_.edge_attrs.count(id) || !b_.edge_attrs.count(id) ||
                              !(a_.edge_attrs.at(id) == b_.edge_attrs.at(id))))
                return false;
        }
        return nodes(0);
    }

private:
    const Graph& a_;
    const Graph& b_;
    const std::set<Key>& fixed_;
    std::vector<std::string> an_, ae_;
    std::map<std::string, std::string> nmap_, emap_;
    std::set<std::string> nused_, eused_;

    bool nodes(std::size_t i) {
        if (i == an_.size()) return edges(0);
        const std::string& n = an_[i];
        auto try_image = [&](const std::string& img) {
            if (!b_.nodes.count(img) || nused_.count(img)) return false;
            nmap_[n] = img;
            nused_.insert(img);
            bool ok = nodes(i + 1);
            nused_.erase(img);
            nmap_.erase(n);
            return ok;
        };
        if (fixed_.count({0, n})) return try_image(n);
        for (const auto& img : b_.nodes)
            if (try_image(img)) return true;
        return false;
    }

    bool edges(std::size_t i) {
        if (i == ae_.size()) return attrs();
        const std::string& e = ae_[i];
        const auto& st = a_.edges.at(e);
        auto try_image = [&](const std::string& img) {
            auto it = b_.edges.find(img);
            if (it == b_.edges.end() || eused_.count(img)) return false;
            if (it->second.first != nmap_.at(st.first) || it->second.second != nmap_.at(st.second)) return false;
            emap_[e] = img;
            eused_.insert(img);
            bool ok = edges(i + 1);
            eused_.erase(img);
            emap_.erase(e);
            return ok;
        };
        if (fixed_.count({1, e})) return try_image(e);
        for (const auto& [img, unused] : b_.edges)
            if (try_image(img)) return true;
        return false;
    }

    // Attributes are interchangeable once their owners are fixed, so compare
    // the bags of (value, tag) per owner, leaving out the pinned ones.
    bool attrs() const {
        auto bags = [&](const std::map<std::string, Attr>& attrs, int sort, const std::map<std::string, std::string>* m) {
            std::map<std::string, AttrBag> out;
            for (const auto& [id, a] : attrs) {
                if (fixed_.count({sort, id})) continue;
                out[m ? m->at(a.owner) : a.owner].insert({a.value, a.tag});
            }
            return out;
        };
        return bags(a_.node_attrs, 2, &nmap_) == bags(b_.node_attrs, 2, nullptr) &&
               bags(a_.edge_attrs, 3, &emap_) == bags(b_.edge_attrs, 3, nullptr);
    }
};

}  // namespace

bool isomorphic(const Graph& a, const Graph& b, const std::set<Key>& fixed) { return IsoSearch(a, b, fixed).run(); }

// ---------------------------------------------------------------------------
// Direct confluence

ConfluenceCheck directly_confluent(const Rule& r1, const Step& s1, const Rule& r2, const Step& s2,
                                   std::int64_t window) {
    std::set<Key> z;
    std::set_intersection(s1.preserved.begin(), s1.preserved.end(), s2.preserved.begin(), s2.preserved.end(),
                          std::inserter(z, z.end()));
    auto keeps = [&z](const Step& t) { return std::includes(t.preserved.begin(), t.preserved.end(), z.begin(), z.end()); };

    ConfluenceCheck out;
    std::vector<Step> c1, c2;
    for (auto& t : derivations(r2, s1.output, window)) {
        out.x1.push_back(t.output);
        if (keeps(t)) c1.push_back(std::move(t));
    }
    for (auto& t : derivations(r1, s2.output, window)) {
        out.x2.push_back(t.output);
        if (keeps(t)) c2.push_back(std::move(t));
    }
    for (const auto& a : c1)
        for (const auto& b : c2)
            if (isomorphic(a.output, b.output, z)) {
                out.confluent = true;
                return out;
            }
    return out;
}

// ---------------------------------------------------------------------------
// Random hosts

Graph random_host(std::mt19937_64& rng, const HostShape& shape) {
    auto pick = [&rng](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    Graph g;
    const std::size_t n = pick(1, std::max<std::size_t>(1, shape.max_nodes));
    std::vector<std::string> nodes;
    for (std::size_t i = 0; i < n; ++i) {
        nodes.push_back("n" + std::to_string(i));
        g.nodes.insert(nodes.back());
    }
    std::vector<std::string> edges;
    const std::size_t ne = pick(0, shape.max_edges);
    for (std::size_t i = 0; i < ne; ++i) {
        edges.push_back("e" + std::to_string(i));
        g.edges[edges.back()] = {nodes[pick(0, n - 1)], nodes[pick(0, n - 1)]};
    }
    const std::size_t na = pick(0, shape.max_attrs);
    std::uniform_int_distribution<std::int64_t> value(shape.min_value, shape.max_value);
    for (std::size_t i = 0; i < na; ++i) {
        // Mostly node attributes; edge attributes only when edges exist.
        if (!edges.empty() && pick(0, 3) == 0)
            g.edge_attrs["b" + std::to_string(i)] = Attr{edges[pick(0, edges.size() - 1)], value(rng), std::nullopt};
        else
            g.node_attrs["a" + std::to_string(i)] = Attr{nodes[pick(0, n - 1)], value(rng), std::nullopt};
    }
    return g;
}

// ---------------------------------------------------------------------------
// Bridge

SymbolicGraph to_symbolic(const Graph& g) {
    EGraph e;
    for (const auto& n : g.nodes) e.add_node(n);
    for (const auto& [id, st] : g.edges) e.add_edge(id, st.first, st.second);
    auto label = [&e](std::int64_t v) {
        std::string c = constant_name(v);
        if (!e.contains(Sort::Label, c)) e.add_label(c);
        return c;
    };
    for (const auto& [id, a] : g.node_attrs) e.add_node_attr(id, a.owner, label(a.value), a.tag);
    for (const auto& [id, a] : g.edge_attrs) e.add_edge_attr(id, a.owner, label(a.value), a.tag);
    SymbolicGraph sg;
    sg.graph = share(std::move(e));
    sg.grounded = true;
    sg.formula = constant_bindings(*sg.graph);
    return sg;
}

sygra::Match to_symbolic_match(const Rule& rule, const Graph& g, const Match& m) {
    std::set<std::int64_t> values;
    for (const auto& [l, v] : m.values) values.insert(v);
    sygra::Match out;
    out.host = materialize(to_symbolic(g), values);
    out.morphism = Morphism{rule.lhs, out.host.graph, {}};
    out.morphism.map(Sort::Node) = m.nodes;
    out.morphism.map(Sort::Edge) = m.edges;
    out.morphism.map(Sort::NodeAttr) = m.node_attrs;
    out.morphism.map(Sort::EdgeAttr) = m.edge_attrs;
    for (const auto& [l, v] : m.values) out.morphism.map(Sort::Label)[l] = constant_name(v);
    return out;
}

// ---------------------------------------------------------------------------
// Completeness fuzzing

namespace {

std::string describe(const Match& m) {
    std::ostringstream os;
    const char* sep = "";
    for (const auto* part : {&m.nodes, &m.edges, &m.node_attrs, &m.edge_attrs})
        for (const auto& [k, v] : *part) {
            os << sep << k << "->" << v;
            sep = " ";
        }
    for (const auto& [k, v] : m.values) {
        os << sep << k << "=" << v;
        sep = " ";
    }
    return os.str();
}

}  // namespace

FuzzReport completeness_fuzz(const std::vector<Rule>& pool, Solver& solver, const FuzzOptions& options,
                             const ClassifyOptions& classify) {
    if (pool.empty()) throw InvalidInput("empty rule pool");
    auto rule_named = [&pool](const std::string& name) -> const Rule& {
        for (const auto& r : pool)
            if (r.name == name) return r;
        throw InvalidInput("unknown rule '" + name + "'");
    };
    std::vector<std::pair<const Rule*, const Rule*>> pairs;
    if (options.pairs.empty()) {
        for (const auto& a : pool)
            for (const auto& b : pool) pairs.push_back({&a, &b});
    } else {
        for (const auto& [a, b] : options.pairs) pairs.push_back({&rule_named(a), &rule_named(b)});
    }

    std::map<std::pair<std::string, std::string>, PairReport> reports;
    std::mt19937_64 rng(options.seed);
    FuzzReport rep;
    for (std::size_t t = 0; t < options.trials; ++t) {
        ++rep.trials;
        const Graph host = random_host(rng, options.shape);
        const auto [r1, r2] = pairs[std::uniform_int_distribution<std::size_t>(0, pairs.size() - 1)(rng)];
        PairTally& tally = rep.per_pair[{r1->name, r2->name}];
        ++tally.trials;
        const auto steps1 = derivations(*r1, host);
        const auto steps2 = derivations(*r2, host);
        for (const auto& s1 : steps1) {
            for (const auto& s2 : steps2) {
                ++rep.derivation_pairs;
                ++tally.derivation_pairs;
                if (directly_confluent(*r1, s1, *r2, s2).confluent) continue;
                ++rep.nonconfluent;
                ++tally.nonconfluent;

                auto key = std::make_pair(r1->name, r2->name);
                auto it = reports.find(key);
                if (it == reports.end()) it = reports.emplace(key, classify_pair(*r1, *r2, solver, classify)).first;

                auto fail = [&](const std::string& why) {
                    ++rep.violations;
                    rep.details.push_back(r1->name + "/" + r2->name + " on " + to_string(host) + " [" +
                                          describe(s1.match) + "] [" + describe(s2.match) + "]: " + why);
                };
                auto [a, b] = align_matches(to_symbolic_match(*r1, host, s1.match),
                                            to_symbolic_match(*r2, host, s2.match));
                ApplyResult g1 = apply_symbolic(*r1, a);
                ApplyResult g2 = apply_symbolic(*r2, b);
                if (!g1.derivation || !g2.derivation) {
                    fail("symbolic step not applicable");
                    continue;
                }
                bool covered = false;
                for (const auto& e : it->second.entries) {
                    if (e.classification != Classification::NcpPair || !e.d1 || !e.d2) continue;
                    if (embeds(*e.d1, *e.d2, *g1.derivation, *g2.derivation, solver)) {
                        covered = true;
                        break;
                    }
                }
                if (covered) ++tally.covered;
                else fail("no critical pair embeds");
            }
        }
    }
    return rep;
}

}  // namespace sygra::oracle
