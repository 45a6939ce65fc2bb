#include "sygra/category.hpp"

#include <numeric>

#include "sygra/error.hpp"

namespace sygra {

std::string_view to_string(GluingViolation::Kind k) {
    return k == GluingViolation::Kind::Dangling ? "dangling" : "identification";
}

std::string fresh_variant(const std::string& id, const std::function<bool(const std::string&)>& taken) {
    if (!taken(id)) return id;
    std::size_t cut = id.size();
    while (cut > 0 && id[cut - 1] == '\'') --cut;
    const std::string base = id.substr(0, cut), primes = id.substr(cut);
    for (std::size_t k = 1;; ++k) {
        std::string cand = base + "_" + std::to_string(k) + primes;
        if (!taken(cand)) return cand;
    }
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

Cospan pushout(const Span& span) {
    const GraphRef& B = span.left.cod;
    const GraphRef& C = span.right.cod;
    if (span.left.dom.get() != span.apex.get() && !(*span.left.dom == *span.apex))
        throw InvalidInput("pushout: left leg does not start at the apex");
    if (span.right.dom.get() != span.apex.get() && !(*span.right.dom == *span.apex))
        throw InvalidInput("pushout: right leg does not start at the apex");

    EGraph P;
    Morphism fb{B, nullptr, {}};
    Morphism gc{C, nullptr, {}};

    // Endpoint sorts come first in kAllSorts order, so arrows can be resolved
    // through the already-built maps.
    for (Sort s : kAllSorts) {
        const auto bids = B->ids(s);
        const auto cids = C->ids(s);
        std::map<std::string, std::size_t> bi, ci;
        for (std::size_t i = 0; i < bids.size(); ++i) bi[bids[i]] = i;
        for (std::size_t i = 0; i < cids.size(); ++i) ci[cids[i]] = bids.size() + i;
        UnionFind uf(bids.size() + cids.size());
        for (const auto& a : span.apex->ids(s)) uf.unite(bi.at(span.left.at(s, a)), ci.at(span.right.at(s, a)));

        std::map<std::size_t, std::string> name;  // class root -> id in P
        std::set<std::string> used;
        for (std::size_t i = 0; i < cids.size(); ++i) {
            auto root = uf.find(bids.size() + i);
            if (!name.count(root)) {
                name[root] = cids[i];
                used.insert(cids[i]);
            }
        }
        for (std::size_t i = 0; i < bids.size(); ++i) {
            auto root = uf.find(i);
            if (name.count(root)) continue;
            name[root] = fresh_variant(bids[i], [&](const std::string& c) { return used.count(c) > 0; });
            used.insert(name[root]);
        }

        for (std::size_t i = 0; i < bids.size(); ++i) fb.map(s)[bids[i]] = name.at(uf.find(i));
        for (std::size_t i = 0; i < cids.size(); ++i) gc.map(s)[cids[i]] = name.at(uf.find(bids.size() + i));

        if (!is_arrow(s)) {
            for (const auto& [root, id] : name) P.add(s, id);
            continue;
        }
        const Sort src = source_sort(s), tgt = target_sort(s);
        std::map<std::string, Arrow> arrows;
        for (const auto& id : cids) {
            const Arrow& a = C->arrow(s, id);
            arrows[gc.map(s).at(id)] = Arrow{gc.map(src).at(a.source), gc.map(tgt).at(a.target), a.tag};
        }
        for (const auto& id : bids) {
            const Arrow& a = B->arrow(s, id);
            auto& slot = arrows[fb.map(s).at(id)];
            if (slot.source.empty()) {
                slot = Arrow{fb.map(src).at(a.source), fb.map(tgt).at(a.target), a.tag};
            } else if (!slot.tag) {
                slot.tag = a.tag;
            }
        }
        for (const auto& [id, a] : arrows) P.add(s, id, a);
    }

    GraphRef Pref = share(std::move(P));
    fb.cod = Pref;
    gc.cod = Pref;
    return Cospan{Pref, std::move(fb), std::move(gc)};
}

std::variant<Complement, GluingViolation> pushout_complement(const Morphism& l, const Morphism& m) {
    const GraphRef& K = l.dom;
    const GraphRef& L = l.cod;
    const GraphRef& G = m.cod;
    if (!(*m.dom == *L)) throw InvalidInput("pushout complement: match does not start at the rule's left side");

    // Host elements matched by deleted / preserved pattern elements.
    std::array<std::set<std::string>, 5> deleted, kept;
    for (Sort s : kAllSorts) {
        std::set<std::string> in_k;
        for (const auto& [k, img] : l.map(s)) in_k.insert(img);
        for (const auto& id : L->ids(s)) (in_k.count(id) ? kept : deleted)[index_of(s)].insert(m.at(s, id));
    }
    for (Sort s : kAllSorts) {
        for (const auto& h : deleted[index_of(s)]) {
            if (kept[index_of(s)].count(h))
                return GluingViolation{GluingViolation::Kind::Identification, s, h,
                                       "deleted and preserved pattern elements share host " +
                                           std::string(sort_name(s)) + " '" + h + "'"};
        }
    }
    // Dangling: surviving arrows attached to a deleted element.
    for (Sort s : {Sort::Edge, Sort::NodeAttr, Sort::EdgeAttr}) {
        for (const auto& [id, a] : G->arrows(s)) {
            if (deleted[index_of(s)].count(id)) continue;
            const Sort src = source_sort(s), tgt = target_sort(s);
            const bool src_gone = deleted[index_of(src)].count(a.source) > 0;
            const bool tgt_gone = deleted[index_of(tgt)].count(a.target) > 0;
            if (src_gone || tgt_gone)
                return GluingViolation{GluingViolation::Kind::Dangling, s, id,
                                       std::string(sort_name(s)) + " '" + id + "' would dangle at deleted " +
                                           std::string(sort_name(src_gone ? src : tgt)) + " '" +
                                           (src_gone ? a.source : a.target) + "'"};
        }
    }

    EGraph D = *G;
    for (Sort s : {Sort::EdgeAttr, Sort::NodeAttr, Sort::Edge, Sort::Label, Sort::Node})
        for (const auto& h : deleted[index_of(s)]) D.remove(s, h);
    GraphRef Dref = share(std::move(D));

    Morphism k_to_d{K, Dref, {}};
    for (Sort s : kAllSorts)
        for (const auto& [k, lk] : l.map(s)) k_to_d.map(s)[k] = m.at(s, lk);
    return Complement{Dref, std::move(k_to_d), inclusion(Dref, G)};
}

Span pullback(const Cospan& cospan) {
    const GraphRef& B = cospan.left.dom;
    const GraphRef& C = cospan.right.dom;
    EGraph A;
    Morphism pb{nullptr, B, {}};
    Morphism pc{nullptr, C, {}};
    // (b, c) -> apex id, per sort
    std::array<std::map<std::pair<std::string, std::string>, std::string>, 5> pair_id;

    for (Sort s : kAllSorts) {
        std::map<std::string, std::vector<std::string>> by_image;
        for (const auto& c : C->ids(s)) by_image[cospan.right.at(s, c)].push_back(c);
        std::vector<std::pair<std::string, std::string>> pairs;
        std::map<std::string, int> b_uses;
        for (const auto& b : B->ids(s)) {
            auto it = by_image.find(cospan.left.at(s, b));
            if (it == by_image.end()) continue;
            for (const auto& c : it->second) {
                pairs.emplace_back(b, c);
                ++b_uses[b];
            }
        }
        std::set<std::string> used;
        for (const auto& [b, c] : pairs) {
            std::string want = b_uses[b] == 1 ? b : (b == c ? b : b + "_" + c);
            if (!is_identifier(want) && s == Sort::Label) want = b;
            std::string id = fresh_variant(want, [&](const std::string& x) { return used.count(x) > 0; });
            used.insert(id);
            pair_id[index_of(s)][{b, c}] = id;
            pb.map(s)[id] = b;
            pc.map(s)[id] = c;
            if (!is_arrow(s)) {
                A.add(s, id);
            } else {
                const Arrow& ab = B->arrow(s, b);
                const Arrow& ac = C->arrow(s, c);
                const auto& src = pair_id[index_of(source_sort(s))].at({ab.source, ac.source});
                const auto& tgt = pair_id[index_of(target_sort(s))].at({ab.target, ac.target});
                A.add(s, id, Arrow{src, tgt, ab.tag ? ab.tag : ac.tag});
            }
        }
    }
    GraphRef Aref = share(std::move(A));
    pb.dom = Aref;
    pc.dom = Aref;
    return Span{Aref, std::move(pb), std::move(pc)};
}

SymbolicCospan symbolic_pushout(const SymbolicSpan& span) {
    Cospan co = pushout(Span{span.apex.graph, span.left, span.right});
    SymbolicGraph P;
    P.graph = co.target;
    P.formula = conjoin({rename(span.b.formula, co.left.label_map()), rename(span.c.formula, co.right.label_map())});
    P.fresh_counter = std::max(span.b.fresh_counter, span.c.fresh_counter);
    return SymbolicCospan{std::move(P), std::move(co.left), std::move(co.right)};
}

SymbolicSpan symbolic_pullback(const SymbolicGraph& b, const SymbolicGraph& c, const SymbolicCospan& cospan) {
    Span sp = pullback(Cospan{cospan.target.graph, cospan.left, cospan.right});
    // Translate both formulas into the target's vocabulary, then back along
    // the apex -> target map.
    Formula joined =
        disjoin({rename(b.formula, cospan.left.label_map()), rename(c.formula, cospan.right.label_map())});
    Renaming back;
    std::vector<Formula> equalities;
    for (const auto& [a, bl] : sp.left.label_map()) {
        const std::string& p = cospan.left.at(Sort::Label, bl);
        auto [it, inserted] = back.emplace(p, a);
        if (!inserted) equalities.push_back(Formula::eq(Term::var(it->second), Term::var(a)));
    }
    std::vector<std::string> hidden;
    for (const auto& v : free_vars(joined))
        if (!back.count(v)) hidden.push_back(v);
    // Bound names must not clash with apex names after renaming.
    Renaming bound_rename;
    std::set<std::string> taken(sp.apex->labels().begin(), sp.apex->labels().end());
    for (auto& h : hidden) {
        std::string fresh = fresh_variant(h, [&](const std::string& x) { return taken.count(x) > 0; });
        taken.insert(fresh);
        bound_rename[h] = fresh;
        h = fresh;
    }
    Renaming all = back;
    all.insert(bound_rename.begin(), bound_rename.end());
    Formula body = rename(joined, all);
    equalities.insert(equalities.begin(), Formula::exists(hidden, body));

    SymbolicGraph A;
    A.graph = sp.apex;
    A.formula = conjoin(equalities);
    A.fresh_counter = cospan.target.fresh_counter;
    return SymbolicSpan{std::move(A), std::move(sp.left), std::move(sp.right), b, c};
}

}  // namespace sygra
