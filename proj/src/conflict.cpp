#include "sygra/conflict.hpp"

#include "sygra/error.hpp"

namespace sygra {

std::string_view to_string(ConfluenceMode m) { return m == ConfluenceMode::Symbolic ? "symbolic" : "narrowing"; }

std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::FormulaUnsatisfiable: return "FormulaUnsatisfiable";
        case Classification::ParallelIndependent: return "ParallelIndependent";
        case Classification::DirectlyConfluent: return "DirectlyConfluent";
        case Classification::NcpPair: return "NcpPair";
    }
    return "NcpPair";
}

std::optional<Classification> parse_classification(std::string_view s) {
    for (auto c : {Classification::FormulaUnsatisfiable, Classification::ParallelIndependent,
                   Classification::DirectlyConfluent, Classification::NcpPair})
        if (to_string(c) == s) return c;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Overlaps

namespace {

class OverlapEnumerator {
public:
    OverlapEnumerator(const Rule& r1, const Rule& r2) : r1_(r1), r2_(r2) {
        for (Sort s : kAllSorts)
            for (const auto& id : r1.lhs->ids(s)) order_.emplace_back(s, id);
    }

    std::vector<OverlapCandidate> run() {
        search(0);
        return std::move(out_);
    }

private:
    const Rule& r1_;
    const Rule& r2_;
    std::vector<std::pair<Sort, std::string>> order_;
    std::array<IdMap, 5> corr_{};
    std::array<std::set<std::string>, 5> used_{};
    std::vector<OverlapCandidate> out_;

    bool compatible(Sort s, const std::string& a, const std::string& b) const {
        if (!is_arrow(s)) return true;
        const Arrow& x = r1_.lhs->arrow(s, a);
        const Arrow& y = r2_.lhs->arrow(s, b);
        if (x.tag && y.tag && *x.tag != *y.tag) return false;
        const auto& src = corr_[index_of(source_sort(s))];
        const auto& tgt = corr_[index_of(target_sort(s))];
        auto si = src.find(x.source);
        auto ti = tgt.find(x.target);
        return si != src.end() && si->second == y.source && ti != tgt.end() && ti->second == y.target;
    }

    void search(std::size_t i) {
        if (i == order_.size()) {
            if (!corr_[index_of(Sort::Node)].empty()) emit();
            return;
        }
        const auto& [s, id] = order_[i];
        search(i + 1);
        for (const auto& other : r2_.lhs->ids(s)) {
            if (used_[index_of(s)].count(other) || !compatible(s, id, other)) continue;
            corr_[index_of(s)][id] = other;
            used_[index_of(s)].insert(other);
            search(i + 1);
            corr_[index_of(s)].erase(id);
            used_[index_of(s)].erase(other);
        }
    }

    void emit() {
        EGraph S;
        for (Sort s : kAllSorts)
            for (const auto& [a, _] : corr_[index_of(s)]) S.add(s, a, is_arrow(s) ? r1_.lhs->arrow(s, a) : Arrow{});
        GraphRef sref = share(std::move(S));
        Morphism to2{sref, r2_.lhs, corr_};
        Morphism to1 = inclusion(sref, r1_.lhs);
        // L1 is the preferred side for ids.
        Cospan co = pushout(Span{sref, to2, to1});
        OverlapCandidate c;
        c.context.graph = co.target;
        c.o1 = std::move(co.right);
        c.o2 = std::move(co.left);
        c.context.formula =
            conjoin({rename(r1_.formula, c.o1.label_map()), rename(r2_.formula, c.o2.label_map())});
        out_.push_back(std::move(c));
    }
};

}  // namespace

std::vector<OverlapCandidate> enumerate_overlaps(const Rule& r1, const Rule& r2, Solver* solver) {
    auto out = OverlapEnumerator(r1, r2).run();
    if (solver)
        for (auto& c : out) c.satisfiable = solver->check_sat(c.context.formula).verdict;
    return out;
}

// ---------------------------------------------------------------------------
// Parallel dependence

namespace {

void require_same_input(const Derivation& d1, const Derivation& d2) {
    if (!(*d1.input.graph == *d2.input.graph))
        throw InvalidInput("derivations do not share their input graph");
}

// First element of `m`'s image missing from `context`.
std::optional<std::pair<Sort, std::string>> lost_image(const Morphism& m, const EGraph& context) {
    for (Sort s : kAllSorts)
        for (const auto& [_, img] : m.map(s))
            if (!context.contains(s, img)) return std::make_pair(s, img);
    return std::nullopt;
}

}  // namespace

DependenceResult parallel_dependence(const Derivation& d1, const Derivation& d2) {
    require_same_input(d1, d2);
    DependenceResult res;
    // i: L1 -> D2 with m1 = g2 . i exists iff m1 lands inside D2 (g2 is an
    // inclusion); likewise j.
    if (auto lost = lost_image(d1.match, *d2.context.graph))
        res.evidence.push_back({"i", d2.rule.name, lost->first, lost->second});
    if (auto lost = lost_image(d2.match, *d1.context.graph))
        res.evidence.push_back({"j", d1.rule.name, lost->first, lost->second});
    res.dependent = !res.evidence.empty();
    return res;
}

std::pair<Match, Match> align_matches(const Match& a, const Match& b) {
    if (*a.host.graph == *b.host.graph) return {a, retarget(b, a.host)};
    SymbolicGraph host = a.host;
    EGraph g = *a.host.graph;
    for (const auto& l : b.host.graph->labels()) {
        if (g.contains(Sort::Label, l)) continue;
        g.add_label(l);
    }
    host.graph = share(std::move(g));
    host.fresh_counter = std::max(a.host.fresh_counter, b.host.fresh_counter);
    if (host.grounded) host.formula = constant_bindings(*host.graph);
    return {retarget(a, host), retarget(b, host)};
}

// ---------------------------------------------------------------------------
// Direct confluence

namespace {

struct Closer {
    Derivation d;
    /// Z -> X, when the tracked elements survive.
    std::optional<std::array<IdMap, 5>> tracked;
};

std::vector<Closer> closers(const Rule& rule, const SymbolicGraph& host, const Morphism& z_to_h, Solver& solver,
                            const ConfluenceOptions& options, bool& indeterminate) {
    MatchSet ms = options.mode == ConfluenceMode::Symbolic ? find_symbolic_matches(rule, host, solver)
                                                            : find_narrowing_matches(rule, host, options.narrowing);
    if (ms.indeterminate) indeterminate = true;
    std::vector<Closer> out;
    for (const auto& m : ms.matches) {
        ApplyResult r = options.mode == ConfluenceMode::Symbolic ? apply_symbolic(rule, m)
                                                                  : apply_narrowing(rule, m, solver);
        if (r.outcome == ApplyOutcome::Indeterminate) indeterminate = true;
        if (r.outcome != ApplyOutcome::Ok) continue;
        Closer c{std::move(*r.derivation), std::nullopt};
        std::array<IdMap, 5> zx{};
        bool ok = true;
        for (Sort s : kAllSorts) {
            for (const auto& [z, h] : z_to_h.map(s)) {
                if (!c.d.context.graph->contains(s, h)) {
                    ok = false;
                    break;
                }
                zx[index_of(s)][z] = c.d.d_to_h.at(s, h);
            }
            if (!ok) break;
        }
        if (ok) c.tracked = std::move(zx);
        out.push_back(std::move(c));
    }
    return out;
}

// X1 -> X2 pins induced by the two tracked maps; nullopt if contradictory.
std::optional<std::array<IdMap, 5>> pins_from(const std::array<IdMap, 5>& a, const std::array<IdMap, 5>& b) {
    std::array<IdMap, 5> pins{};
    for (Sort s : kAllSorts) {
        std::set<std::string> targets;
        for (const auto& [z, x1] : a[index_of(s)]) {
            const std::string& x2 = b[index_of(s)].at(z);
            auto [it, inserted] = pins[index_of(s)].emplace(x1, x2);
            if (!inserted && it->second != x2) return std::nullopt;
            if (inserted && !targets.insert(x2).second) return std::nullopt;
        }
    }
    return pins;
}

}  // namespace

ConfluenceResult check_direct_confluence(const Derivation& d1, const Derivation& d2, Solver& solver,
                                         const ConfluenceOptions& options) {
    require_same_input(d1, d2);
    ConfluenceResult res;
    Span z = pullback(Cospan{d1.input.graph, d1.d_to_g, d2.d_to_g});
    const Morphism t1 = compose(d1.d_to_h, z.left);
    const Morphism t2 = compose(d2.d_to_h, z.right);

    auto c1 = closers(d2.rule, d1.output, t1, solver, options, res.indeterminate);
    auto c2 = closers(d1.rule, d2.output, t2, solver, options, res.indeterminate);
    res.closers1 = c1.size();
    res.closers2 = c2.size();

    for (const auto& a : c1) {
        if (!a.tracked) continue;
        for (const auto& b : c2) {
            if (!b.tracked) continue;
            auto pins = pins_from(*a.tracked, *b.tracked);
            if (!pins) continue;
            IsoResult iso = symbolic_iso(a.d.output, b.d.output, solver, IsoOptions{*pins});
            if (iso.indeterminate) res.indeterminate = true;
            if (iso.witness) {
                res.witness = ConfluenceWitness{a.d, b.d, z.apex, std::move(*iso.witness)};
                res.indeterminate = false;
                return res;
            }
        }
    }
    if (options.check_untracked) {
        for (const auto& a : c1) {
            for (const auto& b : c2) {
                if (symbolic_iso(a.d.output, b.d.output, solver).witness) {
                    res.untracked_confluent = true;
                    return res;
                }
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Classification

PairReport classify_pair(const Rule& r1, const Rule& r2, Solver& solver, const ClassifyOptions& options) {
    const SolverStats before = solver.stats();
    PairReport rep;
    rep.rule1 = r1.name;
    rep.rule2 = r2.name;
    for (auto& cand : enumerate_overlaps(r1, r2, &solver)) {
        OverlapEntry e;
        e.overlap = std::move(cand);
        if (e.overlap.satisfiable == Verdict::Unsat) {
            e.classification = Classification::FormulaUnsatisfiable;
            rep.entries.push_back(std::move(e));
            continue;
        }
        if (e.overlap.satisfiable == Verdict::Unknown) e.indeterminate = true;
        ApplyResult a1 = apply_symbolic(r1, Match{e.overlap.context, e.overlap.o1});
        ApplyResult a2 = apply_symbolic(r2, Match{e.overlap.context, e.overlap.o2});
        if (!a1.derivation || !a2.derivation) {
            ++rep.gluing_skipped;
            continue;
        }
        e.d1 = std::move(a1.derivation);
        e.d2 = std::move(a2.derivation);
        e.dependence = parallel_dependence(*e.d1, *e.d2);
        if (!e.dependence.dependent) {
            e.classification = Classification::ParallelIndependent;
            rep.entries.push_back(std::move(e));
            continue;
        }
        ConfluenceResult c = check_direct_confluence(*e.d1, *e.d2, solver, options.confluence);
        if (c.witness) {
            e.classification = Classification::DirectlyConfluent;
            e.witness = std::move(c.witness);
        } else {
            e.classification = Classification::NcpPair;
            e.indeterminate = e.indeterminate || c.indeterminate;
            e.untracked_confluent = c.untracked_confluent;
        }
        rep.entries.push_back(std::move(e));
    }
    for (const auto& e : rep.entries)
        if (e.classification == Classification::NcpPair) rep.conflicting = true;
    const SolverStats& after = solver.stats();
    rep.stats.queries = after.queries - before.queries;
    rep.stats.sat = after.sat - before.sat;
    rep.stats.unsat = after.unsat - before.unsat;
    rep.stats.unknown = after.unknown - before.unknown;
    rep.stats.escalated = after.escalated - before.escalated;
    return rep;
}

// ---------------------------------------------------------------------------
// Embedding

namespace {

bool put(IdMap& m, const std::string& k, const std::string& v) {
    auto [it, inserted] = m.emplace(k, v);
    return inserted || it->second == v;
}

// P -> H for one derivation column, forced by f on the context part and by
// the comatches on the created part.
std::optional<Morphism> column(const Derivation& k, const Derivation& g, const Morphism& f) {
    Morphism out{k.output.graph, g.output.graph, {}};
    for (Sort s : kAllSorts) {
        for (const auto& [d, p] : k.d_to_h.map(s)) {
            const std::string& img = f.at(s, d);
            auto h = g.d_to_h.find(s, img);
            if (!h || !put(out.map(s), p, *h)) return std::nullopt;
        }
        for (const auto& [r, p] : k.comatch.map(s))
            if (!put(out.map(s), p, g.comatch.at(s, r))) return std::nullopt;
        if (out.map(s).size() != k.output.graph->size(s)) return std::nullopt;
    }
    if (!is_valid_morphism(out)) return std::nullopt;
    return out;
}

}  // namespace

std::optional<Embedding> embeds(const Derivation& k1, const Derivation& k2, const Derivation& g1,
                                const Derivation& g2, Solver& solver) {
    if (k1.rule.name != g1.rule.name || k2.rule.name != g2.rule.name) return std::nullopt;
    require_same_input(k1, k2);
    require_same_input(g1, g2);

    Morphism f{k1.input.graph, g1.input.graph, {}};
    for (Sort s : kAllSorts) {
        for (const auto& [e, img] : k1.match.map(s))
            if (!put(f.map(s), img, g1.match.at(s, e))) return std::nullopt;
        for (const auto& [e, img] : k2.match.map(s))
            if (!put(f.map(s), img, g2.match.at(s, e))) return std::nullopt;
        if (f.map(s).size() != f.dom->size(s)) return std::nullopt;
    }
    if (!is_valid_morphism(f)) return std::nullopt;
    if (validate_symbolic_morphism(f, k1.input, g1.input, solver) != Validity::Valid) return std::nullopt;

    // The context of each SK derivation sits inside SK, so f restricts to it.
    auto g = column(k1, g1, f);
    auto h = column(k2, g2, f);
    if (!g || !h) return std::nullopt;
    if (validate_symbolic_morphism(*g, k1.output, g1.output, solver) != Validity::Valid) return std::nullopt;
    if (validate_symbolic_morphism(*h, k2.output, g2.output, solver) != Validity::Valid) return std::nullopt;
    return Embedding{std::move(f), std::move(*g), std::move(*h)};
}

}  // namespace sygra
