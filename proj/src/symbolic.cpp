#include "sygra/symbolic.hpp"

#include <algorithm>

#include "sygra/error.hpp"

namespace sygra {

std::string_view to_string(DerivationKind k) { return k == DerivationKind::Symbolic ? "symbolic" : "narrowing"; }

std::string_view to_string(ApplyOutcome o) {
    switch (o) {
        case ApplyOutcome::Ok: return "ok";
        case ApplyOutcome::Gluing: return "gluing";
        case ApplyOutcome::Inconsistent: return "inconsistent";
        case ApplyOutcome::Indeterminate: return "indeterminate";
    }
    return "ok";
}

// ---------------------------------------------------------------------------
// Rules

Rule Rule::make(std::string name, EGraph lhs, EGraph interface, EGraph rhs, Formula formula) {
    Rule r;
    r.name = std::move(name);
    lhs.validate();
    interface.validate();
    rhs.validate();
    r.lhs = share(std::move(lhs));
    r.interface = share(std::move(interface));
    r.rhs = share(std::move(rhs));
    r.l = inclusion(r.interface, r.lhs);
    r.r = inclusion(r.interface, r.rhs);
    r.formula = std::move(formula);
    r.validate();
    return r;
}

void Rule::validate() const {
    const std::string where = "rule '" + name + "': ";
    if (!lhs || !interface || !rhs) throw InvalidInput(where + "missing graph");
    if (!is_valid_morphism(l) || !is_valid_morphism(r)) throw InvalidInput(where + "span morphisms are not valid");
    if (!satisfies(l, InjectivitySpec::rule_morphism()) || !satisfies(r, InjectivitySpec::rule_morphism()))
        throw InvalidInput(where + "span morphisms must be injective, and bijective on label nodes");
    for (const auto& v : free_vars(formula))
        if (!lhs->contains(Sort::Label, v)) throw InvalidInput(where + "formula variable '" + v + "' is not a label");
}

std::vector<std::string> Rule::unattached_labels() const {
    const auto attached = lhs->attached_labels();
    std::vector<std::string> out;
    for (const auto& l : lhs->labels())
        if (!attached.count(l)) out.push_back(l);
    return out;
}

// ---------------------------------------------------------------------------
// Matching

Match retarget(const Match& m, const SymbolicGraph& host) {
    Match out{host, m.morphism};
    out.morphism.cod = host.graph;
    for (Sort s : kAllSorts)
        for (const auto& [_, y] : out.morphism.map(s))
            if (!host.graph->contains(s, y)) throw InvalidInput("retarget: host lacks '" + y + "'");
    return out;
}

Validity validate_symbolic_morphism(const Morphism& h, const SymbolicGraph& src, const SymbolicGraph& dst,
                                    Solver& solver) {
    return solver.check_implies(dst.formula, rename(src.formula, h.label_map())).validity;
}

namespace {

// E-graph matches of L without its unattached labels.
std::vector<Morphism> base_matches(const Rule& rule, const SymbolicGraph& host) {
    EGraph core = *rule.lhs;
    for (const auto& u : rule.unattached_labels()) core.remove(Sort::Label, u);
    auto ms = find_morphisms(share(std::move(core)), host.graph, InjectivitySpec::match());
    for (auto& m : ms) m.dom = rule.lhs;
    return ms;
}

void sort_matches(std::vector<Match>& ms) {
    std::stable_sort(ms.begin(), ms.end(),
                     [](const Match& a, const Match& b) { return a.morphism.maps < b.morphism.maps; });
}

// Calls fn for every choice of one option per slot.
template <typename T, typename Fn>
void for_each_product(const std::vector<std::vector<T>>& options, Fn&& fn) {
    std::vector<std::size_t> idx(options.size(), 0);
    for (const auto& o : options)
        if (o.empty()) return;
    for (;;) {
        std::vector<T> pick;
        for (std::size_t i = 0; i < options.size(); ++i) pick.push_back(options[i][idx[i]]);
        fn(pick);
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == options[k].size()) idx[k++] = 0;
        if (k == idx.size()) return;
    }
}

MatchSet grounded_symbolic_matches(const Rule& rule, const SymbolicGraph& host, Solver& solver) {
    MatchSet out;
    const auto unattached = rule.unattached_labels();
    const auto existing = constants_of(*host.graph);
    for (auto& base : base_matches(rule, host)) {
        Assignment sigma;
        for (const auto& [x, c] : base.label_map()) {
            auto v = constant_value(c);
            if (!v) throw InvalidInput("grounded host has non-constant label '" + c + "'");
            sigma[x] = *v;
        }
        std::vector<std::vector<std::int64_t>> options(unattached.size());
        if (!unattached.empty()) {
            std::vector<Formula> pinned{rule.formula};
            for (const auto& [x, v] : sigma) pinned.push_back(Formula::eq(Term::var(x), Term::constant(v)));
            SolverVerdict sv = solver.check_sat(conjoin(pinned), true);
            if (sv.verdict == Verdict::Unsat) continue;
            if (sv.verdict == Verdict::Unknown) ++out.indeterminate;
            for (std::size_t i = 0; i < unattached.size(); ++i) {
                std::set<std::int64_t> vals(existing);
                if (sv.model) {
                    auto it = sv.model->find(unattached[i]);
                    vals.insert(it == sv.model->end() ? 0 : it->second);
                }
                options[i].assign(vals.begin(), vals.end());
            }
        }
        for_each_product(options, [&](const std::vector<std::int64_t>& pick) {
            Assignment full = sigma;
            for (std::size_t i = 0; i < unattached.size(); ++i) full[unattached[i]] = pick[i];
            bool holds = false;
            try {
                holds = evaluate(rule.formula, full);
            } catch (const InvalidInput&) {
                ++out.indeterminate;
            }
            if (!holds) return;
            SymbolicGraph h = materialize(host, std::set<std::int64_t>(pick.begin(), pick.end()));
            Morphism m = base;
            m.cod = h.graph;
            for (std::size_t i = 0; i < unattached.size(); ++i)
                m.map(Sort::Label)[unattached[i]] = constant_name(pick[i]);
            out.matches.push_back(Match{std::move(h), std::move(m)});
        });
    }
    sort_matches(out.matches);
    return out;
}

}  // namespace

MatchSet find_symbolic_matches(const Rule& rule, const SymbolicGraph& host, Solver& solver) {
    if (host.grounded) return grounded_symbolic_matches(rule, host, solver);
    MatchSet out;
    const auto unattached = rule.unattached_labels();
    const auto labels = host.graph->ids(Sort::Label);
    std::vector<std::vector<std::string>> options(unattached.size(), labels);
    for (auto& base : base_matches(rule, host)) {
        for_each_product(options, [&](const std::vector<std::string>& pick) {
            Morphism m = base;
            for (std::size_t i = 0; i < unattached.size(); ++i) m.map(Sort::Label)[unattached[i]] = pick[i];
            Validity v = solver.check_implies(host.formula, rename(rule.formula, m.label_map())).validity;
            if (v == Validity::Unknown) ++out.indeterminate;
            if (v == Validity::Valid) out.matches.push_back(Match{host, std::move(m)});
        });
    }
    sort_matches(out.matches);
    return out;
}

MatchSet find_narrowing_matches(const Rule& rule, const SymbolicGraph& host, const NarrowingOptions& options) {
    MatchSet out;
    const auto unattached = rule.unattached_labels();
    // Empty string stands for "fresh".
    std::vector<std::string> targets{""};
    for (const auto& l : host.graph->ids(Sort::Label)) targets.push_back(l);
    std::vector<std::vector<std::string>> choice(unattached.size(), targets);
    for (auto& base : base_matches(rule, host)) {
        for_each_product(choice, [&](const std::vector<std::string>& pick) {
            const auto fresh = static_cast<std::size_t>(std::count(pick.begin(), pick.end(), std::string()));
            if (fresh > options.max_fresh) return;
            SymbolicGraph h = host;
            Morphism m = base;
            if (fresh > 0) {
                EGraph g = *host.graph;
                for (std::size_t i = 0; i < unattached.size(); ++i) {
                    if (!pick[i].empty()) continue;
                    std::string v = h.fresh_var();
                    g.add_label(v);
                    m.map(Sort::Label)[unattached[i]] = v;
                }
                h.graph = share(std::move(g));
                h.grounded = false;
            }
            for (std::size_t i = 0; i < unattached.size(); ++i)
                if (!pick[i].empty()) m.map(Sort::Label)[unattached[i]] = pick[i];
            m.cod = h.graph;
            out.matches.push_back(Match{std::move(h), std::move(m)});
        });
    }
    sort_matches(out.matches);
    return out;
}

// ---------------------------------------------------------------------------
// Application

namespace {

ApplyResult dpo(const Rule& rule, const Match& match, DerivationKind kind) {
    ApplyResult res;
    auto pc = pushout_complement(rule.l, match.morphism);
    if (auto* v = std::get_if<GluingViolation>(&pc)) {
        res.outcome = ApplyOutcome::Gluing;
        res.violation = *v;
        res.diagnostic = v->detail;
        return res;
    }
    auto& comp = std::get<Complement>(pc);
    Cospan co = pushout(Span{rule.interface, rule.r, comp.k_to_d});

    Derivation d;
    d.rule = rule;
    d.kind = kind;
    d.input = match.host;
    d.context = match.host;
    d.context.graph = comp.context;
    d.output = match.host;
    d.output.graph = co.target;
    d.match = match.morphism;
    d.comatch = std::move(co.left);
    d.k_to_d = std::move(comp.k_to_d);
    d.d_to_g = std::move(comp.d_to_g);
    d.d_to_h = std::move(co.right);
    res.derivation = std::move(d);
    return res;
}

}  // namespace

ApplyResult apply_symbolic(const Rule& rule, const Match& match) { return dpo(rule, match, DerivationKind::Symbolic); }

ApplyResult apply_narrowing(const Rule& rule, const Match& match, Solver& solver) {
    ApplyResult res = dpo(rule, match, DerivationKind::Narrowing);
    if (!res.derivation) return res;
    Derivation& d = *res.derivation;
    d.output.formula = conjoin({match.host.formula, rename(rule.formula, d.comatch.label_map())});
    d.output.grounded = false;
    SolverVerdict v = solver.check_sat(d.output.formula);
    if (v.verdict == Verdict::Unsat) {
        res.outcome = ApplyOutcome::Inconsistent;
        res.derivation.reset();
    } else if (v.verdict == Verdict::Unknown) {
        res.outcome = ApplyOutcome::Indeterminate;
        res.diagnostic = v.diagnostic;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Grounding

Grounding ground(const SymbolicGraph& sg, const Assignment& sigma) {
    for (const auto& l : sg.graph->labels())
        if (!sigma.count(l)) throw InvalidInput("ground: no value for label '" + l + "'");
    if (!evaluate(sg.formula, sigma)) throw InvalidInput("ground: assignment violates the formula");

    EGraph g;
    Morphism inst{sg.graph, nullptr, {}};
    for (const auto& n : sg.graph->nodes()) {
        g.add_node(n);
        inst.map(Sort::Node)[n] = n;
    }
    for (const auto& l : sg.graph->labels()) {
        const std::string c = constant_name(sigma.at(l));
        if (!g.contains(Sort::Label, c)) g.add_label(c);
        inst.map(Sort::Label)[l] = c;
    }
    for (Sort s : {Sort::Edge, Sort::NodeAttr, Sort::EdgeAttr}) {
        for (const auto& [id, a] : sg.graph->arrows(s)) {
            Arrow b = a;
            if (target_sort(s) == Sort::Label) b.target = inst.map(Sort::Label).at(a.target);
            g.add(s, id, b);
            inst.map(s)[id] = id;
        }
    }
    SymbolicGraph out;
    out.graph = share(std::move(g));
    out.formula = constant_bindings(*out.graph);
    out.grounded = true;
    out.fresh_counter = sg.fresh_counter;
    inst.cod = out.graph;
    return Grounding{std::move(out), std::move(inst)};
}

SymbolicGraph grounded_graph(const EGraph& shape, const std::map<std::string, std::int64_t>& values) {
    SymbolicGraph sg;
    sg.graph = share(shape);
    return ground(sg, values).graph;
}

// ---------------------------------------------------------------------------
// Isomorphism

namespace {

SymbolicGraph prune_labels(const SymbolicGraph& g, const std::set<std::string>& pinned) {
    const auto attached = g.graph->attached_labels();
    const auto mentioned = free_vars(g.formula);
    EGraph e = *g.graph;
    bool changed = false;
    for (const auto& l : g.graph->labels()) {
        if (attached.count(l) || mentioned.count(l) || pinned.count(l)) continue;
        e.remove(Sort::Label, l);
        changed = true;
    }
    if (!changed) return g;
    SymbolicGraph out = g;
    out.graph = share(std::move(e));
    return out;
}

}  // namespace

IsoResult symbolic_iso(const SymbolicGraph& g1, const SymbolicGraph& g2, Solver& solver, const IsoOptions& options) {
    IsoResult res;
    const bool both_grounded = g1.grounded && g2.grounded;
    std::set<std::string> pin_dom, pin_cod;
    for (const auto& [x, y] : options.pins[index_of(Sort::Label)]) {
        pin_dom.insert(x);
        pin_cod.insert(y);
    }
    SymbolicGraph a = g1, b = g2;
    if (both_grounded) {
        std::set<std::int64_t> all = constants_of(*g1.graph);
        auto more = constants_of(*g2.graph);
        all.insert(more.begin(), more.end());
        a = materialize(a, all);
        b = materialize(b, all);
    } else {
        a = prune_labels(a, pin_dom);
        b = prune_labels(b, pin_cod);
    }
    res.lhs = a;
    res.rhs = b;

    for (Sort s : kAllSorts)
        for (const auto& [x, y] : options.pins[index_of(s)])
            if (!a.graph->contains(s, x) || !b.graph->contains(s, y)) return res;

    MatchOptions mo;
    mo.seed = options.pins;
    if (both_grounded)
        mo.filter = [](Sort s, const std::string& x, const std::string& y) { return s != Sort::Label || x == y; };
    for (auto& iso : find_morphisms(a.graph, b.graph, InjectivitySpec::isomorphism(), mo)) {
        Validity v = both_grounded ? Validity::Valid
                                   : solver.check_equiv(rename(a.formula, iso.label_map()), b.formula).validity;
        if (v == Validity::Valid) {
            res.witness = std::move(iso);
            res.indeterminate = false;
            return res;
        }
        if (v == Validity::Unknown) res.indeterminate = true;
    }
    return res;
}

}  // namespace sygra
