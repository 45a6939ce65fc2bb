#include "sygra/solver.hpp"

#include <cstdlib>
#include <sstream>
#include <utility>

#include "sygra/error.hpp"
#include "sygra/omega.hpp"
#include "sygra/smt_process.hpp"

namespace sygra {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Sat: return "sat";
        case Verdict::Unsat: return "unsat";
        case Verdict::Unknown: return "unknown";
    }
    return "unknown";
}

std::string_view to_string(Validity v) {
    switch (v) {
        case Validity::Valid: return "valid";
        case Validity::Invalid: return "invalid";
        case Validity::Unknown: return "unknown";
    }
    return "unknown";
}

std::string resolve_smt_command(const SolverConfig& config) {
    if (!config.command.empty()) return config.command;
    if (const char* env = std::getenv("SYGRA_SMT_CMD"); env && *env) return env;
    return "z3 -in";
}

// ---------------------------------------------------------------------------
// Solver (shared)

SolverVerdict Solver::check_sat(const Formula& phi, bool want_model) {
    ++stats_.queries;
    SolverVerdict v = do_check_sat(phi, want_model);
    if (v.verdict == Verdict::Sat && v.model) {
        // Pad with zeros for variables the backend left out, then confirm.
        for (const auto& x : free_vars(phi)) v.model->emplace(x, 0);
        bool ok = false;
        try {
            ok = evaluate(phi, *v.model);
        } catch (const InvalidInput&) {
            ok = !has_quantifier(phi);
        }
        if (!ok && !has_quantifier(phi)) {
            v.verdict = Verdict::Unknown;
            v.model.reset();
            v.diagnostic = "model failed verification";
        }
    }
    switch (v.verdict) {
        case Verdict::Sat: ++stats_.sat; break;
        case Verdict::Unsat: ++stats_.unsat; break;
        case Verdict::Unknown: ++stats_.unknown; break;
    }
    return v;
}

ValidityVerdict Solver::check_implies(const Formula& phi, const Formula& psi) {
    SolverVerdict v = check_sat(Formula::conjunction({phi, Formula::negation(psi)}), true);
    ValidityVerdict out;
    out.diagnostic = v.diagnostic;
    if (v.verdict == Verdict::Unsat) {
        out.validity = Validity::Valid;
    } else if (v.verdict == Verdict::Sat) {
        out.validity = Validity::Invalid;
        out.counterexample = std::move(v.model);
    }
    return out;
}

ValidityVerdict Solver::check_equiv(const Formula& phi, const Formula& psi) {
    ValidityVerdict a = check_implies(phi, psi);
    if (a.validity == Validity::Invalid) return a;
    ValidityVerdict b = check_implies(psi, phi);
    if (b.validity != Validity::Valid) return b;
    return a;
}

ValidityVerdict Solver::check_valid(const Formula& phi) { return check_implies(Formula::truth(), phi); }

// ---------------------------------------------------------------------------
// Builtin backend

namespace {

struct Pending {
    Formula f;
    bool positive;
};

class CaseSplitter {
public:
    CaseSplitter(const std::map<std::string, std::size_t>& index, std::size_t budget)
        : index_(index), budget_(budget) {}

    // Sat returns the model through `model`.
    Verdict run(std::vector<Pending> todo, std::vector<LinearConstraint> lits, std::vector<std::int64_t>& model) {
        while (!todo.empty()) {
            Pending p = std::move(todo.back());
            todo.pop_back();
            const Formula& f = p.f;
            switch (f.kind()) {
                case Formula::Kind::True:
                    if (!p.positive) return Verdict::Unsat;
                    break;
                case Formula::Kind::False:
                    if (p.positive) return Verdict::Unsat;
                    break;
                case Formula::Kind::Eq:
                case Formula::Kind::Le:
                case Formula::Kind::Lt: {
                    // a - b, b - a as constraint rows
                    LinearConstraint ab = row(f.lhs_term(), f.rhs_term());
                    LinearConstraint ba = row(f.rhs_term(), f.lhs_term());
                    if (f.kind() == Formula::Kind::Eq) {
                        if (p.positive) {
                            ab.equality = true;
                            lits.push_back(ab);
                        } else {
                            // a > b or a < b
                            ab.constant -= 1;
                            ba.constant -= 1;
                            return branch({{ab}, {ba}}, todo, lits, model);
                        }
                    } else if (f.kind() == Formula::Kind::Le) {
                        if (p.positive) {
                            lits.push_back(ba);
                        } else {
                            ab.constant -= 1;
                            lits.push_back(ab);
                        }
                    } else {
                        if (p.positive) {
                            ba.constant -= 1;
                            lits.push_back(ba);
                        } else {
                            lits.push_back(ab);
                        }
                    }
                    break;
                }
                case Formula::Kind::Not:
                    todo.push_back({f.children()[0], !p.positive});
                    break;
                case Formula::Kind::And:
                case Formula::Kind::Or: {
                    const bool conj = (f.kind() == Formula::Kind::And) == p.positive;
                    if (conj) {
                        for (auto it = f.children().rbegin(); it != f.children().rend(); ++it)
                            todo.push_back({*it, p.positive});
                    } else {
                        std::vector<std::vector<Pending>> alts;
                        for (const auto& c : f.children()) alts.push_back({{c, p.positive}});
                        return branch_formulas(std::move(alts), std::move(todo), std::move(lits), model);
                    }
                    break;
                }
                case Formula::Kind::Implies: {
                    const Formula& a = f.children()[0];
                    const Formula& b = f.children()[1];
                    if (p.positive) {
                        return branch_formulas({{{a, false}}, {{b, true}}}, std::move(todo), std::move(lits), model);
                    }
                    todo.push_back({b, false});
                    todo.push_back({a, true});
                    break;
                }
                case Formula::Kind::Iff: {
                    const Formula& a = f.children()[0];
                    const Formula& b = f.children()[1];
                    const bool s = p.positive;
                    return branch_formulas({{{a, true}, {b, s}}, {{a, false}, {b, !s}}}, std::move(todo),
                                           std::move(lits), model);
                }
                case Formula::Kind::Forall:
                case Formula::Kind::Exists:
                    return Verdict::Unknown;
            }
        }
        if (++leaves_ > budget_) {
            diagnostic = "case-split budget exhausted";
            return Verdict::Unknown;
        }
        OmegaOutcome o = omega_solve(index_.size(), lits);
        if (o.result == OmegaOutcome::Result::Sat) {
            model = std::move(o.model);
            return Verdict::Sat;
        }
        if (o.result == OmegaOutcome::Result::Unsat) return Verdict::Unsat;
        diagnostic = o.diagnostic;
        return Verdict::Unknown;
    }

    std::string diagnostic;

private:
    const std::map<std::string, std::size_t>& index_;
    std::size_t budget_;
    std::size_t leaves_ = 0;

    // a - b >= 0 (or == 0 when marked)
    LinearConstraint row(const Term& a, const Term& b) {
        LinearExpr e = linearize(Term::sub(a, b));
        LinearConstraint c;
        c.coeffs.assign(index_.size(), 0);
        for (const auto& [v, k] : e.coeffs) c.coeffs[index_.at(v)] = k;
        c.constant = e.constant;
        return c;
    }

    Verdict branch(std::vector<std::vector<LinearConstraint>> alts, const std::vector<Pending>& todo,
                   const std::vector<LinearConstraint>& lits, std::vector<std::int64_t>& model) {
        bool unknown = false;
        for (auto& alt : alts) {
            auto l = lits;
            l.insert(l.end(), alt.begin(), alt.end());
            Verdict v = run(todo, std::move(l), model);
            if (v == Verdict::Sat) return v;
            if (v == Verdict::Unknown) unknown = true;
        }
        return unknown ? Verdict::Unknown : Verdict::Unsat;
    }

    Verdict branch_formulas(std::vector<std::vector<Pending>> alts, std::vector<Pending> todo,
                            std::vector<LinearConstraint> lits, std::vector<std::int64_t>& model) {
        bool unknown = false;
        for (auto& alt : alts) {
            auto t = todo;
            for (auto it = alt.rbegin(); it != alt.rend(); ++it) t.push_back(*it);
            Verdict v = run(std::move(t), lits, model);
            if (v == Verdict::Sat) return v;
            if (v == Verdict::Unknown) unknown = true;
        }
        return unknown ? Verdict::Unknown : Verdict::Unsat;
    }
};

}  // namespace

SolverVerdict BuiltinSolver::do_check_sat(const Formula& phi, bool want_model) {
    SolverVerdict out;
    if (has_quantifier(phi)) {
        out.diagnostic = "quantified formula";
        return out;
    }
    std::map<std::string, std::size_t> index;
    for (const auto& v : free_vars(phi)) index.emplace(v, index.size());
    CaseSplitter splitter(index, branch_budget_);
    std::vector<std::int64_t> model;
    try {
        out.verdict = splitter.run({{phi, true}}, {}, model);
        out.diagnostic = splitter.diagnostic;
    } catch (const InvalidInput& e) {
        out.verdict = Verdict::Unknown;
        out.diagnostic = e.what();
    }
    if (out.verdict == Verdict::Sat && want_model) {
        Assignment a;
        for (const auto& [v, k] : index) a[v] = model[k];
        out.model = std::move(a);
    }
    return out;
}

// ---------------------------------------------------------------------------
// SMT-LIB rendering

std::string smt_symbol(const std::string& name) {
    bool simple = !name.empty() && !(name[0] >= '0' && name[0] <= '9');
    for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) simple = false;
    return simple ? name : "|" + name + "|";
}

namespace {

void smt_term(std::ostringstream& os, const Term& t) {
    switch (t.kind()) {
        case Term::Kind::Var: os << smt_symbol(t.name()); break;
        case Term::Kind::Const:
            if (t.value() < 0) {
                // |INT64_MIN| does not fit; print the digits directly.
                std::string digits = std::to_string(t.value()).substr(1);
                os << "(- " << digits << ")";
            } else {
                os << t.value();
            }
            break;
        case Term::Kind::Add:
        case Term::Kind::Sub:
            os << (t.kind() == Term::Kind::Add ? "(+ " : "(- ");
            smt_term(os, t.lhs());
            os << ' ';
            smt_term(os, t.rhs());
            os << ')';
            break;
        case Term::Kind::Mul:
            os << "(* ";
            smt_term(os, Term::constant(t.value()));
            os << ' ';
            smt_term(os, t.lhs());
            os << ')';
            break;
        case Term::Kind::Neg:
            os << "(- ";
            smt_term(os, t.lhs());
            os << ')';
            break;
    }
}

void smt_formula(std::ostringstream& os, const Formula& f) {
    auto nary = [&](const char* op) {
        os << '(' << op;
        for (const auto& c : f.children()) {
            os << ' ';
            smt_formula(os, c);
        }
        os << ')';
    };
    auto atom = [&](const char* op) {
        os << '(' << op << ' ';
        smt_term(os, f.lhs_term());
        os << ' ';
        smt_term(os, f.rhs_term());
        os << ')';
    };
    switch (f.kind()) {
        case Formula::Kind::True: os << "true"; break;
        case Formula::Kind::False: os << "false"; break;
        case Formula::Kind::Eq: atom("="); break;
        case Formula::Kind::Le: atom("<="); break;
        case Formula::Kind::Lt: atom("<"); break;
        case Formula::Kind::Not: nary("not"); break;
        case Formula::Kind::And: nary("and"); break;
        case Formula::Kind::Or: nary("or"); break;
        case Formula::Kind::Implies: nary("=>"); break;
        case Formula::Kind::Iff: nary("="); break;
        case Formula::Kind::Forall:
        case Formula::Kind::Exists:
            os << (f.kind() == Formula::Kind::Forall ? "(forall (" : "(exists (");
            for (std::size_t i = 0; i < f.bound().size(); ++i)
                os << (i ? " " : "") << '(' << smt_symbol(f.bound()[i]) << " Int)";
            os << ") ";
            smt_formula(os, f.children()[0]);
            os << ')';
            break;
    }
}

// Minimal S-expression reader for (get-model) output.
struct SExpr {
    std::string atom;
    std::vector<SExpr> list;
    bool is_list = false;
};

SExpr parse_sexpr(const std::string& s, std::size_t& i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    SExpr e;
    if (i >= s.size()) throw SolverError(SolverError::Kind::Protocol, "truncated solver output");
    if (s[i] == '(') {
        e.is_list = true;
        ++i;
        for (;;) {
            while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
            if (i >= s.size()) throw SolverError(SolverError::Kind::Protocol, "unbalanced solver output");
            if (s[i] == ')') {
                ++i;
                return e;
            }
            e.list.push_back(parse_sexpr(s, i));
        }
    }
    if (s[i] == '|') {
        auto end = s.find('|', i + 1);
        if (end == std::string::npos) throw SolverError(SolverError::Kind::Protocol, "unterminated symbol");
        e.atom = s.substr(i + 1, end - i - 1);
        i = end + 1;
        return e;
    }
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' && s[i] != ')') ++i;
    e.atom = s.substr(start, i - start);
    return e;
}

std::optional<std::int64_t> model_value(const SExpr& e) {
    try {
        if (!e.is_list) return std::stoll(e.atom);
        if (e.list.size() == 2 && !e.list[0].is_list && e.list[0].atom == "-") {
            if (auto v = model_value(e.list[1])) return -*v;
        }
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

}  // namespace

std::string to_smtlib(const Formula& f) {
    std::ostringstream os;
    smt_formula(os, f);
    return os.str();
}

// ---------------------------------------------------------------------------
// External backend

ExternalSolver::ExternalSolver(SolverConfig config) : config_(std::move(config)) {
    if (config_.timeout_ms <= 0) throw InvalidInput("solver timeout must be positive");
}

ExternalSolver::~ExternalSolver() = default;

void ExternalSolver::start() {
    proc_ = std::make_unique<SmtProcess>(split_command(resolve_smt_command(config_)));
    proc_->send("(set-option :print-success false)\n(set-option :produce-models true)\n(set-logic " +
                config_.logic + ")\n");
}

SolverVerdict ExternalSolver::do_check_sat(const Formula& phi, bool want_model) {
    if (!proc_) start();
    std::ostringstream q;
    q << "(push 1)\n";
    for (const auto& v : free_vars(phi)) q << "(declare-const " << smt_symbol(v) << " Int)\n";
    q << "(assert " << to_smtlib(phi) << ")\n(check-sat)\n";
    proc_->send(q.str());

    SolverVerdict out;
    auto resp = proc_->read_response(config_.timeout_ms);
    if (!resp) {
        proc_.reset();  // kills the child; the next query starts a new one
        out.diagnostic = "timeout after " + std::to_string(config_.timeout_ms) + " ms";
        return out;
    }
    if (*resp == "sat") {
        out.verdict = Verdict::Sat;
    } else if (*resp == "unsat") {
        out.verdict = Verdict::Unsat;
    } else if (*resp == "unknown") {
        out.verdict = Verdict::Unknown;
        out.diagnostic = "external solver returned unknown";
    } else {
        proc_.reset();
        throw SolverError(SolverError::Kind::Protocol, "unexpected solver response: " + *resp);
    }

    if (out.verdict == Verdict::Sat && want_model) {
        proc_->send("(get-model)\n");
        auto m = proc_->read_response(config_.timeout_ms);
        if (!m) {
            proc_.reset();
            out.verdict = Verdict::Unknown;
            out.diagnostic = "timeout while reading model";
            return out;
        }
        std::size_t i = 0;
        SExpr e = parse_sexpr(*m, i);
        if (!e.is_list) throw SolverError(SolverError::Kind::Protocol, "unexpected model: " + *m);
        Assignment a;
        for (const auto& def : e.list) {
            // (define-fun NAME () Int VALUE)
            if (!def.is_list || def.list.size() != 5 || def.list[0].atom != "define-fun") continue;
            if (auto v = model_value(def.list[4])) a[def.list[1].atom] = *v;
        }
        out.model = std::move(a);
    }
    proc_->send("(pop 1)\n");
    return out;
}

// ---------------------------------------------------------------------------

namespace {

class EscalatingSolver : public Solver {
public:
    explicit EscalatingSolver(SolverConfig config) : external_(std::move(config)) {}
    std::string name() const override { return "builtin+external"; }

protected:
    SolverVerdict do_check_sat(const Formula& phi, bool want_model) override {
        SolverVerdict v = builtin_.check_sat(phi, want_model);
        if (v.verdict != Verdict::Unknown) return v;
        ++stats_.escalated;
        return external_.check_sat(phi, want_model);
    }

private:
    BuiltinSolver builtin_;
    ExternalSolver external_;
};

}  // namespace

std::unique_ptr<Solver> make_solver(const SolverConfig& config) {
    if (config.timeout_ms <= 0) throw InvalidInput("solver timeout must be positive");
    if (config.backend == Backend::External) return std::make_unique<ExternalSolver>(config);
    if (config.escalate) return std::make_unique<EscalatingSolver>(config);
    return std::make_unique<BuiltinSolver>();
}

}  // namespace sygra
