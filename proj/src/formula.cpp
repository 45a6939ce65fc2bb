#include "sygra/formula.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "sygra/error.hpp"

namespace sygra {

// ---------------------------------------------------------------------------
// Term

struct Term::Node {
    Kind kind;
    std::string name;
    std::int64_t value = 0;
    std::vector<Term> args;
};

Term Term::var(std::string name) { return Term(std::make_shared<const Node>(Node{Kind::Var, std::move(name), 0, {}})); }
Term Term::constant(std::int64_t v) { return Term(std::make_shared<const Node>(Node{Kind::Const, {}, v, {}})); }
Term Term::add(Term a, Term b) {
    return Term(std::make_shared<const Node>(Node{Kind::Add, {}, 0, {std::move(a), std::move(b)}}));
}
Term Term::sub(Term a, Term b) {
    return Term(std::make_shared<const Node>(Node{Kind::Sub, {}, 0, {std::move(a), std::move(b)}}));
}
Term Term::mul(std::int64_t c, Term t) {
    return Term(std::make_shared<const Node>(Node{Kind::Mul, {}, c, {std::move(t)}}));
}
Term Term::neg(Term t) { return Term(std::make_shared<const Node>(Node{Kind::Neg, {}, 0, {std::move(t)}})); }

Term::Kind Term::kind() const { return n_->kind; }
const std::string& Term::name() const { return n_->name; }
std::int64_t Term::value() const { return n_->value; }
const Term& Term::lhs() const { return n_->args.at(0); }
const Term& Term::rhs() const { return n_->args.at(1); }

bool Term::operator==(const Term& o) const {
    if (n_ == o.n_) return true;
    return n_->kind == o.n_->kind && n_->name == o.n_->name && n_->value == o.n_->value && n_->args == o.n_->args;
}

// ---------------------------------------------------------------------------
// Formula

struct Formula::Node {
    Kind kind;
    std::vector<Term> terms;
    std::vector<Formula> children;
    std::vector<std::string> bound;
};

namespace {

using FK = Formula::Kind;
using TK = Term::Kind;

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw InvalidInput("integer overflow");
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw InvalidInput("integer overflow");
    return r;
}

std::int64_t checked_neg(std::int64_t a) { return checked_mul(a, -1); }

}  // namespace

Formula Formula::truth() {
    static const Formula t(std::make_shared<const Node>(Node{FK::True, {}, {}, {}}));
    return t;
}

Formula Formula::falsity() {
    static const Formula f(std::make_shared<const Node>(Node{FK::False, {}, {}, {}}));
    return f;
}

Formula Formula::eq(Term a, Term b) {
    return Formula(std::make_shared<const Node>(Node{FK::Eq, {std::move(a), std::move(b)}, {}, {}}));
}
Formula Formula::le(Term a, Term b) {
    return Formula(std::make_shared<const Node>(Node{FK::Le, {std::move(a), std::move(b)}, {}, {}}));
}
Formula Formula::lt(Term a, Term b) {
    return Formula(std::make_shared<const Node>(Node{FK::Lt, {std::move(a), std::move(b)}, {}, {}}));
}
Formula Formula::negation(Formula f) {
    return Formula(std::make_shared<const Node>(Node{FK::Not, {}, {std::move(f)}, {}}));
}
Formula Formula::conjunction(std::vector<Formula> c) {
    if (c.empty()) return truth();
    if (c.size() == 1) return c.front();
    return Formula(std::make_shared<const Node>(Node{FK::And, {}, std::move(c), {}}));
}
Formula Formula::disjunction(std::vector<Formula> c) {
    if (c.empty()) return falsity();
    if (c.size() == 1) return c.front();
    return Formula(std::make_shared<const Node>(Node{FK::Or, {}, std::move(c), {}}));
}
Formula Formula::implies(Formula a, Formula b) {
    return Formula(std::make_shared<const Node>(Node{FK::Implies, {}, {std::move(a), std::move(b)}, {}}));
}
Formula Formula::iff(Formula a, Formula b) {
    return Formula(std::make_shared<const Node>(Node{FK::Iff, {}, {std::move(a), std::move(b)}, {}}));
}
Formula Formula::forall(std::vector<std::string> vars, Formula body) {
    if (vars.empty()) return body;
    return Formula(std::make_shared<const Node>(Node{FK::Forall, {}, {std::move(body)}, std::move(vars)}));
}
Formula Formula::exists(std::vector<std::string> vars, Formula body) {
    if (vars.empty()) return body;
    return Formula(std::make_shared<const Node>(Node{FK::Exists, {}, {std::move(body)}, std::move(vars)}));
}

Formula::Kind Formula::kind() const { return n_->kind; }
bool Formula::is_atom() const { return n_->kind == FK::Eq || n_->kind == FK::Le || n_->kind == FK::Lt; }
const Term& Formula::lhs_term() const { return n_->terms.at(0); }
const Term& Formula::rhs_term() const { return n_->terms.at(1); }
const std::vector<Formula>& Formula::children() const { return n_->children; }
const std::vector<std::string>& Formula::bound() const { return n_->bound; }

bool Formula::operator==(const Formula& o) const {
    if (n_ == o.n_) return true;
    return n_->kind == o.n_->kind && n_->terms == o.n_->terms && n_->bound == o.n_->bound &&
           n_->children == o.n_->children;
}

// ---------------------------------------------------------------------------
// Free variables, substitution

namespace {

void collect(const Term& t, std::set<std::string>& out) {
    switch (t.kind()) {
        case TK::Var: out.insert(t.name()); break;
        case TK::Const: break;
        case TK::Add:
        case TK::Sub:
            collect(t.lhs(), out);
            collect(t.rhs(), out);
            break;
        case TK::Mul:
        case TK::Neg: collect(t.lhs(), out); break;
    }
}

void collect(const Formula& f, std::set<std::string>& out) {
    if (f.is_atom()) {
        collect(f.lhs_term(), out);
        collect(f.rhs_term(), out);
        return;
    }
    if (f.kind() == FK::Forall || f.kind() == FK::Exists) {
        std::set<std::string> inner;
        collect(f.children().front(), inner);
        for (const auto& b : f.bound()) inner.erase(b);
        out.insert(inner.begin(), inner.end());
        return;
    }
    for (const auto& c : f.children()) collect(c, out);
}

}  // namespace

std::set<std::string> free_vars(const Term& t) {
    std::set<std::string> out;
    collect(t, out);
    return out;
}

std::set<std::string> free_vars(const Formula& f) {
    std::set<std::string> out;
    collect(f, out);
    return out;
}

bool has_quantifier(const Formula& f) {
    if (f.kind() == FK::Forall || f.kind() == FK::Exists) return true;
    return std::any_of(f.children().begin(), f.children().end(), [](const Formula& c) { return has_quantifier(c); });
}

Term substitute(const Term& t, const Substitution& map) {
    switch (t.kind()) {
        case TK::Var: {
            auto it = map.find(t.name());
            return it == map.end() ? t : it->second;
        }
        case TK::Const: return t;
        case TK::Add: return Term::add(substitute(t.lhs(), map), substitute(t.rhs(), map));
        case TK::Sub: return Term::sub(substitute(t.lhs(), map), substitute(t.rhs(), map));
        case TK::Mul: return Term::mul(t.value(), substitute(t.lhs(), map));
        case TK::Neg: return Term::neg(substitute(t.lhs(), map));
    }
    return t;
}

Formula substitute(const Formula& f, const Substitution& map) {
    if (map.empty()) return f;
    switch (f.kind()) {
        case FK::True:
        case FK::False: return f;
        case FK::Eq: return Formula::eq(substitute(f.lhs_term(), map), substitute(f.rhs_term(), map));
        case FK::Le: return Formula::le(substitute(f.lhs_term(), map), substitute(f.rhs_term(), map));
        case FK::Lt: return Formula::lt(substitute(f.lhs_term(), map), substitute(f.rhs_term(), map));
        case FK::Not: return Formula::negation(substitute(f.children()[0], map));
        case FK::Implies:
            return Formula::implies(substitute(f.children()[0], map), substitute(f.children()[1], map));
        case FK::Iff: return Formula::iff(substitute(f.children()[0], map), substitute(f.children()[1], map));
        case FK::And:
        case FK::Or: {
            std::vector<Formula> cs;
            cs.reserve(f.children().size());
            for (const auto& c : f.children()) cs.push_back(substitute(c, map));
            return f.kind() == FK::And ? Formula::conjunction(std::move(cs)) : Formula::disjunction(std::move(cs));
        }
        case FK::Forall:
        case FK::Exists: {
            const Formula& body = f.children().front();
            Substitution inner = map;
            for (const auto& b : f.bound()) inner.erase(b);
            const auto body_free = free_vars(body);
            const std::set<std::string> bound(f.bound().begin(), f.bound().end());
            for (const auto& [k, t] : inner) {
                if (!body_free.count(k)) continue;
                for (const auto& v : free_vars(t))
                    if (bound.count(v)) throw InvalidInput("substitution of '" + k + "' captures bound variable '" + v + "'");
            }
            auto sub = substitute(body, inner);
            return f.kind() == FK::Forall ? Formula::forall(f.bound(), sub) : Formula::exists(f.bound(), sub);
        }
    }
    return f;
}

Formula rename(const Formula& f, const Renaming& map) {
    Substitution s;
    for (const auto& [k, v] : map)
        if (k != v) s.emplace(k, Term::var(v));
    return substitute(f, s);
}

// ---------------------------------------------------------------------------
// Evaluation

std::int64_t evaluate(const Term& t, const Assignment& sigma) {
    switch (t.kind()) {
        case TK::Var: {
            auto it = sigma.find(t.name());
            if (it == sigma.end()) throw InvalidInput("unbound variable '" + t.name() + "'");
            return it->second;
        }
        case TK::Const: return t.value();
        case TK::Add: return checked_add(evaluate(t.lhs(), sigma), evaluate(t.rhs(), sigma));
        case TK::Sub: return checked_add(evaluate(t.lhs(), sigma), checked_neg(evaluate(t.rhs(), sigma)));
        case TK::Mul: return checked_mul(t.value(), evaluate(t.lhs(), sigma));
        case TK::Neg: return checked_neg(evaluate(t.lhs(), sigma));
    }
    return 0;
}

bool evaluate(const Formula& f, const Assignment& sigma) {
    switch (f.kind()) {
        case FK::True: return true;
        case FK::False: return false;
        case FK::Eq: return evaluate(f.lhs_term(), sigma) == evaluate(f.rhs_term(), sigma);
        case FK::Le: return evaluate(f.lhs_term(), sigma) <= evaluate(f.rhs_term(), sigma);
        case FK::Lt: return evaluate(f.lhs_term(), sigma) < evaluate(f.rhs_term(), sigma);
        case FK::Not: return !evaluate(f.children()[0], sigma);
        case FK::And: {
            // Evaluate every child so unbound variables are always reported.
            bool r = true;
            for (const auto& c : f.children()) r = evaluate(c, sigma) && r;
            return r;
        }
        case FK::Or: {
            bool r = false;
            for (const auto& c : f.children()) r = evaluate(c, sigma) || r;
            return r;
        }
        case FK::Implies: {
            bool a = evaluate(f.children()[0], sigma);
            bool b = evaluate(f.children()[1], sigma);
            return !a || b;
        }
        case FK::Iff: return evaluate(f.children()[0], sigma) == evaluate(f.children()[1], sigma);
        case FK::Forall:
        case FK::Exists: throw InvalidInput("evaluate: quantified formula needs a solver");
    }
    return false;
}

// ---------------------------------------------------------------------------
// Construction helpers, simplification

namespace {

void flatten_into(const Formula& f, FK kind, std::vector<Formula>& out) {
    if (f.kind() == kind) {
        for (const auto& c : f.children()) flatten_into(c, kind, out);
    } else {
        out.push_back(f);
    }
}

}  // namespace

Formula conjoin(const std::vector<Formula>& parts) {
    std::vector<Formula> flat;
    for (const auto& p : parts) flatten_into(p, FK::And, flat);
    return Formula::conjunction(std::move(flat));
}

Formula disjoin(const std::vector<Formula>& parts) {
    std::vector<Formula> flat;
    for (const auto& p : parts) flatten_into(p, FK::Or, flat);
    return Formula::disjunction(std::move(flat));
}

Formula simplify(const Formula& f) {
    switch (f.kind()) {
        case FK::True:
        case FK::False: return f;
        case FK::Eq:
        case FK::Le:
        case FK::Lt: {
            if (!free_vars(f).empty()) return f;
            try {
                return evaluate(f, {}) ? Formula::truth() : Formula::falsity();
            } catch (const InvalidInput&) {
                return f;  // overflow: leave the atom alone
            }
        }
        case FK::Not: {
            Formula c = simplify(f.children()[0]);
            if (c.kind() == FK::True) return Formula::falsity();
            if (c.kind() == FK::False) return Formula::truth();
            if (c.kind() == FK::Not) return c.children()[0];
            return Formula::negation(c);
        }
        case FK::And:
        case FK::Or: {
            const bool conj = f.kind() == FK::And;
            const FK unit = conj ? FK::True : FK::False;
            const FK absorbing = conj ? FK::False : FK::True;
            std::vector<Formula> flat;
            for (const auto& c : f.children()) flatten_into(simplify(c), f.kind(), flat);
            std::vector<Formula> kept;
            for (auto& c : flat) {
                if (c.kind() == absorbing) return c;
                if (c.kind() == unit) continue;
                if (std::find(kept.begin(), kept.end(), c) != kept.end()) continue;
                kept.push_back(std::move(c));
            }
            return conj ? Formula::conjunction(std::move(kept)) : Formula::disjunction(std::move(kept));
        }
        case FK::Implies: {
            Formula a = simplify(f.children()[0]);
            Formula b = simplify(f.children()[1]);
            if (a.kind() == FK::True) return b;
            if (a.kind() == FK::False || b.kind() == FK::True) return Formula::truth();
            if (b.kind() == FK::False) return simplify(Formula::negation(a));
            if (a == b) return Formula::truth();
            return Formula::implies(a, b);
        }
        case FK::Iff: {
            Formula a = simplify(f.children()[0]);
            Formula b = simplify(f.children()[1]);
            if (a.kind() == FK::True) return b;
            if (b.kind() == FK::True) return a;
            if (a.kind() == FK::False) return simplify(Formula::negation(b));
            if (b.kind() == FK::False) return simplify(Formula::negation(a));
            if (a == b) return Formula::truth();
            return Formula::iff(a, b);
        }
        case FK::Forall:
        case FK::Exists: {
            Formula body = simplify(f.children()[0]);
            if (body.kind() == FK::True || body.kind() == FK::False) return body;
            const auto fv = free_vars(body);
            std::vector<std::string> used;
            for (const auto& b : f.bound())
                if (fv.count(b)) used.push_back(b);
            return f.kind() == FK::Forall ? Formula::forall(used, body) : Formula::exists(used, body);
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// Linearization

namespace {

void accumulate(const Term& t, std::int64_t factor, LinearExpr& out) {
    switch (t.kind()) {
        case TK::Var: {
            auto& c = out.coeffs[t.name()];
            c = checked_add(c, factor);
            if (c == 0) out.coeffs.erase(t.name());
            break;
        }
        case TK::Const: out.constant = checked_add(out.constant, checked_mul(factor, t.value())); break;
        case TK::Add:
            accumulate(t.lhs(), factor, out);
            accumulate(t.rhs(), factor, out);
            break;
        case TK::Sub:
            accumulate(t.lhs(), factor, out);
            accumulate(t.rhs(), checked_neg(factor), out);
            break;
        case TK::Mul: accumulate(t.lhs(), checked_mul(factor, t.value()), out); break;
        case TK::Neg: accumulate(t.lhs(), checked_neg(factor), out); break;
    }
}

}  // namespace

LinearExpr linearize(const Term& t) {
    LinearExpr out;
    accumulate(t, 1, out);
    return out;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int term_prec(const Term& t) {
    switch (t.kind()) {
        case TK::Add:
        case TK::Sub: return 1;
        case TK::Mul: return 2;
        case TK::Neg: return 3;
        default: return 4;
    }
}

void print(const Term& t, int ctx, std::ostream& os) {
    const bool paren = term_prec(t) < ctx;
    if (paren) os << "(";
    switch (t.kind()) {
        case TK::Var: os << t.name(); break;
        case TK::Const: os << t.value(); break;
        case TK::Add:
        case TK::Sub:
            print(t.lhs(), 1, os);
            os << (t.kind() == TK::Add ? " + " : " - ");
            print(t.rhs(), 2, os);
            break;
        case TK::Mul:
            os << t.value() << " * ";
            print(t.lhs(), 3, os);
            break;
        case TK::Neg:
            os << "-";
            // "-3" would read back as a literal, so a constant operand is wrapped.
            if (t.lhs().kind() == TK::Const) {
                os << "(" << t.lhs().value() << ")";
            } else {
                print(t.lhs(), 3, os);
            }
            break;
    }
    if (paren) os << ")";
}

int formula_prec(const Formula& f) {
    switch (f.kind()) {
        case FK::Forall:
        case FK::Exists: return 0;
        case FK::Iff: return 1;
        case FK::Implies: return 2;
        case FK::Or: return 3;
        case FK::And: return 4;
        case FK::Not: return 5;
        default: return 6;
    }
}

void print(const Formula& f, int ctx, std::ostream& os) {
    const bool paren = formula_prec(f) < ctx;
    if (paren) os << "(";
    switch (f.kind()) {
        case FK::True: os << "true"; break;
        case FK::False: os << "false"; break;
        case FK::Eq:
        case FK::Le:
        case FK::Lt:
            print(f.lhs_term(), 1, os);
            os << (f.kind() == FK::Eq ? " = " : f.kind() == FK::Le ? " <= " : " < ");
            print(f.rhs_term(), 1, os);
            break;
        case FK::Not:
            os << "!";
            print(f.children()[0], 5, os);
            break;
        case FK::And:
        case FK::Or: {
            const char* sep = "";
            for (const auto& c : f.children()) {
                os << sep;
                print(c, formula_prec(f) + 1, os);
                sep = f.kind() == FK::And ? " && " : " || ";
            }
            break;
        }
        case FK::Implies:
            print(f.children()[0], 3, os);
            os << " => ";
            print(f.children()[1], 2, os);
            break;
        case FK::Iff:
            print(f.children()[0], 2, os);
            os << " <=> ";
            print(f.children()[1], 2, os);
            break;
        case FK::Forall:
        case FK::Exists:
            os << (f.kind() == FK::Forall ? "forall" : "exists");
            for (const auto& b : f.bound()) os << " " << b;
            os << ". ";
            print(f.children()[0], 0, os);
            break;
    }
    if (paren) os << ")";
}

}  // namespace

std::string to_string(const Term& t) {
    std::ostringstream os;
    print(t, 0, os);
    return os.str();
}

std::string to_string(const Formula& f) {
    std::ostringstream os;
    print(f, 0, os);
    return os.str();
}

}  // namespace sygra
