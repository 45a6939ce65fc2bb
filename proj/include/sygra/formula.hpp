#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sygra {

/// Linear integer term: variables, literals, +, -, literal * term, unary minus.
class Term {
public:
    enum class Kind : std::uint8_t { Var, Const, Add, Sub, Mul, Neg };

    static Term var(std::string name);
    static Term constant(std::int64_t value);
    static Term add(Term a, Term b);
    static Term sub(Term a, Term b);
    /// coefficient * t; the only multiplication the algebra admits.
    static Term mul(std::int64_t coefficient, Term t);
    static Term neg(Term t);

    Kind kind() const;
    const std::string& name() const;      // Var
    std::int64_t value() const;           // Const, or the coefficient of Mul
    const Term& lhs() const;              // Add, Sub; the operand of Mul and Neg
    const Term& rhs() const;              // Add, Sub

    bool operator==(const Term& other) const;

private:
    struct Node;
    explicit Term(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    std::shared_ptr<const Node> n_;
};

/// First-order formula over linear integer arithmetic.
class Formula {
public:
    enum class Kind : std::uint8_t { True, False, Eq, Le, Lt, Not, And, Or, Implies, Iff, Forall, Exists };

    static Formula truth();
    static Formula falsity();
    static Formula eq(Term a, Term b);
    static Formula le(Term a, Term b);
    static Formula lt(Term a, Term b);
    static Formula negation(Formula f);
    /// n-ary, children kept as given; an empty list collapses to the unit and a
    /// single child to itself, so And/Or nodes always have two or more children.
    static Formula conjunction(std::vector<Formula> children);
    static Formula disjunction(std::vector<Formula> children);
    static Formula implies(Formula a, Formula b);
    static Formula iff(Formula a, Formula b);
    static Formula forall(std::vector<std::string> vars, Formula body);
    static Formula exists(std::vector<std::string> vars, Formula body);

    Kind kind() const;
    bool is_atom() const;
    const Term& lhs_term() const;                  // atoms
    const Term& rhs_term() const;                  // atoms
    const std::vector<Formula>& children() const;  // Not, And, Or, Implies, Iff, quantifiers (body)
    const std::vector<std::string>& bound() const; // quantifiers

    bool operator==(const Formula& other) const;
    bool operator!=(const Formula& other) const { return !(*this == other); }

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    std::shared_ptr<const Node> n_;
};

using Assignment = std::map<std::string, std::int64_t>;
using Substitution = std::map<std::string, Term>;
using Renaming = std::map<std::string, std::string>;

std::set<std::string> free_vars(const Term& t);
std::set<std::string> free_vars(const Formula& f);
bool has_quantifier(const Formula& f);

/// Replaces free occurrences. Throws InvalidInput if a replacement term would
/// be captured by a quantifier.
Formula substitute(const Formula& f, const Substitution& map);
Term substitute(const Term& t, const Substitution& map);
/// Variable-to-variable substitution, i.e. translating a formula along the
/// label map of a morphism.
Formula rename(const Formula& f, const Renaming& map);

/// Truth value under sigma. Throws InvalidInput on an unbound variable or a
/// quantifier, and on arithmetic overflow.
bool evaluate(const Formula& f, const Assignment& sigma);
std::int64_t evaluate(const Term& t, const Assignment& sigma);

/// Flattening, order-preserving conjunction; [] gives true, [f] gives f.
Formula conjoin(const std::vector<Formula>& parts);
Formula disjoin(const std::vector<Formula>& parts);

/// Sound local rewrites only: unit/absorbing constants, flattening, duplicate
/// removal, double negation, ground atom folding.
Formula simplify(const Formula& f);

/// Infix rendering accepted back by parse_formula.
std::string to_string(const Term& t);
std::string to_string(const Formula& f);

/// Throws ParseError with positions relative to `text` (line 1, column 1 at
/// its start), shifted by the given origin.
Formula parse_formula(std::string_view text, int line = 1, int column = 1);
Term parse_term(std::string_view text, int line = 1, int column = 1);

bool is_identifier(std::string_view s);

/// a_1 x_1 + ... + a_n x_n + constant.
struct LinearExpr {
    std::map<std::string, std::int64_t> coeffs;
    std::int64_t constant = 0;
};

/// Throws InvalidInput on overflow.
LinearExpr linearize(const Term& t);

}  // namespace sygra
