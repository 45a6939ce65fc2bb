// Recursive-descent parser for the infix formula syntax.
//
//   formula  := iff
//   iff      := implies ('<=>' implies)*
//   implies  := or ('=>' implies)?
//   or       := and ('||' and)*
//   and      := unary ('&&' unary)*
//   unary    := '!' unary | 'true' | 'false'
//             | ('forall' | 'exists') ident+ '.' formula
//             | term cmp term | '(' formula ')'
//   cmp      := '=' | '<=' | '<' | '>=' | '>' | '!='
//   term     := product (('+' | '-') product)*
//   product  := factor ('*' factor)*          (one side must be ground)
//   factor   := '-' factor | integer | ident | '(' term ')'
//
// Unicode spellings (∧ ∨ ¬ ⇒ ⇔ ≤ ≥ ≠ ∀ ∃ and primes ′ ″ ‴) are accepted.

#include <charconv>
#include <limits>

#include "sygra/error.hpp"
#include "sygra/formula.hpp"

namespace sygra {

namespace {

enum class Tok { Ident, Int, Op, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

bool is_keyword(std::string_view s) { return s == "true" || s == "false" || s == "forall" || s == "exists"; }

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

struct Spelling {
    std::string_view utf8;
    std::string_view ascii;
};

constexpr Spelling kUnicodeOps[] = {
    {"∧", "&&"}, {"∨", "||"}, {"¬", "!"},   {"⇒", "=>"},  {"→", "=>"},     {"⇔", "<=>"},
    {"↔", "<=>"}, {"≤", "<="}, {"≥", ">="}, {"≠", "!="}, {"∀", "forall"}, {"∃", "exists"},
};

constexpr Spelling kUnicodePrimes[] = {{"′", "'"}, {"″", "''"}, {"‴", "'''"}};

constexpr std::string_view kAsciiOps[] = {"<=>", "&&", "||", "=>", "<=", ">=", "!=", "+", "-", "*", "(",
                                          ")",   ".",  ",",  "=",  "<",  ">",  "!"};

class Lexer {
public:
    Lexer(std::string_view text, int line, int column) : s_(text), line_(line), col_(column) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            if (i_ >= s_.size()) {
                out.push_back({Tok::End, "", line_, col_});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;
    int line_;
    int col_;

    void advance(std::size_t n) {
        for (std::size_t k = 0; k < n && i_ < s_.size(); ++k, ++i_) {
            unsigned char c = static_cast<unsigned char>(s_[i_]);
            if (c == '\n') {
                ++line_;
                col_ = 1;
            } else if ((c & 0xC0) != 0x80) {
                ++col_;
            }
        }
    }

    void skip_space() {
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\n' || s_[i_] == '\r')) advance(1);
    }

    bool starts(std::string_view p) const { return s_.substr(i_, p.size()) == p; }

    Token next() {
        const int line = line_, col = col_;
        const char c = s_[i_];
        if (ident_start(c)) {
            std::string id;
            while (i_ < s_.size() && ident_char(s_[i_])) {
                id += s_[i_];
                advance(1);
            }
            for (;;) {
                if (i_ < s_.size() && s_[i_] == '\'') {
                    id += '\'';
                    advance(1);
                    continue;
                }
                bool matched = false;
                for (const auto& p : kUnicodePrimes) {
                    if (starts(p.utf8)) {
                        id += p.ascii;
                        advance(p.utf8.size());
                        matched = true;
                        break;
                    }
                }
                if (!matched) break;
            }
            return {Tok::Ident, id, line, col};
        }
        if (c >= '0' && c <= '9') {
            std::string digits;
            while (i_ < s_.size() && s_[i_] >= '0' && s_[i_] <= '9') {
                digits += s_[i_];
                advance(1);
            }
            return {Tok::Int, digits, line, col};
        }
        for (const auto& u : kUnicodeOps) {
            if (starts(u.utf8)) {
                advance(u.utf8.size());
                return {is_keyword(u.ascii) ? Tok::Ident : Tok::Op, std::string(u.ascii), line, col};
            }
        }
        for (auto op : kAsciiOps) {
            if (starts(op)) {
                advance(op.size());
                return {Tok::Op, std::string(op), line, col};
            }
        }
        throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

    Formula formula_all() {
        Formula f = iff();
        expect_end();
        return f;
    }

    Term term_all() {
        Term t = sum();
        expect_end();
        return t;
    }

private:
    std::vector<Token> t_;
    std::size_t p_ = 0;

    const Token& peek() const { return t_[p_]; }
    bool is_op(std::string_view op) const { return peek().kind == Tok::Op && peek().text == op; }
    bool is_kw(std::string_view kw) const { return peek().kind == Tok::Ident && peek().text == kw; }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(peek().line, peek().column, msg); }

    void expect_op(std::string_view op) {
        if (!is_op(op)) fail("expected '" + std::string(op) + "'");
        ++p_;
    }

    void expect_end() {
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    }

    Formula iff() {
        Formula a = implies();
        while (is_op("<=>")) {
            ++p_;
            a = Formula::iff(a, implies());
        }
        return a;
    }

    Formula implies() {
        Formula a = disj();
        if (is_op("=>")) {
            ++p_;
            return Formula::implies(a, implies());
        }
        return a;
    }

    Formula disj() {
        std::vector<Formula> parts{conj()};
        while (is_op("||")) {
            ++p_;
            parts.push_back(conj());
        }
        return Formula::disjunction(std::move(parts));
    }

    Formula conj() {
        std::vector<Formula> parts{unary()};
        while (is_op("&&")) {
            ++p_;
            parts.push_back(unary());
        }
        return Formula::conjunction(std::move(parts));
    }

    Formula unary() {
        if (is_op("!")) {
            ++p_;
            return Formula::negation(unary());
        }
        if (is_kw("true")) {
            ++p_;
            return Formula::truth();
        }
        if (is_kw("false")) {
            ++p_;
            return Formula::falsity();
        }
        if (is_kw("forall") || is_kw("exists")) {
            const bool all = peek().text == "forall";
            ++p_;
            std::vector<std::string> vars;
            while (peek().kind == Tok::Ident && !is_keyword(peek().text)) {
                vars.push_back(peek().text);
                ++p_;
                if (is_op(",")) ++p_;
            }
            if (vars.empty()) fail("expected bound variable");
            expect_op(".");
            Formula body = iff();
            return all ? Formula::forall(std::move(vars), body) : Formula::exists(std::move(vars), body);
        }
        const std::size_t save = p_;
        try {
            Term a = sum();
            const Token op = peek();
            if (op.kind == Tok::Op) {
                if (op.text == "=" || op.text == "<=" || op.text == "<" || op.text == ">=" || op.text == ">" ||
                    op.text == "!=") {
                    ++p_;
                    Term b = sum();
                    if (op.text == "=") return Formula::eq(a, b);
                    if (op.text == "<=") return Formula::le(a, b);
                    if (op.text == "<") return Formula::lt(a, b);
                    if (op.text == ">=") return Formula::le(b, a);
                    if (op.text == ">") return Formula::lt(b, a);
                    return Formula::negation(Formula::eq(a, b));
                }
            }
            fail("expected comparison operator");
        } catch (const ParseError&) {
            p_ = save;
            if (!is_op("(")) throw;
        }
        ++p_;
        Formula f = iff();
        expect_op(")");
        return f;
    }

    Term sum() {
        Term a = product();
        while (is_op("+") || is_op("-")) {
            const bool plus = peek().text == "+";
            ++p_;
            Term b = product();
            a = plus ? Term::add(a, b) : Term::sub(a, b);
        }
        return a;
    }

    static std::optional<std::int64_t> ground_value(const Term& t) {
        if (t.kind() == Term::Kind::Const) return t.value();
        if (!free_vars(t).empty()) return std::nullopt;
        try {
            return evaluate(t, {});
        } catch (const InvalidInput&) {
            return std::nullopt;
        }
    }

    Term product() {
        Term a = factor();
        while (is_op("*")) {
            const Token star = peek();
            ++p_;
            Term b = factor();
            if (auto c = ground_value(a)) {
                a = Term::mul(*c, b);
            } else if (auto d = ground_value(b)) {
                a = Term::mul(*d, a);
            } else {
                throw ParseError(star.line, star.column, "nonlinear term: one factor must be a literal");
            }
        }
        return a;
    }

    std::int64_t literal(bool negative) {
        const Token& tok = peek();
        std::uint64_t magnitude = 0;
        auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), magnitude);
        const std::uint64_t limit = negative ? std::uint64_t{1} << 63 : std::numeric_limits<std::int64_t>::max();
        if (ec != std::errc() || magnitude > limit) fail("integer literal out of range");
        ++p_;
        if (negative) return magnitude == limit ? std::numeric_limits<std::int64_t>::min()
                                                : -static_cast<std::int64_t>(magnitude);
        return static_cast<std::int64_t>(magnitude);
    }

    Term factor() {
        if (is_op("-")) {
            ++p_;
            if (peek().kind == Tok::Int) return Term::constant(literal(true));
            return Term::neg(factor());
        }
        if (peek().kind == Tok::Int) return Term::constant(literal(false));
        if (peek().kind == Tok::Ident) {
            if (is_keyword(peek().text)) fail("unexpected keyword '" + peek().text + "'");
            return Term::var(t_[p_++].text);
        }
        if (is_op("(")) {
            ++p_;
            Term t = sum();
            expect_op(")");
            return t;
        }
        if (peek().kind == Tok::End) fail("unexpected end of input");
        fail("expected term");
    }
};

}  // namespace

Formula parse_formula(std::string_view text, int line, int column) {
    return Parser(Lexer(text, line, column).run()).formula_all();
}

Term parse_term(std::string_view text, int line, int column) {
    return Parser(Lexer(text, line, column).run()).term_all();
}

bool is_identifier(std::string_view s) {
    if (s.empty() || !ident_start(s[0]) || is_keyword(s)) return false;
    std::size_t i = 1;
    while (i < s.size() && ident_char(s[i])) ++i;
    while (i < s.size() && s[i] == '\'') ++i;
    return i == s.size();
}

}  // namespace sygra
