#include "sygra/omega.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace sygra {

namespace {

using i64 = std::int64_t;
using i128 = __int128;
using Model = std::vector<i64>;

struct Overflow : std::runtime_error {
    Overflow() : std::runtime_error("coefficient overflow") {}
};
struct BudgetExhausted : std::runtime_error {
    BudgetExhausted() : std::runtime_error("step budget exhausted") {}
};

i64 narrow(i128 v) {
    if (v > static_cast<i128>(INT64_MAX) || v < static_cast<i128>(INT64_MIN)) throw Overflow();
    return static_cast<i64>(v);
}

i64 floor_div(i64 a, i64 b) {
    i64 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

i64 ceil_div(i64 a, i64 b) { return -floor_div(-a, b); }

// a - m * floor(a/m + 1/2): symmetric residue in (-m/2, m/2].
i64 mod_hat(i64 a, i64 m) { return narrow(static_cast<i128>(a) - static_cast<i128>(m) * floor_div(narrow(2 * static_cast<i128>(a) + m), 2 * m)); }

struct Row {
    std::vector<i64> a;
    i64 c = 0;
};

struct Problem {
    std::size_t n = 0;
    std::vector<Row> eqs;
    std::vector<Row> geqs;
};

i64 gcd_of(const std::vector<i64>& a) {
    i64 g = 0;
    for (i64 v : a) g = std::gcd(g, v < 0 ? -v : v);
    return g;
}

i64 eval_row(const Row& r, const Model& m) {
    i128 s = r.c;
    for (std::size_t i = 0; i < r.a.size(); ++i) s += static_cast<i128>(r.a[i]) * m[i];
    return narrow(s);
}

// row + factor * def, where def expresses the eliminated variable `k`.
Row substitute(const Row& row, std::size_t k, const Row& def) {
    const i64 f = row.a[k];
    if (f == 0) return row;
    Row out = row;
    out.a[k] = 0;
    for (std::size_t i = 0; i < def.a.size(); ++i)
        out.a[i] = narrow(static_cast<i128>(out.a[i]) + static_cast<i128>(f) * def.a[i]);
    out.c = narrow(static_cast<i128>(out.c) + static_cast<i128>(f) * def.c);
    return out;
}

// a*lower + b*upper for lower b*x + beta >= 0 and upper -a*x + alpha >= 0.
Row combine(const Row& lower, const Row& upper, std::size_t j, i64 slack) {
    const i64 b = lower.a[j];
    const i64 a = -upper.a[j];
    Row out;
    out.a.resize(lower.a.size());
    for (std::size_t i = 0; i < lower.a.size(); ++i)
        out.a[i] = narrow(static_cast<i128>(a) * lower.a[i] + static_cast<i128>(b) * upper.a[i]);
    out.a[j] = 0;
    out.c = narrow(static_cast<i128>(a) * lower.c + static_cast<i128>(b) * upper.c - slack);
    return out;
}

class Omega {
public:
    explicit Omega(std::size_t budget) : budget_(budget) {}

    std::optional<Model> solve(Problem p) {
        if (++steps_ > budget_) throw BudgetExhausted();
        if (!normalize(p)) return std::nullopt;
        if (!p.eqs.empty()) return eliminate_equality(std::move(p));
        return eliminate_inequalities(std::move(p));
    }

private:
    std::size_t budget_;
    std::size_t steps_ = 0;

    static bool normalize(Problem& p) {
        std::vector<Row> eqs;
        for (auto& r : p.eqs) {
            const i64 g = gcd_of(r.a);
            if (g == 0) {
                if (r.c != 0) return false;
                continue;
            }
            if (r.c % g != 0) return false;
            for (auto& v : r.a) v /= g;
            r.c /= g;
            eqs.push_back(std::move(r));
        }
        p.eqs = std::move(eqs);

        // Tightest constant per coefficient vector; opposite pairs detect
        // contradictions and hidden equalities.
        std::map<std::vector<i64>, i64> best;
        for (auto& r : p.geqs) {
            const i64 g = gcd_of(r.a);
            if (g == 0) {
                if (r.c < 0) return false;
                continue;
            }
            for (auto& v : r.a) v /= g;
            r.c = floor_div(r.c, g);
            auto [it, inserted] = best.emplace(r.a, r.c);
            if (!inserted) it->second = std::min(it->second, r.c);
        }
        p.geqs.clear();
        std::map<std::vector<i64>, bool> promoted;
        for (const auto& [a, c] : best) {
            std::vector<i64> neg(a.size());
            std::transform(a.begin(), a.end(), neg.begin(), [](i64 v) { return -v; });
            auto opp = best.find(neg);
            if (opp != best.end()) {
                const i128 sum = static_cast<i128>(c) + opp->second;
                if (sum < 0) return false;
                if (sum == 0) {
                    if (!promoted.count(neg)) {
                        promoted[a] = true;
                        p.eqs.push_back(Row{a, c});
                    }
                    continue;
                }
            }
            p.geqs.push_back(Row{a, c});
        }
        return true;
    }

    std::optional<Model> eliminate_equality(Problem p) {
        // Prefer a unit coefficient; otherwise the smallest one.
        std::size_t row = 0, k = 0;
        i64 best = INT64_MAX;
        for (std::size_t r = 0; r < p.eqs.size() && best != 1; ++r) {
            for (std::size_t i = 0; i < p.n; ++i) {
                const i64 v = p.eqs[r].a[i] < 0 ? -p.eqs[r].a[i] : p.eqs[r].a[i];
                if (v != 0 && v < best) {
                    best = v;
                    row = r;
                    k = i;
                }
            }
        }
        const Row eq = p.eqs[row];
        const i64 ak = eq.a[k];

        if (best == 1) {
            // x_k = -ak * (sum_{i != k} a_i x_i + c)
            Row def;
            def.a.resize(p.n);
            for (std::size_t i = 0; i < p.n; ++i) def.a[i] = i == k ? 0 : narrow(-static_cast<i128>(ak) * eq.a[i]);
            def.c = narrow(-static_cast<i128>(ak) * eq.c);
            Problem q;
            q.n = p.n;
            for (std::size_t r = 0; r < p.eqs.size(); ++r)
                if (r != row) q.eqs.push_back(substitute(p.eqs[r], k, def));
            for (const auto& g : p.geqs) q.geqs.push_back(substitute(g, k, def));
            auto m = solve(std::move(q));
            if (!m) return std::nullopt;
            (*m)[k] = eval_row(def, *m);
            return m;
        }

        // Coefficient reduction with a fresh variable sigma:
        //   x_k = sign(ak) * (-m sigma + sum_{i != k} mod_hat(a_i) x_i + mod_hat(c))
        const i64 m = best + 1;
        const i64 sign = ak > 0 ? 1 : -1;
        const std::size_t sigma = p.n;
        Problem q;
        q.n = p.n + 1;
        auto widen = [&](Row r) {
            r.a.push_back(0);
            return r;
        };
        Row def;
        def.a.assign(q.n, 0);
        for (std::size_t i = 0; i < p.n; ++i)
            if (i != k) def.a[i] = narrow(static_cast<i128>(sign) * mod_hat(eq.a[i], m));
        def.a[sigma] = narrow(-static_cast<i128>(sign) * m);
        def.c = narrow(static_cast<i128>(sign) * mod_hat(eq.c, m));
        for (const auto& e : p.eqs) q.eqs.push_back(substitute(widen(e), k, def));
        for (const auto& g : p.geqs) q.geqs.push_back(substitute(widen(g), k, def));
        auto model = solve(std::move(q));
        if (!model) return std::nullopt;
        (*model)[k] = eval_row(def, *model);
        model->pop_back();
        return model;
    }

    // Value for x_j given the other variables, inside all bounds from `rows`.
    static i64 pick(const std::vector<Row>& rows, std::size_t j, Model& m) {
        m[j] = 0;
        std::optional<i64> lo, hi;
        for (const auto& r : rows) {
            const i64 coef = r.a[j];
            if (coef == 0) continue;
            const i64 rest = eval_row(r, m);
            if (coef > 0) {
                const i64 v = ceil_div(-rest, coef);
                lo = lo ? std::max(*lo, v) : v;
            } else {
                const i64 v = floor_div(rest, -coef);
                hi = hi ? std::min(*hi, v) : v;
            }
        }
        if (lo && hi && *lo > *hi) throw std::logic_error("omega: empty back-substitution interval");
        return lo ? *lo : hi ? *hi : 0;
    }

    std::optional<Model> eliminate_inequalities(Problem p) {
        if (p.geqs.empty()) return Model(p.n, 0);

        std::vector<std::size_t> lowers(p.n, 0), uppers(p.n, 0);
        std::vector<bool> unit_lower(p.n, true), unit_upper(p.n, true);
        for (const auto& r : p.geqs) {
            for (std::size_t i = 0; i < p.n; ++i) {
                if (r.a[i] > 0) {
                    ++lowers[i];
                    if (r.a[i] != 1) unit_lower[i] = false;
                } else if (r.a[i] < 0) {
                    ++uppers[i];
                    if (r.a[i] != -1) unit_upper[i] = false;
                }
            }
        }

        // A variable bounded on one side only: drop its constraints.
        for (std::size_t j = 0; j < p.n; ++j) {
            if ((lowers[j] == 0) != (uppers[j] == 0)) {
                Problem q;
                q.n = p.n;
                std::vector<Row> dropped;
                for (auto& r : p.geqs) (r.a[j] != 0 ? dropped : q.geqs).push_back(r);
                auto m = solve(std::move(q));
                if (!m) return std::nullopt;
                (*m)[j] = pick(dropped, j, *m);
                return m;
            }
        }

        std::size_t j = p.n;
        bool exact = false;
        std::size_t cost = SIZE_MAX;
        for (std::size_t i = 0; i < p.n; ++i) {
            if (lowers[i] == 0) continue;
            const bool e = unit_lower[i] || unit_upper[i];
            const std::size_t c = lowers[i] * uppers[i];
            if ((e && !exact) || (e == exact && c < cost)) {
                j = i;
                exact = e;
                cost = c;
            }
        }
        if (j == p.n) return Model(p.n, 0);  // unreachable: normalize drops constant rows

        std::vector<Row> rest, lo, hi, involved;
        for (const auto& r : p.geqs) {
            if (r.a[j] > 0) {
                lo.push_back(r);
                involved.push_back(r);
            } else if (r.a[j] < 0) {
                hi.push_back(r);
                involved.push_back(r);
            } else {
                rest.push_back(r);
            }
        }

        auto shadow = [&](bool dark) {
            Problem q;
            q.n = p.n;
            q.geqs = rest;
            for (const auto& l : lo) {
                for (const auto& u : hi) {
                    const i64 b = l.a[j];
                    const i64 a = -u.a[j];
                    q.geqs.push_back(combine(l, u, j, dark ? narrow(static_cast<i128>(a - 1) * (b - 1)) : 0));
                }
            }
            return q;
        };

        if (exact) {
            auto m = solve(shadow(false));
            if (!m) return std::nullopt;
            (*m)[j] = pick(involved, j, *m);
            return m;
        }

        if (!solve(shadow(false))) return std::nullopt;
        if (auto m = solve(shadow(true))) {
            (*m)[j] = pick(involved, j, *m);
            return m;
        }

        // Splinters: any integer solution outside the dark shadow lies close to
        // some lower bound.
        i64 a_max = 0;
        for (const auto& u : hi) a_max = std::max(a_max, -u.a[j]);
        for (const auto& l : lo) {
            const i64 b = l.a[j];
            const i64 limit = floor_div(narrow(static_cast<i128>(a_max) * b - a_max - b), a_max);
            for (i64 i = 0; i <= limit; ++i) {
                Problem q = p;
                Row e = l;
                e.c = narrow(static_cast<i128>(e.c) - i);
                q.eqs.push_back(std::move(e));
                if (auto m = solve(std::move(q))) return m;
            }
        }
        return std::nullopt;
    }
};

}  // namespace

OmegaOutcome omega_solve(std::size_t num_vars, const std::vector<LinearConstraint>& constraints,
                         std::size_t step_budget) {
    Problem p;
    p.n = num_vars;
    for (const auto& c : constraints) {
        Row r{c.coeffs, c.constant};
        r.a.resize(num_vars, 0);
        (c.equality ? p.eqs : p.geqs).push_back(std::move(r));
    }
    OmegaOutcome out;
    try {
        auto m = Omega(step_budget).solve(std::move(p));
        if (m) {
            out.result = OmegaOutcome::Result::Sat;
            out.model = std::move(*m);
        } else {
            out.result = OmegaOutcome::Result::Unsat;
        }
    } catch (const std::exception& e) {
        out.result = OmegaOutcome::Result::Unknown;
        out.diagnostic = e.what();
    }
    return out;
}

}  // namespace sygra
