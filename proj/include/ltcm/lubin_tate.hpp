#pragma once

#include <optional>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "poly.hpp"
#include "series.hpp"

namespace ltcm {

// A Lubin-Tate generator d(t) = pi*t + ..., d == t^p mod p.
struct LTSeed {
    PadicInt pi;
    TruncSeries d;
    std::optional<PadicPoly> poly;  // set when d is a polynomial of degree p

    const Ctx& ctx() const { return d.ctx(); }
    long p() const { return d.ctx()->p; }
    int trunc() const { return d.trunc(); }
    bool is_polynomial() const { return poly.has_value(); }
};

inline LTSeed make_seed(const TruncSeries& d)
{
    if (d.nvars() != 1) throw ValidationError("seed must be a one-variable series");
    const Ctx& c = d.ctx();
    const long p = c->p;
    if (d.trunc() < p) throw ValidationError("seed truncation must be at least p=" + std::to_string(p));
    if (d.has_constant_term()) throw ValidationError("seed has a nonzero constant term");
    PadicInt pi(c, d.coeff1(1));
    if (pi.ord() != Ord::exact(1))
        throw ValidationError("seed linear coefficient must have valuation exactly 1, got ord " + pi.ord().str());
    for (const auto& t : d.terms()) {
        int k = mono_degree(t.first);
        bool divisible = mpz_divisible_ui_p(t.second.get_mpz_t(), p) != 0;
        if (k == p && divisible) throw ValidationError("seed coefficient of t^p must be 1 mod p");
        if (k != p && !divisible)
            throw ValidationError("seed coefficient of t^" + std::to_string(k) + " must be divisible by p");
    }
    if (d.coeff1(static_cast<int>(p)) == 0) throw ValidationError("seed coefficient of t^p must be 1 mod p");
    LTSeed s{pi, d, std::nullopt};
    if (d.max_degree() == p && d.eff_prec() == c->N) {
        std::vector<mpz_class> a(p + 1, 0);
        for (const auto& t : d.terms()) a[mono_degree(t.first)] = t.second;
        s.poly = PadicPoly(c, a);
    }
    return s;
}

inline LTSeed make_seed(const PadicPoly& d, int D)
{
    if (d.degree() > D) throw ValidationError("seed polynomial degree exceeds the truncation");
    return make_seed(TruncSeries::from_poly(d, D));
}

// (1+t)^p - 1
inline LTSeed multiplicative_seed(const Ctx& c, int D)
{
    std::vector<mpz_class> a(c->p + 1);
    for (long k = 0; k <= c->p; ++k) mpz_bin_uiui(a[k].get_mpz_t(), c->p, k);
    a[0] = 0;
    return make_seed(PadicPoly(c, a), D);
}

// pi*t + t^p
inline LTSeed frobenius_seed(const Ctx& c, int D, const mpz_class& pi)
{
    std::vector<mpz_class> a(c->p + 1, 0);
    a[1] = pi;
    a[c->p] = 1;
    return make_seed(PadicPoly(c, a), D);
}
inline LTSeed frobenius_seed(const Ctx& c, int D) { return frobenius_seed(c, D, c->p); }

// One-dimensional d applied to each of n variables.
inline std::vector<TruncSeries> coordinatewise(const TruncSeries& d, int n)
{
    std::vector<TruncSeries> r;
    for (int i = 0; i < n; ++i) r.push_back(d.relabeled(n, {i}));
    return r;
}

// The unique phi = L + (deg >= 2) with d_dst(phi(X)) = phi(d_src(X_1), ..., d_src(X_n)).
// Degree k is fixed by dividing the degree-k obstruction by pi - pi^k, which
// costs one digit of precision per degree.
inline TruncSeries solve_intertwine(const TruncSeries& L, const LTSeed& src, const LTSeed& dst)
{
    if (!same_context(src.ctx(), dst.ctx()) || !same_context(L.ctx(), src.ctx()))
        throw ValidationError("solve_intertwine: seeds with different (p, N)");
    if (src.trunc() != dst.trunc() || L.trunc() != src.trunc())
        throw ValidationError("solve_intertwine: mismatched truncation");
    if (!(src.pi == dst.pi)) throw DomainError("solve_intertwine: seeds have different uniformizers");
    if (L.has_constant_term() || L.max_degree() > 1) throw ValidationError("solve_intertwine: L must be a linear form");
    const Ctx& c = L.ctx();
    const long p = c->p;
    const int D = L.trunc();
    const int n = L.nvars();
    std::vector<TruncSeries> args = coordinatewise(src.d, n);
    TruncSeries phi = L;
    for (int k = 2; k <= D; ++k) {
        TruncSeries lhs = series_compose(phi, args, k);
        TruncSeries rhs = series_compose(dst.d, {phi}, k);
        TruncSeries E = (lhs - rhs).homogeneous(k);
        const int cur = E.eff_prec();
        if (cur - 1 < 1)
            throw PrecisionError("solve_intertwine: precision exhausted at degree " + std::to_string(k) +
                                 " (N=" + std::to_string(c->N) + ")");
        // (pi - pi^k)/p is a unit
        mpz_class u = src.pi.value() - src.pi.pow(k).value();
        mpz_divexact_ui(u.get_mpz_t(), u.get_mpz_t(), p);
        const mpz_class& m = c->pow[cur - 1];
        mpz_class uinv = inverse_mod(u, m);
        std::vector<Term> delta;
        for (const auto& t : E.terms()) {
            if (mpz_divisible_ui_p(t.second.get_mpz_t(), p) == 0)
                throw DomainError("seed is not a Lubin-Tate generator: degree-" + std::to_string(k) +
                                  " obstruction not divisible by pi");
            mpz_class q;
            mpz_divexact_ui(q.get_mpz_t(), t.second.get_mpz_t(), p);
            delta.emplace_back(t.first, mpz_class(q * uinv));
        }
        phi = phi.with_eff(cur - 1) + TruncSeries::from_terms(c, n, D, cur - 1, std::move(delta));
    }
    return phi;
}

// g-dimensional law: law[j] is a series in 2g variables X_1..X_g, Y_1..Y_g.
struct FormalGroupLaw {
    int g = 1;
    std::vector<TruncSeries> law;
    std::string provenance;
};

// F(a, b) for g-tuples a, b of series in a common ring
inline std::vector<TruncSeries> fg_add(const FormalGroupLaw& F, const std::vector<TruncSeries>& a,
                                       const std::vector<TruncSeries>& b)
{
    std::vector<TruncSeries> args(a);
    args.insert(args.end(), b.begin(), b.end());
    std::vector<TruncSeries> r;
    for (const auto& f : F.law) r.push_back(series_compose(f, args));
    return r;
}

inline std::vector<TruncSeries> fg_variables(const Ctx& c, int nvars, int D, int first, int g)
{
    std::vector<TruncSeries> v;
    for (int i = 0; i < g; ++i) v.push_back(TruncSeries::variable(c, nvars, D, first + i));
    return v;
}

struct AxiomResiduals {
    bool identity = false;
    bool commutative = false;
    bool associative = false;
    int eff_prec = 0;
    bool all() const { return identity && commutative && associative; }
};

inline AxiomResiduals check_axioms(const FormalGroupLaw& F)
{
    const Ctx& c = F.law[0].ctx();
    const int D = F.law[0].trunc(), g = F.g;
    AxiomResiduals r;
    r.eff_prec = F.law[0].eff_prec();
    {
        auto X = fg_variables(c, g, D, 0, g);
        std::vector<TruncSeries> Z(g, TruncSeries(c, g, D));
        auto s = fg_add(F, X, Z);
        r.identity = true;
        for (int j = 0; j < g; ++j) r.identity = r.identity && same(s[j], X[j]);
    }
    {
        auto X = fg_variables(c, 2 * g, D, 0, g), Y = fg_variables(c, 2 * g, D, g, g);
        auto a = fg_add(F, X, Y), b = fg_add(F, Y, X);
        r.commutative = true;
        for (int j = 0; j < g; ++j) r.commutative = r.commutative && same(a[j], b[j]);
    }
    {
        auto X = fg_variables(c, 3 * g, D, 0, g), Y = fg_variables(c, 3 * g, D, g, g),
             Z = fg_variables(c, 3 * g, D, 2 * g, g);
        auto l = fg_add(F, fg_add(F, X, Y), Z), rr = fg_add(F, X, fg_add(F, Y, Z));
        r.associative = true;
        for (int j = 0; j < g; ++j) r.associative = r.associative && same(l[j], rr[j]);
    }
    return r;
}

inline FormalGroupLaw group_law(const LTSeed& seed)
{
    const Ctx& c = seed.ctx();
    const int D = seed.trunc();
    TruncSeries L = TruncSeries::variable(c, 2, D, 0) + TruncSeries::variable(c, 2, D, 1);
    return {1, {solve_intertwine(L, seed, seed)}, "group_law: degree-wise intertwining solve, L = X + Y"};
}

inline TruncSeries endo(const LTSeed& seed, const PadicInt& a)
{
    TruncSeries L = TruncSeries::variable(seed.ctx(), 1, seed.trunc(), 0).scaled(a);
    return solve_intertwine(L, seed, seed);
}

struct FglHom {
    std::vector<TruncSeries> series;
    Matrix<PadicInt> jacobian;
};

inline Matrix<PadicInt> jacobian_of(const std::vector<TruncSeries>& phi)
{
    Matrix<PadicInt> J;
    for (const auto& s : phi) {
        std::vector<PadicInt> row;
        for (int i = 0; i < s.nvars(); ++i) row.emplace_back(s.ctx(), s.coeff(mono_var(i)));
        J.push_back(row);
    }
    return J;
}

inline FglHom strict_iso(const LTSeed& src, const LTSeed& dst)
{
    if (!(src.pi == dst.pi)) throw DomainError("strict_iso: seeds have different uniformizers");
    TruncSeries phi = solve_intertwine(TruncSeries::variable(src.ctx(), 1, src.trunc(), 0), src, dst);
    return {{phi}, jacobian_of({phi})};
}

// [pi](t) = pi*t + u*t^p + pi*alpha(t) + beta(t) with u a unit, alpha of
// order >= 2 and beta of order >= 2p.
struct PiShape {
    bool ok = false;
    PadicInt u;
    TruncSeries pi_endo, alpha, beta;
    int failing_degree = 0;
    std::string message;
};

inline PiShape verify_pi_shape(const LTSeed& seed)
{
    const Ctx& c = seed.ctx();
    const long p = c->p;
    const int D = seed.trunc();
    PiShape r;
    r.pi_endo = endo(seed, seed.pi);
    const int eff = r.pi_endo.eff_prec();
    r.alpha = TruncSeries(c, 1, D, std::max(1, eff - 1));
    r.beta = TruncSeries(c, 1, D, eff);
    r.u = PadicInt(c, r.pi_endo.coeff1(static_cast<int>(p)));
    if (!(PadicInt(c, r.pi_endo.coeff1(1)) == seed.pi.truncated(eff))) {
        r.failing_degree = 1;
        r.message = "linear coefficient differs from pi";
        return r;
    }
    if (!r.u.is_unit()) {
        r.failing_degree = static_cast<int>(p);
        r.message = "coefficient of t^p is not a unit";
        return r;
    }
    mpz_class piq = seed.pi.value() / p;  // pi = p * unit
    mpz_class piq_inv = inverse_mod(piq, c->pow[std::max(1, eff - 1)]);
    for (const auto& t : r.pi_endo.terms()) {
        int k = mono_degree(t.first);
        if (k == 1 || k == p) continue;
        if (k >= 2 * p) {
            r.beta.set(t.first, t.second);
            continue;
        }
        if (mpz_divisible_ui_p(t.second.get_mpz_t(), p) == 0) {
            r.failing_degree = k;
            r.message = "coefficient of t^" + std::to_string(k) + " is not divisible by pi";
            return r;
        }
        mpz_class q;
        mpz_divexact_ui(q.get_mpz_t(), t.second.get_mpz_t(), p);
        r.alpha.set(t.first, q * piq_inv);
    }
    r.ok = true;
    return r;
}

}  // namespace ltcm
