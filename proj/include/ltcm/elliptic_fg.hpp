#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "lubin_tate.hpp"
#include "poly.hpp"
#include "series.hpp"

namespace ltcm {

constexpr int kEllipticTruncBudget = 40;

// y^2 = x^3 + a x + b
struct WeierstrassCurve {
    mpz_class a, b;
    mpz_class discriminant() const { return -16 * (4 * a * a * a + 27 * b * b); }
    bool good_reduction(long p) const { return discriminant() % p != 0; }
};

// x + y sqrt(-d)
struct QuadRat {
    mpq_class x = 0, y = 0;
    bool is_zero() const { return x == 0 && y == 0; }
    bool operator==(const QuadRat&) const = default;
};

struct QuadField {
    long d = 1;
    QuadRat add(const QuadRat& u, const QuadRat& v) const { return {u.x + v.x, u.y + v.y}; }
    QuadRat sub(const QuadRat& u, const QuadRat& v) const { return {u.x - v.x, u.y - v.y}; }
    QuadRat mul(const QuadRat& u, const QuadRat& v) const
    {
        return {u.x * v.x - d * u.y * v.y, u.x * v.y + u.y * v.x};
    }
    QuadRat scale(const QuadRat& u, const mpq_class& s) const { return {u.x * s, u.y * s}; }
    QuadRat conj(const QuadRat& u) const { return {u.x, -u.y}; }
    mpq_class norm(const QuadRat& u) const { return u.x * u.x + d * u.y * u.y; }
    mpq_class trace(const QuadRat& u) const { return 2 * u.x; }
};

using QSeries = std::vector<mpq_class>;  // z^0 .. z^D

namespace qseries {

inline QSeries mul(const QSeries& f, const QSeries& g, int D)
{
    QSeries r(D + 1, 0);
    for (int i = 0; i <= D && i < static_cast<int>(f.size()); ++i)
        if (f[i] != 0)
            for (int j = 0; i + j <= D && j < static_cast<int>(g.size()); ++j) r[i + j] += f[i] * g[j];
    return r;
}

// 1/f for f(0) != 0
inline QSeries inverse(const QSeries& f, int D)
{
    QSeries r(D + 1, 0);
    r[0] = 1 / f[0];
    for (int n = 1; n <= D; ++n) {
        mpq_class s = 0;
        for (int k = 1; k <= n && k < static_cast<int>(f.size()); ++k) s += f[k] * r[n - k];
        r[n] = -s / f[0];
    }
    return r;
}

// f(g) with g(0) = 0
inline QSeries compose(const QSeries& f, const QSeries& g, int D)
{
    QSeries acc(D + 1, 0);
    for (int k = std::min<int>(D, static_cast<int>(f.size()) - 1); k >= 0; --k) {
        acc = mul(acc, g, D);
        acc[0] += f[k];
    }
    return acc;
}

// compositional inverse of z + O(z^2)
inline QSeries reversion(const QSeries& f, int D)
{
    QSeries e(D + 1, 0);
    e[1] = 1 / f[1];
    for (int n = 2; n <= D; ++n) {
        QSeries c = compose(f, e, n);
        e[n] = -c[n] / f[1];
    }
    return e;
}

}  // namespace qseries

// homogeneous parts: part[n][i] is the coefficient of X^i Y^(n-i)
struct BiSeries {
    int D = 0;
    std::vector<std::vector<mpq_class>> part;
    explicit BiSeries(int D_ = 0) : D(D_)
    {
        for (int n = 0; n <= D; ++n) part.emplace_back(n + 1, 0);
    }
    const mpq_class& coeff(int i, int j) const { return part[i + j][i]; }
    BiSeries mul(const BiSeries& o) const
    {
        BiSeries r(D);
        for (int n = 0; n <= D; ++n)
            for (int m = 0; n + m <= D; ++m)
                for (int i = 0; i <= n; ++i) {
                    if (part[n][i] == 0) continue;
                    for (int j = 0; j <= m; ++j) r.part[n + m][i + j] += part[n][i] * o.part[m][j];
                }
        return r;
    }
};

struct EllipticFormalData {
    WeierstrassCurve curve;
    int D = 0;
    QSeries w;      // w(z) = -1/y in z = -x/y
    QSeries omega;  // invariant differential omega(z) dz
    QSeries log, exp;
    BiSeries law;   // F(X, Y) = exp(log X + log Y)
};

// w = z^3 + a z w^2 + b w^3 solved degree by degree
inline QSeries weierstrass_w(const WeierstrassCurve& E, int D)
{
    QSeries w(D + 1, 0);
    if (D >= 3) w[3] = 1;
    for (int it = 0; it <= D; ++it) {
        QSeries w2 = qseries::mul(w, w, D), w3 = qseries::mul(w2, w, D);
        QSeries nw(D + 1, 0);
        if (D >= 3) nw[3] = 1;
        for (int k = 0; k + 1 <= D; ++k) nw[k + 1] += mpq_class(E.a) * w2[k];
        for (int k = 0; k <= D; ++k) nw[k] += mpq_class(E.b) * w3[k];
        if (nw == w) break;
        w = nw;
    }
    return w;
}

inline EllipticFormalData curve_group_law(const WeierstrassCurve& E, int D)
{
    if (D < 1 || D > kEllipticTruncBudget)
        throw ValidationError("elliptic truncation D must be in 1.." + std::to_string(kEllipticTruncBudget));
    if (E.discriminant() == 0) throw DomainError("curve is singular");
    EllipticFormalData r;
    r.curve = E;
    r.D = D;
    const int M = D + 3;
    r.w = weierstrass_w(E, M);
    // omega = (z w' - w) / (2 w) = 1 + z W' / (2 W), w = z^3 W
    QSeries W(M - 2, 0), dW(M - 2, 0);
    for (int k = 3; k <= M; ++k) W[k - 3] = r.w[k];
    for (int k = 1; k < static_cast<int>(W.size()); ++k) dW[k] = k * W[k];  // z W'
    QSeries q = qseries::mul(dW, qseries::inverse(W, D), D);
    r.omega.assign(D + 1, 0);
    for (int k = 0; k <= D; ++k) r.omega[k] = q[k] / 2;
    r.omega[0] += 1;
    r.log.assign(D + 1, 0);
    for (int k = 0; k < D; ++k) r.log[k + 1] = r.omega[k] / (k + 1);
    r.exp = qseries::reversion(r.log, D);

    // exp(S) with S = log X + log Y, via Sum e_k S^k
    BiSeries S(D), acc(D);
    for (int n = 1; n <= D; ++n) {
        S.part[n][n] += r.log[n];
        S.part[n][0] += r.log[n];
    }
    for (int k = D; k >= 1; --k) {
        acc = acc.mul(S);
        acc.part[0][0] += r.exp[k];
    }
    acc = acc.mul(S);
    r.law = acc;
    for (int n = 0; n <= D; ++n)
        for (const auto& c : r.law.part[n])
            if (c.get_den() != 1)
                throw InvariantError("curve_group_law: non-integral coefficient " + c.get_str() + " in degree " +
                                     std::to_string(n));
    return r;
}

inline TruncSeries law_series(const EllipticFormalData& E, const Ctx& c, int D = -1)
{
    if (D < 0) D = E.D;
    TruncSeries F(c, 2, D);
    for (int n = 1; n <= D; ++n)
        for (int i = 0; i <= n; ++i) {
            const mpq_class& v = E.law.part[n][i];
            if (v != 0) F.set(make_mono({i, n - i}), v.get_num());
        }
    return F;
}

// the root of x^2 + d lifting the residue r0, and P-adic data of
// elements of Q(sqrt(-d)) under that embedding
struct QuadEmbedding {
    long p = 0;
    long d = 1;
    long residue = 0;

    mpz_class root(int M) const
    {
        auto c = make_context(p, M);
        PadicPoly f(c, std::vector<long>{d, 0, 1});
        return hensel_root(f, PadicInt(c, residue)).root.value();
    }

    // ord_P of U + V sqrt(-d); infinite when zero
    Ord ord_integral(const mpz_class& U, const mpz_class& V) const
    {
        if (U == 0 && V == 0) return Ord::infinite();
        mpz_class n = U * U + d * V * V;
        int bound = 0;
        while (n % p == 0) {
            n /= p;
            ++bound;
        }
        int M = bound + 1;
        auto c = make_context(p, M);
        return PadicInt(c, mpz_class(U + V * root(M))).ord();
    }

    static void clear(const QuadRat& u, mpz_class& U, mpz_class& V, mpz_class& den)
    {
        mpz_lcm(den.get_mpz_t(), u.x.get_den_mpz_t(), u.y.get_den_mpz_t());
        U = u.x.get_num() * (den / u.x.get_den());
        V = u.y.get_num() * (den / u.y.get_den());
    }

    Ord ord(const QuadRat& u) const
    {
        mpz_class U, V, den;
        clear(u, U, V, den);
        Ord o = ord_integral(U, V);
        if (!o.is_exact()) return o;
        long k = 0;
        while (den % p == 0) {
            den /= p;
            ++k;
        }
        return Ord::exact(o.value() - k);
    }

    // image in Z/p^N of a P-integral element
    PadicInt reduce(const QuadRat& u, const Ctx& c) const
    {
        mpz_class U, V, den;
        clear(u, U, V, den);
        int k = 0;
        mpz_class pk = 1;
        while (den % p == 0) {
            den /= p;
            pk *= p;
            ++k;
        }
        const int M = c->N + k;
        mpz_class t = U + V * root(M);
        mpz_class mod = c->modulus() * pk;
        reduce_mod(t, mod);
        if (t % pk != 0) throw DomainError("element is not integral at the chosen prime");
        t /= pk;
        return PadicInt(c, t) * PadicInt(c, den).inverse();
    }
};

using QuadSeries = std::vector<QuadRat>;

// [alpha](z) = exp(alpha log z) over Q(sqrt(-d))
inline QuadSeries cm_endo_exact(const EllipticFormalData& E, const QuadField& K, const QuadRat& alpha)
{
    const int D = E.D;
    QuadSeries g(D + 1), acc(D + 1);
    for (int k = 1; k <= D; ++k) g[k] = K.scale(alpha, E.log[k]);
    auto mul = [&](const QuadSeries& f, const QuadSeries& h) {
        QuadSeries r(D + 1);
        for (int i = 0; i <= D; ++i)
            if (!f[i].is_zero())
                for (int j = 0; i + j <= D; ++j)
                    if (!h[j].is_zero()) r[i + j] = K.add(r[i + j], K.mul(f[i], h[j]));
        return r;
    };
    for (int k = D; k >= 1; --k) {
        acc = mul(acc, g);
        acc[0] = K.add(acc[0], QuadRat{E.exp[k], 0});
    }
    return mul(acc, g);
}

struct CmEndo {
    QuadSeries exact;
    std::vector<Ord> ords;          // ord_P of each coefficient
    bool integral = true;
    int first_nonintegral = 0;
    TruncSeries series;             // image in Z/p^N when integral
    PadicInt linear;
};

inline CmEndo cm_endo_elliptic(const EllipticFormalData& E, const QuadEmbedding& emb, const QuadRat& alpha, const Ctx& c)
{
    if (!E.curve.good_reduction(emb.p)) throw DomainError("curve has bad reduction at p=" + std::to_string(emb.p));
    if ((emb.residue * emb.residue + emb.d) % emb.p != 0)
        throw ValidationError("embedding residue is not a square root of -d mod p");
    QuadField K{emb.d};
    CmEndo r;
    r.exact = cm_endo_exact(E, K, alpha);
    r.series = TruncSeries(c, 1, E.D);
    for (int k = 0; k <= E.D; ++k) {
        Ord o = emb.ord(r.exact[k]);
        r.ords.push_back(o);
        if (o.is_exact() && o.value() < 0) {
            if (r.integral) r.first_nonintegral = k;
            r.integral = false;
        }
    }
    if (r.integral) {
        for (int k = 1; k <= E.D; ++k)
            if (!r.exact[k].is_zero()) r.series.set(mono_var(0, k), emb.reduce(r.exact[k], c).value());
        r.linear = PadicInt(c, r.series.coeff1(1));
    }
    return r;
}

inline CmEndo cm_endo_elliptic(const EllipticFormalData& E, const QuadEmbedding& emb, const QuadRat& alpha, int N)
{
    return cm_endo_elliptic(E, emb, alpha, make_context(emb.p, N));
}

struct FrobeniusReport {
    QuadRat alpha;
    bool passes = false;
    bool integral = true;
    int first_failing_degree = 0;
    Ord linear_ord;
    std::string message;
};

// [alpha](z) = z^p mod P through D
inline FrobeniusReport frobenius_check(const EllipticFormalData& E, const QuadEmbedding& emb, const QuadRat& alpha)
{
    FrobeniusReport r;
    r.alpha = alpha;
    auto c = make_context(emb.p, 1);
    auto m = cm_endo_elliptic(E, emb, alpha, c);
    r.linear_ord = m.ords.size() > 1 ? m.ords[1] : Ord::infinite();
    if (!m.integral) {
        r.integral = false;
        r.first_failing_degree = m.first_nonintegral;
        r.message = "coefficient of degree " + std::to_string(m.first_nonintegral) + " is not P-integral";
        return r;
    }
    for (int k = 1; k <= E.D; ++k) {
        mpz_class want = k == emb.p ? 1 : 0;
        if (m.series.coeff1(k) != want) {
            r.first_failing_degree = k;
            r.message = "coefficient of z^" + std::to_string(k) + " is " + m.series.coeff1(k).get_str() +
                        " mod P, expected " + want.get_str();
            return r;
        }
    }
    r.passes = true;
    r.message = "[alpha](z) = z^" + std::to_string(emb.p) + " mod P through degree " + std::to_string(E.D);
    return r;
}

// a_p = p + 1 - #E(F_p) by counting points
inline long trace_of_frobenius(const WeierstrassCurve& E, long p)
{
    if (!E.good_reduction(p)) throw DomainError("bad reduction at p=" + std::to_string(p));
    std::vector<int> sq(p, 0);
    for (long y = 0; y < p; ++y) sq[(y * y) % p]++;
    long a = mpz_class(E.a % p).get_si(), b = mpz_class(E.b % p).get_si();
    long count = 1;
    for (long x = 0; x < p; ++x) {
        long v = ((x * x % p * x + a * x + b) % p + p) % p;
        count += sq[v];
    }
    return p + 1 - count;
}

// elements x + y sqrt(-d) of Z[sqrt(-d)] of norm n
inline std::vector<QuadRat> elements_of_norm(long d, long n)
{
    std::vector<QuadRat> r;
    for (long y = 0; d * y * y <= n; ++y)
        for (long x = 0; x * x + d * y * y <= n; ++x)
            if (x * x + d * y * y == n)
                for (long sx : {1L, -1L})
                    for (long sy : {1L, -1L}) {
                        if ((x == 0 && sx < 0) || (y == 0 && sy < 0)) continue;
                        r.push_back({mpq_class(sx * x), mpq_class(sy * y)});
                    }
    return r;
}

struct FrobeniusSearch {
    long trace = 0;                      // from the point count
    std::vector<FrobeniusReport> candidates;
    int passing = -1;                    // index into candidates
    int passing_count = 0;
};

inline FrobeniusSearch find_frobenius(const EllipticFormalData& E, const QuadEmbedding& emb)
{
    FrobeniusSearch s;
    s.trace = trace_of_frobenius(E.curve, emb.p);
    for (const auto& a : elements_of_norm(emb.d, emb.p)) s.candidates.push_back(frobenius_check(E, emb, a));
    for (std::size_t i = 0; i < s.candidates.size(); ++i)
        if (s.candidates[i].passes) {
            if (s.passing < 0) s.passing = static_cast<int>(i);
            ++s.passing_count;
        }
    return s;
}

struct LubinTateMatch {
    QuadRat alpha;
    PadicInt pi;
    LTSeed curve_seed, target_seed;
    FglHom iso;
    bool conjugation_ok = false;
    bool inverse_ok = false;
    std::vector<std::string> provenance;
};

// strict isomorphism from the curve's formal group to the Lubin-Tate group of
// pi t + t^p, pi the image of alpha_P
inline LubinTateMatch match_lubin_tate(const EllipticFormalData& E, const QuadEmbedding& emb, const QuadRat& alpha,
                                       int N)
{
    if (!frobenius_check(E, emb, alpha).passes)
        throw DomainError("match_lubin_tate: alpha does not pass the Frobenius check");
    auto c = make_context(emb.p, N);
    auto m = cm_endo_elliptic(E, emb, alpha, c);
    LubinTateMatch r;
    r.alpha = alpha;
    r.pi = m.linear;
    r.curve_seed = make_seed(m.series);
    r.target_seed = frobenius_seed(c, E.D, r.pi.value());
    r.iso = strict_iso(r.curve_seed, r.target_seed);
    const TruncSeries& phi = r.iso.series[0];
    TruncSeries inv = series_inverse(phi);
    TruncSeries X = TruncSeries::variable(c, 1, E.D, 0);
    r.inverse_ok = same(series_compose(phi, {inv}), X) && same(series_compose(inv, {phi}), X);
    TruncSeries FE = law_series(E, c);
    TruncSeries FLT = group_law(r.target_seed).law[0];
    TruncSeries X2 = TruncSeries::variable(c, 2, E.D, 0), Y2 = TruncSeries::variable(c, 2, E.D, 1);
    TruncSeries conj = series_compose(phi, {series_compose(FE, {series_compose(inv, {X2}), series_compose(inv, {Y2})})});
    r.conjugation_ok = same(conj, FLT);
    if (!r.inverse_ok || !r.conjugation_ok)
        throw InvariantError("match_lubin_tate: isomorphism does not carry the curve law to the Lubin-Tate law");
    r.provenance.push_back("curve_seed: [alpha_P](z) = exp(alpha_P log z) reduced at P, exact over Q(sqrt(-d))");
    r.provenance.push_back("iso: strict_iso(curve_seed, pi t + t^p) by solve_intertwine");
    r.provenance.push_back("conjugation_ok: phi(F_E(phi^-1 X, phi^-1 Y)) = F_LT through D");
    return r;
}

}  // namespace ltcm
