#include <gtest/gtest.h>

#include <random>

#include "common.hpp"
#include "ltcm/poly.hpp"
#include "ltcm/series.hpp"

using namespace ltcm;

namespace {

// Res(f, g) over Q by the Euclidean recursion; coefficient lists constant first
mpq_class euclid_resultant(std::vector<mpq_class> f, std::vector<mpq_class> g)
{
    auto trim = [](std::vector<mpq_class>& v) {
        while (!v.empty() && v.back() == 0) v.pop_back();
    };
    trim(f);
    trim(g);
    if (f.empty() || g.empty()) return 0;
    long m = f.size() - 1, n = g.size() - 1;
    if (n == 0) {
        mpq_class r = 1;
        for (long i = 0; i < m; ++i) r *= g[0];
        return r;
    }
    if (m < n) {
        mpq_class r = euclid_resultant(g, f);
        return (m * n) % 2 ? mpq_class(-r) : r;
    }
    std::vector<mpq_class> r(f);
    for (long k = m; k >= n; --k) {
        mpq_class q = r[k] / g[n];
        for (long j = 0; j <= n; ++j) r[k - n + j] -= q * g[j];
    }
    r.resize(n);
    trim(r);
    if (r.empty()) return 0;
    long dr = r.size() - 1;
    mpq_class s = 1;
    for (long i = 0; i < m - dr; ++i) s *= g[n];
    mpq_class rest = euclid_resultant(g, r);
    mpq_class res = s * rest;
    return (m * n) % 2 ? mpq_class(-res) : res;
}

long ord_int(mpz_class v, long p)
{
    long k = 0;
    while (v != 0 && v % p == 0) v /= p, ++k;
    return k;
}

}  // namespace

TEST(PadicInt, RingAxiomsRandomTriples)
{
    auto c = make_context(7, 12);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        PadicInt a(c, testutil::random_residue(rng, c->modulus()));
        PadicInt b(c, testutil::random_residue(rng, c->modulus()));
        PadicInt d(c, testutil::random_residue(rng, c->modulus()));
        EXPECT_EQ((a * b) * d, a * (b * d));
        EXPECT_EQ((a + b) + d, a + (b + d));
        EXPECT_EQ(a * (b + d), a * b + a * d);
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ(a - a, PadicInt(c, 0));
    }
}

TEST(PadicInt, ValuationIsAdditiveBelowCap)
{
    auto c = make_context(5, 10);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        PadicInt a(c, mpz_class(c->pow[rng() % 4]) * (1 + 5 * (rng() % 100) + rng() % 4));
        PadicInt b(c, mpz_class(c->pow[rng() % 4]) * (1 + 5 * (rng() % 100) + rng() % 4));
        Ord oa = a.ord(), ob = b.ord();
        ASSERT_TRUE(oa.is_exact() && ob.is_exact());
        if (oa.value() + ob.value() < c->N) {
            EXPECT_EQ((a * b).ord(), oa + ob);
        }
    }
}

TEST(PadicInt, ZeroHasCappedValuation)
{
    auto c = make_context(3, 6);
    Ord z = PadicInt(c, 0).ord();
    EXPECT_TRUE(z.is_capped());
    EXPECT_EQ(z.bound(), 6);
    EXPECT_THROW(z.value(), PrecisionError);
    EXPECT_FALSE(z == Ord::exact(6));
    EXPECT_EQ(PadicInt(c, 729).ord().str(), ">=6");
    EXPECT_EQ(PadicInt(c, 81).ord(), Ord::exact(4));
}

TEST(PadicInt, RejectsEvenOrCompositeModulus)
{
    EXPECT_THROW(make_context(2, 5), ValidationError);
    EXPECT_THROW(make_context(9, 5), ValidationError);
    EXPECT_THROW(make_context(5, 0), ValidationError);
}

TEST(SeriesCompose, IdentityAndZeroArguments)
{
    auto c = make_context(5, 12);
    const int D = 8;
    TruncSeries X = TruncSeries::variable(c, 1, D, 0);
    TruncSeries g = TruncSeries::from_poly(PadicPoly(c, std::vector<long>{0, 3, 1, 0, 7}), D);
    EXPECT_TRUE(same(series_compose(X, {g}), g));

    TruncSeries x2 = TruncSeries::variable(c, 2, D, 0), y2 = TruncSeries::variable(c, 2, D, 1);
    TruncSeries F = x2 + y2 + x2 * y2;
    TruncSeries t = TruncSeries::variable(c, 1, D, 0);
    EXPECT_TRUE(same(series_compose(F, {t, TruncSeries(c, 1, D)}), t));
}

TEST(SeriesCompose, CyclotomicSelfComposition)
{
    auto c = make_context(3, 19);
    const int D = 9;
    std::vector<mpz_class> a(4);
    for (int k = 1; k <= 3; ++k) a[k] = testutil::binomial(3, k);
    TruncSeries f = TruncSeries::from_poly(PadicPoly(c, a), D);
    TruncSeries ff = series_compose(f, {f});
    for (int k = 0; k <= D; ++k) {
        mpz_class expect = k == 0 ? mpz_class(0) : testutil::binomial(9, k);
        EXPECT_EQ(ff.coeff1(k), expect % c->modulus()) << "degree " << k;
    }
}

TEST(SeriesCompose, RejectsConstantTermsAndMismatch)
{
    auto c = make_context(5, 8);
    TruncSeries f = TruncSeries::variable(c, 1, 6, 0);
    TruncSeries one = TruncSeries::constant(c, 1, 6, 1);
    EXPECT_THROW(series_compose(f, {one}), DomainError);
    TruncSeries other = TruncSeries::variable(c, 1, 7, 0);
    EXPECT_THROW(series_compose(f, {other}), ValidationError);
    auto c3 = make_context(3, 8);
    EXPECT_THROW(series_compose(f, {TruncSeries::variable(c3, 1, 6, 0)}), ValidationError);
}

TEST(SeriesCompose, TruncationStability)
{
    auto c = make_context(5, 15);
    std::mt19937_64 rng(5);
    const int D = 8;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Term> ft, at, bt;
        for (int i = 0; i <= D + 5; ++i)
            for (int j = 0; i + j <= D + 5; ++j)
                if (rng() % 3 == 0) ft.emplace_back(make_mono({i, j}), mpz_class(static_cast<long>(rng() % 1000)));
        for (int k = 1; k <= D + 5; ++k) {
            at.emplace_back(mono_var(0, k), mpz_class(static_cast<long>(rng() % 1000)));
            bt.emplace_back(mono_var(0, k), mpz_class(static_cast<long>(rng() % 1000)));
        }
        auto build = [&](int d) {
            auto f = TruncSeries::from_terms(c, 2, d, c->N, ft);
            auto a = TruncSeries::from_terms(c, 1, d, c->N, at);
            auto b = TruncSeries::from_terms(c, 1, d, c->N, bt);
            return std::make_pair(series_compose(f, {a, b}), a * b);
        };
        auto [s1, m1] = build(D);
        auto [s2, m2] = build(D + 5);
        for (int k = 0; k <= D; ++k) {
            EXPECT_EQ(s1.coeff1(k), s2.coeff1(k));
            EXPECT_EQ(m1.coeff1(k), m2.coeff1(k));
        }
    }
}

TEST(SeriesInverse, UnitAndNonUnitLinearCoefficients)
{
    auto c = make_context(5, 14);
    const int D = 10;
    TruncSeries f = TruncSeries::from_poly(PadicPoly(c, std::vector<long>{0, 2, 5, 1, 3}), D);
    TruncSeries g = series_inverse(f);
    EXPECT_TRUE(same(series_compose(f, {g}), TruncSeries::variable(c, 1, D, 0)));
    EXPECT_TRUE(same(series_compose(g, {f}), TruncSeries::variable(c, 1, D, 0)));
    TruncSeries h = TruncSeries::from_poly(PadicPoly(c, std::vector<long>{0, 5, 1}), D);
    EXPECT_THROW(series_inverse(h), DomainError);
}

TEST(Hensel, SquareRootsOfMinusOneModFive)
{
    auto c = make_context(5, 10);
    PadicPoly f(c, std::vector<long>{1, 0, 1});
    auto r2 = hensel_root(f, PadicInt(c, 2));
    auto r3 = hensel_root(f, PadicInt(c, 3));
    EXPECT_TRUE(f.eval(r2.root).is_zero());
    EXPECT_TRUE(f.eval(r3.root).is_zero());
    EXPECT_EQ(r2.root.value() % 125, 57);
    EXPECT_EQ(r3.root.value() % 125, 68);
    EXPECT_EQ(r2.root.value() % 5, 2);
}

TEST(Hensel, LinearAndHypothesisFailure)
{
    auto c = make_context(5, 10);
    PadicPoly f(c, std::vector<long>{-7, 1});
    EXPECT_EQ(hensel_root(f, PadicInt(c, 7)).root, PadicInt(c, 7));
    PadicPoly g(c, std::vector<long>{1, 0, 1});
    EXPECT_THROW(hensel_root(g, PadicInt(c, 1)), DomainError);
    // x^2 - 5 has no root in Z_5 and f'(0) = 0
    PadicPoly h(c, std::vector<long>{-5, 0, 1});
    EXPECT_THROW(hensel_root(h, PadicInt(c, 0)), DomainError);
}

TEST(Hensel, NonUnitDerivativeWithStrongHypothesis)
{
    // (x - 26)(x - 1): f'(1) = -25 has ord 2, f(1 + 5^5) has ord 7 > 4
    auto c = make_context(5, 20);
    PadicPoly f(c, std::vector<long>{26, -27, 1});
    PadicInt a(c, 1 + 3125);
    auto r = hensel_root(f, a);
    EXPECT_TRUE(f.eval(r.root).is_zero());
    EXPECT_EQ(r.derivative_ord, 2);
    EXPECT_EQ(r.root.value() % 125, 1);
}

TEST(NewtonPolygon, WorkedExamples)
{
    auto c = make_context(5, 10);
    auto P = newton_polygon(PadicPoly(c, std::vector<long>{0, 5, 0, 0, 0, 1}));
    ASSERT_EQ(P.segments.size(), 1u);
    EXPECT_EQ(P.vanishing_order, 1);
    EXPECT_EQ(P.segments[0].length, 4);
    EXPECT_EQ(P.segments[0].root_valuation(), mpq_class(1, 4));
    EXPECT_EQ(P.segments[0].slope, mpq_class(-1, 4));

    auto T = newton_polygon(PadicPoly(c, std::vector<long>{0, 1}));
    EXPECT_TRUE(T.segments.empty());
    EXPECT_EQ(T.total_length(), 0);

    auto Q = newton_polygon(PadicPoly(c, std::vector<long>{-25, 0, 1}));
    ASSERT_EQ(Q.segments.size(), 1u);
    EXPECT_EQ(Q.segments[0].length, 2);
    EXPECT_EQ(Q.segments[0].root_valuation(), 1);
}

TEST(NewtonPolygon, ZeroInteriorCoefficientsIgnored)
{
    auto c = make_context(5, 3);
    auto P = newton_polygon(PadicPoly(c, std::vector<long>{25, 0, 0, 1}));
    ASSERT_EQ(P.segments.size(), 1u);
    EXPECT_EQ(P.segments[0].length, 3);
    EXPECT_EQ(P.segments[0].root_valuation(), mpq_class(2, 3));
}

TEST(NewtonPolygon, HullMergesUnderMultiplication)
{
    auto c = make_context(3, 30);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        auto rnd = [&](int deg) {
            std::vector<mpz_class> a(deg + 1);
            for (int i = 0; i < deg; ++i) {
                int v = rng() % 4;
                a[i] = mpz_class(c->pow[v]) * (1 + 3 * (rng() % 50) + rng() % 2);
            }
            a[deg] = 1;
            return PadicPoly(c, a);
        };
        PadicPoly f = rnd(1 + rng() % 4), g = rnd(1 + rng() % 4);
        auto vf = newton_polygon(f).root_valuations(), vg = newton_polygon(g).root_valuations();
        auto vfg = newton_polygon(f * g).root_valuations();
        vf.insert(vf.end(), vg.begin(), vg.end());
        std::sort(vf.begin(), vf.end());
        EXPECT_EQ(vf, vfg);
    }
}

TEST(Resultant, WorkedExamples)
{
    auto c = make_context(5, 10);
    PadicPoly f(c, std::vector<long>{1, 0, 1}), g(c, std::vector<long>{-2, 1});
    EXPECT_EQ(resultant_valuation(f, g), Ord::exact(1));
    PadicPoly x(c, std::vector<long>{0, 1});
    EXPECT_TRUE(resultant_valuation(x, x).is_infinite());
}

TEST(Resultant, CyclotomicShiftAgainstEuclidOracle)
{
    auto c = make_context(5, 12);
    std::vector<mpz_class> a(6);
    for (int k = 1; k <= 5; ++k) a[k] = testutil::binomial(5, k);
    PadicPoly f(c, a);
    std::vector<mpq_class> fq, dq;
    for (auto& v : a) fq.emplace_back(v);
    for (int k = 1; k <= 5; ++k) dq.emplace_back(mpz_class(a[k] * k));
    mpq_class r = euclid_resultant(fq, dq);
    ASSERT_EQ(r.get_den(), 1);
    long expect = ord_int(r.get_num(), 5);
    EXPECT_EQ(resultant_valuation(f, f.derivative()), Ord::exact(expect));
    EXPECT_EQ(expect, 5);
}

TEST(Resultant, RandomPairsAgainstEuclidOracle)
{
    auto c = make_context(3, 25);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        auto rnd = [&](int deg) {
            std::vector<long> a(deg + 1);
            for (auto& v : a) v = static_cast<long>(rng() % 19) - 9;
            a[deg] = 1 + rng() % 2;
            return a;
        };
        auto fa = rnd(1 + rng() % 4), ga = rnd(1 + rng() % 4);
        std::vector<mpq_class> fq(fa.begin(), fa.end()), gq(ga.begin(), ga.end());
        mpq_class r = euclid_resultant(fq, gq);
        Ord o = resultant_valuation(PadicPoly(c, fa), PadicPoly(c, ga));
        if (r == 0) {
            EXPECT_TRUE(o.is_infinite());
        } else {
            EXPECT_EQ(o, Ord::exact(ord_int(r.get_num(), 3)));
        }
    }
}

TEST(Resultant, InconclusiveAtLowPrecision)
{
    auto c = make_context(5, 2);
    PadicPoly f(c, std::vector<long>{1, 0, 1}), g(c, std::vector<long>{-57, 1});
    // Res = 57^2 + 1 = 3250 = 2 * 5^3 * 13
    EXPECT_THROW(resultant_valuation(f, g), PrecisionError);
}
