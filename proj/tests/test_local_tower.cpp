#include <gtest/gtest.h>

#include <random>

#include "common.hpp"
#include "ltcm/local_tower.hpp"

using namespace ltcm;

namespace {

// Tower formula: ord_p disc(K_2) = ord_{K_1} disc(K_2/K_1) + p * ord_p disc(K_1),
// with each disc(K_n) read off the Eisenstein polynomial h_n over Z_p.
long tower_formula_disc(const EisensteinTower& T)
{
    auto disc = [](const PadicPoly& h) { return resultant_valuation(h, h.derivative()).value(); };
    return disc(T.h(2)) - T.p() * disc(T.h(1));
}

}  // namespace

TEST(Tower, LevelDegreesAndEisenstein)
{
    for (long p : {3L, 5L, 7L}) {
        auto c = make_context(p, 30);
        auto T = build_tower(frobenius_seed(c, p), p == 3 ? 3 : 2);
        for (int n = 1; n <= T.built(); ++n) {
            EXPECT_EQ(T.degree(n), expected_level_degree(p, n));
            EXPECT_TRUE(is_eisenstein(T.h(n)));
        }
        auto np = newton_polygon(T.h(1));
        ASSERT_EQ(np.segments.size(), 1u);
        EXPECT_EQ(np.segments[0].root_valuation(), mpq_class(1, p - 1));
    }
}

TEST(Tower, LevelsAreCompositesOfTheFirst)
{
    auto c = make_context(3, 30);
    std::mt19937_64 rng(7);
    auto T = build_tower(testutil::random_seed(c, 3, rng), 3);
    const PadicPoly& d = *T.seed.poly;
    EXPECT_EQ(T.h(2), T.h(1).compose(d));
    EXPECT_EQ(T.h(3), T.h(1).compose(d.compose(d)));
}

TEST(Tower, BudgetEnforced)
{
    auto c = make_context(5, 20);
    EXPECT_THROW(build_tower(frobenius_seed(c, 5), 3), ValidationError);  // degree 100
    EXPECT_THROW(build_tower(frobenius_seed(c, 5), 3, 60), ValidationError);
    EXPECT_NO_THROW(build_tower(frobenius_seed(c, 5), 3, 100));
}

TEST(LevelDisc, CyclotomicAndFrobenius)
{
    {
        auto c = make_context(5, 60);
        auto T = build_tower(multiplicative_seed(c, 5), 2);
        auto r = level_disc(T);
        EXPECT_EQ(r.valuation, 20);
        EXPECT_EQ(r.valuation, tower_formula_disc(T));
        EXPECT_EQ(character_conductor_floor(T).exponent, 5);
    }
    {
        auto c = make_context(3, 40);
        auto T = build_tower(frobenius_seed(c, 3), 2);
        auto r = level_disc(T);
        EXPECT_EQ(r.valuation, 6);
        EXPECT_EQ(r.valuation, tower_formula_disc(T));
        EXPECT_EQ(character_conductor_floor(T).exponent, 3);
    }
}

TEST(LevelDisc, RandomSeedsMatchTowerFormula)
{
    std::mt19937_64 rng(11);
    for (long p : {3L, 5L}) {
        auto c = make_context(p, 60);
        for (int trial = 0; trial < 4; ++trial) {
            auto T = build_tower(testutil::random_seed(c, p, rng), 2);
            auto r = level_disc(T);
            EXPECT_EQ(r.valuation, p * (p - 1));
            EXPECT_EQ(r.valuation, tower_formula_disc(T));
        }
    }
}

TEST(LevelDisc, LowPrecisionIsReported)
{
    auto c = make_context(5, 3);
    auto T = build_tower(multiplicative_seed(c, 5), 2);
    EXPECT_THROW(level_disc(T), PrecisionError);
}

TEST(Filtration, RaisesValuationByOne)
{
    std::mt19937_64 rng(3);
    auto c = make_context(7, 30);
    auto T = build_tower(testutil::random_seed(c, 7, rng), 1);
    std::uniform_int_distribution<int> k(1, 20);
    for (int trial = 0; trial < 100; ++trial) {
        int v = k(rng);
        mpz_class u = testutil::random_residue(rng, c->pow[30 - v]);
        if (u % 7 == 0) u += 1;
        PadicInt x(c, mpz_class(u * c->pow[v]));
        PadicInt y = filtration_step(T, x);
        EXPECT_TRUE(y.ord() == x.ord() + Ord::exact(1) || (v + 1 >= 30 && y.is_zero()));
    }
    EXPECT_THROW(filtration_step(T, PadicInt(c, 3)), DomainError);
    EXPECT_TRUE(filtration_step(T, PadicInt(c, 0)).is_zero());
}

TEST(Filtration, InsideTheTower)
{
    auto c = make_context(3, 20);
    auto T = build_tower(frobenius_seed(c, 3), 2);
    LocalElement l2{2, T.ring(2).gen()};
    EXPECT_EQ(elem_ord(T, l2), Ord::exact(1));
    auto l1 = filtration_step(T, l2);
    // [pi](lambda_2) = lambda_1, which has ord p in K_2
    EXPECT_EQ(elem_ord(T, l1), Ord::exact(3));
    EXPECT_TRUE(T.ring(2).is_zero(T.ring(2).eval(T.h(1), l1.a)));
}

TEST(Divide, Dichotomy)
{
    for (long p : {3L, 5L}) {
        auto c = make_context(p, 30);
        auto T = build_tower(frobenius_seed(c, p), 1);
        for (long e : {1L, 2L, 3L}) {
            PadicInt t0(c, mpz_class(c->pow[e] * (1 + p)));
            auto s = start_division(t0);
            EXPECT_EQ(s.e, e);
            for (int n = 1; n <= e; ++n) {
                s = divide_point(T, s, n);
                if (n < e) {
                    ASSERT_FALSE(s.ramified);
                    const PadicInt& r = s.history.back();
                    EXPECT_EQ(r.ord(), Ord::exact(e - n));
                    PadicInt img = T.seed.poly->eval(r);
                    EXPECT_EQ(img.truncated(s.prec), s.history[n - 1].truncated(s.prec));
                } else {
                    EXPECT_TRUE(s.ramified);
                }
            }
            EXPECT_THROW(divide_point(T, s, e + 1), DomainError);
        }
    }
    auto c = make_context(3, 20);
    EXPECT_THROW(start_division(PadicInt(c, 2)), DomainError);
}

TEST(DivisionConductor, BreakDiscriminantAndKummer)
{
    for (long p : {3L, 5L}) {
        auto c = make_context(p, 30);
        auto seed = multiplicative_seed(c, 2 * p);
        auto T = build_tower(seed, 1);
        auto F = group_law(seed);
        auto s = divide_point(T, start_division(PadicInt(c, mpz_class(p * 2))), 1);
        auto r = division_conductor(T, s, F);
        EXPECT_EQ(r.ramification_break, 1);
        EXPECT_EQ(r.disc_exponent_break, 2 * (p - 1));
        EXPECT_EQ(r.disc_exponent_resultant, 2 * (p - 1));
        EXPECT_EQ(r.conductor_exponent, 2);
        EXPECT_EQ(r.translates.size(), static_cast<std::size_t>(p - 1));
        // Kummer: adjoining a p-th root of u = 1 + Q with ord_{K_1}(u - 1) = m < p,
        // p not dividing m, gives conductor exponent p - m + 1 over K_1
        long m = T.ring(1).ord(T.ring(1).constant(s.history.back().value())).value();
        EXPECT_EQ(r.conductor_exponent, p - m + 1);
    }
}

TEST(DivisionConductor, RandomSeeds)
{
    std::mt19937_64 rng(5);
    for (long p : {3L, 5L}) {
        auto c = make_context(p, 25);
        for (int trial = 0; trial < 2; ++trial) {
            auto seed = testutil::random_seed(c, 2 * p, rng);
            auto T = build_tower(seed, 1);
            PadicInt t0(c, mpz_class(p * (1 + 2 * p)));
            auto r = division_conductor(T, divide_point(T, start_division(t0), 1), group_law(seed));
            EXPECT_EQ(r.conductor_exponent, 2);
            EXPECT_EQ(r.disc_exponent_resultant, 2 * (p - 1));
        }
    }
}

TEST(DivisionConductor, RequiresRamifiedState)
{
    auto c = make_context(3, 20);
    auto seed = frobenius_seed(c, 6);
    auto T = build_tower(seed, 1);
    auto s = start_division(PadicInt(c, 9));
    EXPECT_THROW(division_conductor(T, s, group_law(seed)), DomainError);
}

TEST(ConductorPattern, MinimalPrimesGetTwo)
{
    auto c = make_context(3, 25);
    auto seed = frobenius_seed(c, 6);
    auto T = build_tower(seed, 1);
    std::vector<PadicInt> t0s{PadicInt(c, 9), PadicInt(c, 3), PadicInt(c, 27), PadicInt(c, 12)};
    auto r = conductor_over_primes(T, t0s, group_law(seed));
    EXPECT_EQ(r.e, 1);
    std::vector<long> got;
    for (const auto& pc : r.primes) got.push_back(pc.exponent);
    EXPECT_EQ(got, (std::vector<long>{0, 2, 0, 2}));
    EXPECT_TRUE(r.primes[1].in_s_prime);
    EXPECT_FALSE(r.primes[0].in_s_prime);
}

TEST(Tower, FirstLevelOfMultiplicativeSeed)
{
    for (long p : {3L, 5L, 7L}) {
        auto c = make_context(p, 20);
        auto T = build_tower(multiplicative_seed(c, p), 1);
        std::vector<mpz_class> want;
        for (long k = 1; k <= p; ++k) want.push_back(testutil::binomial(p, k));
        EXPECT_EQ(torsion_poly(T, 1), PadicPoly(c, want));
    }
}

TEST(Tower, ConstantTermIsNormOfLambda)
{
    for (long p : {3L, 5L}) {
        auto c = make_context(p, 30);
        auto T = build_tower(frobenius_seed(c, p), 2);
        EXPECT_EQ(T.h(1).coeff(0).ord(), Ord::exact(1));
        // over the base the constant term of h_2 is +-N(lambda_2)
        EXPECT_EQ(T.h(2).coeff(0).ord(), Ord::exact(1));
        // over K_1 the minimal polynomial of lambda_2 is d(t) - lambda_1
        const auto& K1 = T.ring(1);
        auto m0 = K1.sub(K1.constant(T.seed.poly->coeff(0).value()), K1.gen());
        EXPECT_EQ(K1.ord(m0), Ord::exact(1));
        EXPECT_TRUE(T.ring(2).is_zero(T.ring(2).eval(T.h(1), filtration_step(T, LocalElement{2, T.ring(2).gen()}).a)));
    }
}

TEST(ElemOrd, WorkedValues)
{
    auto c = make_context(5, 20);
    auto T = build_tower(frobenius_seed(c, 5), 2);
    EXPECT_EQ(elem_ord(T, {1, T.ring(1).constant(5)}), Ord::exact(4));
    auto l2 = T.ring(2).gen();
    auto x = T.ring(2).scale(T.ring(2).mul(l2, l2), mpz_class(5));
    EXPECT_EQ(elem_ord(T, {2, x}), Ord::exact(22));
    EXPECT_FALSE(elem_ord(T, {2, T.ring(2).zero()}).is_exact());
}

TEST(ElemOrd, IsAValuation)
{
    std::mt19937_64 rng(17);
    auto c = make_context(3, 30);
    auto T = build_tower(frobenius_seed(c, 3), 2);
    for (int level : {1, 2}) {
        const auto& R = T.ring(level);
        auto rnd = [&]() {
            EisensteinRing::Elem e;
            std::uniform_int_distribution<int> sh(0, 4);
            for (long i = 0; i < T.degree(level); ++i)
                e.push_back(testutil::random_residue(rng, c->modulus()) * c->pow[sh(rng)]);
            return e;
        };
        for (int trial = 0; trial < 1000; ++trial) {
            auto x = rnd(), y = rnd();
            Ord ox = R.ord(x), oy = R.ord(y), oxy = R.ord(R.mul(x, y)), os = R.ord(R.add(x, y));
            if (ox.is_exact() && oy.is_exact() && ox.value() + oy.value() < R.cap())
                ASSERT_EQ(oxy, Ord::exact(ox.value() + oy.value()));
            ASSERT_TRUE(os.certainly_at_least(std::min(ox.bound(), oy.bound())));
        }
    }
}

TEST(Divide, MultiplicativeSplitStepIsKummer)
{
    auto c = make_context(5, 20);
    auto T = build_tower(multiplicative_seed(c, 5), 2);
    auto s = divide_point(T, start_division(PadicInt(c, 25)), 1);
    ASSERT_FALSE(s.ramified);
    // (1 + t)^5 = 26
    PadicInt u = PadicInt(c, 1) + s.history.back();
    EXPECT_EQ((u.pow(5) - PadicInt(c, 26)).truncated(s.prec).value(), 0);
    s = divide_point(T, s, 2);
    EXPECT_TRUE(s.ramified);
    EXPECT_EQ(s.steps.back().polygon.segments[0].root_valuation(), mpq_class(1, 5));
}

TEST(DivisionConductor, FrobeniusSeedPThree)
{
    auto c = make_context(3, 30);
    auto seed = frobenius_seed(c, 9);
    auto T = build_tower(seed, 1);
    auto r = division_conductor(T, divide_point(T, start_division(PadicInt(c, 3)), 1), group_law(seed));
    for (const auto& tb : r.translates) EXPECT_EQ(tb.delta, 2);
    EXPECT_EQ(r.conductor_exponent, 2);
    EXPECT_EQ(r.disc_exponent_break, 4);
}

TEST(DivisionConductor, SecondLevelDivision)
{
    for (long p : {3L, 5L}) {
        auto c = make_context(p, 30);
        auto seed = frobenius_seed(c, 2 * p);
        auto T = build_tower(seed, 1);
        auto s = start_division(PadicInt(c, mpz_class(c->pow[2] * 2)));
        s = divide_point(T, s, 1);
        s = divide_point(T, s, 2);
        auto r = division_conductor(T, s, group_law(seed));
        EXPECT_EQ(r.e, 2);
        EXPECT_EQ(r.conductor_exponent, 2);
        EXPECT_EQ(r.disc_exponent_resultant, 2 * (p - 1));
    }
}
