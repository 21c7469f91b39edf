#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "local_field.hpp"
#include "lubin_tate.hpp"
#include "poly.hpp"

namespace ltcm {

constexpr long kDefaultLevelBudget = 60;

// Division tower of a polynomial seed: [pi^n] = d o ... o d (n times) and
// h_n = [pi^n] / [pi^(n-1)], of degree p^(n-1)(p-1), Eisenstein over the base.
struct EisensteinTower {
    LTSeed seed;
    std::vector<PadicPoly> iterates;  // iterates[n] = [pi^n], iterates[0] = t
    std::vector<PadicPoly> levels;    // levels[n-1] = h_n
    std::vector<EisensteinRing> rings;

    long p() const { return seed.p(); }
    int built() const { return static_cast<int>(levels.size()); }
    const PadicPoly& h(int n) const { return levels.at(n - 1); }
    const EisensteinRing& ring(int n) const { return rings.at(n - 1); }
    long degree(int n) const { return h(n).degree(); }
};

inline long expected_level_degree(long p, int n)
{
    long d = p - 1;
    for (int i = 1; i < n; ++i) d *= p;
    return d;
}

inline EisensteinTower build_tower(const LTSeed& seed, int levels, long budget = kDefaultLevelBudget)
{
    if (!seed.is_polynomial()) throw ValidationError("tower commands need a polynomial seed of degree p");
    if (levels < 1) throw ValidationError("tower needs at least one level");
    const long p = seed.p();
    if (expected_level_degree(p, levels) > budget)
        throw ValidationError("level " + std::to_string(levels) + " has degree " +
                              std::to_string(expected_level_degree(p, levels)) + ", above the budget " +
                              std::to_string(budget));
    EisensteinTower T{seed, {}, {}, {}};
    const Ctx& c = seed.ctx();
    T.iterates.push_back(PadicPoly(c, std::vector<long>{0, 1}));
    for (int n = 1; n <= levels; ++n) {
        T.iterates.push_back(seed.poly->compose(T.iterates.back()));
        auto [q, r] = T.iterates[n].divmod(T.iterates[n - 1]);
        if (!r.is_zero()) throw InvariantError("torsion polynomial: nonzero remainder at level " + std::to_string(n));
        if (q.degree() != expected_level_degree(p, n))
            throw InvariantError("torsion polynomial: level " + std::to_string(n) + " has degree " +
                                 std::to_string(q.degree()));
        T.levels.push_back(q);
        T.rings.emplace_back(q);
    }
    return T;
}

inline const PadicPoly& torsion_poly(const EisensteinTower& T, int n)
{
    if (n < 1 || n > T.built()) throw ValidationError("torsion_poly: level " + std::to_string(n) + " not built");
    return T.h(n);
}

// Sum a_i lambda_n^i at level n of the tower.
struct LocalElement {
    int level = 1;
    std::vector<mpz_class> a;
};

inline Ord elem_ord(const EisensteinTower& T, const LocalElement& x) { return T.ring(x.level).ord(x.a); }

// Newton polygon of a polynomial is one segment of root valuation 1/deg
inline bool is_eisenstein(const PadicPoly& f)
{
    auto np = newton_polygon(f);
    return np.vanishing_order == 0 && np.segments.size() == 1 &&
           np.segments[0].root_valuation() == mpq_class(1, f.degree());
}

struct LevelDisc {
    long valuation = 0;           // ord_{P_1} of N_{K_2/K_1}(m'(lambda_2))
    long cross_check = 0;         // ord_{P_2} m'(lambda_2) computed inside K_2
    long conductor_exponent = 0;  // via D = f^(p-1)
    std::string provenance;
};

// m(t) = d(t) - lambda_1 over K_1; the valuation of Res(m, m') is that of the
// discriminant of K_2/K_1.
inline LevelDisc level_disc(const EisensteinTower& T)
{
    if (T.built() < 2) throw ValidationError("level_disc needs levels 1 and 2");
    const EisensteinRing& K1 = T.ring(1);
    const PadicPoly& d = *T.seed.poly;
    const long p = T.p();
    std::vector<EisensteinRing::Elem> m, dm;
    for (long i = 0; i <= p; ++i) m.push_back(K1.constant(d.coeffs()[i]));
    m[0] = K1.sub(m[0], K1.gen());
    for (long i = 1; i <= p; ++i) dm.push_back(K1.scale(m[i], mpz_class(i)));
    auto res = resultant(K1, m, dm);
    Ord o = K1.ord(res);
    if (!o.is_exact())
        throw PrecisionError("level_disc inconclusive at precision N=" + std::to_string(T.seed.ctx()->N) +
                             "; need ord(p)*N > " + std::to_string(o.bound()));
    LevelDisc r;
    r.valuation = o.value();
    const EisensteinRing& K2 = T.ring(2);
    Ord x = K2.ord(K2.eval(d.derivative(), K2.gen()));
    if (!x.is_exact()) throw PrecisionError("level_disc cross-check inconclusive");
    r.cross_check = x.value();
    if (r.valuation != r.cross_check)
        throw InvariantError("level_disc: resultant route " + std::to_string(r.valuation) + " != norm route " +
                             std::to_string(r.cross_check));
    if (r.valuation % (p - 1) != 0)
        throw InvariantError("level_disc: discriminant exponent not divisible by p-1");
    r.conductor_exponent = r.valuation / (p - 1);
    r.provenance = "level_disc: Res(m, m') over K_1 with m = d - lambda_1 (Sylvester, Berkowitz), cross-checked by "
                   "ord of d'(lambda_2) in K_2";
    return r;
}

struct ConductorFloor {
    long exponent = 0;
    long level_disc = 0;
    std::string provenance;
};

inline ConductorFloor character_conductor_floor(const EisensteinTower& T)
{
    auto ld = level_disc(T);
    return {ld.conductor_exponent, ld.valuation,
            "character_conductor_floor: conductor-discriminant for the degree-p step K_2/K_1 (disc = f^(p-1)); "
            "nontrivial characters of Gal(K_n/K_1) have conductor exponent >= this value, and the conductor of "
            "L_e/K_e reduces to that of a single character"};
}

// [pi](x) for x in the kernel of reduction
inline PadicInt filtration_step(const EisensteinTower& T, const PadicInt& x)
{
    if (x.is_zero()) return x;
    if (x.ord() == Ord::exact(0)) throw DomainError("filtration_step: x is a unit, not in the kernel of reduction");
    return T.seed.poly->eval(x);
}

inline LocalElement filtration_step(const EisensteinTower& T, const LocalElement& x)
{
    const EisensteinRing& R = T.ring(x.level);
    if (R.ord(x.a) == Ord::exact(0)) throw DomainError("filtration_step: x is a unit, not in the kernel of reduction");
    return {x.level, R.eval(*T.seed.poly, x.a)};
}

inline long e_invariant(const PadicInt& t0)
{
    Ord o = t0.ord();
    if (o == Ord::exact(0)) throw DomainError("e_invariant: t0 is a unit; Q must lie in the kernel of reduction");
    if (!o.is_exact()) throw PrecisionError("e_invariant: t0 is zero at precision N=" + std::to_string(t0.N()));
    return o.value();
}

struct DivisionStep {
    int level = 0;
    bool split = false;
    PadicInt root;                 // split: Q~_level in the base field
    long derivative_ord = 0;       // split: Hensel certificate
    NewtonPolygon polygon;         // ramified: polygon of [pi](t) - Q~_(level-1)
};

struct DivisionState {
    PadicInt t0;
    long e = 0;
    int level = 0;
    int prec = 0;                  // correct p-adic digits of the last recorded point
    std::vector<PadicInt> history; // Q~_0 = t0, ..., Q~_level (base-field points)
    std::vector<DivisionStep> steps;
    bool ramified = false;
};

inline DivisionState start_division(const PadicInt& t0)
{
    DivisionState s;
    s.t0 = t0;
    s.e = e_invariant(t0);
    s.prec = t0.N();
    s.history.push_back(t0);
    return s;
}

// Solve [pi](t) = Q~_(n-1): a Hensel root in the base field certifies the split
// case; a Newton polygon of one segment with root valuation 1/p certifies a
// totally ramified step of degree p.
inline DivisionState divide_point(const EisensteinTower& T, DivisionState s, int n)
{
    if (n != s.level + 1) throw ValidationError("divide_point: state is at level " + std::to_string(s.level));
    if (s.ramified) throw DomainError("divide_point: already ramified at level " + std::to_string(s.level));
    const PadicPoly& d = *T.seed.poly;
    const Ctx& c = d.ctx();
    const PadicInt& Q = s.history.back();
    PadicPoly f = d - PadicPoly::constant(c, Q.value());
    DivisionStep step;
    step.level = n;
    step.polygon = newton_polygon(f);
    const long p = T.p();
    const auto& P = step.polygon;
    if (P.vanishing_order == 0 && P.segments.size() == 1 && P.segments[0].length == p &&
        P.segments[0].root_valuation() == mpq_class(1, p)) {
        s.ramified = true;
        s.level = n;
        s.steps.push_back(step);
        return s;
    }
    Ord oq = Q.ord();
    if (!oq.is_exact() || oq.value() < 2 || s.prec < 3)
        throw PrecisionError("divide_point: neither certificate obtainable at level " + std::to_string(n) +
                             " (ord Q = " + oq.str() + ", precision " + std::to_string(s.prec) + ")");
    // approximate root Q / pi
    PadicInt approx = Q.shift_down(1) * PadicInt(c, T.seed.pi.value() / p).inverse();
    auto h = hensel_root(f, approx);
    step.split = true;
    step.root = h.root;
    step.derivative_ord = h.derivative_ord;
    s.prec -= static_cast<int>(h.derivative_ord);
    s.history.push_back(h.root);
    s.level = n;
    s.steps.push_back(step);
    return s;
}

struct TranslateBreak {
    long a = 0;                 // torsion translate v_a = [a](lambda_1)
    long ord_difference = 0;    // ord(y - sigma_a y)
    long delta = 0;             // ord(sigma_a eta - eta)
};

struct ConductorReport {
    long p = 0;
    long e = 0;
    std::vector<TranslateBreak> translates;
    long error_bound = 0;       // ord of the neglected part in L units
    long ramification_break = 0;
    long disc_exponent_break = 0;      // (p-1) * delta
    long disc_exponent_resultant = 0;  // from the minimal polynomial of eta
    long conductor_exponent = 0;
    long conductor_hasse_arf = 0;      // break + 1
    std::vector<std::string> provenance;
};

namespace detail {

using K1Elem = EisensteinRing::Elem;
using LRing = RelativeExtension<EisensteinRing>;

// value of a two-variable series at (y in L, v in K_1)
inline LRing::Elem eval_law(const LRing& L, const TruncSeries& F, const LRing::Elem& y, const K1Elem& v)
{
    const EisensteinRing& K = L.base();
    const int D = F.trunc();
    std::vector<LRing::Elem> ypow{L.one()};
    std::vector<K1Elem> vpow{K.one()};
    for (int i = 1; i <= D; ++i) {
        ypow.push_back(L.mul(ypow.back(), y));
        vpow.push_back(K.mul(vpow.back(), v));
    }
    LRing::Elem acc = L.zero();
    for (const auto& t : F.terms()) {
        int i = mono_exp(t.first, 0), j = mono_exp(t.first, 1);
        acc = L.add(acc, L.scale(ypow[i], K.scale(vpow[j], t.second)));
    }
    return acc;
}

inline K1Elem eval_series(const EisensteinRing& K, const TruncSeries& f, const K1Elem& x)
{
    K1Elem acc = K.zero();
    for (int k = f.trunc(); k >= 1; --k) acc = K.add(K.mul(acc, x), K.constant(f.coeff1(k)));
    return K.mul(acc, x);
}

}  // namespace detail

// Conductor of K_1(Q~_e)/K_1 from the ramification break of sigma_a y =
// F(y, v_a), with eta = lambda_1 / y as uniformizer; checked against the
// discriminant of the minimal polynomial of eta.
inline ConductorReport division_conductor(const EisensteinTower& T, const DivisionState& s, const FormalGroupLaw& F)
{
    using namespace detail;
    if (!s.ramified) throw DomainError("division_conductor: state has no ramification certificate");
    const long p = T.p();
    const PadicPoly& d = *T.seed.poly;
    const Ctx& c = d.ctx();
    const int N = c->N;
    const int D = F.law[0].trunc();
    const EisensteinRing& K = T.ring(1);
    const PadicInt& Q = s.history.back();  // Q~_(e-1), ord 1
    if (Q.ord() != Ord::exact(1)) throw InvariantError("division_conductor: Q~_(e-1) must have valuation 1");

    // L = K_1[y] / (d(y) - Q) made monic; ord_L(y) = p - 1, ord_L(lambda_1) = p
    mpz_class lcinv = d.leading().inverse().value();
    std::vector<K1Elem> mod;
    for (long i = 0; i <= p; ++i) {
        mpz_class v = (i == 0 ? mpz_class(-Q.value()) : d.coeffs()[i]) * lcinv;
        mod.push_back(K.constant(v));
    }
    LRing L(K, mod, p - 1);
    LRing::Elem y = L.gen();
    K1Elem lambda = K.gen();

    ConductorReport r;
    r.p = p;
    r.e = s.e;
    int eff = F.law[0].eff_prec();
    long bound = std::min<long>((D + 1) * (p - 1), static_cast<long>(eff) * p * (p - 1));
    bound = std::min<long>(bound, static_cast<long>(N) * p * (p - 1));

    Ord oy = L.ord(y);
    for (long a = 1; a < p; ++a) {
        TruncSeries ea = endo(T.seed, PadicInt(c, a));
        K1Elem va = eval_series(K, ea, lambda);
        long vbound = std::min<long>(static_cast<long>(D + 1) * p, static_cast<long>(ea.eff_prec()) * p * (p - 1));
        long B = std::min(bound, vbound);
        // the translate must be a root of h_1 up to the truncation error
        if (!K.ord(K.eval(T.h(1), va)).certainly_at_least(B / p))
            throw InvariantError("division_conductor: [a](lambda_1) is not a torsion point for a=" + std::to_string(a));
        LRing::Elem sy = eval_law(L, F.law[0], y, va);
        LRing::Elem resid = L.eval(mod, sy);
        if (!L.ord(resid).certainly_at_least(std::min<long>(B, (D + 1) * (p - 1))))
            throw InvariantError("division_conductor: F(y, v_a) is not a conjugate of y for a=" + std::to_string(a));
        Ord odiff = L.ord(L.sub(y, sy));
        Ord osy = L.ord(sy);
        if (!odiff.is_exact() || odiff.value() >= B || !osy.is_exact() || osy.value() >= B)
            throw PrecisionError("division_conductor: valuation of y - sigma y not certified below the error bound " +
                                 std::to_string(B) + " (raise --trunc or --precision)");
        TranslateBreak tb;
        tb.a = a;
        tb.ord_difference = odiff.value();
        // ord(lambda/sy - lambda/y) = ord lambda + ord(y - sy) - ord y - ord sy
        tb.delta = p + odiff.value() - oy.value() - osy.value();
        r.translates.push_back(tb);
        r.error_bound = r.error_bound == 0 ? B : std::min(r.error_bound, B);
    }
    for (const auto& tb : r.translates)
        if (tb.delta != r.translates[0].delta)
            throw InvariantError("division_conductor: translates give different breaks");
    const long delta = r.translates[0].delta;
    r.ramification_break = delta - 1;
    r.disc_exponent_break = (p - 1) * delta;
    r.conductor_hasse_arf = r.ramification_break + 1;

    // minimal polynomial route: eta = lambda/y satisfies
    // Q eta^p - sum_j a_j lambda^j eta^(p-j) = 0
    std::vector<K1Elem> P(p + 1, K.zero()), dP;
    P[p] = K.constant(Q.value());
    K1Elem lj = K.one();
    for (long j = 1; j <= p; ++j) {
        lj = K.mul(lj, lambda);
        P[p - j] = K.sub(P[p - j], K.scale(lj, d.coeffs()[j]));
    }
    for (long i = 1; i <= p; ++i) dP.push_back(K.scale(P[i], mpz_class(i)));
    Ord ores = K.ord(resultant(K, P, dP));
    if (!ores.is_exact()) throw PrecisionError("division_conductor: resultant of the eta polynomial inconclusive");
    // disc(P / Q) = Res(P, P') / Q^(2p-1) up to sign, ord_{K_1} Q = p - 1
    r.disc_exponent_resultant = ores.value() - (2 * p - 1) * (p - 1);
    if (r.disc_exponent_resultant != r.disc_exponent_break)
        throw InvariantError("division_conductor: discriminant by breaks " + std::to_string(r.disc_exponent_break) +
                             " != discriminant by resultant " + std::to_string(r.disc_exponent_resultant));
    if (r.disc_exponent_break % (p - 1) != 0)
        throw InvariantError("division_conductor: discriminant not of the form f^(p-1)");
    r.conductor_exponent = r.disc_exponent_break / (p - 1);
    if (r.conductor_exponent != r.conductor_hasse_arf)
        throw InvariantError("division_conductor: conductor-discriminant and break + 1 disagree");

    r.provenance.push_back("translates: sigma_a y = F(y, [a](lambda_1)) evaluated in K_1(y), D=" + std::to_string(D) +
                           ", certified below error bound " + std::to_string(r.error_bound));
    r.provenance.push_back("ramification_break: ord(sigma eta - eta) - 1 with eta = lambda_1 / y");
    r.provenance.push_back("disc_exponent_resultant: Res(P, P') over K_1 for the minimal polynomial of eta");
    r.provenance.push_back("conductor_exponent: discriminant exponent / (p-1), equals break + 1");
    if (delta != 2)
        throw InvariantError("division_conductor: ord(sigma eta - eta) = " + std::to_string(delta) +
                             " != 2 for the computed translates");
    return r;
}

struct PrimeConductor {
    int prime = 0;        // index of the prime of S
    long e_prime = 0;
    long exponent = 0;
    bool in_s_prime = false;
    std::string provenance;
};

struct ConductorPattern {
    long e = 0;
    std::vector<PrimeConductor> primes;
    std::vector<ConductorReport> local;
    std::vector<std::string> provenance;
};

// Conductor exponents of L_e/K_e over the primes of S given the coordinate
// t0 of Q at each of them: exponent 2 where e_P = e, 0 where e_P > e.
inline ConductorPattern conductor_over_primes(const EisensteinTower& T, const std::vector<PadicInt>& t0s,
                                          const FormalGroupLaw& F, const std::vector<int>& labels = {})
{
    if (t0s.empty()) throw ValidationError("conductor_over_primes: no primes given");
    ConductorPattern r;
    std::vector<long> es;
    for (const auto& t : t0s) es.push_back(e_invariant(t));
    r.e = *std::min_element(es.begin(), es.end());
    for (std::size_t i = 0; i < t0s.size(); ++i) {
        PrimeConductor pc;
        pc.prime = labels.empty() ? static_cast<int>(i) : labels[i];
        pc.e_prime = es[i];
        DivisionState s = start_division(t0s[i]);
        for (int n = 1; n <= r.e; ++n) s = divide_point(T, s, n);
        if (es[i] == r.e) {
            if (!s.ramified) throw InvariantError("conductor_over_primes: no ramification at level e for a prime with e_P = e");
            auto rep = division_conductor(T, s, F);
            pc.in_s_prime = true;
            pc.exponent = rep.conductor_exponent;
            pc.provenance = "division_conductor at level 1 (Q~_e over K_1)";
            if (r.e > 1) pc.provenance += "; lift from level 1 to level e taken as an assumption, not recomputed";
            r.local.push_back(rep);
        } else {
            if (s.ramified) throw InvariantError("conductor_over_primes: ramified below e_P");
            pc.exponent = 0;
            pc.provenance = "divide_point: split through level e (e_P > e), unramified in L_e/K_e";
        }
        r.primes.push_back(pc);
    }
    r.provenance.push_back("e = min over primes of e_P = ord(t0); S' = primes attaining the minimum");
    return r;
}

}  // namespace ltcm
