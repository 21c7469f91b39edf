#pragma once

#include <gmpxx.h>

#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"

namespace ltcm {

// Class of a unit at one prime of S': not 1 mod P, 1 mod P with unknown
// P^2-coefficient, or exactly 1 + alpha*eta mod P^2.
struct JetEntry {
    enum class Level { NotOne, ModP, ModP2 };
    Level level = Level::ModP2;
    long alpha = 0;
    bool operator==(const JetEntry&) const = default;
};

struct UnitJet {
    std::vector<JetEntry> at;
    bool operator==(const UnitJet&) const = default;
};

inline UnitJet make_jet(const std::vector<long>& alphas, long p)
{
    UnitJet u;
    for (long a : alphas) u.at.push_back({JetEntry::Level::ModP2, ((a % p) + p) % p});
    return u;
}

// jet of v^a w^b: coefficients add; an unknown coefficient stays unknown
// unless its exponent is divisible by p
inline JetEntry jet_combine(const JetEntry& v, long a, const JetEntry& w, long b, long p)
{
    using L = JetEntry::Level;
    auto lvl = [p](const JetEntry& e, long x) {
        if (x == 0) return L::ModP2;
        if (e.level == L::ModP && x % p == 0) return L::ModP2;
        return e.level;
    };
    L lv = lvl(v, a), lw = lvl(w, b);
    if (lv == L::NotOne || lw == L::NotOne) return {L::NotOne, 0};
    if (lv == L::ModP || lw == L::ModP) return {L::ModP, 0};
    long x = ((a % p) * v.alpha + (b % p) * w.alpha) % p;
    return {L::ModP2, (x + p) % p};
}

inline UnitJet jet_product(const UnitJet& v, long a, const UnitJet& w, long b, long p)
{
    if (v.at.size() != w.at.size()) throw ValidationError("jets over different numbers of primes");
    UnitJet r;
    for (std::size_t i = 0; i < v.at.size(); ++i) r.at.push_back(jet_combine(v.at[i], a, w.at[i], b, p));
    return r;
}

inline long required_alpha(const UnitJet& u, int i, const char* who)
{
    if (i < 0 || i >= static_cast<int>(u.at.size())) throw ValidationError(std::string(who) + ": prime index out of range");
    const auto& e = u.at[i];
    if (e.level == JetEntry::Level::NotOne)
        throw DomainError(std::string(who) + ": unit is not 1 mod the prime " + std::to_string(i));
    if (e.level == JetEntry::Level::ModP)
        throw DomainError(std::string(who) + ": coefficient at prime " + std::to_string(i) + " is unknown");
    return e.alpha;
}

struct Exponents {
    long a = 1, b = 0;
};

// exponents with gcd(a, b) = 1 and v^a w^b = 1 mod P_i^2
inline Exponents combine(const UnitJet& v, const UnitJet& w, int i, long /*p*/)
{
    long al = required_alpha(v, i, "combine"), be = required_alpha(w, i, "combine");
    if (al == 0) return {1, 0};
    if (be == 0) return {0, 1};
    long g = std::gcd(al, be);
    return {be / g, -al / g};
}

struct WedgeStep {
    int prime = 0;
    int first = 0, second = 0;  // positions replaced by v^a w^b, v^c w^d
    long a = 1, b = 0, c = 0, d = 1;
    long det() const { return a * d - b * c; }
};

struct WedgeStepResult {
    UnitJet v, w;
    WedgeStep step;
};

inline WedgeStepResult wedge_step(const UnitJet& v, const UnitJet& w, int i, long p)
{
    Exponents e = combine(v, w, i, p);
    // a f + b g = 1, d = f, c = -g
    mpz_class g, f, gg;
    mpz_gcdext(g.get_mpz_t(), f.get_mpz_t(), gg.get_mpz_t(), mpz_class(e.a).get_mpz_t(), mpz_class(e.b).get_mpz_t());
    if (g < 0) {
        f = -f;
        gg = -gg;
    }
    WedgeStep s;
    s.prime = i;
    s.a = e.a;
    s.b = e.b;
    s.d = f.get_si();
    s.c = -gg.get_si();
    if (s.det() != 1) throw InvariantError("wedge_step: determinant " + std::to_string(s.det()));
    WedgeStepResult r{jet_product(v, s.a, w, s.b, p), jet_product(v, s.c, w, s.d, p), s};
    if (r.v.at[i] != JetEntry{JetEntry::Level::ModP2, 0}) throw InvariantError("wedge_step: jet not eliminated");
    return r;
}

enum class OracleMode { Axiom, Deny };

struct OracleCall {
    int unit = 0;
    int prime = 0;
    JetEntry before;
    bool granted = false;
    bool consistent = false;  // the jet already had coefficient 0
};

class CftOracle {
public:
    explicit CftOracle(OracleMode m) : mode_(m) {}
    OracleMode mode() const { return mode_; }
    const std::vector<OracleCall>& log() const { return log_; }
    // u = 1 mod P_1 P_2^2 ... P_s^2 implies u = 1 mod P_1^2
    bool apply(UnitJet& u, int unit, int s)
    {
        for (int i = 1; i < s; ++i)
            if (u.at[i] != JetEntry{JetEntry::Level::ModP2, 0})
                throw InvariantError("oracle invoked on a unit not 1 mod P_2^2 ... P_s^2");
        OracleCall c{unit, 0, u.at[0], mode_ == OracleMode::Axiom, false};
        c.consistent = c.before == JetEntry{JetEntry::Level::ModP2, 0};
        log_.push_back(c);
        if (!c.granted) return false;
        u.at[0] = {JetEntry::Level::ModP2, 0};
        return true;
    }

private:
    OracleMode mode_;
    std::vector<OracleCall> log_;
};

struct WedgeTranscript {
    long p = 0;
    int s = 0;                      // primes reduced by the final stage
    std::vector<UnitJet> initial, finals;
    std::vector<WedgeStep> steps;
    std::vector<OracleCall> oracle_log;
    std::vector<std::vector<mpz_class>> matrix;  // finals_k = prod initial_l^matrix[k][l]
    mpz_class det = 1;
    bool trivial = false;           // first unit 1 mod P_1^2 ... P_s^2
    bool blocked = false;
    std::string status;
};

namespace detail {

inline std::vector<std::vector<mpz_class>> identity_matrix(std::size_t n)
{
    std::vector<std::vector<mpz_class>> m(n, std::vector<mpz_class>(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline mpz_class integer_det(std::vector<std::vector<mpz_class>> a)
{
    // fraction-free Gaussian elimination (Bareiss)
    const std::size_t n = a.size();
    mpz_class prev = 1, sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < n && a[r][k] == 0) ++r;
            if (r == n) return 0;
            std::swap(a[k], a[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                a[i][j] = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
            }
        prev = a[k][k];
    }
    return n == 0 ? mpz_class(1) : mpz_class(sign * a[n - 1][n - 1]);
}

inline void apply_step(WedgeTranscript& T, std::vector<UnitJet>& u, const WedgeStepResult& r)
{
    const WedgeStep& s = r.step;
    u[s.first] = r.v;
    u[s.second] = r.w;
    auto ri = T.matrix[s.first], rj = T.matrix[s.second];
    for (std::size_t l = 0; l < ri.size(); ++l) {
        T.matrix[s.first][l] = s.a * ri[l] + s.b * rj[l];
        T.matrix[s.second][l] = s.c * ri[l] + s.d * rj[l];
    }
    T.steps.push_back(s);
}

// chain elimination at prime q over units 0..count: afterwards units
// 0..count-1 have coefficient 0 at q
inline void eliminate(WedgeTranscript& T, std::vector<UnitJet>& u, int q, int count)
{
    for (int k = 0; k < count; ++k) {
        auto r = wedge_step(u[k], u[k + 1], q, T.p);
        r.step.first = k;
        r.step.second = k + 1;
        apply_step(T, u, r);
    }
}

inline void check_hypothesis(const std::vector<UnitJet>& jets, std::size_t nprimes, const char* who)
{
    for (std::size_t k = 0; k < jets.size(); ++k) {
        if (jets[k].at.size() != nprimes)
            throw ValidationError(std::string(who) + ": jet " + std::to_string(k) + " has " +
                                  std::to_string(jets[k].at.size()) + " entries, expected " + std::to_string(nprimes));
        for (std::size_t i = 0; i < nprimes; ++i)
            if (jets[k].at[i].level == JetEntry::Level::NotOne)
                throw DomainError(std::string(who) + ": unit " + std::to_string(k) + " is not 1 mod prime " +
                                  std::to_string(i));
    }
}

inline void reduce_leading(WedgeTranscript& T, std::vector<UnitJet>& u, int s, CftOracle& oracle)
{
    for (int q = 1; q < s; ++q) eliminate(T, u, q, s - q);
    if (s >= 2) {
        bool ok = oracle.apply(u[0], 0, s);
        T.oracle_log = oracle.log();
        if (!ok) {
            T.blocked = true;
            T.status = "blocked at CFT step";
            return;
        }
    }
    T.trivial = true;
    T.status = s == 1 ? "s = 1: trivial" : "wedge equals one whose first unit is 1 mod P_1^2 ... P_s^2";
}

inline void finish(WedgeTranscript& T, const std::vector<UnitJet>& u)
{
    T.finals = u;
    T.det = integer_det(T.matrix);
    if (T.det != 1 && T.det != -1) throw InvariantError("wedge transcript: cumulative determinant " + T.det.get_str());
}

}  // namespace detail

// Recursive elimination over primes 1..s-1 (0-based), then one oracle call
// on the first unit.
inline WedgeTranscript reduce_wedge(const std::vector<UnitJet>& jets, long p, CftOracle& oracle)
{
    if (jets.empty()) throw ValidationError("reduce_wedge: no units");
    const int s = static_cast<int>(jets.size());
    detail::check_hypothesis(jets, s, "reduce_wedge");
    WedgeTranscript T;
    T.p = p;
    T.s = s;
    T.initial = jets;
    T.matrix = detail::identity_matrix(s);
    auto u = jets;
    detail::reduce_leading(T, u, s, oracle);
    detail::finish(T, u);
    return T;
}

// g units over g primes: clear primes s..g-1 from the first s units, then
// reduce the first s units over the first s primes.
inline WedgeTranscript extend_to_g(const std::vector<UnitJet>& jets, int s, long p, CftOracle& oracle)
{
    const int g = static_cast<int>(jets.size());
    if (s < 1 || s > g) throw ValidationError("extend_to_g: need 1 <= s <= g");
    detail::check_hypothesis(jets, g, "extend_to_g");
    WedgeTranscript T;
    T.p = p;
    T.s = s;
    T.initial = jets;
    T.matrix = detail::identity_matrix(g);
    auto u = jets;
    for (int q = s; q < g; ++q) detail::eliminate(T, u, q, g - 1 - (q - s));
    detail::reduce_leading(T, u, s, oracle);
    detail::finish(T, u);
    return T;
}

// finals_k has coefficient 0 at primes 1..s-1-k, and unit 0 also at prime 0
// when the oracle was granted
inline bool ladder_shape(const WedgeTranscript& T)
{
    const JetEntry zero{JetEntry::Level::ModP2, 0};
    const int s = T.s;
    for (int k = 0; k < s; ++k)
        for (int q = 1; q <= s - 1 - k; ++q)
            if (T.finals[k].at[q] != zero) return false;
    const int g = static_cast<int>(T.finals.size());
    for (int k = 0; k < s; ++k)
        for (int q = s; q < g; ++q)
            if (T.finals[k].at[q] != zero) return false;
    if (T.trivial && s >= 2 && T.finals[0].at[0] != zero) return false;
    return true;
}

// replay the steps and oracle grants on the initial jets
inline bool replay_matches(const WedgeTranscript& T)
{
    auto u = T.initial;
    for (const auto& s : T.steps) {
        auto v = jet_product(u[s.first], s.a, u[s.second], s.b, T.p);
        auto w = jet_product(u[s.first], s.c, u[s.second], s.d, T.p);
        u[s.first] = v;
        u[s.second] = w;
    }
    for (const auto& c : T.oracle_log)
        if (c.granted) u[c.unit].at[c.prime] = {JetEntry::Level::ModP2, 0};
    if (u != T.finals) return false;
    // the cumulative matrix applied to the initial jets gives the same
    // finals away from oracle-granted entries
    for (std::size_t k = 0; k < u.size(); ++k)
        for (std::size_t i = 0; i < u[k].at.size(); ++i) {
            bool granted = false;
            for (const auto& c : T.oracle_log) granted |= c.granted && c.unit == static_cast<int>(k) && c.prime == static_cast<int>(i);
            if (granted) continue;
            long acc = 0;
            bool known = true;
            for (std::size_t l = 0; l < u.size(); ++l) {
                mpz_class e = T.matrix[k][l] % T.p;
                if (e == 0) continue;
                if (T.initial[l].at[i].level != JetEntry::Level::ModP2) known = false;
                acc += e.get_si() * T.initial[l].at[i].alpha;
            }
            if (known && u[k].at[i].level == JetEntry::Level::ModP2 && ((acc % T.p) + T.p) % T.p != u[k].at[i].alpha)
                return false;
        }
    return true;
}

struct UnimodularWitness {
    bool found = false;
    long a = 0, b = 0, c = 0, d = 0;
};

// search 2x2 integer matrices with entries in [-bound, bound] and det +-1
// whose first row clears prime 1 of the first unit
inline UnimodularWitness brute_force_pair(const UnitJet& v, const UnitJet& w, long p, long bound)
{
    long al = required_alpha(v, 1, "brute_force_pair"), be = required_alpha(w, 1, "brute_force_pair");
    for (long a = -bound; a <= bound; ++a)
        for (long b = -bound; b <= bound; ++b) {
            if ((((a * al + b * be) % p) + p) % p != 0) continue;
            for (long c = -bound; c <= bound; ++c)
                for (long d = -bound; d <= bound; ++d) {
                    long det = a * d - b * c;
                    if (det == 1 || det == -1) return {true, a, b, c, d};
                }
        }
    return {};
}

}  // namespace ltcm
