// One PASS/FAIL line per acceptance criterion, each with its time limit.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "common.hpp"
#include "ltcm/cli.hpp"

using namespace ltcm;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
    void require(bool cond, const std::string& what)
    {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

TruncSeries binomial_series(const Ctx& c, int D, long a)
{
    TruncSeries s(c, 1, D);
    for (int k = 1; k <= D && k <= a; ++k) s.set(mono_var(0, k), testutil::binomial(a, k));
    return s;
}

// 1. X + Y + XY and (1+t)^a - 1 for the multiplicative seed, < 1 s per prime
Outcome multiplicative_oracle()
{
    Outcome o;
    for (long p : {3L, 5L, 7L}) {
        auto t0 = Clock::now();
        const int D = 20;
        auto c = make_context(p, 40);
        auto seed = multiplicative_seed(c, D);
        auto F = group_law(seed);
        TruncSeries want(c, 2, D);
        want.set(make_mono({1, 0}), 1);
        want.set(make_mono({0, 1}), 1);
        want.set(make_mono({1, 1}), 1);
        o.require(same(F.law[0], want), "group law differs from X + Y + XY at p=" + std::to_string(p));
        for (long a : {2L, 3L, 7L})
            o.require(same(endo(seed, PadicInt(c, a)), binomial_series(c, D, a)),
                      "[" + std::to_string(a) + "] differs from (1+t)^a - 1 at p=" + std::to_string(p));
        double s = seconds_since(t0);
        o.require(s < 1.0, "p=" + std::to_string(p) + " took " + std::to_string(s) + " s");
    }
    return o;
}

// 2. axioms and endomorphism ring laws for 20 random seeds per prime, < 30 s total
Outcome formal_group_axioms()
{
    Outcome o;
    std::mt19937_64 rng(20260101);
    const int D = 15;
    for (long p : {3L, 5L}) {
        auto c = make_context(p, 40);
        for (int trial = 0; trial < 20; ++trial) {
            auto seed = testutil::random_seed(c, D, rng);
            auto F = group_law(seed);
            auto ax = check_axioms(F);
            o.require(ax.all(), "axiom residual nonzero for a random seed at p=" + std::to_string(p));
            std::uniform_int_distribution<long> unit(1, 1000);
            PadicInt a(c, unit(rng)), b(c, unit(rng));
            auto ea = endo(seed, a), eb = endo(seed, b);
            o.require(same(series_compose(ea, {eb}), endo(seed, a * b)), "[a][b] != [ab]");
            auto sum = series_compose(F.law[0], {ea, eb});
            o.require(same(sum, endo(seed, a + b)), "F([a],[b]) != [a+b]");
        }
    }
    return o;
}

// 3. torsion degrees and slope of h_1, < 5 s
Outcome torsion_degrees()
{
    Outcome o;
    for (long p : {3L, 5L, 7L}) {
        auto c = make_context(p, 30);
        auto T = build_tower(frobenius_seed(c, p), 2);
        for (int n = 1; n <= 2; ++n)
            o.require(T.degree(n) == expected_level_degree(p, n), "deg h_" + std::to_string(n) + " wrong at p=" + std::to_string(p));
        auto np = newton_polygon(T.h(1));
        o.require(np.segments.size() == 1 && np.segments[0].root_valuation() == mpq_class(1, p - 1),
                  "h_1 polygon is not a single slope 1/(p-1) at p=" + std::to_string(p));
    }
    return o;
}

// 4. level_disc = p(p-1) and conductor floor p, two seeds per prime, N = 40, < 10 s per case
Outcome discriminant_level_two()
{
    Outcome o;
    for (long p : {3L, 5L}) {
        auto c = make_context(p, 40);
        for (const auto& seed : {multiplicative_seed(c, p), frobenius_seed(c, p)}) {
            auto t0 = Clock::now();
            auto T = build_tower(seed, 2);
            auto d = level_disc(T);
            auto f = character_conductor_floor(T);
            o.require(d.valuation == p * (p - 1), "level_disc = " + std::to_string(d.valuation) + " at p=" + std::to_string(p));
            o.require(f.exponent == p, "conductor floor = " + std::to_string(f.exponent));
            double s = seconds_since(t0);
            o.require(s < 10.0, "case took " + std::to_string(s) + " s");
        }
    }
    return o;
}

// 5. ord([pi](t0)) = ord(t0) + 1 on 100 random t0 per prime, < 5 s
Outcome filtration()
{
    Outcome o;
    std::mt19937_64 rng(5);
    for (long p : {3L, 5L}) {
        const int N = 30;
        auto c = make_context(p, N);
        auto T = build_tower(testutil::random_seed(c, p, rng), 1);
        std::uniform_int_distribution<int> k(1, 10);
        for (int trial = 0; trial < 100; ++trial) {
            int v = k(rng);
            mpz_class u = testutil::random_residue(rng, c->pow[N - v]);
            if (u % p == 0) u += 1;
            PadicInt x(c, mpz_class(u * c->pow[v]));
            o.require(filtration_step(T, x).ord() == Ord::exact(v + 1), "ord did not increase by one");
        }
    }
    return o;
}

// 6. dichotomy and conductor exponent 2, Kummer cross-check, < 60 s per case
Outcome division_conductor_two()
{
    Outcome o;
    for (long p : {3L, 5L})
        for (long e : {1L, 2L})
            for (bool mult : {true, false}) {
                auto t0 = Clock::now();
                auto c = make_context(p, 30);
                auto seed = mult ? multiplicative_seed(c, 2 * p) : frobenius_seed(c, 2 * p);
                auto T = build_tower(seed, 1);
                auto s = start_division(PadicInt(c, mpz_class(c->pow[e] * (1 + p))));
                o.require(s.e == e, "e_invariant wrong");
                for (int n = 1; n <= e; ++n) {
                    s = divide_point(T, s, n);
                    o.require(s.ramified == (n == e), "split/ramified mismatch at level " + std::to_string(n));
                }
                const auto& cert = s.steps.back().polygon;
                o.require(cert.segments.size() == 1 && cert.segments[0].root_valuation() == mpq_class(1, p),
                          "ramification certificate is not slope 1/p");
                auto r = division_conductor(T, s, group_law(seed));
                for (const auto& tb : r.translates) o.require(tb.delta == 2, "Delta != 2");
                o.require(static_cast<long>(r.translates.size()) == p - 1, "wrong number of translates");
                o.require(r.disc_exponent_break == 2 * (p - 1) && r.disc_exponent_resultant == 2 * (p - 1),
                          "discriminant exponent != 2(p-1)");
                o.require(r.conductor_exponent == 2, "conductor exponent != 2");
                if (mult) {
                    long m = T.ring(1).ord(T.ring(1).constant(s.history.back().value())).value();
                    o.require(r.conductor_exponent == p - m + 1, "Kummer conductor disagrees");
                }
                double secs = seconds_since(t0);
                o.require(secs < 60.0, "case took " + std::to_string(secs) + " s");
            }
    return o;
}

// 7. [L_n:K_n] = p^n with cyclic quotient, < 10 s
Outcome galois_indices()
{
    Outcome o;
    for (long p : {3L, 5L})
        for (int m = 1; m <= 3; ++m)
            for (int n = 1; n <= m; ++n) {
                auto r = tower_indices(p, m, n);
                long pn = 1;
                for (int i = 0; i < n; ++i) pn *= p;
                o.require(r.index == pn && r.cyclic && r.normal, "index or cyclicity wrong");
            }
    return o;
}

// 8. wedge engine, < 120 s
Outcome wedge_engine()
{
    Outcome o;
    for (long p : {3L, 5L, 7L})
        for (long al = 0; al < p; ++al)
            for (long be = 0; be < p; ++be) {
                auto e = combine(make_jet({al}, p), make_jet({be}, p), 0, p);
                o.require(((al * e.a + be * e.b) % p + p) % p == 0 && std::gcd(e.a, e.b) == 1, "combine");
            }
    const long p = 3;
    for (int s : {2, 3}) {
        long total = 1;
        for (int i = 0; i < s * s; ++i) total *= p;
        for (long code = 0; code < total; ++code) {
            std::vector<UnitJet> jets;
            long c = code;
            for (int k = 0; k < s; ++k) {
                std::vector<long> a;
                for (int i = 0; i < s; ++i, c /= p) a.push_back(c % p);
                jets.push_back(make_jet(a, p));
            }
            CftOracle oracle(OracleMode::Axiom);
            auto T = reduce_wedge(jets, p, oracle);
            o.require(ladder_shape(T), "final jets not in ladder form");
            o.require(T.det == 1 || T.det == -1, "cumulative determinant not +-1");
            o.require(oracle.log().size() == 1, "oracle calls != 1");
            o.require(replay_matches(T), "replay differs");
            if (s == 2) o.require(brute_force_pair(jets[0], jets[1], p, p).found, "no unimodular witness");
        }
    }
    return o;
}

// 9. elliptic CM fixture, < 120 s
Outcome elliptic_fixture()
{
    Outcome o;
    WeierstrassCurve E{-1, 0};
    auto data = curve_group_law(E, 20);
    QuadEmbedding emb{13, 1, 5};
    long count = 1;
    for (long x = 0; x < 13; ++x)
        for (long y = 0; y < 13; ++y)
            if ((y * y - (x * x * x - x)) % 13 == 0) ++count;
    long a13 = 14 - count;
    auto s = find_frobenius(data, emb);
    o.require(s.trace == a13, "trace differs from the point count");
    o.require(s.passing_count == 1, std::to_string(s.passing_count) + " candidates pass");
    if (s.passing >= 0) {
        QuadField K{1};
        const auto& w = s.candidates[s.passing];
        o.require(K.trace(w.alpha) == a13 && K.norm(w.alpha) == 13, "passing alpha has wrong trace or norm");
        o.require(w.linear_ord == Ord::exact(1), "linear coefficient valuation != 1");
        auto m = match_lubin_tate(data, emb, w.alpha, 24);
        o.require(m.conjugation_ok && m.inverse_ok && m.iso.jacobian[0][0].value() == 1, "strict isomorphism checks");
    }
    auto c = make_context(13, 10);
    auto i = cm_endo_elliptic(data, emb, QuadRat{0, 1}, c);
    o.require(i.integral, "[i] not 13-integral");
    o.require(i.integral && (i.linear * i.linear + PadicInt(c, 1)).is_zero(), "linear coefficient of [i] not sqrt(-1)");
    return o;
}

// 10. byte-identical CLI payloads on reruns
Outcome determinism()
{
    Outcome o;
    const std::string dir = LTCM_CONFIG_DIR, tool = LTCM_TOOL_PATH;
    auto tmp = std::filesystem::temp_directory_path() / "ltcm_acceptance";
    std::filesystem::create_directories(tmp);
    int count = 0;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".yaml") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        std::string stem = f.stem().string(), cmd;
        for (const auto& c : cli::commands())
            if ((stem == c || stem.rfind(c + "-", 0) == 0) && c.size() > cmd.size()) cmd = c;
        std::string payload[2];
        for (int k = 0; k < 2; ++k) {
            auto out = (tmp / (stem + std::to_string(k) + ".json")).string();
            int rc = std::system((tool + " " + cmd + " --config " + f.string() + " --out " + out + " --jobs " +
                                  std::to_string(1 + 2 * k) + " > /dev/null 2>&1").c_str());
            o.require(WEXITSTATUS(rc) == 0, stem + " exited with " + std::to_string(WEXITSTATUS(rc)));
            std::ifstream in(out);
            auto j = cli::Json::parse(in, nullptr, false);
            if (j.is_discarded()) {
                o.require(false, stem + ": report is not JSON");
                continue;
            }
            j.erase("timing");
            payload[k] = j.dump();
        }
        o.require(payload[0] == payload[1], stem + ": payload differs between runs");
        ++count;
    }
    o.require(count >= 14, "only " + std::to_string(count) + " fixtures");
    return o;
}

}  // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        double limit;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> all{
        {1, "multiplicative-group oracle", 3.0, multiplicative_oracle},
        {2, "formal-group axioms and endomorphism ring laws", 30.0, formal_group_axioms},
        {3, "torsion degrees and valuations", 5.0, torsion_degrees},
        {4, "discriminant and conductor of K_2/K_1", 40.0, discriminant_level_two},
        {5, "filtration", 5.0, filtration},
        {6, "division dichotomy and conductor exponent 2", 480.0, division_conductor_two},
        {7, "galois model indices", 10.0, galois_indices},
        {8, "wedge engine", 120.0, wedge_engine},
        {9, "elliptic CM fixture", 120.0, elliptic_fixture},
        {10, "CLI determinism", 600.0, determinism},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double s = seconds_since(t0);
        if (o.ok && s >= c.limit) {
            o.ok = false;
            o.detail = "time limit " + std::to_string(c.limit) + " s exceeded";
        }
        std::printf("%s criterion %d: %s (%.2f s)%s%s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, s,
                    o.ok ? "" : " - ", o.detail.c_str());
        failed += !o.ok;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
