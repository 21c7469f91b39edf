#pragma once

#include <gmpxx.h>

#include <random>
#include <vector>

#include "ltcm/lubin_tate.hpp"

namespace testutil {

inline mpz_class binomial(long n, long k)
{
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

inline mpz_class random_residue(std::mt19937_64& rng, const mpz_class& m)
{
    mpz_class r = 0;
    for (int i = 0; i < 4; ++i) r = (r << 64) + mpz_class(std::to_string(rng()));
    return r % m;
}

// pi*t + sum_{1<k<p} p*r_k t^k + (1 + p*r_p) t^p, pi = p * unit
inline ltcm::LTSeed random_seed(const ltcm::Ctx& c, int D, std::mt19937_64& rng)
{
    const long p = c->p;
    std::uniform_int_distribution<long> dig(0, p - 1), unit(1, p - 1);
    std::vector<mpz_class> a(p + 1, 0);
    a[1] = mpz_class(p) * (unit(rng) + p * dig(rng));
    for (long k = 2; k < p; ++k) a[k] = mpz_class(p) * dig(rng);
    a[p] = 1 + mpz_class(p) * dig(rng);
    return ltcm::make_seed(ltcm::PadicPoly(c, a), D);
}

}  // namespace testutil
