#pragma once

#include <gmpxx.h>

#include <vector>

#include "padic.hpp"

namespace ltcm {

template <class E>
using Matrix = std::vector<std::vector<E>>;

struct IntegerRing {
    using Elem = mpz_class;
    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem neg(const Elem& a) const { return -a; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
};

// Z/p^M on canonical residues
struct ResidueRing {
    using Elem = mpz_class;
    mpz_class m;
    Elem norm(mpz_class v) const
    {
        reduce_mod(v, m);
        return v;
    }
    Elem zero() const { return 0; }
    Elem one() const { return norm(1); }
    Elem add(const Elem& a, const Elem& b) const { return norm(a + b); }
    Elem sub(const Elem& a, const Elem& b) const { return norm(a - b); }
    Elem neg(const Elem& a) const { return norm(-a); }
    Elem mul(const Elem& a, const Elem& b) const { return norm(a * b); }
};

// Division-free determinant (Berkowitz), valid over any commutative ring.
template <class Ring>
typename Ring::Elem determinant(const Ring& R, const Matrix<typename Ring::Elem>& A)
{
    using E = typename Ring::Elem;
    const std::size_t n = A.size();
    if (n == 0) return R.one();
    std::vector<E> vect{R.one(), R.neg(A[0][0])};
    for (std::size_t r = 1; r < n; ++r) {
        std::vector<E> t(r + 2, R.zero());
        t[0] = R.one();
        t[1] = R.neg(A[r][r]);
        std::vector<E> q(r);
        for (std::size_t i = 0; i < r; ++i) q[i] = A[i][r];
        for (std::size_t k = 0; k < r; ++k) {
            E s = R.zero();
            for (std::size_t i = 0; i < r; ++i) s = R.add(s, R.mul(A[r][i], q[i]));
            t[k + 2] = R.neg(s);
            if (k + 1 < r) {
                std::vector<E> nq(r, R.zero());
                for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = 0; j < r; ++j) nq[i] = R.add(nq[i], R.mul(A[i][j], q[j]));
                q = std::move(nq);
            }
        }
        std::vector<E> next(r + 2, R.zero());
        for (std::size_t i = 0; i < r + 2; ++i)
            for (std::size_t j = 0; j <= std::min(i, r); ++j) next[i] = R.add(next[i], R.mul(t[i - j], vect[j]));
        vect = std::move(next);
    }
    return (n % 2 == 0) ? vect[n] : R.neg(vect[n]);
}

// Sylvester matrix of f, g given as coefficient lists, constant term first,
// with the stated degrees (leading coefficients f[df], g[dg]).
template <class Ring>
Matrix<typename Ring::Elem> sylvester_matrix(const Ring& R, const std::vector<typename Ring::Elem>& f,
                                             const std::vector<typename Ring::Elem>& g)
{
    const std::size_t df = f.size() - 1, dg = g.size() - 1, n = df + dg;
    Matrix<typename Ring::Elem> S(n, std::vector<typename Ring::Elem>(n, R.zero()));
    for (std::size_t i = 0; i < dg; ++i)
        for (std::size_t k = 0; k <= df; ++k) S[i][i + k] = f[df - k];
    for (std::size_t i = 0; i < df; ++i)
        for (std::size_t k = 0; k <= dg; ++k) S[dg + i][i + k] = g[dg - k];
    return S;
}

template <class Ring>
typename Ring::Elem resultant(const Ring& R, const std::vector<typename Ring::Elem>& f,
                              const std::vector<typename Ring::Elem>& g)
{
    return determinant(R, sylvester_matrix(R, f, g));
}

}  // namespace ltcm
