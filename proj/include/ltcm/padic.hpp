#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ord.hpp"

namespace ltcm {

inline bool is_small_prime(long p)
{
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

struct PadicContext {
    long p;
    int N;
    std::vector<mpz_class> pow;  // pow[k] = p^k, k = 0..N

    const mpz_class& modulus() const { return pow[N]; }
};

using Ctx = std::shared_ptr<const PadicContext>;

inline Ctx make_context(long p, int N)
{
    if (!is_small_prime(p) || p == 2)
        throw ValidationError("p must be an odd prime, got " + std::to_string(p));
    if (N < 1) throw ValidationError("precision N must be positive, got " + std::to_string(N));
    auto c = std::make_shared<PadicContext>();
    c->p = p;
    c->N = N;
    c->pow.resize(N + 1);
    c->pow[0] = 1;
    for (int k = 1; k <= N; ++k) c->pow[k] = c->pow[k - 1] * p;
    return c;
}

inline bool same_context(const Ctx& a, const Ctx& b)
{
    return a == b || (a && b && a->p == b->p && a->N == b->N);
}

inline void reduce_mod(mpz_class& v, const mpz_class& m)
{
    mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
}

// ord_p of a residue modulo p^cap; the zero residue reports ">= cap"
inline Ord residue_ord(const mpz_class& v, const Ctx& c, int cap)
{
    mpz_class r = v;
    reduce_mod(r, c->pow[cap]);
    if (r == 0) return Ord::at_least(cap);
    long k = 0;
    while (true) {
        if (mpz_divisible_ui_p(r.get_mpz_t(), c->p) == 0) break;
        mpz_divexact_ui(r.get_mpz_t(), r.get_mpz_t(), c->p);
        ++k;
    }
    return Ord::exact(k);
}

inline mpz_class inverse_mod(const mpz_class& v, const mpz_class& m)
{
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t()) == 0)
        throw DomainError("element is not invertible modulo " + m.get_str());
    return r;
}

// Element of Z/p^N, the fixed-precision model of Z_p.
class PadicInt {
public:
    PadicInt() = default;
    PadicInt(Ctx c, const mpz_class& v) : c_(std::move(c)), v_(v) { reduce_mod(v_, c_->modulus()); }
    PadicInt(Ctx c, long v) : PadicInt(std::move(c), mpz_class(v)) {}

    const Ctx& ctx() const { return c_; }
    long p() const { return c_->p; }
    int N() const { return c_->N; }
    const mpz_class& value() const { return v_; }

    // representative in (-p^N/2, p^N/2]
    mpz_class balanced() const
    {
        mpz_class h = c_->modulus() / 2;
        return v_ > h ? mpz_class(v_ - c_->modulus()) : v_;
    }

    bool is_zero() const { return v_ == 0; }
    bool is_unit() const { return mpz_divisible_ui_p(v_.get_mpz_t(), c_->p) == 0; }
    Ord ord() const { return residue_ord(v_, c_, c_->N); }

    PadicInt operator-() const { return PadicInt(c_, mpz_class(-v_)); }
    friend PadicInt operator+(const PadicInt& a, const PadicInt& b) { return PadicInt(a.c_, mpz_class(a.v_ + b.check(a))); }
    friend PadicInt operator-(const PadicInt& a, const PadicInt& b) { return PadicInt(a.c_, mpz_class(a.v_ - b.check(a))); }
    friend PadicInt operator*(const PadicInt& a, const PadicInt& b) { return PadicInt(a.c_, mpz_class(a.v_ * b.check(a))); }
    PadicInt& operator+=(const PadicInt& o) { return *this = *this + o; }
    PadicInt& operator-=(const PadicInt& o) { return *this = *this - o; }
    PadicInt& operator*=(const PadicInt& o) { return *this = *this * o; }

    PadicInt pow(unsigned long e) const
    {
        mpz_class r;
        mpz_powm_ui(r.get_mpz_t(), v_.get_mpz_t(), e, c_->modulus().get_mpz_t());
        return PadicInt(c_, r);
    }

    PadicInt inverse() const
    {
        if (!is_unit()) throw DomainError("inverse of a non-unit " + v_.get_str() + " (p=" + std::to_string(p()) + ")");
        return PadicInt(c_, inverse_mod(v_, c_->modulus()));
    }

    // v / p^k for v divisible by p^k; the top k digits of the result are
    // undetermined and reported as zero, callers account for the lost digits
    PadicInt shift_down(int k) const
    {
        if (k < 0 || k > N()) throw DomainError("shift out of range");
        if (!ord().certainly_at_least(k))
            throw DomainError("value " + v_.get_str() + " not divisible by p^" + std::to_string(k));
        mpz_class q;
        mpz_divexact(q.get_mpz_t(), v_.get_mpz_t(), c_->pow[k].get_mpz_t());
        return PadicInt(c_, q);
    }

    // residue modulo p^M with M <= N, kept in the same context
    PadicInt truncated(int M) const
    {
        mpz_class r = v_;
        reduce_mod(r, c_->pow[std::min(M, N())]);
        return PadicInt(c_, r);
    }

    bool operator==(const PadicInt& o) const { return same_context(c_, o.c_) && v_ == o.v_; }

    std::string str() const { return v_.get_str(); }

private:
    const mpz_class& check(const PadicInt& other) const
    {
        if (!same_context(c_, other.c_)) throw ValidationError("p-adic operands with different (p, N)");
        return v_;
    }

    Ctx c_;
    mpz_class v_;
};

}  // namespace ltcm
