#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "poly.hpp"

namespace ltcm {

// valuation of sum_i b_i with candidate valuations cand[i]: exact when the
// smallest exact candidate is below every capped one
inline Ord min_of_candidates(const std::vector<Ord>& cand)
{
    Ord best = Ord::infinite();
    for (const auto& o : cand) best = min_distinct(best, o);
    return best;
}

// O = (Z/p^N)[t]/(h) for an Eisenstein polynomial h of degree d, in the
// normalization ord(t) = 1, ord(p) = d.  Elements are coefficient vectors of
// length d.  The candidate valuations i + d*ord_p(a_i) are pairwise distinct,
// which makes the valuation formula exact.
class EisensteinRing {
public:
    using Elem = std::vector<mpz_class>;

    EisensteinRing() = default;
    EisensteinRing(const PadicPoly& h) : c_(h.ctx()), d_(h.degree())
    {
        if (d_ < 1) throw ValidationError("Eisenstein ring needs a polynomial of degree >= 1");
        mpz_class inv = h.leading().inverse().value();
        for (long i = 0; i < d_; ++i) {
            mpz_class v = h.coeffs()[i] * inv;
            reduce_mod(v, c_->modulus());
            low_.push_back(v);
        }
        auto np = newton_polygon(h);
        if (np.vanishing_order != 0 || np.segments.size() != 1 || np.segments[0].root_valuation() != mpq_class(1, d_))
            throw DomainError("polynomial is not Eisenstein: " + h.str());
    }

    const Ctx& ctx() const { return c_; }
    long degree() const { return d_; }
    // ord of the zero element
    long cap() const { return d_ * c_->N; }

    Elem zero() const { return Elem(d_, 0); }
    Elem one() const { return constant(1); }
    Elem constant(const mpz_class& v) const
    {
        Elem e = zero();
        e[0] = v;
        reduce_mod(e[0], c_->modulus());
        return e;
    }
    Elem gen() const
    {
        if (d_ == 1) return constant(mpz_class(-low_[0]));
        Elem e = zero();
        e[1] = 1;
        return e;
    }
    Elem add(const Elem& a, const Elem& b) const
    {
        Elem r(d_);
        for (long i = 0; i < d_; ++i) {
            r[i] = a[i] + b[i];
            if (r[i] >= c_->modulus()) r[i] -= c_->modulus();
        }
        return r;
    }
    Elem sub(const Elem& a, const Elem& b) const
    {
        Elem r(d_);
        for (long i = 0; i < d_; ++i) {
            r[i] = a[i] - b[i];
            if (r[i] < 0) r[i] += c_->modulus();
        }
        return r;
    }
    Elem neg(const Elem& a) const { return sub(zero(), a); }
    Elem scale(const Elem& a, const mpz_class& s) const
    {
        Elem r(a);
        for (auto& v : r) {
            v *= s;
            reduce_mod(v, c_->modulus());
        }
        return r;
    }
    Elem mul(const Elem& a, const Elem& b) const
    {
        std::vector<mpz_class> r(2 * d_ - 1, 0);
        for (long i = 0; i < d_; ++i) {
            if (a[i] == 0) continue;
            for (long j = 0; j < d_; ++j) mpz_addmul(r[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
        }
        for (long k = 2 * d_ - 2; k >= d_; --k) {
            reduce_mod(r[k], c_->modulus());
            if (r[k] == 0) continue;
            for (long i = 0; i < d_; ++i) mpz_submul(r[k - d_ + i].get_mpz_t(), r[k].get_mpz_t(), low_[i].get_mpz_t());
        }
        r.resize(d_);
        for (auto& v : r) reduce_mod(v, c_->modulus());
        return r;
    }
    Elem pow(const Elem& a, unsigned e) const
    {
        Elem r = one();
        for (unsigned i = 0; i < e; ++i) r = mul(r, a);
        return r;
    }
    // value of a polynomial over Z/p^N at an element
    Elem eval(const PadicPoly& f, const Elem& x) const
    {
        Elem acc = zero();
        for (std::size_t i = f.coeffs().size(); i-- > 0;) acc = add(mul(acc, x), constant(f.coeffs()[i]));
        return acc;
    }

    Ord ord(const Elem& a) const
    {
        std::vector<Ord> cand;
        for (long i = 0; i < d_; ++i) cand.push_back(residue_ord(a[i], c_, c_->N).scaled(d_).shifted(i));
        return min_of_candidates(cand);
    }
    bool is_zero(const Elem& a) const
    {
        for (const auto& v : a)
            if (v != 0) return false;
        return true;
    }

private:
    Ctx c_;
    long d_ = 0;
    std::vector<mpz_class> low_;  // h / lc(h) = t^d + sum low_i t^i
};

// L = B[y]/(m) for a monic m of degree k over a valued ring B, where y has
// valuation w in the normalization of L and gcd(k, w) = 1, so L/B is totally
// ramified of degree k and ord_L(sum b_j y^j) = min_j (k*ord_B(b_j) + j*w).
template <class Base>
class RelativeExtension {
public:
    using BElem = typename Base::Elem;
    using Elem = std::vector<BElem>;

    RelativeExtension(Base base, std::vector<BElem> monic, long w) : B_(std::move(base)), w_(w)
    {
        k_ = static_cast<long>(monic.size()) - 1;
        if (k_ < 1) throw ValidationError("relative extension needs degree >= 1");
        if (std::gcd(k_, w_) != 1) throw DomainError("relative extension: generator valuation not coprime to degree");
        low_.assign(monic.begin(), monic.begin() + k_);
    }

    const Base& base() const { return B_; }
    long degree() const { return k_; }
    long gen_ord() const { return w_; }

    Elem zero() const { return Elem(k_, B_.zero()); }
    Elem one() const { return constant(B_.one()); }
    Elem constant(const BElem& b) const
    {
        Elem e = zero();
        e[0] = b;
        return e;
    }
    Elem gen() const
    {
        Elem e = zero();
        if (k_ == 1) e[0] = B_.neg(low_[0]);
        else e[1] = B_.one();
        return e;
    }
    Elem add(const Elem& a, const Elem& b) const
    {
        Elem r(k_);
        for (long i = 0; i < k_; ++i) r[i] = B_.add(a[i], b[i]);
        return r;
    }
    Elem sub(const Elem& a, const Elem& b) const
    {
        Elem r(k_);
        for (long i = 0; i < k_; ++i) r[i] = B_.sub(a[i], b[i]);
        return r;
    }
    Elem neg(const Elem& a) const { return sub(zero(), a); }
    Elem scale(const Elem& a, const BElem& s) const
    {
        Elem r(k_);
        for (long i = 0; i < k_; ++i) r[i] = B_.mul(a[i], s);
        return r;
    }
    Elem mul(const Elem& a, const Elem& b) const
    {
        std::vector<BElem> r(2 * k_ - 1, B_.zero());
        for (long i = 0; i < k_; ++i)
            for (long j = 0; j < k_; ++j) r[i + j] = B_.add(r[i + j], B_.mul(a[i], b[j]));
        for (long t = 2 * k_ - 2; t >= k_; --t)
            for (long i = 0; i < k_; ++i) r[t - k_ + i] = B_.sub(r[t - k_ + i], B_.mul(r[t], low_[i]));
        r.resize(k_);
        return r;
    }
    Elem pow(const Elem& a, unsigned e) const
    {
        Elem r = one();
        for (unsigned i = 0; i < e; ++i) r = mul(r, a);
        return r;
    }
    // polynomial with coefficients in B evaluated at an element of L
    Elem eval(const std::vector<BElem>& f, const Elem& x) const
    {
        Elem acc = zero();
        for (std::size_t i = f.size(); i-- > 0;) acc = add(mul(acc, x), constant(f[i]));
        return acc;
    }

    Ord ord(const Elem& a) const
    {
        std::vector<Ord> cand;
        for (long j = 0; j < k_; ++j) cand.push_back(B_.ord(a[j]).scaled(k_).shifted(j * w_));
        return min_of_candidates(cand);
    }

private:
    Base B_;
    long k_ = 1;
    long w_ = 1;
    std::vector<BElem> low_;
};

}  // namespace ltcm
