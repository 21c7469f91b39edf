#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "padic.hpp"

namespace ltcm {

// Dense univariate polynomial over Z/p^N, constant term first.
class PadicPoly {
public:
    PadicPoly() = default;
    explicit PadicPoly(Ctx c) : c_(std::move(c)) {}
    PadicPoly(Ctx c, std::vector<mpz_class> coeffs) : c_(std::move(c)), a_(std::move(coeffs)) { normalize(); }
    PadicPoly(Ctx c, const std::vector<long>& coeffs) : c_(std::move(c))
    {
        for (long v : coeffs) a_.emplace_back(v);
        normalize();
    }
    static PadicPoly monomial(Ctx c, std::size_t k, const mpz_class& coeff = 1)
    {
        std::vector<mpz_class> a(k + 1, 0);
        a[k] = coeff;
        return PadicPoly(std::move(c), std::move(a));
    }
    static PadicPoly constant(Ctx c, const mpz_class& v) { return PadicPoly(std::move(c), std::vector<mpz_class>{v}); }

    const Ctx& ctx() const { return c_; }
    long degree() const { return static_cast<long>(a_.size()) - 1; }
    bool is_zero() const { return a_.empty(); }
    const std::vector<mpz_class>& coeffs() const { return a_; }
    PadicInt coeff(std::size_t i) const { return PadicInt(c_, i < a_.size() ? a_[i] : mpz_class(0)); }
    PadicInt leading() const { return coeff(a_.size() - 1); }

    friend PadicPoly operator+(const PadicPoly& f, const PadicPoly& g)
    {
        check(f, g);
        std::vector<mpz_class> r(std::max(f.a_.size(), g.a_.size()), 0);
        for (std::size_t i = 0; i < f.a_.size(); ++i) r[i] += f.a_[i];
        for (std::size_t i = 0; i < g.a_.size(); ++i) r[i] += g.a_[i];
        return PadicPoly(f.c_, std::move(r));
    }
    friend PadicPoly operator-(const PadicPoly& f, const PadicPoly& g) { return f + g.scaled(-1); }
    friend PadicPoly operator*(const PadicPoly& f, const PadicPoly& g)
    {
        check(f, g);
        if (f.is_zero() || g.is_zero()) return PadicPoly(f.c_);
        std::vector<mpz_class> r(f.a_.size() + g.a_.size() - 1, 0);
        for (std::size_t i = 0; i < f.a_.size(); ++i) {
            if (f.a_[i] == 0) continue;
            for (std::size_t j = 0; j < g.a_.size(); ++j) r[i + j] += f.a_[i] * g.a_[j];
        }
        return PadicPoly(f.c_, std::move(r));
    }
    PadicPoly scaled(const mpz_class& s) const
    {
        std::vector<mpz_class> r(a_);
        for (auto& v : r) v *= s;
        return PadicPoly(c_, std::move(r));
    }
    bool operator==(const PadicPoly& o) const { return same_context(c_, o.c_) && a_ == o.a_; }

    PadicInt eval(const PadicInt& x) const
    {
        mpz_class acc = 0;
        for (std::size_t i = a_.size(); i-- > 0;) {
            acc = acc * x.value() + a_[i];
            reduce_mod(acc, c_->modulus());
        }
        return PadicInt(c_, acc);
    }

    PadicPoly derivative() const
    {
        std::vector<mpz_class> r;
        for (std::size_t i = 1; i < a_.size(); ++i) r.push_back(a_[i] * static_cast<unsigned long>(i));
        return PadicPoly(c_, std::move(r));
    }

    // f(g(x))
    PadicPoly compose(const PadicPoly& g) const
    {
        PadicPoly acc(c_);
        for (std::size_t i = a_.size(); i-- > 0;) acc = acc * g + constant(c_, a_[i]);
        return acc;
    }

    // quotient and remainder by a polynomial with unit leading coefficient
    std::pair<PadicPoly, PadicPoly> divmod(const PadicPoly& d) const
    {
        check(*this, d);
        if (d.is_zero() || !d.leading().is_unit()) throw DomainError("division by a polynomial with non-unit leading coefficient");
        mpz_class inv = d.leading().inverse().value();
        std::vector<mpz_class> r(a_);
        long dd = d.degree();
        if (degree() < dd) return {PadicPoly(c_), *this};
        std::vector<mpz_class> q(degree() - dd + 1, 0);
        for (long k = degree(); k >= dd; --k) {
            mpz_class lc = r[k] * inv;
            reduce_mod(lc, c_->modulus());
            q[k - dd] = lc;
            if (lc == 0) continue;
            for (long j = 0; j <= dd; ++j) {
                r[k - dd + j] -= lc * d.a_[j];
                reduce_mod(r[k - dd + j], c_->modulus());
            }
        }
        r.resize(dd);
        return {PadicPoly(c_, std::move(q)), PadicPoly(c_, std::move(r))};
    }

    std::string str() const
    {
        if (a_.empty()) return "0";
        std::string s;
        for (std::size_t i = 0; i < a_.size(); ++i) {
            if (a_[i] == 0) continue;
            if (!s.empty()) s += " + ";
            s += a_[i].get_str();
            if (i > 0) s += "*t^" + std::to_string(i);
        }
        return s;
    }

private:
    static void check(const PadicPoly& f, const PadicPoly& g)
    {
        if (!same_context(f.c_, g.c_)) throw ValidationError("polynomials with different (p, N)");
    }
    void normalize()
    {
        for (auto& v : a_) reduce_mod(v, c_->modulus());
        while (!a_.empty() && a_.back() == 0) a_.pop_back();
    }

    Ctx c_;
    std::vector<mpz_class> a_;
};

struct HenselResult {
    PadicInt root;
    long derivative_ord;  // k = ord f'(approx); the root is unique mod p^(N-k)
    int iterations;
};

// Newton iteration x <- x - f(x)/f'(x) under ord f(a) > 2 ord f'(a).
inline HenselResult hensel_root(const PadicPoly& f, const PadicInt& approx)
{
    if (!same_context(f.ctx(), approx.ctx())) throw ValidationError("hensel_root: mismatched (p, N)");
    const int N = approx.N();
    PadicPoly df = f.derivative();
    Ord of = f.eval(approx).ord();
    Ord od = df.eval(approx).ord();
    if (!od.is_exact() || of.bound() <= 2 * od.value())
        throw DomainError("no certified root: ord f(a) = " + of.str() + ", ord f'(a) = " + od.str());
    const long k = od.value();
    PadicInt x = approx;
    int it = 0;
    for (; it < 4 * N + 8; ++it) {
        PadicInt fx = f.eval(x);
        if (fx.is_zero()) return {x, k, it};
        PadicInt dfx = df.eval(x);
        if (dfx.ord() != Ord::exact(k)) throw InvariantError("hensel_root: derivative valuation changed during iteration");
        PadicInt step = fx.shift_down(static_cast<int>(k)) * dfx.shift_down(static_cast<int>(k)).inverse();
        x = x - step;
    }
    throw PrecisionError("hensel_root did not converge at precision N=" + std::to_string(N));
}

struct NewtonSegment {
    mpq_class slope;  // geometric slope of the lower hull segment
    long length;
    mpq_class root_valuation() const { return -slope; }
};

// Lower convex hull of (i, ord a_i).  Slopes are geometric (strictly
// increasing); each segment of slope s carries `length` roots of valuation -s.
struct NewtonPolygon {
    long vanishing_order = 0;
    long degree = 0;
    std::vector<NewtonSegment> segments;

    long total_length() const
    {
        long s = 0;
        for (const auto& g : segments) s += g.length;
        return s;
    }
    std::vector<mpq_class> root_valuations() const
    {
        std::vector<mpq_class> v;
        for (const auto& g : segments)
            for (long i = 0; i < g.length; ++i) v.push_back(g.root_valuation());
        std::sort(v.begin(), v.end());
        return v;
    }
};

inline NewtonPolygon newton_polygon(const PadicPoly& f)
{
    if (f.is_zero()) throw DomainError("newton_polygon of the zero polynomial");
    NewtonPolygon P;
    P.degree = f.degree();
    const auto& a = f.coeffs();
    long v = 0;
    while (a[v] == 0) ++v;
    P.vanishing_order = v;
    struct Pt {
        long x;
        long y;
    };
    // A zero residue between v and the degree has valuation >= N, above
    // every exact point, so it can never lie below the hull.
    std::vector<Pt> pts;
    for (long i = v; i <= P.degree; ++i) {
        Ord o = f.coeff(i).ord();
        if (o.is_exact()) pts.push_back({i, o.value()});
    }
    std::vector<Pt> hull;
    for (const auto& q : pts) {
        while (hull.size() >= 2) {
            const Pt& A = hull[hull.size() - 2];
            const Pt& B = hull.back();
            // drop B unless it lies strictly below the chord A-q
            if ((B.y - A.y) * (q.x - A.x) >= (q.y - A.y) * (B.x - A.x)) hull.pop_back();
            else break;
        }
        hull.push_back(q);
    }
    for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
        mpq_class sl(hull[s + 1].y - hull[s].y, hull[s + 1].x - hull[s].x);
        sl.canonicalize();
        P.segments.push_back({sl, hull[s + 1].x - hull[s].x});
    }
    return P;
}

// ord_p Res(f, g).  The Sylvester determinant is taken over Z on the
// canonical lifts: an exactly vanishing determinant means the lifts share a
// factor and is reported as infinite; a nonzero determinant divisible by p^N
// cannot be told apart from zero and raises a precision error.
inline Ord resultant_valuation(const PadicPoly& f, const PadicPoly& g)
{
    if (f.is_zero() || g.is_zero()) throw DomainError("resultant_valuation: zero polynomial");
    if (!same_context(f.ctx(), g.ctx())) throw ValidationError("resultant_valuation: mismatched (p, N)");
    auto lift = [](const PadicPoly& h) {
        std::vector<mpz_class> v;
        for (std::size_t i = 0; i < h.coeffs().size(); ++i) v.push_back(h.coeff(i).balanced());
        return v;
    };
    mpz_class r = resultant(IntegerRing{}, lift(f), lift(g));
    if (r == 0) return Ord::infinite();
    const Ctx& c = f.ctx();
    Ord o = residue_ord(r, c, c->N);
    if (!o.is_exact())
        throw PrecisionError("resultant inconclusive at precision N=" + std::to_string(c->N));
    return o;
}

}  // namespace ltcm
