#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "padic.hpp"
#include "poly.hpp"

namespace ltcm {

// Packed exponent vector: 7 bits per variable (up to 8 variables), total
// degree in the top byte.  Adding keys adds monomials, and numeric order is
// graded: lower total degree sorts first.
using Mono = std::uint64_t;

constexpr int kMaxVars = 8;
constexpr int kMaxTrunc = 127;

inline int mono_degree(Mono m) { return static_cast<int>(m >> 56); }
inline int mono_exp(Mono m, int i) { return static_cast<int>((m >> (7 * i)) & 0x7f); }
inline Mono mono_var(int i, int e = 1) { return (static_cast<Mono>(e) << 56) | (static_cast<Mono>(e) << (7 * i)); }
inline Mono make_mono(const std::vector<int>& e)
{
    Mono m = 0;
    for (std::size_t i = 0; i < e.size(); ++i) m += mono_var(static_cast<int>(i), e[i]);
    return m;
}
inline std::vector<int> mono_exps(Mono m, int nvars)
{
    std::vector<int> e(nvars);
    for (int i = 0; i < nvars; ++i) e[i] = mono_exp(m, i);
    return e;
}

using Term = std::pair<Mono, mpz_class>;

// Truncated power series in nvars variables over Z/p^eff, total degree <= D.
// Only the first eff p-adic digits of each coefficient are meaningful;
// coefficients are stored as canonical residues mod p^eff.
class TruncSeries {
public:
    TruncSeries() = default;
    TruncSeries(Ctx c, int nvars, int D, int eff) : c_(std::move(c)), n_(nvars), D_(D), eff_(eff)
    {
        if (nvars < 1 || nvars > kMaxVars) throw ValidationError("series: number of variables must be in 1..8");
        if (D < 1 || D > kMaxTrunc) throw ValidationError("series: truncation must be in 1..127");
        if (eff < 1) throw PrecisionError("series: effective precision exhausted");
        if (eff > c_->N) throw ValidationError("series: effective precision exceeds N");
    }
    TruncSeries(Ctx c, int nvars, int D) : TruncSeries(c, nvars, D, c->N) {}

    static TruncSeries variable(Ctx c, int nvars, int D, int i)
    {
        TruncSeries s(std::move(c), nvars, D);
        s.t_.emplace_back(mono_var(i), 1);
        return s;
    }
    static TruncSeries constant(Ctx c, int nvars, int D, const mpz_class& v)
    {
        TruncSeries s(std::move(c), nvars, D);
        s.set(0, v);
        return s;
    }
    // one-variable series from a polynomial, dropping degrees above D
    static TruncSeries from_poly(const PadicPoly& f, int D)
    {
        TruncSeries s(f.ctx(), 1, D);
        for (std::size_t i = 0; i < f.coeffs().size() && static_cast<int>(i) <= D; ++i)
            if (f.coeffs()[i] != 0) s.t_.emplace_back(mono_var(0, static_cast<int>(i)), f.coeffs()[i]);
        return s;
    }
    static TruncSeries from_terms(Ctx c, int nvars, int D, int eff, std::vector<Term> terms)
    {
        TruncSeries s(std::move(c), nvars, D, eff);
        s.t_ = std::move(terms);
        s.normalize();
        return s;
    }

    const Ctx& ctx() const { return c_; }
    int nvars() const { return n_; }
    int trunc() const { return D_; }
    int eff_prec() const { return eff_; }
    const std::vector<Term>& terms() const { return t_; }
    const mpz_class& modulus() const { return c_->pow[eff_]; }

    mpz_class coeff(Mono m) const
    {
        auto it = std::lower_bound(t_.begin(), t_.end(), m, [](const Term& a, Mono k) { return a.first < k; });
        return (it != t_.end() && it->first == m) ? it->second : mpz_class(0);
    }
    mpz_class coeff(const std::vector<int>& e) const { return coeff(make_mono(e)); }
    // coefficient of t^k of a one-variable series
    mpz_class coeff1(int k) const { return coeff(mono_var(0, k)); }
    PadicInt coeff_padic(Mono m) const { return PadicInt(c_, coeff(m)); }

    bool is_zero() const { return t_.empty(); }
    int min_degree() const { return t_.empty() ? D_ + 1 : mono_degree(t_.front().first); }
    int max_degree() const { return t_.empty() ? -1 : mono_degree(t_.back().first); }
    bool has_constant_term() const { return !t_.empty() && t_.front().first == 0; }

    // set a coefficient (only for building; keeps terms sorted)
    void set(Mono m, mpz_class v)
    {
        if (mono_degree(m) > D_) return;
        reduce_mod(v, modulus());
        auto it = std::lower_bound(t_.begin(), t_.end(), m, [](const Term& a, Mono k) { return a.first < k; });
        if (it != t_.end() && it->first == m) {
            if (v == 0) t_.erase(it);
            else it->second = v;
        } else if (v != 0) {
            t_.insert(it, Term{m, v});
        }
    }

    TruncSeries with_eff(int e) const
    {
        TruncSeries s(c_, n_, D_, std::min(e, eff_));
        s.t_ = t_;
        s.normalize();
        return s;
    }
    TruncSeries truncated(int k) const
    {
        TruncSeries s(c_, n_, D_, eff_);
        for (const auto& t : t_)
            if (mono_degree(t.first) <= k) s.t_.push_back(t);
        return s;
    }
    TruncSeries homogeneous(int k) const
    {
        TruncSeries s(c_, n_, D_, eff_);
        for (const auto& t : t_)
            if (mono_degree(t.first) == k) s.t_.push_back(t);
        return s;
    }
    // same coefficients viewed in a series ring with more variables, the
    // variables of this series mapped to positions map[i]
    TruncSeries relabeled(int nvars, const std::vector<int>& map) const
    {
        TruncSeries s(c_, nvars, D_, eff_);
        for (const auto& t : t_) {
            Mono m = 0;
            for (int i = 0; i < n_; ++i) m += mono_var(map[i], mono_exp(t.first, i));
            s.t_.emplace_back(m, t.second);
        }
        s.normalize();
        return s;
    }

    friend TruncSeries operator+(const TruncSeries& a, const TruncSeries& b) { return combine(a, b, 1); }
    friend TruncSeries operator-(const TruncSeries& a, const TruncSeries& b) { return combine(a, b, -1); }
    TruncSeries operator-() const { return scaled(-1); }
    TruncSeries scaled(const mpz_class& s) const
    {
        TruncSeries r(c_, n_, D_, eff_);
        r.t_ = t_;
        for (auto& t : r.t_) t.second *= s;
        r.normalize();
        return r;
    }
    TruncSeries scaled(const PadicInt& s) const { return scaled(s.value()); }

    friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) { return mul(a, b, a.D_); }

    // product truncated at total degree lim
    static TruncSeries mul(const TruncSeries& a, const TruncSeries& b, int lim)
    {
        check(a, b);
        TruncSeries r(a.c_, a.n_, a.D_, std::min(a.eff_, b.eff_));
        lim = std::min(lim, a.D_);
        std::unordered_map<Mono, mpz_class> acc;
        acc.reserve(a.t_.size() * 4 + 16);
        for (const auto& x : a.t_) {
            int dx = mono_degree(x.first);
            if (dx > lim) break;
            for (const auto& y : b.t_) {
                if (dx + mono_degree(y.first) > lim) break;
                mpz_class& slot = acc[x.first + y.first];
                mpz_addmul(slot.get_mpz_t(), x.second.get_mpz_t(), y.second.get_mpz_t());
            }
        }
        r.t_.reserve(acc.size());
        for (auto& kv : acc) r.t_.emplace_back(kv.first, std::move(kv.second));
        r.normalize();
        return r;
    }

    TruncSeries pow(unsigned e) const
    {
        TruncSeries r = constant(c_, n_, D_, 1).with_eff(eff_);
        for (unsigned i = 0; i < e; ++i) r = r * *this;
        return r;
    }

    // residues agree in the common precision
    friend bool same(const TruncSeries& a, const TruncSeries& b) { return (a - b).is_zero(); }

    std::string str() const
    {
        if (t_.empty()) return "0";
        static const char* names = "XYZWUVST";
        std::string s;
        for (const auto& t : t_) {
            if (!s.empty()) s += " + ";
            s += t.second.get_str();
            for (int i = 0; i < n_; ++i) {
                int e = mono_exp(t.first, i);
                if (e == 0) continue;
                s += "*";
                s += (n_ == 1 ? 't' : names[i]);
                if (e > 1) s += "^" + std::to_string(e);
            }
        }
        return s;
    }

private:
    static void check(const TruncSeries& a, const TruncSeries& b)
    {
        if (!same_context(a.c_, b.c_)) throw ValidationError("series with different (p, N)");
        if (a.n_ != b.n_) throw ValidationError("series with different numbers of variables");
        if (a.D_ != b.D_) throw ValidationError("series with different truncation");
    }
    static TruncSeries combine(const TruncSeries& a, const TruncSeries& b, int sign)
    {
        check(a, b);
        TruncSeries r(a.c_, a.n_, a.D_, std::min(a.eff_, b.eff_));
        r.t_.reserve(a.t_.size() + b.t_.size());
        std::size_t i = 0, j = 0;
        while (i < a.t_.size() || j < b.t_.size()) {
            if (j == b.t_.size() || (i < a.t_.size() && a.t_[i].first < b.t_[j].first)) {
                r.t_.push_back(a.t_[i++]);
            } else if (i == a.t_.size() || b.t_[j].first < a.t_[i].first) {
                r.t_.emplace_back(b.t_[j].first, sign > 0 ? b.t_[j].second : mpz_class(-b.t_[j].second));
                ++j;
            } else {
                r.t_.emplace_back(a.t_[i].first, sign > 0 ? mpz_class(a.t_[i].second + b.t_[j].second)
                                                          : mpz_class(a.t_[i].second - b.t_[j].second));
                ++i, ++j;
            }
        }
        r.normalize();
        return r;
    }
    void normalize()
    {
        const mpz_class& m = modulus();
        std::sort(t_.begin(), t_.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
        std::vector<Term> out;
        out.reserve(t_.size());
        for (auto& t : t_) {
            if (mono_degree(t.first) > D_) continue;
            reduce_mod(t.second, m);
            if (!out.empty() && out.back().first == t.first) {
                out.back().second += t.second;
                reduce_mod(out.back().second, m);
            } else {
                out.push_back(std::move(t));
            }
        }
        out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.second == 0; }), out.end());
        t_ = std::move(out);
    }

    Ctx c_;
    int n_ = 1;
    int D_ = 1;
    int eff_ = 1;
    std::vector<Term> t_;
};

namespace detail {

inline TruncSeries linear_combination(const std::vector<std::pair<int, mpz_class>>& coeffs,
                                      std::vector<TruncSeries>& powers, const TruncSeries& arg, int lim,
                                      const TruncSeries& zero)
{
    std::vector<Term> acc;
    for (const auto& [e, c] : coeffs) {
        while (static_cast<int>(powers.size()) <= e) powers.push_back(TruncSeries::mul(powers.back(), arg, lim));
        for (const auto& t : powers[e].terms()) acc.emplace_back(t.first, mpz_class(t.second * c));
    }
    return TruncSeries::from_terms(zero.ctx(), zero.nvars(), zero.trunc(), zero.eff_prec(), std::move(acc));
}

// f restricted to terms whose exponents in variables >= k vanish, composed
// with args[0..k-1]
inline TruncSeries compose_rec(const std::vector<Term>& f, int k, const std::vector<TruncSeries>& args,
                               std::vector<std::vector<TruncSeries>>& powers, int lim, const TruncSeries& zero)
{
    if (f.empty()) return zero;
    if (k == 1) {
        std::vector<std::pair<int, mpz_class>> cs;
        for (const auto& t : f) cs.emplace_back(mono_exp(t.first, 0), t.second);
        return linear_combination(cs, powers[0], args[0], lim, zero);
    }
    const int v = k - 1;
    int maxe = 0;
    for (const auto& t : f) maxe = std::max(maxe, mono_exp(t.first, v));
    std::vector<std::vector<Term>> groups(maxe + 1);
    for (const auto& t : f) {
        int e = mono_exp(t.first, v);
        groups[e].emplace_back(t.first - mono_var(v, e), t.second);
    }
    TruncSeries acc = zero;
    for (int e = maxe; e >= 0; --e) {
        if (e != maxe) acc = TruncSeries::mul(acc, args[v], lim);
        acc = acc + compose_rec(groups[e], v, args, powers, lim, zero);
    }
    return acc;
}

}  // namespace detail

// f(args[0], ..., args[m-1]) truncated at total degree min(upto, D).
inline TruncSeries series_compose(const TruncSeries& f, const std::vector<TruncSeries>& args, int upto = -1)
{
    if (static_cast<int>(args.size()) != f.nvars())
        throw ValidationError("series_compose: expected " + std::to_string(f.nvars()) + " arguments");
    int eff = f.eff_prec();
    for (const auto& a : args) {
        if (!same_context(a.ctx(), f.ctx())) throw ValidationError("series_compose: mismatched (p, N)");
        if (a.trunc() != f.trunc()) throw ValidationError("series_compose: mismatched truncation");
        if (a.nvars() != args[0].nvars()) throw ValidationError("series_compose: arguments in different rings");
        if (a.has_constant_term()) throw DomainError("series_compose: argument with nonzero constant term");
        eff = std::min(eff, a.eff_prec());
    }
    const int lim = upto < 0 ? f.trunc() : std::min(upto, f.trunc());
    TruncSeries zero(f.ctx(), args[0].nvars(), f.trunc(), eff);
    std::vector<std::vector<TruncSeries>> powers(args.size());
    if (!args.empty()) powers[0].push_back(TruncSeries::constant(f.ctx(), args[0].nvars(), f.trunc(), 1).with_eff(eff));
    std::vector<Term> fterms;
    for (const auto& t : f.terms())
        if (mono_degree(t.first) <= lim) fterms.push_back(t);
    return detail::compose_rec(fterms, f.nvars(), args, powers, lim, zero);
}

// Compositional inverse of a one-variable series with unit linear coefficient.
inline TruncSeries series_inverse(const TruncSeries& f)
{
    if (f.nvars() != 1) throw ValidationError("series_inverse: one-variable series required");
    if (f.has_constant_term()) throw DomainError("series_inverse: nonzero constant term");
    PadicInt a1(f.ctx(), f.coeff1(1));
    if (!a1.is_unit())
        throw DomainError("series_inverse: linear coefficient " + a1.str() + " is not a unit, no inverse exists");
    mpz_class inv = inverse_mod(a1.value(), f.modulus());
    TruncSeries g(f.ctx(), 1, f.trunc(), f.eff_prec());
    g.set(mono_var(0, 1), inv);
    for (int k = 2; k <= f.trunc(); ++k) {
        TruncSeries r = series_compose(f, {g}, k);
        mpz_class c = r.coeff1(k);
        if (c != 0) g.set(mono_var(0, k), g.coeff1(k) - c * inv);
    }
    return g;
}

}  // namespace ltcm
