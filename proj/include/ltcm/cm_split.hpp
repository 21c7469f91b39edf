#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "lubin_tate.hpp"
#include "poly.hpp"

namespace ltcm {

using QPoly = std::vector<mpq_class>;  // constant term first
using ZPoly = std::vector<mpz_class>;

namespace qpoly {

inline void trim(QPoly& a)
{
    while (!a.empty() && a.back() == 0) a.pop_back();
}
inline QPoly mul(const QPoly& a, const QPoly& b)
{
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}
inline QPoly add(QPoly a, const QPoly& b)
{
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    trim(a);
    return a;
}
// remainder modulo a monic polynomial m
inline QPoly rem(QPoly a, const QPoly& m)
{
    const std::size_t dm = m.size() - 1;
    for (std::size_t k = a.size(); k-- > dm;) {
        mpq_class c = a[k];
        if (c == 0) continue;
        for (std::size_t j = 0; j <= dm; ++j) a[k - dm + j] -= c * m[j];
    }
    if (a.size() > dm) a.resize(dm);
    trim(a);
    return a;
}
// f(s(x)) mod m
inline QPoly compose_mod(const QPoly& f, const QPoly& s, const QPoly& m)
{
    QPoly acc;
    for (std::size_t i = f.size(); i-- > 0;) acc = rem(add(mul(acc, s), QPoly{f[i]}), m);
    return acc;
}
inline QPoly from_z(const ZPoly& a)
{
    QPoly r(a.begin(), a.end());
    trim(r);
    return r;
}

}  // namespace qpoly

// Rational number r/s == a mod m with |r|, |s| <= sqrt(m/2), if one exists.
inline bool rational_reconstruct(const mpz_class& a, const mpz_class& m, mpq_class& out)
{
    mpz_class r0 = m, r1 = a % m, s0 = 0, s1 = 1;
    if (r1 < 0) r1 += m;
    mpz_class bound;
    mpz_class half = m / 2;
    mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());
    while (r1 > bound) {
        mpz_class q = r0 / r1;
        mpz_class t = r0 - q * r1;
        r0 = r1, r1 = t;
        t = s0 - q * s1;
        s0 = s1, s1 = t;
    }
    if (s1 == 0 || abs(s1) > bound) return false;
    mpz_class g = gcd(r1, s1);
    if (g != 1) return false;
    out = mpq_class(r1, s1);
    out.canonicalize();
    return true;
}

// Element of K = Q[x]/(f) with integer coefficients, degree < deg f.
struct FieldElement {
    ZPoly c;
};

// Degree-2g CM field, Galois over Q, with p split completely.  Root k is
// the Hensel lift of the k-th smallest root of f mod p; embedding k sends x
// to root k.  Index 0 is the reference embedding.
class CMField {
public:
    CMField(ZPoly f, Ctx c, ZPoly conj, std::vector<int> cm_type) : f_(std::move(f)), c_(std::move(c))
    {
        while (!f_.empty() && f_.back() == 0) f_.pop_back();
        if (f_.size() < 3 || (f_.size() - 1) % 2 != 0) throw ValidationError("field polynomial must have even degree >= 2");
        if (f_.back() != 1) throw ValidationError("field polynomial must be monic");
        n_ = static_cast<int>(f_.size()) - 1;
        find_roots();
        conj_ = reduce(FieldElement{std::move(conj)});
        {
            QPoly fq = qpoly::from_z(f_), cq = qpoly::from_z(conj_.c);
            if (!qpoly::compose_mod(fq, cq, fq).empty())
                throw ValidationError("conjugation polynomial c does not satisfy f(c(x)) = 0 mod f");
            QPoly cc = qpoly::compose_mod(cq, cq, fq);
            if (cc != QPoly{0, 1}) throw ValidationError("conjugation polynomial c does not satisfy c(c(x)) = x mod f");
        }
        find_automorphisms();
        conj_perm_ = perm_of(qpoly::from_z(conj_.c));
        for (int k = 0; k < n_; ++k)
            if (conj_perm_[k] == k) throw ValidationError("conjugation has a fixed embedding; field is not CM");
        set_cm_type(std::move(cm_type));
    }

    const Ctx& ctx() const { return c_; }
    long p() const { return c_->p; }
    int degree() const { return n_; }
    int g() const { return n_ / 2; }
    const ZPoly& f() const { return f_; }
    const std::vector<PadicInt>& roots() const { return roots_; }
    const std::vector<int>& cm_type() const { return phi_; }
    const std::vector<int>& conj_perm() const { return conj_perm_; }
    // automorphism sigma_j with (reference embedding) o sigma_j = embedding j
    const QPoly& automorphism(int j) const { return aut_[j]; }
    // P_j(k): embedding k composed with sigma_j is embedding P_j(k)
    const std::vector<int>& root_perm(int j) const { return aut_perm_[j]; }
    int root_perm_inverse(int j, int k) const
    {
        const auto& P = aut_perm_[j];
        return static_cast<int>(std::find(P.begin(), P.end(), k) - P.begin());
    }

    void set_cm_type(std::vector<int> phi)
    {
        if (static_cast<int>(phi.size()) != g())
            throw ValidationError("cm_type must list exactly g=" + std::to_string(g()) + " root indices");
        std::set<int> orbits;
        for (int j : phi) {
            if (j < 0 || j >= n_) throw ValidationError("cm_type index " + std::to_string(j) + " out of range");
            int o = std::min(j, conj_perm_[j]);
            if (!orbits.insert(o).second)
                throw ValidationError("cm_type contains two embeddings from one conjugate pair");
        }
        phi_ = std::move(phi);
    }

    FieldElement reduce(FieldElement a) const
    {
        QPoly r = qpoly::rem(qpoly::from_z(a.c), qpoly::from_z(f_));
        ZPoly z;
        for (auto& q : r) {
            if (q.get_den() != 1) throw InvariantError("non-integral reduction");
            z.push_back(q.get_num());
        }
        return {z};
    }
    FieldElement mul(const FieldElement& a, const FieldElement& b) const
    {
        ZPoly r(a.c.size() + b.c.size(), 0);
        for (std::size_t i = 0; i < a.c.size(); ++i)
            for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
        return reduce({r});
    }
    FieldElement add(const FieldElement& a, const FieldElement& b) const
    {
        ZPoly r(std::max(a.c.size(), b.c.size()), 0);
        for (std::size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
        for (std::size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
        return reduce({r});
    }
    FieldElement pow(const FieldElement& a, unsigned e) const
    {
        FieldElement r{{1}};
        for (unsigned i = 0; i < e; ++i) r = mul(r, a);
        return r;
    }

    PadicInt eval_at(const FieldElement& a, int k) const
    {
        return PadicPoly(c_, a.c).eval(roots_[k]);
    }
    std::vector<PadicInt> embed(const FieldElement& a) const
    {
        std::vector<PadicInt> v;
        for (int k = 0; k < n_; ++k) v.push_back(eval_at(a, k));
        return v;
    }
    std::vector<Ord> valuations(const FieldElement& a) const
    {
        std::vector<Ord> v;
        for (const auto& x : embed(a)) v.push_back(x.ord());
        return v;
    }

private:
    void find_roots()
    {
        auto c1 = make_context(c_->p, 1);
        PadicPoly fp(c1, f_);
        PadicPoly dfp = fp.derivative();
        std::vector<long> r;
        for (long a = 0; a < c_->p; ++a)
            if (fp.eval(PadicInt(c1, a)).is_zero()) {
                if (dfp.eval(PadicInt(c1, a)).is_zero())
                    throw ValidationError("f has a repeated root mod p; p must split completely and be unramified");
                r.push_back(a);
            }
        if (static_cast<int>(r.size()) != n_)
            throw ValidationError("f has " + std::to_string(r.size()) + " roots mod p, expected " + std::to_string(n_) +
                                  ": p must split completely");
        PadicPoly F(c_, f_);
        for (long a : r) roots_.push_back(hensel_root(F, PadicInt(c_, a)).root);
    }

    // index permutation k -> index of s(root k), certified mod p^N
    std::vector<int> perm_of(const QPoly& s) const
    {
        std::vector<int> P(n_);
        for (int k = 0; k < n_; ++k) {
            PadicInt v = eval_q(s, roots_[k]);
            int hit = -1;
            for (int m = 0; m < n_; ++m)
                if (v == roots_[m]) hit = m;
            if (hit < 0) throw InvariantError("automorphism image is not a root of f");
            P[k] = hit;
        }
        return P;
    }
    PadicInt eval_q(const QPoly& s, const PadicInt& x) const
    {
        PadicInt acc(c_, 0);
        for (std::size_t i = s.size(); i-- > 0;) {
            mpz_class den = s[i].get_den();
            PadicInt coef = PadicInt(c_, s[i].get_num()) * PadicInt(c_, den).inverse();
            acc = acc * x + coef;
        }
        return acc;
    }

    // For each j, interpolate x -> root j over candidate permutations and
    // keep the one that reconstructs to an exact automorphism of K.
    void find_automorphisms()
    {
        QPoly fq = qpoly::from_z(f_);
        aut_.assign(n_, {});
        aut_perm_.assign(n_, {});
        for (int j = 0; j < n_; ++j) {
            std::vector<int> rest;
            for (int k = 0; k < n_; ++k)
                if (k != j) rest.push_back(k);
            bool found = false;
            do {
                std::vector<int> tau{j};
                tau.insert(tau.end(), rest.begin(), rest.end());
                QPoly s;
                if (!interpolate(tau, s)) continue;
                if (!qpoly::compose_mod(fq, s, fq).empty()) continue;
                aut_[j] = s;
                aut_perm_[j] = perm_of(s);
                found = true;
            } while (!found && std::next_permutation(rest.begin(), rest.end()));
            if (!found)
                throw ValidationError("no automorphism sends the reference root to root " + std::to_string(j) +
                                      "; K must be Galois (or raise the precision)");
        }
    }

    // s of degree < n with s(root k) = root tau[k]
    bool interpolate(const std::vector<int>& tau, QPoly& out) const
    {
        std::vector<PadicInt> coeff(n_, PadicInt(c_, 0));
        for (int k = 0; k < n_; ++k) {
            PadicPoly basis = PadicPoly::constant(c_, 1);
            PadicInt den(c_, 1);
            for (int m = 0; m < n_; ++m) {
                if (m == k) continue;
                basis = basis * PadicPoly(c_, std::vector<mpz_class>{mpz_class(-roots_[m].value()), 1});
                den *= roots_[k] - roots_[m];
            }
            PadicInt w = roots_[tau[k]] * den.inverse();
            for (int i = 0; i < n_; ++i) coeff[i] += basis.coeff(i) * w;
        }
        out.assign(n_, 0);
        for (int i = 0; i < n_; ++i)
            if (!rational_reconstruct(coeff[i].value(), c_->modulus(), out[i])) return false;
        qpoly::trim(out);
        return true;
    }

    ZPoly f_;
    Ctx c_;
    int n_ = 0;
    std::vector<PadicInt> roots_;
    FieldElement conj_;
    std::vector<int> conj_perm_;
    std::vector<int> phi_;
    std::vector<QPoly> aut_;
    std::vector<std::vector<int>> aut_perm_;
};

inline std::vector<PadicInt> embed(const CMField& K, const FieldElement& a) { return K.embed(a); }

// Element with valuation 1 at fp_index and 0 at every other root, searched
// over coefficient boxes of growing size.
inline FieldElement pick_pi(const CMField& K, int fp_index, long bound = -1)
{
    if (fp_index < 0 || fp_index >= K.degree()) throw ValidationError("fp_index out of range");
    if (bound < 0) bound = K.p();
    const int n = K.degree();
    for (long b = 0; b <= bound; ++b) {
        std::vector<long> seq{0};
        for (long v = 1; v <= b; ++v) seq.push_back(v), seq.push_back(-v);
        std::vector<std::size_t> idx(n, 0);
        while (true) {
            ZPoly c(n);
            long mx = 0;
            for (int i = 0; i < n; ++i) {
                c[i] = seq[idx[i]];
                mx = std::max(mx, std::labs(seq[idx[i]]));
            }
            if (mx == b) {
                FieldElement a{c};
                auto v = K.valuations(a);
                bool ok = true;
                for (int k = 0; k < n && ok; ++k) ok = v[k] == Ord::exact(k == fp_index ? 1 : 0);
                if (ok) {
                    while (!a.c.empty() && a.c.back() == 0) a.c.pop_back();
                    return a;
                }
            }
            // the constant coefficient varies fastest, the top one slowest
            int i = 0;
            while (i < n && ++idx[i] == seq.size()) idx[i++] = 0;
            if (i == n) break;
        }
    }
    throw DomainError("pick_pi: no element found with coefficients bounded by " + std::to_string(bound) +
                      "; enlarge the search bound");
}

// S = { sigma_j(p_fp) : j in the CM type }
inline std::vector<int> ramified_set(const CMField& K, int fp_index)
{
    std::set<int> s;
    for (int j : K.cm_type()) s.insert(K.root_perm_inverse(j, fp_index));
    return {s.begin(), s.end()};
}

struct TypeNormCheck {
    bool matches = false;
    std::vector<Ord> valuations;
    std::vector<int> support;  // { sigma_j^{-1}(P) : j in the CM type }
};

inline TypeNormCheck type_norm_check(const CMField& K, const FieldElement& a, int P_index)
{
    TypeNormCheck r;
    r.valuations = K.valuations(a);
    std::set<int> sup;
    for (int j : K.cm_type()) sup.insert(K.root_perm(j)[P_index]);
    r.support.assign(sup.begin(), sup.end());
    r.matches = true;
    for (int k = 0; k < K.degree(); ++k) r.matches = r.matches && r.valuations[k] == Ord::exact(sup.count(k) ? 1 : 0);
    return r;
}

// Product of one-dimensional Lubin-Tate groups, one per CM-type embedding,
// over the completion at root index `completion`.  Coordinate j carries the
// CM action through sigma_j followed by that completion.
struct ProductGroup {
    std::shared_ptr<const CMField> K;
    int completion = 0;
    std::vector<LTSeed> seeds;
    FormalGroupLaw law;

    int g() const { return static_cast<int>(seeds.size()); }
    // root index whose value is the coordinate-j image of an element
    int column(int j) const { return K->root_perm(K->cm_type()[j])[completion]; }
};

inline ProductGroup make_product_group(std::shared_ptr<const CMField> K, int completion, std::vector<LTSeed> seeds)
{
    const int g = K->g();
    if (static_cast<int>(seeds.size()) != g) throw ValidationError("product group needs one seed per CM-type index");
    if (completion < 0 || completion >= K->degree()) throw ValidationError("completion index out of range");
    ProductGroup G{K, completion, std::move(seeds), {}};
    G.law.g = g;
    for (int j = 0; j < g; ++j) {
        auto Fj = group_law(G.seeds[j]);
        G.law.law.push_back(Fj.law[0].relabeled(2 * g, {j, g + j}));
    }
    G.law.provenance = "product of one-dimensional Lubin-Tate group laws";
    return G;
}

// default: p*t + t^p in every coordinate, completion at the first prime of S
inline ProductGroup make_product_group(std::shared_ptr<const CMField> K, int fp_index, int D)
{
    std::vector<LTSeed> seeds(K->g(), frobenius_seed(K->ctx(), D));
    int P = ramified_set(*K, fp_index).front();
    return make_product_group(std::move(K), P, std::move(seeds));
}

// alpha -> diagonal action [phi_j(alpha)] on the coordinates
inline FglHom product_cm_endo(const ProductGroup& G, const FieldElement& a)
{
    const int g = G.g();
    auto v = G.K->embed(a);
    FglHom h;
    for (int j = 0; j < g; ++j) h.series.push_back(endo(G.seeds[j], v[G.column(j)]).relabeled(g, {j}));
    h.jacobian = jacobian_of(h.series);
    return h;
}

struct KernelLocation {
    int coordinate = -1;
    std::vector<Ord> jacobian_ords;
};

// The unique coordinate on which [pi^n] is not an automorphism.
inline KernelLocation kernel_locate(const ProductGroup& G, const FieldElement& pi, unsigned n)
{
    if (n < 1) throw ValidationError("kernel_locate: n must be >= 1");
    auto h = product_cm_endo(G, G.K->pow(pi, n));
    KernelLocation r;
    int count = 0;
    for (int j = 0; j < G.g(); ++j) {
        const PadicInt& e = h.jacobian[j][j];
        r.jacobian_ords.push_back(e.ord());
        if (e.is_unit()) {
            // a unit jacobian entry must give an invertible series
            std::vector<Term> t;
            for (const auto& x : h.series[j].terms()) t.emplace_back(mono_var(0, mono_exp(x.first, j)), x.second);
            const auto& s = h.series[j];
            series_inverse(TruncSeries::from_terms(s.ctx(), 1, s.trunc(), s.eff_prec(), std::move(t)));
        } else {
            r.coordinate = j;
            ++count;
        }
    }
    if (count != 1)
        throw InvariantError("kernel_locate: " + std::to_string(count) +
                             " coordinates with non-unit jacobian (expected exactly one)");
    return r;
}

}  // namespace ltcm
