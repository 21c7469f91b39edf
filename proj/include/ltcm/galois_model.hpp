#pragma once

#include <algorithm>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace ltcm {

// (1 a; 0 b) with a mod p^m and b a unit mod p^m
struct TriElement {
    long a = 0;
    long b = 1;
    bool operator==(const TriElement&) const = default;
};

class TriGroup {
public:
    TriGroup(long p, int m) : p_(p), m_(m)
    {
        if (p < 2 || m < 1 || m > 6) throw ValidationError("galois model needs p >= 2 and 1 <= m <= 6");
        mod_ = 1;
        for (int i = 0; i < m; ++i) mod_ *= p;
    }
    long p() const { return p_; }
    int m() const { return m_; }
    long modulus() const { return mod_; }

    TriElement identity() const { return {0, 1}; }
    // (1 a; 0 b)(1 a'; 0 b') = (1, a' + a b'; 0, b b')
    TriElement compose(const TriElement& x, const TriElement& y) const
    {
        return {(y.a + x.a * y.b) % mod_, (x.b * y.b) % mod_};
    }
    TriElement inverse(const TriElement& x) const
    {
        long bi = inv(x.b);
        return {((mod_ - x.a) % mod_ * bi) % mod_, bi};
    }
    bool valid(const TriElement& x) const { return x.a >= 0 && x.a < mod_ && x.b > 0 && x.b < mod_ && x.b % p_ != 0; }
    std::vector<TriElement> elements() const
    {
        std::vector<TriElement> r;
        for (long b = 1; b < mod_; ++b)
            if (b % p_ != 0)
                for (long a = 0; a < mod_; ++a) r.push_back({a, b});
        return r;
    }
    long pw(int k) const
    {
        long r = 1;
        for (int i = 0; i < k; ++i) r *= p_;
        return r;
    }

private:
    long inv(long b) const
    {
        long t = 0, nt = 1, r = mod_, nr = b;
        while (nr != 0) {
            long q = r / nr;
            std::tie(t, nt) = std::make_pair(nt, t - q * nt);
            std::tie(r, nr) = std::make_pair(nr, r - q * nr);
        }
        return (t % mod_ + mod_) % mod_;
    }
    long p_;
    int m_;
    long mod_;
};

// a = 0 mod p^j and b = 1 mod p^k
struct CongruenceLevels {
    int j = 0;
    int k = 0;
};

class Subgroup {
public:
    Subgroup(const TriGroup& G, CongruenceLevels s) : G_(G), s_(s)
    {
        if (s.j < 0 || s.k < 0 || s.j > G.m() || s.k > G.m()) throw ValidationError("subgroup exponents out of range");
        for (const auto& x : G.elements())
            if (contains(x)) el_.push_back(x);
        for (const auto& x : el_) {
            if (!contains(G.inverse(x))) throw InvariantError("subgroup not closed under inverse");
            for (const auto& y : el_)
                if (!contains(G.compose(x, y))) throw InvariantError("subgroup not closed under composition");
        }
    }
    bool contains(const TriElement& x) const
    {
        return x.a % G_.pw(s_.j) == 0 && (x.b - 1) % G_.pw(s_.k) == 0;
    }
    const std::vector<TriElement>& elements() const { return el_; }
    long order() const { return static_cast<long>(el_.size()); }
    CongruenceLevels levels() const { return s_; }

private:
    const TriGroup& G_;
    CongruenceLevels s_;
    std::vector<TriElement> el_;
};

struct GroupAxioms {
    bool closed = true, associative = true, identity = true, inverses = true;
    long order = 0;
    bool ok() const { return closed && associative && identity && inverses; }
};

inline GroupAxioms check_group_axioms(const TriGroup& G)
{
    GroupAxioms r;
    auto el = G.elements();
    r.order = static_cast<long>(el.size());
    for (const auto& x : el) {
        if (!(G.compose(G.identity(), x) == x) || !(G.compose(x, G.identity()) == x)) r.identity = false;
        if (!(G.compose(x, G.inverse(x)) == G.identity())) r.inverses = false;
        for (const auto& y : el) {
            auto xy = G.compose(x, y);
            if (!G.valid(xy)) r.closed = false;
            for (const auto& z : el)
                if (!(G.compose(xy, z) == G.compose(x, G.compose(y, z)))) {
                    r.associative = false;
                    return r;
                }
        }
    }
    return r;
}

struct TowerIndices {
    long p = 0;
    int m = 0, n = 0;
    long group_order = 0;          // #H_m counted
    long stated_order = 0;         // p * p^(m-1) (p-1)
    bool order_discrepancy = false;
    long fix_kn_order = 0;         // b = 1 mod p^n: [L_m : K_n]
    long fix_ln_order = 0;         // a = 0, b = 1 mod p^n: [L_m : L_n]
    long index = 0;                // [L_n : K_n]
    bool normal = false;
    long max_quotient_order = 0;   // largest element order in the quotient
    bool cyclic = false;
    bool translation_part_additive = false;  // b = 1 subgroup is Z/p^m under a
    std::vector<std::string> provenance;
};

// Orders of the subgroups fixing K_n and L_n inside H_m, by enumeration.
inline TowerIndices tower_indices(long p, int m, int n)
{
    if (n < 1 || n > m) throw ValidationError("tower_indices needs 1 <= n <= m");
    TriGroup G(p, m);
    TowerIndices r;
    r.p = p;
    r.m = m;
    r.n = n;
    r.group_order = static_cast<long>(G.elements().size());
    r.stated_order = p * G.pw(m - 1) * (p - 1);
    r.order_discrepancy = r.group_order != r.stated_order;
    Subgroup HK(G, {0, n}), HL(G, {n, n});
    r.fix_kn_order = HK.order();
    r.fix_ln_order = HL.order();
    if (r.fix_kn_order % r.fix_ln_order != 0) throw InvariantError("tower_indices: subgroup order does not divide");
    r.index = r.fix_kn_order / r.fix_ln_order;

    r.normal = true;
    for (const auto& g : HK.elements()) {
        auto gi = G.inverse(g);
        for (const auto& h : HL.elements())
            if (!HL.contains(G.compose(G.compose(g, h), gi))) {
                r.normal = false;
                break;
            }
        if (!r.normal) break;
    }
    for (const auto& x : HK.elements()) {
        TriElement y = x;
        long k = 1;
        while (!HL.contains(y)) {
            y = G.compose(y, x);
            ++k;
        }
        r.max_quotient_order = std::max(r.max_quotient_order, k);
    }
    r.cyclic = r.normal && r.max_quotient_order == r.index;

    Subgroup T(G, {0, m});
    r.translation_part_additive = T.order() == G.modulus();
    for (const auto& x : T.elements())
        for (const auto& y : T.elements())
            if (G.compose(x, y).a != (x.a + y.a) % G.modulus()) r.translation_part_additive = false;

    if (!r.normal) throw InvariantError("tower_indices: fixer of L_n not normal in fixer of K_n");
    if (!r.cyclic) throw InvariantError("tower_indices: quotient not cyclic of order " + std::to_string(r.index));
    if (r.index != G.pw(n))
        throw InvariantError("tower_indices: [L_n:K_n] = " + std::to_string(r.index) + " != p^n");
    r.provenance.push_back("group_order: enumeration of (a, b) in Z/p^m x (Z/p^m)^*");
    r.provenance.push_back("fix_kn_order/fix_ln_order: enumeration of the congruence subgroups b=1 mod p^n and "
                           "a=0, b=1 mod p^n, closure checked");
    r.provenance.push_back("index: quotient of counted orders; cyclic certified by an element of order p^n");
    if (r.order_discrepancy)
        r.provenance.push_back("order_discrepancy: counted order p^m p^(m-1)(p-1) differs from the stated "
                               "p p^(m-1)(p-1); the index uses the counted group");
    return r;
}

}  // namespace ltcm
