#pragma once

#include <algorithm>
#include <string>

#include "errors.hpp"

namespace ltcm {

// Valuation in the extended naturals.  A capped value ">= v" is what the zero
// residue at finite precision reports; it never compares equal to a finite
// valuation.
class Ord {
public:
    enum class Kind { exact, capped, infinite };

    Ord() = default;
    static Ord exact(long v) { return Ord(Kind::exact, v); }
    static Ord at_least(long v) { return Ord(Kind::capped, v); }
    static Ord infinite() { return Ord(Kind::infinite, 0); }

    Kind kind() const { return kind_; }
    bool is_exact() const { return kind_ == Kind::exact; }
    bool is_capped() const { return kind_ == Kind::capped; }
    bool is_infinite() const { return kind_ == Kind::infinite; }

    // exact value, or the lower bound of a capped value
    long bound() const { return v_; }

    long value() const
    {
        if (kind_ != Kind::exact)
            throw PrecisionError("valuation is not exact: " + str());
        return v_;
    }

    std::string str() const
    {
        switch (kind_) {
        case Kind::exact: return std::to_string(v_);
        case Kind::capped: return ">=" + std::to_string(v_);
        default: return "inf";
        }
    }

    friend Ord operator+(const Ord& a, const Ord& b)
    {
        if (a.is_infinite() || b.is_infinite()) return infinite();
        if (a.is_exact() && b.is_exact()) return exact(a.v_ + b.v_);
        return at_least(a.v_ + b.v_);
    }

    Ord scaled(long k) const
    {
        if (is_infinite()) return *this;
        return Ord(kind_, v_ * k);
    }
    Ord shifted(long k) const
    {
        if (is_infinite()) return *this;
        return Ord(kind_, v_ + k);
    }

    // valuation of a sum whose terms have valuations a and b, when the two
    // are known to differ or the minimum is attained once
    friend Ord min_distinct(const Ord& a, const Ord& b)
    {
        if (a.is_infinite()) return b;
        if (b.is_infinite()) return a;
        if (a.is_exact() && b.is_exact()) return exact(std::min(a.v_, b.v_));
        const Ord& e = a.is_exact() ? a : b;
        const Ord& c = a.is_exact() ? b : a;
        if (e.is_exact() && e.v_ < c.v_) return e;
        return at_least(std::min(a.v_, b.v_));
    }

    // a is certainly smaller than b
    friend bool certainly_less(const Ord& a, const Ord& b)
    {
        if (a.is_infinite()) return false;
        if (!a.is_exact()) return false;
        if (b.is_infinite()) return true;
        return a.v_ < b.v_;
    }

    // a >= k is certain
    bool certainly_at_least(long k) const { return is_infinite() || v_ >= k; }

    bool operator==(const Ord& o) const = default;

private:
    Ord(Kind k, long v) : kind_(k), v_(v) {}
    Kind kind_ = Kind::infinite;
    long v_ = 0;
};

}  // namespace ltcm
