#pragma once

// Finite-products sets and finite exponential-IP witnesses: sequences x1..xn
// in A with x_{m+1}^y in A for every y in FP(x1..xm).

#include <uexp/bignat.hpp>
#include <uexp/error.hpp>

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uexp::expip {

/// A set of naturals: an explicit list, an interval [a..b], or the powers
/// B^k with 1 <= k (<= kmax when given).
class IntSet {
public:
    enum class Kind { Explicit, Interval, Powers };

    static IntSet explicit_set(std::vector<BigNat> xs)
    {
        IntSet s(Kind::Explicit);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        if (! xs.empty() && xs.front() < 1)
            throw DomainError("sets contain naturals >= 1 only");
        s.items_ = std::move(xs);
        return s;
    }

    static IntSet interval(BigNat a, BigNat b)
    {
        if (a < 1 || b < a)
            throw DomainError("interval needs 1 <= a <= b");
        IntSet s(Kind::Interval);
        s.a_ = std::move(a);
        s.b_ = std::move(b);
        return s;
    }

    static IntSet powers(BigNat base, std::optional<BigNat> kmax = std::nullopt)
    {
        if (base < 2)
            throw DomainError("powers: base must be >= 2");
        if (kmax && *kmax < 1)
            throw DomainError("powers: exponent bound must be >= 1");
        IntSet s(Kind::Powers);
        s.root_ = minimal_root(base);
        s.a_ = std::move(base);
        s.kmax_ = std::move(kmax);
        return s;
    }

    Kind kind() const { return kind_; }
    const std::vector<BigNat> & items() const { return items_; }

    bool contains(const BigNat & x) const
    {
        switch (kind_) {
        case Kind::Explicit: return std::binary_search(items_.begin(), items_.end(), x);
        case Kind::Interval: return x >= a_ && x <= b_;
        case Kind::Powers: {
            auto k = exact_log(x, a_);
            return k && (! kmax_ || *k <= *kmax_);
        }
        }
        return false;
    }

    /// Largest element; none for unbounded power sets.
    std::optional<BigNat> max() const
    {
        switch (kind_) {
        case Kind::Explicit:
            if (items_.empty())
                return std::nullopt;
            return items_.back();
        case Kind::Interval: return b_;
        case Kind::Powers:
            if (! kmax_)
                return std::nullopt;
            return boost::multiprecision::pow(a_, kmax_->convert_to<unsigned>());
        }
        return std::nullopt;
    }

    bool empty() const { return kind_ == Kind::Explicit && items_.empty(); }

    /// Decides x^y in A without computing x^y when possible.
    /// Returns nullopt when the answer needs a value above `cap`.
    std::optional<bool> contains_power(const BigNat & x, const BigNat & y, const BigNat & cap) const
    {
        if (x == 1)
            return contains(1);
        if (kind_ == Kind::Powers) {
            // x = r^e, base = s^f with r, s minimal: x^y = base^k iff r = s
            // and f divides e*y, with k = e*y/f.
            auto xr = minimal_root(x);
            if (xr.root != root_.root)
                return false;
            BigNat total = BigNat(xr.exponent) * y;
            if (total % root_.exponent != 0)
                return false;
            BigNat k = total / root_.exponent;
            return k >= 1 && (! kmax_ || k <= *kmax_);
        }
        auto top = max();
        if (! top)
            return false;
        BigNat v;
        try {
            v = checked_pow(x, y, *top);
        }
        catch (const CapExceeded &) {
            return false; // larger than every element
        }
        if (v > cap)
            return std::nullopt;
        return contains(v);
    }

    /// Elements >= lo and <= hi in ascending order, until `visit` returns false.
    void for_each(const BigNat & lo, const BigNat & hi, const std::function<bool(const BigNat &)> & visit) const
    {
        switch (kind_) {
        case Kind::Explicit:
            for (auto it = std::lower_bound(items_.begin(), items_.end(), lo); it != items_.end() && *it <= hi; ++it)
                if (! visit(*it))
                    return;
            return;
        case Kind::Interval:
            for (BigNat x = std::max(lo, a_); x <= std::min(hi, b_); ++x)
                if (! visit(x))
                    return;
            return;
        case Kind::Powers: {
            BigNat k = 1;
            for (BigNat x = a_; x <= hi && (! kmax_ || k <= *kmax_); x *= a_, ++k)
                if (x >= lo && ! visit(x))
                    return;
            return;
        }
        }
    }

    std::string describe() const
    {
        switch (kind_) {
        case Kind::Explicit: return "explicit set of " + std::to_string(items_.size()) + " elements";
        case Kind::Interval: return "interval:" + a_.str() + ".." + b_.str();
        case Kind::Powers: return "powers:" + a_.str() + (kmax_ ? ":" + kmax_->str() : "");
        }
        return "?";
    }

private:
    explicit IntSet(Kind k) : kind_(k) {}

    Kind kind_;
    std::vector<BigNat> items_;
    BigNat a_, b_;
    std::optional<BigNat> kmax_;
    PerfectPower root_ {0, 1};
};

/// Parses `interval:a..b`, `powers:B` or `powers:B:KMAX`.
inline std::optional<IntSet> parse_set_shorthand(std::string_view text)
{
    auto num = [](std::string_view s) { return parse_bignat(s); };
    if (text.starts_with("interval:")) {
        auto body = text.substr(9);
        auto dots = body.find("..");
        if (dots == std::string_view::npos)
            throw DomainError("interval shorthand is interval:a..b");
        auto a = num(body.substr(0, dots));
        auto b = num(body.substr(dots + 2));
        if (! a || ! b)
            throw DomainError("interval bounds must be naturals");
        return IntSet::interval(*a, *b);
    }
    if (text.starts_with("powers:")) {
        auto body = text.substr(7);
        auto colon = body.find(':');
        auto b = num(body.substr(0, colon));
        if (! b)
            throw DomainError("powers base must be a natural");
        std::optional<BigNat> k;
        if (colon != std::string_view::npos) {
            k = num(body.substr(colon + 1));
            if (! k)
                throw DomainError("powers exponent bound must be a natural");
        }
        return IntSet::powers(*b, k);
    }
    return std::nullopt;
}

/// Products over the nonempty index subsets, duplicates collapsed, ascending.
inline std::vector<BigNat> fp_set(const std::vector<BigNat> & xs, const std::optional<BigNat> & cap = std::nullopt)
{
    if (xs.empty())
        throw DomainError("fp_set needs a nonempty sequence");
    std::vector<BigNat> s;
    for (auto & x : xs) {
        std::vector<BigNat> next = s;
        next.push_back(x);
        for (auto & y : s) {
            BigNat p = y * x;
            if (cap && p > *cap)
                throw CapExceeded("finite product exceeds cap");
            next.push_back(std::move(p));
        }
        if (cap && x > *cap)
            throw CapExceeded("finite product exceeds cap");
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        s = std::move(next);
    }
    return s;
}

struct ExpipVerdict {
    enum class Kind { Accept, Reject, UnknownAtCap };
    Kind kind = Kind::Accept;
    /// Failing requirement: x_index not in A when `exponent` is empty,
    /// otherwise x_{index+1}^exponent, with exponent in FP(x_1..x_index).
    std::size_t index = 0;
    std::optional<BigNat> base;
    std::optional<BigNat> exponent;
    std::optional<BigNat> value; ///< the tower's value when it is within cap
};

inline const char * verdict_name(ExpipVerdict::Kind k)
{
    switch (k) {
    case ExpipVerdict::Kind::Accept: return "Accept";
    case ExpipVerdict::Kind::Reject: return "Reject";
    case ExpipVerdict::Kind::UnknownAtCap: return "UnknownAtCap";
    }
    return "?";
}

/// Accepts iff every x_n is in A and x_{n+1}^y is in A for each y in
/// FP(x_1..x_n). Reports the first definite violation; when there is none
/// but some tower could not be decided within `cap`, the first such tower.
inline ExpipVerdict verify_expip(const IntSet & a, const std::vector<BigNat> & xs, const BigNat & cap = default_cap())
{
    if (xs.size() > 24)
        throw DomainError("sequences longer than 24 are not supported");
    std::optional<ExpipVerdict> unknown;
    ExpipVerdict v;
    std::vector<BigNat> prefix;
    for (std::size_t n = 0; n < xs.size(); ++n) {
        if (! a.contains(xs[n])) {
            v.kind = ExpipVerdict::Kind::Reject;
            v.index = n + 1;
            v.value = xs[n];
            return v;
        }
        if (n > 0) {
            for (auto & y : fp_set(prefix)) {
                auto in = a.contains_power(xs[n], y, cap);
                if (in && *in)
                    continue;
                ExpipVerdict bad;
                bad.index = n;
                bad.base = xs[n];
                bad.exponent = y;
                if (! in) {
                    bad.kind = ExpipVerdict::Kind::UnknownAtCap;
                    if (! unknown)
                        unknown = bad;
                    continue;
                }
                bad.kind = ExpipVerdict::Kind::Reject;
                try {
                    bad.value = checked_pow(xs[n], y, cap);
                }
                catch (const CapExceeded &) {
                }
                return bad;
            }
        }
        prefix.push_back(xs[n]);
    }
    if (unknown)
        return *unknown;
    return v;
}

struct ExpipWitness {
    std::vector<BigNat> xs;
    std::size_t depth() const { return xs.size(); }
};

/// Depth-first search for a witness of length `depth`, each x_n drawn from
/// A in ascending order among values in [2..cap]. Towers above cap count as
/// failures. The first witness in this order is returned.
inline std::optional<ExpipWitness> find_expip(const IntSet & a, std::size_t depth, const BigNat & cap)
{
    if (depth < 1)
        throw DomainError("depth must be >= 1");
    if (depth > 24)
        throw DomainError("depth above 24 is not supported");
    std::vector<BigNat> xs;
    std::vector<std::vector<BigNat>> fps; // fps[m] = FP(x_1..x_m)

    std::function<bool()> extend = [&]() -> bool {
        if (xs.size() == depth)
            return true;
        bool done = false;
        // copied: the recursion below grows fps and may move its storage
        const std::optional<std::vector<BigNat>> ys = xs.empty() ? std::nullopt : std::optional(fps.back());
        a.for_each(2, cap, [&](const BigNat & x) {
            if (ys) {
                bool ok = true;
                for (auto & y : *ys) {
                    auto in = a.contains_power(x, y, cap);
                    if (! in || ! *in) {
                        ok = false;
                        break;
                    }
                }
                if (! ok) {
                    // x^min(FP) only grows with x; once it passes max(A) and
                    // cap, no larger x can work.
                    if (a.kind() != IntSet::Kind::Powers) {
                        auto top = a.max();
                        BigNat bound = top ? std::min(*top, cap) : cap;
                        try {
                            checked_pow(x, ys->front(), bound);
                        }
                        catch (const CapExceeded &) {
                            return false;
                        }
                    }
                    return true;
                }
            }
            xs.push_back(x);
            std::vector<BigNat> fp = fps.empty() ? std::vector<BigNat> {} : fps.back();
            fp.push_back(x);
            if (! fps.empty())
                for (auto & y : fps.back())
                    fp.push_back(y * x);
            std::sort(fp.begin(), fp.end());
            fp.erase(std::unique(fp.begin(), fp.end()), fp.end());
            fps.push_back(std::move(fp));
            if (extend()) {
                done = true;
                return false;
            }
            xs.pop_back();
            fps.pop_back();
            return true;
        });
        return done;
    };
    if (extend())
        return ExpipWitness {xs};
    return std::nullopt;
}

} // namespace uexp::expip
