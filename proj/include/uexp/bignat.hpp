#pragma once

// Arbitrary-precision naturals and the handful of capped integer primitives
// the rest of the library needs (powers, roots, perfect-power detection).

#include <uexp/error.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace uexp {

using BigNat = boost::multiprecision::cpp_int;

inline BigNat default_cap()
{
    return BigNat(1) << 64;
}

inline std::string to_string(const BigNat & n)
{
    return n.str();
}

/// Parses a decimal literal. Also accepts `2^64` and `1e18` shorthands, which
/// is what the CLI accepts for caps.
inline std::optional<BigNat> parse_bignat(std::string_view text)
{
    auto digits = [](std::string_view s) -> std::optional<BigNat> {
        if (s.empty())
            return std::nullopt;
        BigNat v = 0;
        for (char c : s) {
            if (! std::isdigit(static_cast<unsigned char>(c)))
                return std::nullopt;
            v = v * 10 + (c - '0');
        }
        return v;
    };

    if (auto caret = text.find('^'); caret != std::string_view::npos) {
        auto b = digits(text.substr(0, caret));
        auto e = digits(text.substr(caret + 1));
        if (! b || ! e || *e > 100000)
            return std::nullopt;
        return boost::multiprecision::pow(*b, e->convert_to<unsigned>());
    }
    if (auto ex = text.find_first_of("eE"); ex != std::string_view::npos) {
        auto m = digits(text.substr(0, ex));
        auto e = digits(text.substr(ex + 1));
        if (! m || ! e || *e > 100000)
            return std::nullopt;
        return *m * boost::multiprecision::pow(BigNat(10), e->convert_to<unsigned>());
    }
    return digits(text);
}

inline std::size_t bit_length(const BigNat & n)
{
    if (n == 0)
        return 0;
    return boost::multiprecision::msb(n) + 1;
}

/// base^exp, throwing CapExceeded as soon as the value passes `cap`.
inline BigNat checked_pow(const BigNat & base, const BigNat & exp, const BigNat & cap)
{
    if (exp == 0)
        return 1;
    if (base <= 1)
        return base;
    // base >= 2, so base^exp >= 2^exp; anything past the cap's bit length overflows.
    if (exp > bit_length(cap))
        throw CapExceeded("power exceeds cap");
    BigNat result = 1;
    auto e = exp.convert_to<unsigned long>();
    for (unsigned long i = 0; i < e; ++i) {
        result *= base;
        if (result > cap)
            throw CapExceeded("power exceeds cap");
    }
    return result;
}

inline BigNat checked_mul(const BigNat & a, const BigNat & b, const BigNat & cap)
{
    BigNat r = a * b;
    if (r > cap)
        throw CapExceeded("product exceeds cap");
    return r;
}

inline BigNat checked_add(const BigNat & a, const BigNat & b, const BigNat & cap)
{
    BigNat r = a + b;
    if (r > cap)
        throw CapExceeded("sum exceeds cap");
    return r;
}

/// Largest r with r^k <= n.
inline BigNat integer_root(const BigNat & n, unsigned k)
{
    if (k == 1 || n <= 1)
        return n;
    BigNat lo = 1, hi = BigNat(1) << (bit_length(n) / k + 1);
    while (lo < hi) {
        BigNat mid = (lo + hi + 1) / 2;
        if (boost::multiprecision::pow(mid, k) <= n)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

struct PerfectPower {
    BigNat root;
    unsigned exponent;
};

/// Writes n = root^exponent with the smallest possible root (so exponent is
/// maximal). For non-powers the result is (n, 1).
inline PerfectPower minimal_root(const BigNat & n)
{
    if (n < 4)
        return {n, 1};
    for (unsigned k = static_cast<unsigned>(bit_length(n)); k >= 2; --k) {
        BigNat r = integer_root(n, k);
        if (r >= 2 && boost::multiprecision::pow(r, k) == n)
            return {r, k};
    }
    return {n, 1};
}

/// If n is an exact power base^k with k >= 1, returns k.
inline std::optional<BigNat> exact_log(const BigNat & n, const BigNat & base)
{
    if (base < 2 || n < 1)
        return std::nullopt;
    BigNat k = 0, v = n;
    while (v > 1) {
        if (v % base != 0)
            return std::nullopt;
        v /= base;
        ++k;
    }
    if (k == 0)
        return std::nullopt;
    return k;
}

} // namespace uexp
