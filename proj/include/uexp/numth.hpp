#pragma once

// Integer functions behind the largest-prime-divisor / big-Omega argument and
// the log-base partition transform. Inputs are 64-bit naturals; the BigNat
// overloads accept anything whose cofactor after removing primes below 2^20
// fits in 64 bits.

#include <uexp/bignat.hpp>
#include <uexp/error.hpp>

#include <algorithm>
#include <limits>
#include <cstdint>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

namespace uexp::numth {

struct PrimePower {
    std::uint64_t prime;
    unsigned exponent;

    friend bool operator==(const PrimePower &, const PrimePower &) = default;
};

/// Primes strictly increasing; the product of prime^exponent is the input.
using Factorization = std::vector<PrimePower>;

namespace detail {
    using u128 = unsigned __int128;

    inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
    {
        return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
    }

    inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m)
    {
        std::uint64_t r = 1 % m;
        b %= m;
        while (e) {
            if (e & 1)
                r = mul_mod(r, b, m);
            b = mul_mod(b, b, m);
            e >>= 1;
        }
        return r;
    }

    // Deterministic for all n < 2^64 with this witness set.
    inline bool miller_rabin(std::uint64_t n)
    {
        if (n < 2)
            return false;
        for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
            if (n % p == 0)
                return n == p;
        }
        std::uint64_t d = n - 1;
        unsigned s = 0;
        while ((d & 1) == 0) {
            d >>= 1;
            ++s;
        }
        for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
            std::uint64_t x = pow_mod(a, d, n);
            if (x == 1 || x == n - 1)
                continue;
            bool composite = true;
            for (unsigned r = 1; r < s; ++r) {
                x = mul_mod(x, x, n);
                if (x == n - 1) {
                    composite = false;
                    break;
                }
            }
            if (composite)
                return false;
        }
        return true;
    }

    // Brent's variant; n must be an odd composite.
    inline std::uint64_t pollard_rho(std::uint64_t n)
    {
        for (std::uint64_t c = 1;; ++c) {
            auto f = [&](std::uint64_t x) { return (mul_mod(x, x, n) + c) % n; };
            std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
            std::uint64_t r = 1;
            const std::uint64_t m = 128;
            do {
                x = y;
                for (std::uint64_t i = 0; i < r; ++i)
                    y = f(y);
                std::uint64_t k = 0;
                do {
                    ys = y;
                    for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
                        y = f(y);
                        q = mul_mod(q, x > y ? x - y : y - x, n);
                    }
                    g = std::gcd(q, n);
                    k += m;
                } while (k < r && g == 1);
                r <<= 1;
            } while (g == 1);
            if (g == n) {
                do {
                    ys = f(ys);
                    g = std::gcd(x > ys ? x - ys : ys - x, n);
                } while (g == 1);
            }
            if (g != n)
                return g;
        }
    }

    inline void split(std::uint64_t n, std::vector<std::uint64_t> & primes)
    {
        if (n == 1)
            return;
        if (miller_rabin(n)) {
            primes.push_back(n);
            return;
        }
        std::uint64_t d = pollard_rho(n);
        split(d, primes);
        split(n / d, primes);
    }

    inline void require_at_least(std::uint64_t n, std::uint64_t min, const char * fn)
    {
        if (n < min)
            throw DomainError(std::string(fn) + " is undefined for n < " + std::to_string(min));
    }

    inline std::uint64_t top_prime_power(const PrimePower & pp)
    {
        std::uint64_t h = 1;
        for (unsigned i = 0; i < pp.exponent; ++i)
            h *= pp.prime;
        return h;
    }
} // namespace detail

inline bool is_prime(std::uint64_t n)
{
    return detail::miller_rabin(n);
}

/// Trial division below 2^20, Miller-Rabin plus Pollard-rho beyond.
inline Factorization factorize(std::uint64_t n)
{
    detail::require_at_least(n, 2, "factorize");
    Factorization out;
    auto push = [&](std::uint64_t p) {
        if (! out.empty() && out.back().prime == p)
            ++out.back().exponent;
        else
            out.push_back({p, 1});
    };

    if (n < (1ULL << 20)) {
        for (std::uint64_t p = 2; p * p <= n; ++p)
            while (n % p == 0) {
                push(p);
                n /= p;
            }
        if (n > 1)
            push(n);
        return out;
    }

    std::vector<std::uint64_t> primes;
    // Strip small factors first; rho is poor at finding them.
    for (std::uint64_t p = 2; p < 1000 && p * p <= n; ++p)
        while (n % p == 0) {
            primes.push_back(p);
            n /= p;
        }
    detail::split(n, primes);
    std::sort(primes.begin(), primes.end());
    for (auto p : primes)
        push(p);
    return out;
}

/// Largest prime divisor.
inline std::uint64_t fn_F(std::uint64_t n)
{
    detail::require_at_least(n, 2, "F");
    return factorize(n).back().prime;
}

/// Sum of the exponents of the prime factorization; Omega(1) = 0.
inline unsigned fn_Omega(std::uint64_t n)
{
    detail::require_at_least(n, 1, "Omega");
    if (n == 1)
        return 0;
    unsigned total = 0;
    for (auto & pp : factorize(n))
        total += pp.exponent;
    return total;
}

/// Exponent of the largest prime divisor: max{m : F(n)^m divides n}.
inline unsigned fn_G(std::uint64_t n)
{
    detail::require_at_least(n, 2, "G");
    return factorize(n).back().exponent;
}

/// F(n)^G(n). Never exceeds n.
inline std::uint64_t fn_H(std::uint64_t n)
{
    detail::require_at_least(n, 2, "H");
    return detail::top_prime_power(factorize(n).back());
}

namespace detail {
    inline bool fits_u64(const BigNat & n)
    {
        return n <= std::numeric_limits<std::uint64_t>::max();
    }
} // namespace detail

inline Factorization factorize(const BigNat & n)
{
    if (n < 2)
        throw DomainError("factorize is undefined for n < 2");
    if (detail::fits_u64(n))
        return factorize(n.convert_to<std::uint64_t>());
    Factorization out;
    BigNat m = n;
    for (std::uint64_t p = 2; p < (1ULL << 20) && ! detail::fits_u64(m); p += (p == 2 ? 1 : 2)) {
        unsigned e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        if (e)
            out.push_back({p, e});
    }
    if (! detail::fits_u64(m))
        throw DomainError("factorize: " + n.str() + " has a cofactor beyond 2^64 after trial division");
    if (m > 1) {
        for (auto & pp : factorize(m.convert_to<std::uint64_t>())) {
            if (! out.empty() && out.back().prime == pp.prime)
                out.back().exponent += pp.exponent;
            else
                out.push_back(pp);
        }
    }
    return out;
}

inline BigNat fn_F(const BigNat & n)
{
    if (n < 2)
        throw DomainError("F is undefined for n < 2");
    return factorize(n).back().prime;
}

inline unsigned fn_Omega(const BigNat & n)
{
    if (n < 1)
        throw DomainError("Omega is undefined for n < 1");
    if (n == 1)
        return 0;
    unsigned total = 0;
    for (auto & pp : factorize(n))
        total += pp.exponent;
    return total;
}

inline unsigned fn_G(const BigNat & n)
{
    if (n < 2)
        throw DomainError("G is undefined for n < 2");
    return factorize(n).back().exponent;
}

inline BigNat fn_H(const BigNat & n)
{
    if (n < 2)
        throw DomainError("H is undefined for n < 2");
    auto top = factorize(n).back();
    return boost::multiprecision::pow(BigNat(top.prime), top.exponent);
}

/// {n >= 1 : base^n in values}.
inline std::set<std::uint64_t> log_preimage(const std::set<std::uint64_t> & values, std::uint64_t base)
{
    detail::require_at_least(base, 2, "log_preimage base");
    std::set<std::uint64_t> out;
    for (std::uint64_t v : values) {
        std::uint64_t k = 0;
        while (v > 1 && v % base == 0) {
            v /= base;
            ++k;
        }
        if (v == 1 && k >= 1)
            out.insert(k);
    }
    return out;
}

} // namespace uexp::numth
