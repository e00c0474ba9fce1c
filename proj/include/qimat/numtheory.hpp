#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qimat::numtheory {

/// Immutable sieve tables for 1..limit():
///   divisor_count(n)  = number of divisors of n
///   moebius(n)        = Moebius function of n
///   divisor_weight(n) = sum over divisors l of n of l * divisor_count(l)
///
/// divisor_weight is kept in uint64 and every addition/multiplication is
/// overflow-checked; an overflow is a hard error, never a silent wrap.
class SieveTables {
public:
    explicit SieveTables(std::uint64_t limit) : limit_(limit) {
        if (limit == 0) throw std::invalid_argument("SieveTables: limit must be >= 1");
        if (limit > (std::uint64_t{1} << 31))
            throw std::invalid_argument("SieveTables: limit too large for in-memory sieve");
        const std::size_t n = static_cast<std::size_t>(limit);
        build_divisor_count(n);
        build_moebius(n);
        build_divisor_weight(n);
    }

    std::uint64_t limit() const noexcept { return limit_; }

    std::uint32_t divisor_count(std::uint64_t n) const {
        check_range(n);
        return d_[static_cast<std::size_t>(n)];
    }

    int moebius(std::uint64_t n) const {
        check_range(n);
        return mu_[static_cast<std::size_t>(n)];
    }

    std::uint64_t divisor_weight(std::uint64_t n) const {
        check_range(n);
        return b_[static_cast<std::size_t>(n)];
    }

private:
    void check_range(std::uint64_t n) const {
        if (n < 1 || n > limit_)
            throw std::out_of_range("SieveTables: index " + std::to_string(n) +
                                    " outside 1.." + std::to_string(limit_));
    }

    void build_divisor_count(std::size_t n) {
        d_.assign(n + 1, 0);
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = i; j <= n; j += i) ++d_[j];
    }

    // Linear sieve; the test suite cross-checks against trial division.
    void build_moebius(std::size_t n) {
        mu_.assign(n + 1, 0);
        std::vector<bool> composite(n + 1, false);
        std::vector<std::uint32_t> primes;
        mu_[1] = 1;
        for (std::size_t i = 2; i <= n; ++i) {
            if (!composite[i]) {
                primes.push_back(static_cast<std::uint32_t>(i));
                mu_[i] = -1;
            }
            for (std::uint32_t p : primes) {
                const std::size_t ip = i * p;
                if (ip > n) break;
                composite[ip] = true;
                if (i % p == 0) {
                    mu_[ip] = 0;
                    break;
                }
                mu_[ip] = static_cast<std::int8_t>(-mu_[i]);
            }
        }
    }

    void build_divisor_weight(std::size_t n) {
        b_.assign(n + 1, 0);
        for (std::size_t l = 1; l <= n; ++l) {
            std::uint64_t w = 0;
            if (__builtin_mul_overflow(static_cast<std::uint64_t>(l),
                                       static_cast<std::uint64_t>(d_[l]), &w))
                throw std::overflow_error("divisor_weight: l * d(l) overflows uint64 at l = " +
                                          std::to_string(l));
            for (std::size_t k = l; k <= n; k += l) {
                if (__builtin_add_overflow(b_[k], w, &b_[k]))
                    throw std::overflow_error("divisor_weight: accumulation overflows uint64 at k = " +
                                              std::to_string(k));
            }
        }
    }

    std::uint64_t limit_;
    std::vector<std::uint32_t> d_;
    std::vector<std::int8_t> mu_;
    std::vector<std::uint64_t> b_;
};

inline SieveTables build_sieves(std::uint64_t limit) { return SieveTables(limit); }

/// gcd of a non-empty vector; gcd_vector({0,...,0}) == 0 by convention.
inline std::uint64_t gcd_vector(const std::vector<std::uint64_t>& values) {
    if (values.empty()) throw std::invalid_argument("gcd_vector: empty input");
    std::uint64_t g = 0;
    for (std::uint64_t v : values) g = std::gcd(g, v);
    return g;
}

/// Lazily grown SieveTables holder: at_least(n) rebuilds (at least doubling)
/// whenever the current tables are too short, so amortized cost stays linearithmic.
class SieveBank {
public:
    explicit SieveBank(std::uint64_t initial_limit = 1024)
        : tables_(initial_limit == 0 ? 1 : initial_limit) {}

    const SieveTables& at_least(std::uint64_t n) {
        if (n > tables_.limit()) {
            std::uint64_t grown = tables_.limit();
            while (grown < n) grown *= 2;
            tables_ = SieveTables(grown);
        }
        return tables_;
    }

    const SieveTables& current() const noexcept { return tables_; }

private:
    SieveTables tables_;
};

} // namespace qimat::numtheory
