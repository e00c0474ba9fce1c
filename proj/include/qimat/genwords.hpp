#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "qimat/errors.hpp"
#include "qimat/numtheory.hpp"

namespace qimat::genwords {

/// One letter v^w of a generalized word: value v >= 1 repeated with weight w >= 1.
struct WordPair {
    std::uint64_t v = 1;
    std::uint64_t w = 1;
    friend bool operator==(const WordPair&, const WordPair&) = default;
};

/// A generalized word v1^w1 v2^w2 ... vk^wk (k >= 1 for the words this library
/// produces; the empty vector is never a valid word).
using GenWord = std::vector<WordPair>;

inline constexpr std::uint64_t kDefaultEnumerationCap = 20;

inline void validate_word(const GenWord& word) {
    if (word.empty()) throw std::invalid_argument("generalized word must have at least one pair");
    for (const WordPair& p : word)
        if (p.v == 0 || p.w == 0)
            throw std::invalid_argument("generalized word pairs must have v >= 1 and w >= 1");
}

/// weight = sum of v_i * w_i.
inline std::uint64_t weight(const GenWord& word) {
    validate_word(word);
    std::uint64_t total = 0;
    for (const WordPair& p : word) {
        std::uint64_t term = 0;
        if (__builtin_mul_overflow(p.v, p.w, &term) ||
            __builtin_add_overflow(total, term, &total))
            throw std::overflow_error("weight: sum v_i * w_i overflows uint64");
    }
    return total;
}

/// gcd of the values v_1..v_k; for a single pair this is v_1 itself.
inline std::uint64_t word_gcd(const GenWord& word) {
    validate_word(word);
    std::vector<std::uint64_t> values;
    values.reserve(word.size());
    for (const WordPair& p : word) values.push_back(p.v);
    return numtheory::gcd_vector(values);
}

namespace detail {

inline void check_enumeration_cap(std::uint64_t n, std::uint64_t cap, const char* what) {
    if (n == 0) throw std::invalid_argument(std::string(what) + ": n must be >= 1");
    if (n > cap)
        throw enumeration_cap_error(std::string(what) + ": n = " + std::to_string(n) +
                                    " exceeds enumeration cap " + std::to_string(cap));
}

inline void compositions_rec(std::uint64_t remaining, GenWord& prefix,
                             std::vector<GenWord>& out) {
    if (remaining == 0) {
        if (!prefix.empty()) out.push_back(prefix);
        return;
    }
    // Ascending flattened-lex order: smaller v first, then smaller w.
    for (std::uint64_t v = 1; v <= remaining; ++v)
        for (std::uint64_t w = 1; v * w <= remaining; ++w) {
            prefix.push_back({v, w});
            compositions_rec(remaining - v * w, prefix, out);
            prefix.pop_back();
        }
}

// Canonical partition form: pairs non-increasing under the key (v*w, v, w),
// so every multiset of pairs (repeats allowed) has exactly one
// representative. The recursion keeps each new pair at or below the
// previous one.
inline bool key_less(const WordPair& a, const WordPair& b) {
    const std::uint64_t pa = a.v * a.w, pb = b.v * b.w;
    if (pa != pb) return pa < pb;
    if (a.v != b.v) return a.v < b.v;
    return a.w < b.w;
}

inline void partitions_rec(std::uint64_t remaining, bool has_bound, WordPair bound,
                           GenWord& prefix, std::vector<GenWord>& out) {
    if (remaining == 0) {
        out.push_back(prefix);
        return;
    }
    // Candidate pairs with v*w <= remaining, visited in descending key order.
    for (std::uint64_t product = remaining; product >= 1; --product)
        for (std::uint64_t v = product; v >= 1; --v) {
            if (product % v != 0) continue;
            const WordPair p{v, product / v};
            if (has_bound && key_less(bound, p)) continue;
            prefix.push_back(p);
            partitions_rec(remaining - product, true, p, prefix, out);
            prefix.pop_back();
        }
}

} // namespace detail

/// All generalized compositions of n (ordered pair sequences with sum of
/// v_i*w_i equal to n), in ascending lexicographic order of the flattened
/// sequence (v1, w1, v2, w2, ...).
inline std::vector<GenWord> enumerate_compositions(std::uint64_t n,
                                                   std::uint64_t cap = kDefaultEnumerationCap) {
    detail::check_enumeration_cap(n, cap, "enumerate_compositions");
    std::vector<GenWord> out;
    GenWord prefix;
    detail::compositions_rec(n, prefix, out);
    return out;
}

/// All generalized partitions of n: canonical representatives with pairs
/// non-increasing under the key (v*w, v, w). The returned list is ordered
/// descending-lexicographically in that same key sequence.
inline std::vector<GenWord> enumerate_partitions(std::uint64_t n,
                                                 std::uint64_t cap = kDefaultEnumerationCap) {
    detail::check_enumeration_cap(n, cap, "enumerate_partitions");
    std::vector<GenWord> out;
    GenWord prefix;
    detail::partitions_rec(n, false, WordPair{}, prefix, out);
    return out;
}

/// Keep only words whose value gcd is 1; relative order is preserved.
inline std::vector<GenWord> filter_gcd_one(std::vector<GenWord> words) {
    std::erase_if(words, [](const GenWord& w) { return word_gcd(w) != 1; });
    return words;
}

/// Natural log of a positive big integer, exact to double precision
/// (53-bit mantissa plus binary exponent).
inline double log_mpz(const mpz_class& z) {
    if (z <= 0) throw std::invalid_argument("log_mpz: value must be positive");
    long exp2 = 0;
    const double mantissa = mpz_get_d_2exp(&exp2, z.get_mpz_t());
    return std::log(mantissa) + double(exp2) * std::numbers::ln2;
}

enum class CountKind { C, D, P, Q };

inline const char* count_kind_name(CountKind kind) {
    switch (kind) {
        case CountKind::C: return "c";
        case CountKind::D: return "d";
        case CountKind::P: return "p";
        case CountKind::Q: return "q";
    }
    throw std::logic_error("count_kind_name: bad kind");
}

/// Exact integer table values(1..limit) for one of the four counting
/// sequences: c = compositions, p = partitions, d / q = the gcd-1 subsets.
class CountTable {
public:
    CountTable(CountKind kind, std::vector<mpz_class> values_from_one)
        : kind_(kind), values_(std::move(values_from_one)) {
        if (values_.empty()) throw std::invalid_argument("CountTable: empty table");
    }

    CountKind kind() const noexcept { return kind_; }
    std::uint64_t limit() const noexcept { return values_.size(); }

    const mpz_class& at(std::uint64_t n) const {
        if (n < 1 || n > values_.size())
            throw std::out_of_range("CountTable: index " + std::to_string(n) +
                                    " outside 1.." + std::to_string(values_.size()));
        return values_[static_cast<std::size_t>(n - 1)];
    }

    friend bool operator==(const CountTable&, const CountTable&) = default;

private:
    CountKind kind_;
    std::vector<mpz_class> values_; // values_[i] holds the count at n = i+1
};

/// Composition counts via the convolution c_n = sum_{m=1..n} d(m) c_{n-m},
/// with c_0 = 1 as the internal seed.
inline CountTable count_c(std::uint64_t limit, const numtheory::SieveTables& sieves) {
    if (limit == 0) throw std::invalid_argument("count_c: limit must be >= 1");
    if (sieves.limit() < limit) throw std::invalid_argument("count_c: sieve tables too short");
    std::vector<mpz_class> c(static_cast<std::size_t>(limit) + 1);
    c[0] = 1;
    for (std::uint64_t n = 1; n <= limit; ++n) {
        mpz_class acc = 0;
        for (std::uint64_t m = 1; m <= n; ++m)
            mpz_addmul_ui(acc.get_mpz_t(), c[static_cast<std::size_t>(n - m)].get_mpz_t(),
                          sieves.divisor_count(m));
        c[static_cast<std::size_t>(n)] = std::move(acc);
    }
    c.erase(c.begin());
    return CountTable(CountKind::C, std::move(c));
}

/// Partition counts via n * p_n = sum_{k=1..n} b(k) p_{n-k} where b is the
/// divisor_weight sieve; the division is exact and checked.
inline CountTable count_p(std::uint64_t limit, const numtheory::SieveTables& sieves) {
    if (limit == 0) throw std::invalid_argument("count_p: limit must be >= 1");
    if (sieves.limit() < limit) throw std::invalid_argument("count_p: sieve tables too short");
    std::vector<mpz_class> p(static_cast<std::size_t>(limit) + 1);
    p[0] = 1;
    for (std::uint64_t n = 1; n <= limit; ++n) {
        mpz_class acc = 0;
        for (std::uint64_t k = 1; k <= n; ++k)
            mpz_addmul_ui(acc.get_mpz_t(), p[static_cast<std::size_t>(n - k)].get_mpz_t(),
                          sieves.divisor_weight(k));
        mpz_class q, r;
        mpz_tdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), acc.get_mpz_t(),
                       static_cast<unsigned long>(n));
        if (r != 0)
            throw std::logic_error("count_p: recurrence division not exact at n = " +
                                   std::to_string(n));
        p[static_cast<std::size_t>(n)] = std::move(q);
    }
    p.erase(p.begin());
    return CountTable(CountKind::P, std::move(p));
}

/// Moebius inversion over divisors: out_n = sum_{r | n} mu(r) * in_{n/r}.
/// Maps a C table to the matching D table and a P table to Q.
inline CountTable mobius_invert(const CountTable& table, const numtheory::SieveTables& sieves) {
    CountKind out_kind;
    switch (table.kind()) {
        case CountKind::C: out_kind = CountKind::D; break;
        case CountKind::P: out_kind = CountKind::Q; break;
        default: throw std::invalid_argument("mobius_invert: input must be a c or p table");
    }
    const std::uint64_t limit = table.limit();
    if (sieves.limit() < limit) throw std::invalid_argument("mobius_invert: sieve tables too short");
    std::vector<mpz_class> out(static_cast<std::size_t>(limit));
    for (std::uint64_t r = 1; r <= limit; ++r) {
        const int mu = sieves.moebius(r);
        if (mu == 0) continue;
        for (std::uint64_t m = 1; r * m <= limit; ++m) {
            mpz_class& slot = out[static_cast<std::size_t>(r * m - 1)];
            if (mu > 0) slot += table.at(m);
            else slot -= table.at(m);
        }
    }
    return CountTable(out_kind, std::move(out));
}

/// Inverse of mobius_invert: out_n = sum_{r | n} in_r, mapping D back to C
/// and Q back to P.
inline CountTable divisor_resum(const CountTable& table) {
    CountKind out_kind;
    switch (table.kind()) {
        case CountKind::D: out_kind = CountKind::C; break;
        case CountKind::Q: out_kind = CountKind::P; break;
        default: throw std::invalid_argument("divisor_resum: input must be a d or q table");
    }
    const std::uint64_t limit = table.limit();
    std::vector<mpz_class> out(static_cast<std::size_t>(limit));
    for (std::uint64_t r = 1; r <= limit; ++r)
        for (std::uint64_t m = r; m <= limit; m += r)
            out[static_cast<std::size_t>(m - 1)] += table.at(r);
    return CountTable(out_kind, std::move(out));
}

} // namespace qimat::genwords
