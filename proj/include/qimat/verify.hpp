#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "qimat/genwords.hpp"
#include "qimat/matrices.hpp"
#include "qimat/numtheory.hpp"

namespace qimat::verify {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail; // first counterexample on failure, summary on success
};

/// divisor_resum must send the inverted table back to the base table.
inline CheckResult check_mobius_roundtrip(const genwords::CountTable& base,
                                          const genwords::CountTable& inverted) {
    CheckResult res{std::string("mobius_roundtrip_") + genwords::count_kind_name(base.kind()),
                    true, ""};
    const genwords::CountTable resummed = genwords::divisor_resum(inverted);
    for (std::uint64_t n = 1; n <= base.limit(); ++n)
        if (resummed.at(n) != base.at(n)) {
            res.passed = false;
            res.detail = "n=" + std::to_string(n) + ": resum gives " +
                         resummed.at(n).get_str() + ", table has " + base.at(n).get_str();
            return res;
        }
    res.detail = "identity holds up to n=" + std::to_string(base.limit());
    return res;
}

inline CheckResult check_enumeration_counts(std::uint64_t n_max,
                                            const genwords::CountTable& c,
                                            const genwords::CountTable& d,
                                            const genwords::CountTable& p,
                                            const genwords::CountTable& q) {
    CheckResult res{"enumeration_counts", true, ""};
    const std::uint64_t top = std::min<std::uint64_t>(n_max, 14);
    for (std::uint64_t n = 1; n <= top; ++n) {
        const auto comps = genwords::enumerate_compositions(n);
        const auto parts = genwords::enumerate_partitions(n);
        const auto comps1 = genwords::filter_gcd_one(comps);
        const auto parts1 = genwords::filter_gcd_one(parts);
        auto mismatch = [&](const char* what, std::size_t got, const mpz_class& want) {
            res.passed = false;
            res.detail = "n=" + std::to_string(n) + ": " + what + " count " +
                         std::to_string(got) + " != " + want.get_str();
        };
        if (mpz_class(static_cast<unsigned long>(comps.size())) != c.at(n))
            mismatch("composition", comps.size(), c.at(n));
        else if (mpz_class(static_cast<unsigned long>(parts.size())) != p.at(n))
            mismatch("partition", parts.size(), p.at(n));
        else if (mpz_class(static_cast<unsigned long>(comps1.size())) != d.at(n))
            mismatch("gcd-1 composition", comps1.size(), d.at(n));
        else if (mpz_class(static_cast<unsigned long>(parts1.size())) != q.at(n))
            mismatch("gcd-1 partition", parts1.size(), q.at(n));
        if (!res.passed) return res;
    }
    res.detail = "word counts match tables up to n=" + std::to_string(top);
    return res;
}

inline CheckResult check_brute_force_oracle(std::uint64_t n_max) {
    CheckResult res{"brute_force_oracle", true, ""};
    const std::uint64_t top = std::min<std::uint64_t>(n_max, 5);
    for (std::uint64_t n = 1; n <= top; ++n) {
        const auto brute = matrices::brute_force_Kn(n);
        const auto mapped = matrices::enumerate_Kn(n);
        if (brute != mapped) {
            res.passed = false;
            res.detail = "n=" + std::to_string(n) + ": brute-force list (" +
                         std::to_string(brute.size()) + " matrices) differs from bijection list (" +
                         std::to_string(mapped.size()) + ")";
            return res;
        }
    }
    res.detail = "brute force agrees with the bijection up to n=" + std::to_string(top);
    return res;
}

inline CheckResult check_bijection_invariants(std::uint64_t n_max) {
    CheckResult res{"bijection_invariants", true, ""};
    const std::uint64_t top = std::min<std::uint64_t>(n_max, 10);
    for (std::uint64_t n = 1; n <= top; ++n) {
        const auto words = genwords::filter_gcd_one(genwords::enumerate_compositions(n));
        const matrices::IntPolynomial fn = matrices::IntPolynomial::quasi_idempotent(n);
        for (const genwords::GenWord& u : words) {
            const matrices::IntMatrix a = matrices::from_word(u);
            auto fail = [&](const std::string& why) {
                res.passed = false;
                res.detail = "n=" + std::to_string(n) + ", word " + [&] {
                    std::string t;
                    for (const auto& pr : u)
                        t += std::to_string(pr.v) + "^" + std::to_string(pr.w) + " ";
                    return t;
                }() + ": " + why;
            };
            if (std::any_of(a.entries().begin(), a.entries().end(),
                            [](std::int64_t e) { return e < 1; })) {
                fail("image not strictly positive");
                return res;
            }
            if (a.trace() != std::int64_t(n)) {
                fail("trace != n");
                return res;
            }
            if (!matrices::is_irreducible(a)) {
                fail("image not irreducible");
                return res;
            }
            if (!matrices::annihilates(fn, a)) {
                fail("A^2 != nA");
                return res;
            }
            const auto factor = matrices::rank1_factor(a);
            if (!factor) {
                fail("rank-1 factorization absent");
                return res;
            }
            bool same = factor->first.size() == u.size();
            for (std::size_t i = 0; same && i < u.size(); ++i)
                same = factor->first[i] == std::int64_t(u[i].v) &&
                       factor->second[i] == std::int64_t(u[i].w);
            if (!same) {
                fail("factorization does not reproduce the word");
                return res;
            }
        }
    }
    res.detail = "matrix images satisfy all invariants up to n=" + std::to_string(top);
    return res;
}

inline CheckResult check_pairwise_nonequivalent(std::uint64_t n_max) {
    CheckResult res{"pairwise_nonequivalent", true, ""};
    const std::uint64_t top = std::min<std::uint64_t>(n_max, 6);
    for (std::uint64_t n = 1; n <= top; ++n) {
        const auto reps = matrices::enumerate_Kn_bar(n);
        for (std::size_t i = 0; i < reps.size(); ++i)
            for (std::size_t j = i + 1; j < reps.size(); ++j)
                if (reps[i].dim() == reps[j].dim() &&
                    matrices::perm_equivalent_exhaustive(reps[i], reps[j])) {
                    res.passed = false;
                    res.detail = "n=" + std::to_string(n) + ": representatives " +
                                 std::to_string(i) + " and " + std::to_string(j) +
                                 " are permutation-equivalent";
                    return res;
                }
    }
    res.detail = "class representatives pairwise distinct up to n=" + std::to_string(top);
    return res;
}

/// Full cross-module suite. flip_d_table_entry is a test hook: it corrupts
/// one entry of the inverted c table before the roundtrip check, which must
/// then fail (and nothing else should mask it).
inline std::vector<CheckResult> run_all(std::uint64_t n_max, bool flip_d_table_entry = false) {
    if (n_max < 1) throw std::invalid_argument("run_all: n_max must be >= 1");
    const std::uint64_t table_limit = std::clamp<std::uint64_t>(n_max, 128, 2000);
    const numtheory::SieveTables sieves = numtheory::build_sieves(table_limit);
    const genwords::CountTable c = genwords::count_c(table_limit, sieves);
    const genwords::CountTable p = genwords::count_p(table_limit, sieves);
    genwords::CountTable d = genwords::mobius_invert(c, sieves);
    const genwords::CountTable q = genwords::mobius_invert(p, sieves);

    if (flip_d_table_entry) {
        std::vector<mpz_class> flipped;
        for (std::uint64_t n = 1; n <= d.limit(); ++n) flipped.push_back(d.at(n));
        flipped[6] += 1;
        d = genwords::CountTable(genwords::CountKind::D, std::move(flipped));
    }

    std::vector<CheckResult> results;
    results.push_back(check_enumeration_counts(n_max, c, d, p, q));
    results.push_back(check_mobius_roundtrip(c, d));
    results.push_back(check_mobius_roundtrip(p, q));
    results.push_back(check_brute_force_oracle(n_max));
    results.push_back(check_bijection_invariants(n_max));
    results.push_back(check_pairwise_nonequivalent(n_max));
    return results;
}

} // namespace qimat::verify
