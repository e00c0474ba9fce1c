#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <gmpxx.h>

#include "qimat/errors.hpp"
#include "qimat/genwords.hpp"

namespace qimat::matrices {

/// Dense square integer matrix, row-major int64 storage.
class IntMatrix {
public:
    explicit IntMatrix(std::size_t dim) : dim_(dim), e_(dim * dim, 0) {
        if (dim == 0) throw std::invalid_argument("IntMatrix: dimension must be >= 1");
    }

    IntMatrix(std::size_t dim, std::vector<std::int64_t> row_major)
        : dim_(dim), e_(std::move(row_major)) {
        if (dim == 0) throw std::invalid_argument("IntMatrix: dimension must be >= 1");
        if (e_.size() != dim * dim)
            throw std::invalid_argument("IntMatrix: entry count does not match dimension");
    }

    std::size_t dim() const noexcept { return dim_; }

    std::int64_t at(std::size_t i, std::size_t j) const {
        check(i, j);
        return e_[i * dim_ + j];
    }

    void set(std::size_t i, std::size_t j, std::int64_t value) {
        check(i, j);
        e_[i * dim_ + j] = value;
    }

    std::int64_t trace() const {
        std::int64_t t = 0;
        for (std::size_t i = 0; i < dim_; ++i)
            if (__builtin_add_overflow(t, e_[i * dim_ + i], &t))
                throw std::overflow_error("IntMatrix::trace: int64 overflow");
        return t;
    }

    const std::vector<std::int64_t>& entries() const noexcept { return e_; }

    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

private:
    void check(std::size_t i, std::size_t j) const {
        if (i >= dim_ || j >= dim_) throw std::out_of_range("IntMatrix: index out of range");
    }

    std::size_t dim_;
    std::vector<std::int64_t> e_;
};

/// Total order on matrices: by dimension, then row-major entries.
inline bool matrix_less(const IntMatrix& a, const IntMatrix& b) {
    if (a.dim() != b.dim()) return a.dim() < b.dim();
    return a.entries() < b.entries();
}

/// Integer polynomial sum alpha_i X^i given by coeffs (alpha_0 .. alpha_d),
/// leading coefficient nonzero.
struct IntPolynomial {
    std::vector<std::int64_t> coeffs;

    explicit IntPolynomial(std::vector<std::int64_t> c) : coeffs(std::move(c)) {
        if (coeffs.empty()) throw std::invalid_argument("IntPolynomial: empty coefficient list");
        if (coeffs.back() == 0)
            throw std::invalid_argument("IntPolynomial: leading coefficient must be nonzero");
    }

    std::size_t degree() const noexcept { return coeffs.size() - 1; }

    /// X^2 - nX, the annihilator whose irreducible solutions are K_n.
    static IntPolynomial quasi_idempotent(std::uint64_t n) {
        if (n == 0 || n > std::uint64_t(std::numeric_limits<std::int64_t>::max()))
            throw std::invalid_argument("quasi_idempotent: n out of range");
        return IntPolynomial({0, -static_cast<std::int64_t>(n), 1});
    }
};

struct SearchBounds {
    std::uint64_t dim_bound = 1;   // max dimension certified by the root bound
    std::uint64_t entry_bound = 1; // max entry value at that dimension
    double root_radius = 0.0;      // largest root modulus of f
};

struct SearchOptions {
    std::optional<std::uint64_t> dim_cap;    // overrides the computed dim_bound downward
    std::optional<std::int64_t> entry_cap;   // overrides the computed entry bound downward
    std::uint64_t node_budget = 100'000'000; // DFS assignment budget, deterministic
};

/// Outer product of the word's value and weight vectors: (A)_{i,j} = v_i * w_j.
inline IntMatrix from_word(const genwords::GenWord& word) {
    genwords::validate_word(word);
    const std::size_t k = word.size();
    IntMatrix a(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            std::uint64_t prod = 0;
            if (__builtin_mul_overflow(word[i].v, word[j].w, &prod) ||
                prod > std::uint64_t(std::numeric_limits<std::int64_t>::max()))
                throw std::overflow_error("from_word: entry overflows int64");
            a.set(i, j, static_cast<std::int64_t>(prod));
        }
    return a;
}

/// Strong connectivity of the digraph with an edge i->j when (A)_{i,j} > 0;
/// a 1x1 matrix additionally needs its single entry positive.
inline bool is_irreducible(const IntMatrix& a) {
    const std::size_t k = a.dim();
    if (k == 1) return a.at(0, 0) > 0;
    auto reaches_all = [&](bool transpose) {
        std::vector<char> seen(k, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < k; ++v) {
                const std::int64_t e = transpose ? a.at(v, u) : a.at(u, v);
                if (e > 0 && !seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
            }
        }
        return count == k;
    };
    return reaches_all(false) && reaches_all(true);
}

namespace detail {

using MpzMatrix = std::vector<mpz_class>; // dim*dim row-major

inline MpzMatrix mpz_identity(std::size_t k) {
    MpzMatrix m(k * k, mpz_class(0));
    for (std::size_t i = 0; i < k; ++i) m[i * k + i] = 1;
    return m;
}

inline MpzMatrix mpz_mul(const MpzMatrix& x, const IntMatrix& a) {
    const std::size_t k = a.dim();
    MpzMatrix out(k * k, mpz_class(0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            const mpz_class& xil = x[i * k + l];
            if (xil == 0) continue;
            for (std::size_t j = 0; j < k; ++j) {
                const std::int64_t alj = a.at(l, j);
                if (alj == 0) continue;
                mpz_class term = xil;
                term *= static_cast<long>(alj);
                out[i * k + j] += term;
            }
        }
    return out;
}

} // namespace detail

/// Exact test of f(A) = 0 via Horner in arbitrary-precision integers.
inline bool annihilates(const IntPolynomial& f, const IntMatrix& a) {
    const std::size_t k = a.dim();
    detail::MpzMatrix acc(k * k, mpz_class(0));
    for (std::size_t i = 0; i < k; ++i) acc[i * k + i] = f.coeffs.back();
    for (std::size_t c = f.coeffs.size() - 1; c-- > 0;) {
        acc = detail::mpz_mul(acc, a);
        for (std::size_t i = 0; i < k; ++i) acc[i * k + i] += static_cast<long>(f.coeffs[c]);
    }
    return std::all_of(acc.begin(), acc.end(), [](const mpz_class& z) { return z == 0; });
}

/// Unique factorization A = v * w^T with positive integer vectors and
/// gcd(v) = 1, when A is strictly positive and of rank 1; absent otherwise.
/// For such A the column gcds are exactly w (so the factorization is always
/// integral): gcd_i(A_{i,j}) * A_{0,0} = gcd_i(A_{i,0}) * A_{0,j} cell by cell.
inline std::optional<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>>
rank1_factor(const IntMatrix& a) {
    const std::size_t k = a.dim();
    for (std::int64_t e : a.entries())
        if (e <= 0) return std::nullopt;
    std::vector<std::int64_t> v(k), w(k);
    for (std::size_t j = 0; j < k; ++j) {
        std::uint64_t g = 0;
        for (std::size_t i = 0; i < k; ++i)
            g = std::gcd(g, static_cast<std::uint64_t>(a.at(i, j)));
        w[j] = static_cast<std::int64_t>(g);
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (a.at(i, 0) % w[0] != 0) return std::nullopt;
        v[i] = a.at(i, 0) / w[0];
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (static_cast<__int128>(v[i]) * w[j] != a.at(i, j)) return std::nullopt;
    return std::make_pair(std::move(v), std::move(w));
}

/// Image of the gcd-1 compositions of n under from_word, in composition order.
inline std::vector<IntMatrix> enumerate_Kn(std::uint64_t n,
                                           std::uint64_t cap = genwords::kDefaultEnumerationCap) {
    std::vector<IntMatrix> out;
    for (const genwords::GenWord& u :
         genwords::filter_gcd_one(genwords::enumerate_compositions(n, cap)))
        out.push_back(from_word(u));
    return out;
}

/// Image of the gcd-1 partitions of n under from_word: one representative per
/// permutation-equivalence class, in partition order.
inline std::vector<IntMatrix> enumerate_Kn_bar(std::uint64_t n,
                                               std::uint64_t cap = genwords::kDefaultEnumerationCap) {
    std::vector<IntMatrix> out;
    for (const genwords::GenWord& u :
         genwords::filter_gcd_one(genwords::enumerate_partitions(n, cap)))
        out.push_back(from_word(u));
    return out;
}

/// Exhaustive permutation-conjugation test: some sigma with
/// B_{i,j} = A_{sigma(i),sigma(j)} everywhere. Factorial in the dimension.
inline bool perm_equivalent_exhaustive(const IntMatrix& a, const IntMatrix& b) {
    if (a.dim() != b.dim()) return false;
    const std::size_t k = a.dim();
    std::vector<std::size_t> sigma(k);
    for (std::size_t i = 0; i < k; ++i) sigma[i] = i;
    do {
        bool match = true;
        for (std::size_t i = 0; match && i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                if (b.at(i, j) != a.at(sigma[i], sigma[j])) {
                    match = false;
                    break;
                }
        if (match) return true;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return false;
}

/// Permutation equivalence. Rank-1 positive pairs are decided by comparing
/// sorted (v_i, w_i) multisets (conjugation permutes the pairs); anything else
/// falls back to the exhaustive test, capped by dimension.
inline bool perm_equivalent(const IntMatrix& a, const IntMatrix& b,
                            std::size_t exhaustive_dim_cap = 8) {
    if (a.dim() != b.dim()) return false;
    const auto fa = rank1_factor(a);
    const auto fb = rank1_factor(b);
    if (fa.has_value() != fb.has_value()) return false;
    if (fa && fb) {
        auto pairs = [](const auto& f, std::size_t k) {
            std::vector<std::pair<std::int64_t, std::int64_t>> ps(k);
            for (std::size_t i = 0; i < k; ++i) ps[i] = {f->first[i], f->second[i]};
            std::sort(ps.begin(), ps.end());
            return ps;
        };
        return pairs(fa, a.dim()) == pairs(fb, b.dim());
    }
    if (a.dim() > exhaustive_dim_cap)
        throw enumeration_cap_error("perm_equivalent: dimension " + std::to_string(a.dim()) +
                                    " exceeds exhaustive cap " +
                                    std::to_string(exhaustive_dim_cap));
    return perm_equivalent_exhaustive(a, b);
}

/// Perron value of an irreducible non-negative matrix by power iteration on
/// A + I (primitive whenever A is irreducible), bracketed by the min/max of
/// the generalized row-sum ratios until they agree.
inline double perron_value(const IntMatrix& a) {
    const std::size_t k = a.dim();
    std::vector<double> x(k, 1.0), y(k, 0.0);
    double lo = 0.0, hi = 0.0;
    for (int iter = 0; iter < 500; ++iter) {
        for (std::size_t i = 0; i < k; ++i) {
            double acc = x[i];
            for (std::size_t j = 0; j < k; ++j) acc += double(a.at(i, j)) * x[j];
            y[i] = acc;
        }
        lo = std::numeric_limits<double>::infinity();
        hi = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double ratio = y[i] / x[i];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < k; ++i) norm = std::max(norm, y[i]);
        for (std::size_t i = 0; i < k; ++i) x[i] = y[i] / norm;
        if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi) - 1.0;
}

namespace detail {

inline double poly_eval(const std::vector<std::int64_t>& c, double x) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + double(c[i]);
    return acc;
}

inline double poly_deriv_eval(const std::vector<std::int64_t>& c, double x) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) acc = acc * x + double(c[i]) * double(i);
    return acc;
}

inline mpz_class poly_eval_exact(const std::vector<std::int64_t>& c, std::int64_t x) {
    mpz_class acc = 0;
    for (std::size_t i = c.size(); i-- > 0;) {
        acc *= static_cast<long>(x);
        acc += static_cast<long>(c[i]);
    }
    return acc;
}

/// All roots of f via the companion matrix, Newton-polished.
inline std::vector<std::complex<double>> poly_roots(const IntPolynomial& f) {
    const std::size_t d = f.degree();
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
    const double lead = double(f.coeffs.back());
    for (std::size_t i = 0; i + 1 < d; ++i) companion(i + 1, i) = 1.0;
    for (std::size_t i = 0; i < d; ++i) companion(i, d - 1) = -double(f.coeffs[i]) / lead;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);
    std::vector<std::complex<double>> roots(d);
    for (std::size_t i = 0; i < d; ++i) roots[i] = solver.eigenvalues()[static_cast<long>(i)];
    for (auto& z : roots) {
        if (std::abs(z.imag()) > 1e-8 * std::max(1.0, std::abs(z))) continue;
        double x = z.real();
        for (int step = 0; step < 8; ++step) {
            const double fp = poly_deriv_eval(f.coeffs, x);
            if (fp == 0.0) break;
            x -= poly_eval(f.coeffs, x) / fp;
        }
        if (std::abs(poly_eval(f.coeffs, x)) <= std::abs(poly_eval(f.coeffs, z.real())))
            z = {x, 0.0};
    }
    return roots;
}

/// Largest positive real root, if any. The Perron value of any irreducible
/// non-negative integer solution is a root of f and is at least 1 (every
/// such matrix carries a cycle with entries >= 1), so the threshold sits
/// just below 1.
inline std::optional<double> max_positive_real_root(const std::vector<std::complex<double>>& roots) {
    std::optional<double> best;
    for (const auto& z : roots) {
        if (std::abs(z.imag()) > 1e-8 * std::max(1.0, std::abs(z))) continue;
        if (z.real() < 1.0 - 1e-6) continue;
        if (!best || z.real() > *best) best = z.real();
    }
    return best;
}

} // namespace detail

/// Bounds certified by the largest root modulus |x0| of f (padded by 1e-9
/// before each ceiling so they over-estimate, never under-estimate):
/// dimension <= ceil(sum_{i=0}^{d} |x0|^i), entries <= ceil(|x0|^dim).
inline SearchBounds compute_search_bounds(const IntPolynomial& f) {
    if (f.degree() < 1)
        throw std::invalid_argument("compute_search_bounds: degree must be >= 1");
    const auto roots = detail::poly_roots(f);
    double radius = 0.0;
    for (const auto& z : roots) radius = std::max(radius, std::abs(z));
    const double padded = radius + 1e-9;

    SearchBounds bounds;
    bounds.root_radius = radius;
    long double dim_sum = 0.0L, power = 1.0L;
    for (std::size_t i = 0; i <= f.degree(); ++i) {
        dim_sum += power;
        power *= padded;
    }
    const long double dim_ceil = std::ceil(dim_sum);
    bounds.dim_bound = dim_ceil >= 1e18L ? std::uint64_t(1'000'000'000'000'000'000ULL)
                                         : std::uint64_t(dim_ceil);
    const long double entry_ceil =
        std::ceil(std::pow((long double)padded, (long double)bounds.dim_bound));
    bounds.entry_bound = (!(entry_ceil >= 1.0L))                ? 1
                         : entry_ceil >= 1e18L                  ? std::uint64_t(1'000'000'000'000'000'000ULL)
                                                                : std::uint64_t(entry_ceil);
    if (bounds.dim_bound < 1) bounds.dim_bound = 1;
    if (bounds.entry_bound < 1) bounds.entry_bound = 1;
    return bounds;
}

namespace detail {

/// Exhaustive DFS for irreducible non-negative integer solutions of f(A) = 0.
///
/// Sound reductions on top of the root bounds (each preserves completeness):
///   - no positive real root >= 1  =>  no solutions at all;
///   - r_max = largest positive real root, then every diagonal entry <= r_max,
///     every entry <= r_max^d (the entry lies on a cycle of length <= d since
///     some power (A^t)_{t<d} is positive cellwise for irreducible solutions),
///     and opposite off-diagonal products a_ij * a_ji <= r_max^2;
///   - degree 1: irreducible solutions are 1x1;
///   - degree 2: all off-diagonal entries >= 1 (diameter <= 1), hence
///     k - 1 <= min row sum <= r_max;
///   - quadratic cell targets: (A^2)_{ij} is forced to
///     (-a1 * A_ij - a0 * delta_ij) / a2, so partial inner-product sums that
///     exceed the target prune, as does a non-integral or negative target;
///   - min over rows of the partial row sum exceeding r_max prunes (row sums
///     only grow, and min row sum <= Perron value <= r_max);
///   - a Collatz-Wielandt lower bound from power iteration on the filled
///     leading submatrix plus I exceeding r_max prunes (the Perron value is
///     monotone in entries and in taking principal submatrices).
class AnnihilatedSearch {
public:
    AnnihilatedSearch(const IntPolynomial& f, const SearchOptions& opts)
        : f_(f), opts_(opts), bounds_(compute_search_bounds(f)) {}

    std::vector<IntMatrix> run() {
        const auto roots = poly_roots(f_);
        const auto rmax = max_positive_real_root(roots);
        if (!rmax) return {};
        rmax_ = *rmax + 1e-9;

        const std::size_t d = f_.degree();
        std::uint64_t dim_limit = bounds_.dim_bound;
        if (opts_.dim_cap) dim_limit = std::min(dim_limit, *opts_.dim_cap);
        if (d == 1) dim_limit = std::min<std::uint64_t>(dim_limit, 1);
        if (d == 2)
            dim_limit = std::min<std::uint64_t>(dim_limit, std::uint64_t(std::floor(rmax_)) + 1);
        if (dim_limit > 4096)
            throw search_budget_error("search_annihilated: certified dimension bound " +
                                      bounds_text() + " is beyond any feasible node budget");

        std::vector<IntMatrix> found;
        collect_scalar_solutions(roots, found);
        for (std::size_t k = 2; k <= dim_limit; ++k) run_dimension(k, found);
        return found;
    }

private:
    std::string bounds_text() const {
        return "(dim_bound=" + std::to_string(bounds_.dim_bound) +
               ", entry_bound=" + std::to_string(bounds_.entry_bound) +
               ", root_radius=" + std::to_string(bounds_.root_radius) + ")";
    }

    void spend_node() {
        if (++nodes_ > opts_.node_budget)
            throw search_budget_error("search_annihilated: node budget " +
                                      std::to_string(opts_.node_budget) +
                                      " exceeded within bounds " + bounds_text());
    }

    // Dimension 1: positive integer roots of f, read off the root list and
    // confirmed exactly.
    void collect_scalar_solutions(const std::vector<std::complex<double>>& roots,
                                  std::vector<IntMatrix>& found) {
        std::set<std::int64_t> candidates;
        for (const auto& z : roots) {
            if (std::abs(z.imag()) > 1e-8 * std::max(1.0, std::abs(z))) continue;
            const double x = z.real();
            for (std::int64_t m = std::int64_t(std::llround(x)) - 1;
                 m <= std::int64_t(std::llround(x)) + 1; ++m)
                if (m >= 1) candidates.insert(m);
        }
        for (std::int64_t m : candidates) {
            spend_node();
            if (opts_.entry_cap && m > *opts_.entry_cap) continue;
            if (std::uint64_t(m) > bounds_.entry_bound) continue;
            if (poly_eval_exact(f_.coeffs, m) == 0) found.push_back(IntMatrix(1, {m}));
        }
    }

    void run_dimension(std::size_t k, std::vector<IntMatrix>& found) {
        k_ = k;
        const std::size_t d = f_.degree();

        double cell_cap_real = std::pow(rmax_, double(d));
        cell_cap_real = std::min(cell_cap_real, std::pow(bounds_.root_radius + 1e-9, double(k)) + 1.0);
        std::int64_t cell_cap = std::int64_t(std::floor(cell_cap_real + 1e-6));
        if (opts_.entry_cap) cell_cap = std::min(cell_cap, *opts_.entry_cap);
        if (cell_cap > (std::int64_t(1) << 20))
            throw search_budget_error("search_annihilated: entry domain " +
                                      std::to_string(cell_cap) + " within bounds " + bounds_text() +
                                      " is beyond any feasible node budget");
        if (cell_cap < 1) return; // positive entries are impossible, and k >= 2 needs some
        diag_cap_ = std::min<std::int64_t>(cell_cap, std::int64_t(std::floor(rmax_ + 1e-6)));
        off_cap_ = cell_cap;
        off_min_ = (d == 2) ? 1 : 0;
        two_cycle_cap_ = std::int64_t(std::floor(rmax_ * rmax_ + 1e-6));

        quadratic_ = (d == 2);
        if (quadratic_) {
            a2_ = f_.coeffs[2];
            a1_ = f_.coeffs[1];
            a0_ = f_.coeffs[0];
        }

        fill_order_.clear();
        for (std::size_t m = 0; m < k; ++m) {
            fill_order_.emplace_back(m, m);
            for (std::size_t i = 0; i < m; ++i) {
                fill_order_.emplace_back(i, m);
                fill_order_.emplace_back(m, i);
            }
        }
        grid_.assign(k * k, 0);
        assigned_.assign(k * k, 0);
        partial_sq_.assign(k * k, 0);
        target_.assign(k * k, -1);
        dfs(0, found);
    }

    std::int64_t& cell(std::size_t i, std::size_t j) { return grid_[i * k_ + j]; }

    // Target value of (A^2)_{ij} forced by the quadratic; nullopt prunes.
    std::optional<std::int64_t> quad_target(std::size_t i, std::size_t j, std::int64_t value) const {
        __int128 num = -__int128(a1_) * value;
        if (i == j) num -= a0_;
        if (num % a2_ != 0) return std::nullopt;
        const __int128 t = num / a2_;
        if (t < 0 || t > (__int128(1) << 62)) return std::nullopt;
        return std::int64_t(t);
    }

    bool row_sum_prune() const {
        // min over rows of the current partial row sum is a lower bound for
        // the completed matrix's min row sum, which is at most the Perron value.
        double min_sum = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < k_; ++j) s += double(grid_[i * k_ + j]);
            if (off_min_ == 1) {
                for (std::size_t j = 0; j < k_; ++j)
                    if (!assigned_[i * k_ + j] && i != j) s += 1.0;
            }
            min_sum = std::min(min_sum, s);
        }
        return min_sum > rmax_ + 1e-6;
    }

    bool collatz_wielandt_prune(std::size_t filled_rows) const {
        const std::size_t m = filled_rows;
        if (m < 2) return false;
        std::vector<double> x(m, 1.0), y(m, 0.0);
        for (int iter = 0; iter < 20; ++iter) {
            double norm = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                double acc = x[i];
                for (std::size_t j = 0; j < m; ++j)
                    acc += double(grid_[i * k_ + j]) * x[j];
                y[i] = acc;
                norm = std::max(norm, acc);
            }
            for (std::size_t i = 0; i < m; ++i) x[i] = y[i] / norm;
        }
        double lb = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            double acc = x[i];
            for (std::size_t j = 0; j < m; ++j) acc += double(grid_[i * k_ + j]) * x[j];
            lb = std::min(lb, acc / x[i]);
        }
        return lb - 1.0 > rmax_ + 1e-6;
    }

    // Add (or remove) the inner-product contributions of cell (r,c) = value
    // against already assigned partners; false reports a violated target.
    bool apply_products(std::size_t r, std::size_t c, std::int64_t value, std::int64_t sign) {
        bool ok = true;
        for (std::size_t j = 0; j < k_; ++j) {
            if (!assigned_[c * k_ + j]) continue;
            auto& s = partial_sq_[r * k_ + j];
            s += sign * value * grid_[c * k_ + j];
            if (quadratic_ && assigned_[r * k_ + j] && s > target_[r * k_ + j]) ok = false;
        }
        for (std::size_t i = 0; i < k_; ++i) {
            if (!assigned_[i * k_ + r]) continue;
            if (i == r && c == r) continue; // diagonal self-product already counted
            auto& s = partial_sq_[i * k_ + c];
            s += sign * grid_[i * k_ + r] * value;
            if (quadratic_ && assigned_[i * k_ + c] && s > target_[i * k_ + c]) ok = false;
        }
        return ok;
    }

    bool accept(const IntMatrix& a) const {
        if (f_.degree() >= 3) {
            // Some power (A^t)_{t<d} is positive cellwise for irreducible
            // solutions, so the digraph diameter is at most d-1.
            const std::size_t k = a.dim();
            for (std::size_t s = 0; s < k; ++s) {
                std::vector<int> dist(k, -1);
                std::queue<std::size_t> q;
                dist[s] = 0;
                q.push(s);
                while (!q.empty()) {
                    const std::size_t u = q.front();
                    q.pop();
                    for (std::size_t v = 0; v < k; ++v)
                        if (a.at(u, v) > 0 && dist[v] < 0) {
                            dist[v] = dist[u] + 1;
                            q.push(v);
                        }
                }
                for (std::size_t v = 0; v < k; ++v)
                    if (dist[v] < 0 || dist[v] > int(f_.degree()) - 1) return false;
            }
        }
        return is_irreducible(a) && annihilates(f_, a);
    }

    void dfs(std::size_t pos, std::vector<IntMatrix>& found) {
        if (pos == fill_order_.size()) {
            IntMatrix a(k_, grid_);
            if (accept(a)) found.push_back(std::move(a));
            return;
        }
        const auto [i, j] = fill_order_[pos];
        const bool diagonal = (i == j);
        const std::int64_t lo = diagonal ? 0 : off_min_;
        const std::int64_t hi = diagonal ? diag_cap_ : off_cap_;
        for (std::int64_t value = lo; value <= hi; ++value) {
            spend_node();
            if (!diagonal && assigned_[j * k_ + i] &&
                value * grid_[j * k_ + i] > two_cycle_cap_)
                break; // opposite product only grows with value
            if (quadratic_) {
                const auto t = quad_target(i, j, value);
                if (!t) continue;
                target_[i * k_ + j] = *t;
                if (partial_sq_[i * k_ + j] > *t) {
                    target_[i * k_ + j] = -1;
                    continue;
                }
            }
            cell(i, j) = value;
            assigned_[i * k_ + j] = 1;
            const bool products_ok = apply_products(i, j, value, +1);
            bool prune = !products_ok || row_sum_prune();
            if (!prune && diagonal && i >= 1) prune = collatz_wielandt_prune(i);
            if (!prune) dfs(pos + 1, found);
            apply_products(i, j, value, -1);
            assigned_[i * k_ + j] = 0;
            cell(i, j) = 0;
            if (quadratic_) target_[i * k_ + j] = -1;
        }
    }

    const IntPolynomial& f_;
    SearchOptions opts_;
    SearchBounds bounds_;
    double rmax_ = 0.0;
    std::uint64_t nodes_ = 0;

    std::size_t k_ = 0;
    std::int64_t diag_cap_ = 0, off_cap_ = 0, off_min_ = 0, two_cycle_cap_ = 0;
    bool quadratic_ = false;
    std::int64_t a2_ = 0, a1_ = 0, a0_ = 0;
    std::vector<std::pair<std::size_t, std::size_t>> fill_order_;
    std::vector<std::int64_t> grid_;
    std::vector<char> assigned_;
    std::vector<std::int64_t> partial_sq_;
    std::vector<std::int64_t> target_;
};

} // namespace detail

/// All irreducible non-negative integer matrices with f(A) = 0, up to the
/// certified dimension bound (optionally tightened by caps). Deterministic
/// output order: ascending dimension, then DFS discovery order.
inline std::vector<IntMatrix> search_annihilated(const IntPolynomial& f,
                                                 const SearchOptions& opts = {}) {
    if (f.degree() < 1)
        throw std::invalid_argument("search_annihilated: degree must be >= 1");
    detail::AnnihilatedSearch search(f, opts);
    return search.run();
}

/// Independent oracle for enumerate_Kn, built without the word bijection:
/// DFS over strictly positive matrices with diagonal <= n, off-diagonal
/// <= floor(n^2/4) (the two diagonal terms of a rank-1 positive solution sum
/// to <= n, and v_i w_j <= (v_i w_i)(v_j w_j)), rows forced proportional to
/// row 0, running trace <= n, and exact A^2 = nA plus irreducibility at the
/// end. Output sorted into enumerate_Kn's order via the recovered words.
inline std::vector<IntMatrix> brute_force_Kn(std::uint64_t n, std::uint64_t cap = 5) {
    if (n == 0) throw std::invalid_argument("brute_force_Kn: n must be >= 1");
    if (n > cap)
        throw enumeration_cap_error("brute_force_Kn: n = " + std::to_string(n) +
                                    " exceeds oracle cap " + std::to_string(cap));
    const std::int64_t nn = static_cast<std::int64_t>(n);
    const std::int64_t off_cap = nn * nn / 4;
    std::vector<IntMatrix> found;

    for (std::size_t k = 1; k <= n; ++k) {
        if (k >= 2 && off_cap == 0) break;
        std::vector<std::int64_t> grid(k * k, 0);

        auto accept = [&]() {
            IntMatrix a(k, grid);
            bool square_ok = true;
            for (std::size_t i = 0; square_ok && i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) {
                    std::int64_t acc = 0;
                    for (std::size_t l = 0; l < k; ++l) acc += grid[i * k + l] * grid[l * k + j];
                    if (acc != nn * grid[i * k + j]) {
                        square_ok = false;
                        break;
                    }
                }
            if (square_ok && is_irreducible(a)) found.push_back(std::move(a));
        };

        // Later rows are forced by row proportionality: A_i0 * A_0j must be
        // divisible by A_00 with quotient within the entry bounds.
        auto fill_rows = [&](auto&& self, std::size_t i, std::int64_t trace_so_far) -> void {
            if (i == k) {
                accept();
                return;
            }
            for (std::int64_t ai0 = 1; ai0 <= off_cap; ++ai0) {
                bool ok = true;
                std::int64_t diag = 0;
                for (std::size_t j = 0; j < k && ok; ++j) {
                    const std::int64_t num = ai0 * grid[j];
                    if (num % grid[0] != 0) {
                        ok = false;
                        break;
                    }
                    const std::int64_t e = num / grid[0];
                    const std::int64_t bound = (j == i) ? nn : off_cap;
                    if (e < 1 || e > bound) {
                        ok = false;
                        break;
                    }
                    grid[i * k + j] = e;
                    if (j == i) diag = e;
                }
                if (ok) {
                    const std::int64_t trace = trace_so_far + diag;
                    const std::int64_t remaining = std::int64_t(k) - std::int64_t(i) - 1;
                    if (trace + remaining <= nn) self(self, i + 1, trace);
                }
            }
            for (std::size_t j = 0; j < k; ++j) grid[i * k + j] = 0;
        };

        auto fill_row0 = [&](auto&& self, std::size_t j) -> void {
            if (j == k) {
                const std::int64_t remaining = std::int64_t(k) - 1;
                if (grid[0] + remaining <= nn) fill_rows(fill_rows, 1, grid[0]);
                return;
            }
            const std::int64_t hi = (j == 0) ? nn : off_cap;
            for (std::int64_t v = 1; v <= hi; ++v) {
                grid[j] = v;
                self(self, j + 1);
            }
            grid[j] = 0;
        };

        fill_row0(fill_row0, 0);
    }

    // enumerate_Kn's order is the composition order of the recovered words.
    std::sort(found.begin(), found.end(), [](const IntMatrix& x, const IntMatrix& y) {
        auto key = [](const IntMatrix& m) {
            std::vector<std::int64_t> flat;
            if (auto f = rank1_factor(m)) {
                for (std::size_t i = 0; i < m.dim(); ++i) {
                    flat.push_back(f->first[i]);
                    flat.push_back(f->second[i]);
                }
            }
            return flat;
        };
        const auto kx = key(x), ky = key(y);
        if (kx != ky) return kx < ky;
        return matrix_less(x, y);
    });
    return found;
}

} // namespace qimat::matrices
