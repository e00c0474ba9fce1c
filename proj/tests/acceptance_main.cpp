// Acceptance gate: one line per criterion, [PASS]/[FAIL] plus the measured
// numbers. Exits nonzero if any criterion fails. Tolerances are pinned here
// and must not be loosened to chase a green run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include "qimat/asymptotics.hpp"
#include "qimat/genwords.hpp"
#include "qimat/matrices.hpp"
#include "qimat/numtheory.hpp"

namespace {

using HP = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<90>>;
namespace gw = qimat::genwords;
namespace mx = qimat::matrices;
namespace as = qimat::asymptotics;
namespace nt = qimat::numtheory;

bool g_all_ok = true;

std::string strf(const char* fmt, ...) {
    char buf[1024];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return std::string(buf);
}

void report(int id, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    g_all_ok = g_all_ok && pass;
}

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

std::vector<mx::IntMatrix> sorted_mats(std::vector<mx::IntMatrix> ms) {
    std::sort(ms.begin(), ms.end(), mx::matrix_less);
    return ms;
}

// ---- criterion 7 support: both S_m routes recomputed at 90 decimal digits.
// The residue expansion is complete, so the true gap at omega = 5..40 sits
// between 1e-20 and 1e-45 -- far below double rounding. Certifying the
// corrected terms therefore needs extended precision; doubles would only
// compare noise. Constants come from independent sources: pi and gamma from
// the boost.math tables, zeta'(2) by central difference of boost's zeta.

HP hp_s_series(int m, int omega, const nt::SieveTables& sieves) {
    const HP x = exp(HP(-1) / omega);
    HP xk = 1, acc = 0;
    const HP cut("1e-70");
    for (std::uint64_t k = 1; k <= sieves.limit(); ++k) {
        xk *= x;
        HP term = HP(sieves.divisor_weight(k)) * xk;
        if (m == -1) term /= k;
        else if (m == 1) term *= k;
        acc += term;
        if (k > std::uint64_t(150) * std::uint64_t(omega) && term < acc * cut) return acc;
    }
    std::fprintf(stderr, "hp_s_series: sieve exhausted before convergence\n");
    std::exit(3);
}

HP hp_zeta_prime_2() {
    const HP h("1e-30");
    return (boost::math::zeta(HP(2) + h) - boost::math::zeta(HP(2) - h)) / (2 * h);
}

HP hp_s_expansion(int m, int omega, const HP& pi, const HP& gamma, const HP& zp2) {
    const HP w(omega);
    const HP zeta2 = pi * pi / 6;
    const HP core = log(w) + gamma + zp2 / zeta2;
    if (m == -1) return zeta2 * w * core + log(w) / 4 + log(2 * pi) / 2 + HP(1) / (288 * w);
    if (m == 0) return zeta2 * w * w * (core + 1) + w / 4 - HP(1) / 288;
    return 2 * (zeta2 * w * w * w * (core + HP(3) / 2) + w * w / 8);
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QIMAT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

int main() {
    // Shared exact tables; their build time is budgeted under criterion 6.
    const Timer t_tables;
    const nt::SieveTables sieves(1024);
    const gw::CountTable c = gw::count_c(1000, sieves);
    const gw::CountTable p = gw::count_p(1000, sieves);
    const double tables_ms = t_tables.ms();

    // 1: rho, amplitude, growth against the published digits, under 1 s.
    as::RhoSolution rho_sol;
    {
        const Timer t;
        rho_sol = as::find_rho(1e-10);
        const double ms = t.ms();
        const bool pass = std::fabs(rho_sol.rho - 0.406148005001) < 5e-10 &&
                          std::fabs(rho_sol.amplitude - 0.481225) < 1e-5 &&
                          std::fabs(rho_sol.growth - 2.462156) < 1e-5 && ms < 1000.0;
        report(1, pass,
               strf("rho=%.15f amplitude=%.11f growth=%.11f in %.1f ms", rho_sol.rho,
                    rho_sol.amplitude, rho_sol.growth, ms));
    }

    // 2: brute-force oracle equals the bijection image for n = 1..5.
    {
        bool equal = true;
        double ms4 = 0.0, ms5 = 0.0;
        for (std::uint64_t n = 1; n <= 5; ++n) {
            const Timer t;
            const auto brute = mx::brute_force_Kn(n);
            const double ms = t.ms();
            if (n == 4) ms4 = ms;
            if (n == 5) ms5 = ms;
            equal = equal && sorted_mats(brute) == sorted_mats(mx::enumerate_Kn(n));
        }
        const bool pass = equal && ms4 < 300000.0;
        report(2, pass,
               strf("brute force equals enumerate for n=1..5 (n=4 in %.1f ms, n=5 in %.1f ms)",
                    ms4, ms5));
    }

    // 3: word counts against the c, d, p, q tables for n <= 14, with the
    // hand-derived anchors asserted literally.
    {
        const gw::CountTable d = gw::mobius_invert(c, sieves);
        const gw::CountTable q = gw::mobius_invert(p, sieves);
        bool pass = true;
        for (std::uint64_t n = 1; n <= 14 && pass; ++n) {
            const auto comps = gw::enumerate_compositions(n);
            const auto parts = gw::enumerate_partitions(n);
            pass = c.at(n) == (unsigned long)comps.size() &&
                   p.at(n) == (unsigned long)parts.size() &&
                   d.at(n) == (unsigned long)gw::filter_gcd_one(comps).size() &&
                   q.at(n) == (unsigned long)gw::filter_gcd_one(parts).size();
        }
        const unsigned long c_anchor[] = {1, 3, 7, 18}, d_anchor[] = {1, 2, 6, 15},
                            p_anchor[] = {1, 3, 5, 11}, q_anchor[] = {1, 2, 4, 8};
        for (std::uint64_t n = 1; n <= 4; ++n)
            pass = pass && c.at(n) == c_anchor[n - 1] && d.at(n) == d_anchor[n - 1] &&
                   p.at(n) == p_anchor[n - 1] && q.at(n) == q_anchor[n - 1];
        report(3, pass,
               strf("enumeration counts match tables for n<=14 "
                    "(c14=%s d14=%s p14=%s q14=%s)",
                    c.at(14).get_str().c_str(), d.at(14).get_str().c_str(),
                    p.at(14).get_str().c_str(), q.at(14).get_str().c_str()));
    }

    // 4: Moebius roundtrip identity at N = 1000 under 10 s. The inverted
    // tables are reused below.
    const Timer t_roundtrip;
    const gw::CountTable d = gw::mobius_invert(c, sieves);
    const gw::CountTable q = gw::mobius_invert(p, sieves);
    {
        const bool identity = gw::divisor_resum(d) == c && gw::divisor_resum(q) == p;
        const double ms = t_roundtrip.ms();
        report(4, identity && ms < 10000.0,
               strf("divisor_resum(mobius_invert(.)) is the identity on C and P at N=1000 "
                    "in %.1f ms",
                    ms));
    }

    // 5: estimate_d within 1e-2 on 50..200 and strictly better at 200.
    {
        double max_dev = 0.0, dev50 = 0.0, dev200 = 0.0;
        for (std::uint64_t n = 50; n <= 200; ++n) {
            const double dev =
                std::fabs(std::exp(as::log_estimate_d(n, rho_sol) - gw::log_mpz(d.at(n))) - 1.0);
            max_dev = std::max(max_dev, dev);
            if (n == 50) dev50 = dev;
            if (n == 200) dev200 = dev;
        }
        const bool pass = max_dev <= 1e-2 && dev200 < dev50;
        report(5, pass,
               strf("estimate_d deviation: max=%.3e over 50..200, dev(50)=%.3e, dev(200)=%.3e",
                    max_dev, dev50, dev200));
    }

    // 6: p/q asymptotics. (a) ratio deviation strictly decreasing over
    // {100,200,400,800}; (b) log p_n against pi*sqrt(n log n / 3) within 15%
    // at n=1000 and closer than at n=100; (c) q/p within 1e-6 at 800; exact
    // tables to 1000 under 60 s.
    {
        nt::SieveBank bank;
        double devs[4] = {0, 0, 0, 0};
        const std::uint64_t ns[4] = {100, 200, 400, 800};
        for (int i = 0; i < 4; ++i) {
            const as::LogNumber est = as::estimate_p(ns[i], bank, 1e-10);
            devs[i] = std::fabs(std::exp(est.log_value - gw::log_mpz(p.at(ns[i]))) - 1.0);
        }
        const bool a_pass = devs[1] < devs[0] && devs[2] < devs[1] && devs[3] < devs[2];

        auto hr_ratio = [&](std::uint64_t n) {
            return gw::log_mpz(p.at(n)) /
                   (std::numbers::pi * std::sqrt(double(n) * std::log(double(n)) / 3.0));
        };
        const double r100 = hr_ratio(100), r1000 = hr_ratio(1000);
        const bool b_pass = std::fabs(r1000 - 1.0) <= 0.15 &&
                            std::fabs(r1000 - 1.0) < std::fabs(r100 - 1.0);

        const double qp_dev =
            std::fabs(std::exp(gw::log_mpz(q.at(800)) - gw::log_mpz(p.at(800))) - 1.0);
        const bool c_pass = qp_dev <= 1e-6;

        const bool time_pass = tables_ms < 60000.0;
        report(6, a_pass && b_pass && c_pass && time_pass,
               strf("(a) p-ratio devs %.4f > %.4f > %.4f > %.4f %s; "
                    "(b) log-ratio %.5f at n=1000 vs %.5f at n=100, |1-r|=%.5f needs <=0.15 %s; "
                    "(c) |q/p-1|=%.1e at n=800 %s; tables in %.0f ms",
                    devs[0], devs[1], devs[2], devs[3], a_pass ? "ok" : "NOT DECREASING",
                    r1000, r100, std::fabs(r1000 - 1.0), b_pass ? "ok" : "OUT OF TOLERANCE",
                    qp_dev, c_pass ? "ok" : "too large", tables_ms));
    }

    // 7: certify the S_m expansion terms: relative gap to the series at 90
    // digits must fall below 1e-5 at omega=40 and decrease strictly along
    // omega in {5,10,20,40}; the double routes must match the certified
    // values at omega=5.
    {
        const nt::SieveTables hp_sieves = nt::build_sieves(20000);
        const HP pi_hp = boost::math::constants::pi<HP>();
        const HP gamma_hp = boost::math::constants::euler<HP>();
        const HP zp2_hp = hp_zeta_prime_2();
        nt::SieveBank bank;
        bool pass = std::fabs(double(gamma_hp) - as::euler_gamma()) < 1e-12 &&
                    std::fabs(double(zp2_hp) - as::zeta_prime_2()) < 1e-10;
        std::string gaps_text;
        for (int m : {-1, 0, 1}) {
            double prev_gap = 1.0;
            gaps_text += strf(" m=%+d:", m);
            for (int omega : {5, 10, 20, 40}) {
                const HP ser = hp_s_series(m, omega, hp_sieves);
                const HP expn = hp_s_expansion(m, omega, pi_hp, gamma_hp, zp2_hp);
                const double gap = double(abs(expn - ser) / ser);
                gaps_text += strf(" %.2e", gap);
                pass = pass && gap < prev_gap;
                prev_gap = gap;
                if (omega == 40) pass = pass && gap < 1e-5;
                if (omega == 5) {
                    const double dser = as::S_series(m, 5.0, 1e-12, bank);
                    const double dexp = as::S_expansion(m, 5.0);
                    pass = pass && std::fabs(dser / double(ser) - 1.0) < 1e-10 &&
                           std::fabs(dexp / double(expn) - 1.0) < 1e-10;
                }
            }
        }
        report(7, pass, "expansion-vs-series relative gaps at omega={5,10,20,40}:" + gaps_text);
    }

    // 8: constructive search, exact result sets within the certified bounds.
    {
        bool pass = true;
        std::string times;
        const struct {
            std::vector<std::int64_t> coeffs;
            std::size_t count;
            const char* label;
        } cases[] = {
            {{0, -2, 1}, 2, "X^2-2X"},
            {{0, -3, 1}, 6, "X^2-3X"},
            {{-1, 1}, 1, "X-1"},
            {{1, 0, 1}, 0, "X^2+1"},
        };
        for (const auto& cs : cases) {
            const Timer t;
            const auto found = mx::search_annihilated(mx::IntPolynomial(cs.coeffs));
            const double ms = t.ms();
            pass = pass && found.size() == cs.count && ms < 60000.0;
            times += strf(" %s->%zu (%.1f ms)", cs.label, found.size(), ms);
        }
        const auto one = mx::search_annihilated(mx::IntPolynomial({-1, 1}));
        pass = pass && one == std::vector<mx::IntMatrix>{mx::IntMatrix(1, {1})};
        report(8, pass, "search results:" + times);
    }

    // 9: Kbar representatives pairwise non-equivalent under exhaustive
    // permutation testing, counts equal q_n, for n <= 6.
    {
        bool pass = true;
        std::string counts;
        for (std::uint64_t n = 1; n <= 6; ++n) {
            const auto ms = mx::enumerate_Kn_bar(n);
            pass = pass && q.at(n) == (unsigned long)ms.size();
            for (std::size_t i = 0; i < ms.size() && pass; ++i)
                for (std::size_t j = i + 1; j < ms.size() && pass; ++j)
                    pass = !mx::perm_equivalent_exhaustive(ms[i], ms[j]);
            counts += strf(" %zu", ms.size());
        }
        report(9, pass, "pairwise-distinct class representatives, counts:" + counts);
    }

    // 10: the CLI agrees with the locally saved OEIS b-files.
    {
        const std::string dir = QIMAT_TEST_DATA_DIR;
        const struct {
            const char* kind;
            const char* file;
        } refs[] = {
            {"c", "b129921.txt"},
            {"d", "b280782.txt"},
            {"p", "b006171.txt"},
            {"q", "b280783.txt"},
        };
        bool pass = true;
        std::string codes;
        for (const auto& ref : refs) {
            const int rc =
                run_cli(strf("oeis-check --kind %s --bfile %s/%s", ref.kind, dir.c_str(),
                             ref.file));
            pass = pass && rc == 0;
            codes += strf(" %s:%d", ref.kind, rc);
        }
        report(10, pass, "oeis-check exit codes:" + codes);
    }

    std::printf("%s\n", g_all_ok ? "acceptance: all criteria passed"
                                 : "acceptance: at least one criterion failed");
    return g_all_ok ? 0 : 1;
}
