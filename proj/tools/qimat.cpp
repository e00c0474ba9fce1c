// qimat: exact tables, enumerations, searches, and asymptotic reports for
// irreducible non-negative integer matrices with A^2 = nA (and general
// annihilating polynomials), via their generalized-word bijections.

#include <cinttypes>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qimat/asymptotics.hpp"
#include "qimat/errors.hpp"
#include "qimat/formats.hpp"
#include "qimat/genwords.hpp"
#include "qimat/matrices.hpp"
#include "qimat/numtheory.hpp"
#include "qimat/verify.hpp"

namespace {

using qimat::genwords::CountKind;
using qimat::genwords::CountTable;

CountKind parse_kind(const std::string& kind) {
    if (kind == "c") return CountKind::C;
    if (kind == "d") return CountKind::D;
    if (kind == "p") return CountKind::P;
    if (kind == "q") return CountKind::Q;
    throw CLI::ValidationError("--kind", "must be one of c, d, p, q");
}

CountTable build_table(CountKind kind, std::uint64_t limit) {
    const qimat::numtheory::SieveTables sieves = qimat::numtheory::build_sieves(limit);
    switch (kind) {
        case CountKind::C: return qimat::genwords::count_c(limit, sieves);
        case CountKind::P: return qimat::genwords::count_p(limit, sieves);
        case CountKind::D:
            return qimat::genwords::mobius_invert(qimat::genwords::count_c(limit, sieves), sieves);
        case CountKind::Q:
            return qimat::genwords::mobius_invert(qimat::genwords::count_p(limit, sieves), sieves);
    }
    throw std::logic_error("build_table: bad kind");
}

std::string format_double(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::string(buf);
}

int run_seq(const std::string& kind_name, std::uint64_t max, const std::string& format) {
    const CountTable table = build_table(parse_kind(kind_name), max);
    if (format == "bfile") std::cout << qimat::formats::to_bfile(table);
    else if (format == "json") std::cout << qimat::formats::to_json(table).dump() << '\n';
    else std::cout << qimat::formats::to_table_text(table);
    return 0;
}

int run_enumerate(std::uint64_t n, const std::string& variant, const std::string& format,
                  std::uint64_t cap) {
    namespace gw = qimat::genwords;
    namespace mx = qimat::matrices;

    std::vector<gw::GenWord> words;
    std::vector<mx::IntMatrix> mats;
    const bool matrix_variant = (variant == "K" || variant == "Kbar");
    if (variant == "K") mats = mx::enumerate_Kn(n, cap);
    else if (variant == "Kbar") mats = mx::enumerate_Kn_bar(n, cap);
    else if (variant == "comps") words = gw::enumerate_compositions(n, cap);
    else words = gw::enumerate_partitions(n, cap);
    const std::size_t count = matrix_variant ? mats.size() : words.size();

    if (format == "json") {
        nlohmann::json items = nlohmann::json::array();
        if (matrix_variant)
            for (const auto& a : mats) items.push_back(qimat::formats::matrix_to_json(a));
        else
            for (const auto& u : words) items.push_back(qimat::formats::word_to_json(u));
        const nlohmann::json out = {
            {"n", n}, {"variant", variant}, {"items", items}, {"count", count}};
        std::cout << out.dump() << '\n';
    } else {
        if (matrix_variant)
            for (const auto& a : mats) std::cout << qimat::formats::matrix_to_text(a) << '\n';
        else
            for (const auto& u : words) std::cout << qimat::formats::word_to_text(u) << '\n';
        std::cout << "count=" << count << '\n';
    }
    return 0;
}

int run_verify(std::uint64_t n_max, bool inject_fault) {
    const std::vector<qimat::verify::CheckResult> checks =
        qimat::verify::run_all(n_max, inject_fault);
    bool all_passed = true;
    nlohmann::json items = nlohmann::json::array();
    for (const auto& check : checks) {
        all_passed = all_passed && check.passed;
        items.push_back(
            {{"name", check.name}, {"passed", check.passed}, {"detail", check.detail}});
    }
    const nlohmann::json report = {
        {"n_max", n_max}, {"checks", items}, {"all_passed", all_passed}};
    std::cout << report.dump(2) << '\n';
    return all_passed ? 0 : 1;
}

int run_search(const std::vector<std::int64_t>& coeffs, std::optional<std::uint64_t> dim_cap,
               std::optional<std::int64_t> entry_cap, std::uint64_t node_budget,
               const std::string& format) {
    namespace mx = qimat::matrices;
    const mx::IntPolynomial f(coeffs);
    if (f.degree() < 1) throw CLI::ValidationError("--poly", "degree must be >= 1");
    const mx::SearchBounds bounds = mx::compute_search_bounds(f);
    mx::SearchOptions opts;
    opts.dim_cap = dim_cap;
    opts.entry_cap = entry_cap;
    opts.node_budget = node_budget;
    const std::vector<mx::IntMatrix> found = mx::search_annihilated(f, opts);

    if (format == "json") {
        nlohmann::json items = nlohmann::json::array();
        for (const auto& a : found) items.push_back(qimat::formats::matrix_to_json(a));
        const nlohmann::json out = {{"bounds",
                                     {{"dim_bound", bounds.dim_bound},
                                      {"entry_bound", bounds.entry_bound},
                                      {"root_radius", bounds.root_radius}}},
                                    {"matrices", items},
                                    {"count", found.size()}};
        std::cout << out.dump() << '\n';
    } else {
        std::cout << "dim_bound=" << bounds.dim_bound << " entry_bound=" << bounds.entry_bound
                  << " root_radius=" << format_double(bounds.root_radius) << '\n';
        for (const auto& a : found) std::cout << qimat::formats::matrix_to_text(a) << '\n';
        std::cout << "count=" << found.size() << '\n';
    }
    return 0;
}

int run_asympt(const std::string& target, std::vector<std::uint64_t> ns,
               std::uint64_t exact_limit, double tol) {
    namespace as = qimat::asymptotics;
    if (ns.empty()) throw CLI::ValidationError("--n", "need at least one index");
    for (std::uint64_t n : ns)
        if (n < 1) throw CLI::ValidationError("--n", "indices must be >= 1");

    std::uint64_t exact_top = 0;
    for (std::uint64_t n : ns)
        if (n <= exact_limit) exact_top = std::max(exact_top, n);
    std::optional<CountTable> exact;
    if (exact_top >= 1) exact = build_table(parse_kind(target), exact_top);

    auto exact_cell = [&](std::uint64_t n) -> std::optional<mpz_class> {
        if (!exact || n > exact->limit()) return std::nullopt;
        return exact->at(n);
    };

    if (target == "d") {
        const as::RhoSolution sol = as::find_rho(tol);
        std::cout << "rho=" << format_double(sol.rho)
                  << " amplitude=" << format_double(sol.amplitude)
                  << " growth=" << format_double(sol.growth) << '\n';
        std::cout << "n\texact\testimate\tratio\n";
        for (std::uint64_t n : ns) {
            const double log_est = as::log_estimate_d(n, sol);
            const auto ex = exact_cell(n);
            std::cout << n << '\t' << (ex ? ex->get_str() : std::string("-")) << '\t'
                      << as::LogNumber{log_est}.to_string() << '\t'
                      << (ex ? format_double(std::exp(log_est - qimat::genwords::log_mpz(*ex)))
                             : std::string("-"))
                      << '\n';
        }
        return 0;
    }

    qimat::numtheory::SieveBank bank;
    std::cout << "n\tomega\texact\testimate\tratio\n";
    for (std::uint64_t n : ns) {
        const as::SaddleSolution saddle = as::solve_saddle(n, tol, bank);
        const as::LogNumber est =
            (target == "q") ? as::estimate_q(saddle) : as::estimate_p(saddle);
        const auto ex = exact_cell(n);
        std::cout << n << '\t' << format_double(saddle.omega) << '\t'
                  << (ex ? ex->get_str() : std::string("-")) << '\t' << est.to_string() << '\t'
                  << (ex ? format_double(
                               std::exp(est.log_value - qimat::genwords::log_mpz(*ex)))
                         : std::string("-"))
                  << '\n';
    }
    return 0;
}

int run_oeis_check(const std::string& kind_name, const std::string& path,
                   std::uint64_t max_terms) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "oeis-check: cannot read " << path << '\n';
        return 2;
    }
    std::vector<qimat::formats::BfileEntry> entries;
    try {
        entries = qimat::formats::parse_bfile(in);
    } catch (const std::exception& e) {
        std::cerr << "oeis-check: " << path << ": " << e.what() << '\n';
        return 2;
    }

    std::uint64_t file_top = 0;
    for (const auto& entry : entries) file_top = std::max(file_top, entry.index);
    const std::uint64_t limit = std::min(file_top, max_terms);
    if (limit < 1) {
        std::cerr << "oeis-check: no overlapping indices (file holds none in 1.."
                  << max_terms << ")\n";
        return 2;
    }
    const CountTable table = build_table(parse_kind(kind_name), limit);

    std::uint64_t compared = 0;
    for (const auto& entry : entries) {
        if (entry.index < 1 || entry.index > limit) continue;
        ++compared;
        if (table.at(entry.index) != entry.value) {
            std::cout << "mismatch at n=" << entry.index << ": file has "
                      << entry.value.get_str() << ", computed "
                      << table.at(entry.index).get_str() << '\n';
            return 1;
        }
    }
    std::cout << "ok: " << compared << " indices agree (kind " << kind_name << ", n <= "
              << limit << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and asymptotic toolkit for irreducible matrix solutions of "
                 "polynomial equations f(A) = 0 and their generalized-word counts"};
    app.require_subcommand(1);
    int rc = 0;

    // seq
    auto* seq = app.add_subcommand("seq", "Print a counting-sequence table (c, d, p, or q)");
    std::string seq_kind, seq_format = "table";
    std::uint64_t seq_max = 0;
    seq->add_option("--kind", seq_kind, "sequence kind")
        ->required()
        ->check(CLI::IsMember({"c", "d", "p", "q"}));
    seq->add_option("--max", seq_max, "largest index n")->required()->check(CLI::PositiveNumber);
    seq->add_option("--format", seq_format, "output format")
        ->check(CLI::IsMember({"table", "json", "bfile"}));
    seq->callback([&] { rc = run_seq(seq_kind, seq_max, seq_format); });

    // enumerate
    auto* enumerate = app.add_subcommand(
        "enumerate", "List generalized words of weight n, or the matrices they map to");
    std::uint64_t enum_n = 0, enum_cap = qimat::genwords::kDefaultEnumerationCap;
    std::string enum_variant, enum_format = "table";
    enumerate->add_option("--n", enum_n, "weight")->required()->check(CLI::PositiveNumber);
    enumerate->add_option("--variant", enum_variant,
                          "K (gcd-1 composition matrices), Kbar (class representatives), "
                          "comps, parts")
        ->required()
        ->check(CLI::IsMember({"K", "Kbar", "comps", "parts"}));
    enumerate->add_option("--format", enum_format, "output format")
        ->check(CLI::IsMember({"table", "json"}));
    enumerate->add_option("--cap", enum_cap, "enumeration cap on n");
    enumerate->callback([&] { rc = run_enumerate(enum_n, enum_variant, enum_format, enum_cap); });

    // verify
    auto* verify = app.add_subcommand("verify", "Run the cross-module verification suite");
    std::uint64_t verify_n_max = 0;
    bool verify_inject = false;
    verify->add_option("--n-max", verify_n_max, "largest n exercised")
        ->required()
        ->check(CLI::PositiveNumber);
    verify->add_flag("--inject-fault", verify_inject,
                     "flip one table entry before checking (test hook; must fail)");
    verify->callback([&] { rc = run_verify(verify_n_max, verify_inject); });

    // search
    auto* search = app.add_subcommand(
        "search", "Exhaustively find irreducible non-negative integer A with f(A) = 0");
    std::vector<std::int64_t> search_coeffs;
    std::optional<std::uint64_t> search_dim_cap;
    std::optional<std::int64_t> search_entry_cap;
    std::uint64_t search_budget = qimat::matrices::SearchOptions{}.node_budget;
    std::string search_format = "table";
    search->add_option("--poly", search_coeffs,
                       "comma-separated coefficients, constant first (a0,a1,...,ad)")
        ->required()
        ->delimiter(',');
    search->add_option("--dim-bound", search_dim_cap, "override: max dimension");
    search->add_option("--entry-bound", search_entry_cap, "override: max entry");
    search->add_option("--node-budget", search_budget, "DFS node budget");
    search->add_option("--format", search_format, "output format")
        ->check(CLI::IsMember({"table", "json"}));
    search->callback([&] {
        rc = run_search(search_coeffs, search_dim_cap, search_entry_cap, search_budget,
                        search_format);
    });

    // asympt
    auto* asympt = app.add_subcommand(
        "asympt", "Compare exact table values against the asymptotic estimates");
    std::string asympt_target;
    std::vector<std::uint64_t> asympt_ns;
    std::uint64_t asympt_exact_limit = 2000;
    double asympt_tol = qimat::asymptotics::kDefaultTol;
    asympt->add_option("--target", asympt_target, "sequence to estimate")
        ->required()
        ->check(CLI::IsMember({"d", "p", "q"}));
    asympt->add_option("--n", asympt_ns, "comma-separated indices")->required()->delimiter(',');
    asympt->add_option("--exact-limit", asympt_exact_limit,
                       "largest n for which the exact table is computed");
    asympt->add_option("--tol", asympt_tol, "solver tolerance");
    asympt->callback(
        [&] { rc = run_asympt(asympt_target, asympt_ns, asympt_exact_limit, asympt_tol); });

    // oeis-check
    auto* oeis = app.add_subcommand(
        "oeis-check", "Compare a computed table against a locally saved OEIS b-file");
    std::string oeis_kind, oeis_path;
    std::uint64_t oeis_max_terms = 1000;
    oeis->add_option("--kind", oeis_kind, "sequence kind")
        ->required()
        ->check(CLI::IsMember({"c", "d", "p", "q"}));
    oeis->add_option("--bfile", oeis_path, "path to the b-file")->required();
    oeis->add_option("--max-terms", oeis_max_terms, "compare at most this many indices");
    oeis->callback([&] { rc = run_oeis_check(oeis_kind, oeis_path, oeis_max_terms); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        app.exit(e);
        return 2;
    } catch (const qimat::search_budget_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const qimat::enumeration_cap_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return rc;
}
