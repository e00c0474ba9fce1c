#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, bool merge_stderr = false) {
    const std::string cmd = std::string(QIMAT_CLI_PATH) + " " + args +
                            (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
    const int status = ::pclose(pipe);
    if (WIFEXITED(status)) res.code = WEXITSTATUS(status);
    return res;
}

class TempFile {
  public:
    TempFile(const std::string& tag, const std::string& content) {
        path_ = std::filesystem::temp_directory_path() /
                ("qimat_cli_" + std::to_string(::getpid()) + "_" + tag + ".txt");
        std::ofstream out(path_);
        out << content;
    }
    ~TempFile() { std::filesystem::remove(path_); }
    std::string str() const { return path_.string(); }

  private:
    std::filesystem::path path_;
};

} // namespace

TEST_CASE("seq emits exact bytes per format") {
    const RunResult bfile = run_cli("seq --kind d --max 4 --format bfile");
    CHECK(bfile.code == 0);
    CHECK(bfile.out == "1 1\n2 2\n3 6\n4 15\n");

    const RunResult table = run_cli("seq --kind c --max 4");
    CHECK(table.code == 0);
    CHECK(table.out == "1\t1\n2\t3\n3\t7\n4\t18\n");

    const RunResult json = run_cli("seq --kind p --max 6 --format json");
    CHECK(json.code == 0);
    CHECK(nlohmann::json::parse(json.out) ==
          nlohmann::json({"1", "3", "5", "11", "17", "34"}));
}

TEST_CASE("usage errors exit 2") {
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("seq --kind x --max 4").code == 2);
    CHECK(run_cli("seq --kind c").code == 2);
    CHECK(run_cli("seq --kind c --max 0").code == 2);
    CHECK(run_cli("verify --n-max 0").code == 2);
    CHECK(run_cli("search --poly 5").code == 2); // degree 0
    CHECK(run_cli("asympt --target d --n 0").code == 2);
}

TEST_CASE("help exits 0 and documents coefficient order") {
    const RunResult help = run_cli("--help");
    CHECK(help.code == 0);
    const RunResult search_help = run_cli("search --help");
    CHECK(search_help.code == 0);
    CHECK(search_help.out.find("constant first") != std::string::npos);
}

TEST_CASE("enumerate lists words and matrices") {
    const RunResult words = run_cli("enumerate --n 2 --variant comps");
    CHECK(words.code == 0);
    CHECK(words.out == "1^1 1^1\n1^2\n2^1\ncount=3\n");

    const RunResult mats = run_cli("enumerate --n 2 --variant K");
    CHECK(mats.code == 0);
    CHECK(mats.out == "2\n1 1\n1 1\n\n1\n2\n\ncount=2\n");

    const RunResult json = run_cli("enumerate --n 1 --variant parts --format json");
    CHECK(json.code == 0);
    const nlohmann::json parsed = nlohmann::json::parse(json.out);
    CHECK(parsed["n"] == 1);
    CHECK(parsed["variant"] == "parts");
    CHECK(parsed["count"] == 1);
    CHECK(parsed["items"] == nlohmann::json({{{1, 1}}}));
}

TEST_CASE("enumerate cap exits 3 and is overridable") {
    CHECK(run_cli("enumerate --n 25 --variant comps").code == 3);
    const RunResult ok = run_cli("enumerate --n 21 --variant parts --cap 22");
    CHECK(ok.code == 0);
    CHECK(ok.out.find("count=") != std::string::npos);
}

TEST_CASE("verify reports json and honors fault injection") {
    const RunResult clean = run_cli("verify --n-max 3");
    CHECK(clean.code == 0);
    const nlohmann::json report = nlohmann::json::parse(clean.out);
    CHECK(report["all_passed"] == true);
    CHECK(report["checks"].size() == 6);

    const RunResult faulty = run_cli("verify --n-max 3 --inject-fault");
    CHECK(faulty.code == 1);
    const nlohmann::json bad = nlohmann::json::parse(faulty.out);
    CHECK(bad["all_passed"] == false);
    int failed = 0;
    for (const auto& check : bad["checks"]) {
        if (check["passed"] == false) {
            ++failed;
            CHECK(check["name"] == "mobius_roundtrip_c");
        }
    }
    CHECK(failed == 1);
}

TEST_CASE("search prints bounds and exact results") {
    const RunResult res = run_cli("search --poly 0,-2,1");
    CHECK(res.code == 0);
    CHECK(res.out == "dim_bound=8 entry_bound=257 root_radius=2\n"
                     "1\n2\n\n"
                     "2\n1 1\n1 1\n\n"
                     "count=2\n");

    const RunResult none = run_cli("search --poly 1,0,1");
    CHECK(none.code == 0);
    CHECK(none.out.find("count=0") != std::string::npos);

    const RunResult json = run_cli("search --poly -1,1 --format json");
    CHECK(json.code == 0);
    const nlohmann::json parsed = nlohmann::json::parse(json.out);
    CHECK(parsed["count"] == 1);
    CHECK(parsed["matrices"] == nlohmann::json({{{"1"}}}));
}

TEST_CASE("search budget exhaustion exits 4") {
    CHECK(run_cli("search --poly 0,-3,1 --node-budget 10").code == 4);
}

TEST_CASE("asympt reports solver header and ratio columns") {
    const RunResult d = run_cli("asympt --target d --n 30,60");
    CHECK(d.code == 0);
    CHECK(d.out.find("rho=0.406148005001") == 0);
    CHECK(d.out.find("n\texact\testimate\tratio\n") != std::string::npos);
    CHECK(d.out.find("\n30\t") != std::string::npos);
    CHECK(d.out.find("\n60\t") != std::string::npos);

    const RunResult p = run_cli("asympt --target p --n 100");
    CHECK(p.code == 0);
    CHECK(p.out.find("n\tomega\texact\testimate\tratio\n") == 0);

    // Past --exact-limit the exact and ratio columns degrade to "-".
    const RunResult far = run_cli("asympt --target q --n 50 --exact-limit 10");
    CHECK(far.code == 0);
    CHECK(far.out.find("\t-\t") != std::string::npos);
}

TEST_CASE("oeis-check round-trips seq output") {
    const RunResult seq = run_cli("seq --kind p --max 50 --format bfile");
    REQUIRE(seq.code == 0);
    const TempFile bfile("roundtrip", seq.out);
    const RunResult ok = run_cli("oeis-check --kind p --bfile " + bfile.str());
    CHECK(ok.code == 0);
    CHECK(ok.out == "ok: 50 indices agree (kind p, n <= 50)\n");
}

TEST_CASE("oeis-check tolerates offset-0 files") {
    const TempFile bfile("offset0", "0 1\n1 1\n2 3\n");
    const RunResult res = run_cli("oeis-check --kind c --bfile " + bfile.str());
    CHECK(res.code == 0);
    CHECK(res.out == "ok: 2 indices agree (kind c, n <= 2)\n");
}

TEST_CASE("oeis-check flags mismatches") {
    const TempFile bfile("mismatch", "1 1\n2 2\n3 6\n4 16\n");
    const RunResult res = run_cli("oeis-check --kind d --bfile " + bfile.str());
    CHECK(res.code == 1);
    CHECK(res.out.find("mismatch at n=4") != std::string::npos);
}

TEST_CASE("oeis-check input failures exit 2") {
    const TempFile empty("empty", "");
    CHECK(run_cli("oeis-check --kind c --bfile " + empty.str()).code == 2);

    const TempFile comments("comments", "# nothing here\n");
    CHECK(run_cli("oeis-check --kind c --bfile " + comments.str()).code == 2);

    const TempFile zero_only("zeroonly", "0 1\n");
    const RunResult no_overlap =
        run_cli("oeis-check --kind c --bfile " + zero_only.str(), true);
    CHECK(no_overlap.code == 2);
    CHECK(no_overlap.out.find("no overlapping indices") != std::string::npos);

    CHECK(run_cli("oeis-check --kind c --bfile /nonexistent/path.txt").code == 2);

    const TempFile malformed("malformed", "1 2 3\n");
    CHECK(run_cli("oeis-check --kind c --bfile " + malformed.str()).code == 2);
}

TEST_CASE("oeis-check accepts the saved reference files") {
    const std::string dir = QIMAT_TEST_DATA_DIR;
    const RunResult res =
        run_cli("oeis-check --kind c --bfile " + dir + "/b129921.txt --max-terms 40");
    CHECK(res.code == 0);
    CHECK(res.out == "ok: 40 indices agree (kind c, n <= 40)\n");
}

TEST_CASE("output is deterministic across runs") {
    const std::string seq_cmd = "seq --kind q --max 30 --format json";
    CHECK(run_cli(seq_cmd).out == run_cli(seq_cmd).out);
    const std::string search_cmd = "search --poly 0,-3,1";
    const RunResult a = run_cli(search_cmd), b = run_cli(search_cmd);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
}
