#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pricelab/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "pricelab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = pricelab::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("pricelab_cli_" + std::to_string(std::rand()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& leaf = {}) const { return (path / leaf).string(); }
};

}  // namespace

TEST_CASE("missing input names the path") {
    const auto r = run({"evaluate", "--input", "/nonexistent/chains.csv"});
    CHECK(r.code != 0);
    CHECK(r.err.find("/nonexistent/chains.csv") != std::string::npos);
    CHECK(run({"frobnicate"}).code != 0);
    CHECK(run({"evaluate", "--labels", "LI,XYZ", "--input", "x.csv"}).code != 0);
}

TEST_CASE("synth, evaluate and report") {
    TempDir dir;
    REQUIRE(run({"synth", "--days", "3", "--output-dir", dir.str("a")}).code == 0);
    REQUIRE(run({"synth", "--days", "3", "--output-dir", dir.str("b")}).code == 0);
    CHECK(slurp(dir.path / "a/chains.csv") == slurp(dir.path / "b/chains.csv"));

    const auto chains = dir.str("a/chains.csv");
    const auto ev = run({"evaluate", "--input", chains, "--labels", "LI,BS,NW", "--partitions",
                         "all,hull", "--output-dir", dir.str("ev")});
    REQUIRE(ev.code == 0);
    CHECK(fs::exists(dir.path / "ev/report_BS_hull.csv"));
    CHECK_FALSE(fs::exists(dir.path / "ev/report_BS_nohull.csv"));

    const auto rep = run({"report", "--input", dir.str("ev"), "--partitions", "all,hull", "--output-dir",
                          dir.str("rep")});
    REQUIRE(rep.code == 0);
    CHECK(rep.out.find("Mean") != std::string::npos);
    CHECK(slurp(dir.path / "rep/summary.txt") == slurp(dir.path / "ev/summary.txt"));

    ::setenv("PRICELAB_SEED", "7", 1);
    const auto seeded = run({"evaluate", "--input", chains, "--labels", "LI", "--output-dir",
                             dir.str("s1"), "--seed", "99"});
    ::unsetenv("PRICELAB_SEED");
    const auto explicit7 = run({"evaluate", "--input", chains, "--labels", "LI", "--output-dir",
                                dir.str("s2"), "--seed", "7"});
    REQUIRE(seeded.code == 0);
    REQUIRE(explicit7.code == 0);
    CHECK(slurp(dir.path / "s1/errors.csv") == slurp(dir.path / "s2/errors.csv"));
}

TEST_CASE("ingest, audit, price and calibrate") {
    TempDir dir;
    REQUIRE(run({"synth", "--days", "2", "--output-dir", dir.str()}).code == 0);
    const auto chains = dir.str("chains.csv");
    const auto ing = run({"ingest", "--input", chains, "--output-dir", dir.str("ing")});
    REQUIRE(ing.code == 0);
    CHECK(slurp(dir.path / "ing/chains.csv").find("implied_vol") != std::string::npos);

    REQUIRE(run({"audit", "--input", chains, "--output-dir", dir.str("aud")}).code == 0);
    CHECK(fs::exists(dir.path / "aud/dividend_curve.csv"));
    CHECK(fs::exists(dir.path / "aud/cross_date.csv"));

    {
        std::ofstream q(dir.path / "queries.csv");
        q << "K,tau\n1300,0.25\n5000,0.25\n";
    }
    const auto pr = run({"price", "--input", chains, "--label", "LI", "--queries",
                         dir.str("queries.csv"), "--output-dir", dir.str("pr")});
    REQUIRE(pr.code == 0);
    const auto prices = slurp(dir.path / "pr/prices.csv");
    CHECK(prices.find("K,tau,price,status") == 0);
    CHECK(prices.find("priced") != std::string::npos);
    CHECK(prices.find("outside_hull") != std::string::npos);

    REQUIRE(run({"synth", "--model", "vg", "--maturities", "30,91", "--strike-lo", "0.95",
                 "--strike-hi", "1.05", "--output-dir", dir.str("vg")})
                .code == 0);
    const auto cal = run({"calibrate-vg", "--input", dir.str("vg/chains.csv"), "--output-dir",
                          dir.str("vg")});
    REQUIRE(cal.code == 0);
    CHECK(slurp(dir.path / "vg/vg_fit.csv").find("theta") != std::string::npos);
}
