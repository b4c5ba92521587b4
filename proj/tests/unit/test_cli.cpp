#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kBinary = MCCS_LAB_BINARY;

int run(const std::string& args) {
    const std::string cmd = "\"" + kBinary + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("mccs_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path small_config(const fs::path& dir) {
    const auto path = dir / "small.ini";
    std::ofstream(path) << "seed = 5\n"
                           "[scenario]\nyears = 7\n"
                           "[trades]\nlist = EUR1y1y2y, EUR2y1y5y, EUR5y5y10y\n"
                           "[models]\nlist = ridge, mean, naive, zscore-be\n"
                           "[cv]\nrefit_every = 13\nretune_every = 52\n";
    return path;
}

}  // namespace

TEST_CASE("exit codes for usage and configuration errors") {
    const auto dir = scratch("errors");
    CHECK(run("--help") == 0);
    CHECK(run("") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("backtest --models oracle --out " + (dir / "x").string()) == 1);
    CHECK(run("backtest --trades EUR1y --out " + (dir / "x").string()) == 1);
    CHECK(run("synth --config " + (dir / "missing.ini").string()) == 1);
    std::ofstream(dir / "bad.ini") << "[scenario]\nno_such_key = 3\n";
    CHECK(run("synth --config " + (dir / "bad.ini").string()) == 1);
    CHECK(run("report --out " + (dir / "empty").string()) == 2);
}

TEST_CASE("synth, backtest and report produce identical files on rerun") {
    const auto dir = scratch("runs");
    const auto config = small_config(dir);
    const auto a = dir / "a", b = dir / "b";
    REQUIRE(run("synth --config " + config.string() + " --out " + a.string()) == 0);
    CHECK(fs::exists(a / "scenario.csv"));
    REQUIRE(run("backtest --config " + config.string() + " --out " + a.string() + " --threads 1") == 0);
    REQUIRE(run("report --config " + config.string() + " --out " + a.string()) == 0);
    REQUIRE(run("backtest --config " + config.string() + " --out " + b.string() + " --threads 2") == 0);
    REQUIRE(run("report --config " + config.string() + " --out " + b.string()) == 0);

    for (const char* name : {"scenario.csv", "panels.csv", "predictions.csv", "signals.csv", "metrics.csv",
                             "recommendations.csv", "recommendations.svg", "avg_return.svg",
                             "information_ratio.svg", "rank_analysis.csv", "feature_significance.csv",
                             "feature_significance.svg"}) {
        INFO(name);
        REQUIRE(fs::exists(a / name));
        REQUIRE(fs::exists(b / name));
        CHECK(slurp(a / name) == slurp(b / name));
    }
    CHECK(slurp(a / "metrics.csv").find("Ridge Regression") != std::string::npos);

    // A different seed changes the market.
    const auto c = dir / "c";
    REQUIRE(run("synth --config " + config.string() + " --seed 6 --out " + c.string()) == 0);
    CHECK(slurp(a / "scenario.csv") != slurp(c / "scenario.csv"));
}
