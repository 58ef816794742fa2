#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const char* exe = std::getenv("RANDINFO_CLI");
    if (exe == nullptr)
        throw std::runtime_error("RANDINFO_CLI is not set; run under ctest");
    const std::string cmd = std::string("'") + exe + "' " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) throw std::runtime_error("popen failed");
    std::string out;
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0)
        out.append(buf, got);
    const int status = ::pclose(pipe);
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = out;
    return r;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const char* tag) {
        path = std::filesystem::temp_directory_path() /
               (std::string("randinfo_cli_") + tag + "_" +
                std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

std::string write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
    return p.string();
}

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

std::string q(const std::string& s) { return "'" + s + "'"; }

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("run --no-such-flag cfg.json").code == 2);
    CHECK(run_cli("run /nonexistent/cfg.json").code == 2);
    CHECK(run_cli("fit /nonexistent/points.csv --x a --y b").code == 2);
}

TEST_CASE("malformed configs exit with code 2") {
    TempDir dir("bad");
    const auto broken = write_text(dir.path / "broken.json", "{ not json");
    CHECK(run_cli("run " + q(broken)).code == 2);

    const auto unknown = write_text(dir.path / "unknown.json",
                                    R"({"experiment": "kappa_gap", "surprise": 1})");
    CHECK(run_cli("run " + q(unknown)).code == 2);

    const auto badparam = write_text(
        dir.path / "badparam.json",
        R"({"experiment": "kappa_gap", "parameters": {"bogus": 3}})");
    const auto r = run_cli("run " + q(badparam));
    CHECK(r.code == 2);
    CHECK(r.out.find("parameters.bogus") != std::string::npos);
}

TEST_CASE("a run writes its table and prints the summary") {
    TempDir dir("ok");
    const auto cfg = write_text(
        dir.path / "gap.json",
        R"({"experiment": "kappa_gap",
            "parameters": {"d_start": 10, "d_end": 40, "d_step": 10},
            "output": "gap_out.csv"})");
    const auto r = run_cli("run " + q(cfg) + " --out " + q(dir.path.string()));
    REQUIRE(r.code == 0);
    const json summary = json::parse(r.out);
    CHECK(summary["experiment"] == "kappa_gap");
    CHECK(summary["row_count"] == 4);
    CHECK(summary["checks_passed"].get<bool>());

    const auto csv = dir.path / "gap_out.csv";
    const auto sidecar = dir.path / "gap_out.json";
    REQUIRE(std::filesystem::exists(csv));
    REQUIRE(std::filesystem::exists(sidecar));
    const std::string table = read_text(csv);
    CHECK(table.rfind("d,rep,seed,sum", 0) == 0);
    CHECK(json::parse(read_text(sidecar)) == summary);
}

TEST_CASE("repeat runs and parallel runs emit identical bytes") {
    TempDir dir("det");
    const auto cfg = write_text(
        dir.path / "dist.json",
        R"({"experiment": "distortion_rate",
            "parameters": {"n_start": 32, "n_end": 128, "samples": 512},
            "seeds": {"base": 11, "replications": 2},
            "output": "dist.csv"})");
    for (const char* sub : {"a", "b", "c"})
        std::filesystem::create_directories(dir.path / sub);

    CHECK(run_cli("run " + q(cfg) + " --out " + q((dir.path / "a").string()))
              .code == 0);
    CHECK(run_cli("run " + q(cfg) + " --out " + q((dir.path / "b").string()))
              .code == 0);
    CHECK(run_cli("run " + q(cfg) + " --jobs 3 --out " +
                  q((dir.path / "c").string()))
              .code == 0);

    const std::string a = read_text(dir.path / "a" / "dist.csv");
    CHECK(a == read_text(dir.path / "b" / "dist.csv"));
    CHECK(a == read_text(dir.path / "c" / "dist.csv"));
}

TEST_CASE("--seed overrides the configured base seed") {
    TempDir dir("seed");
    const auto cfg = write_text(
        dir.path / "dist.json",
        R"({"experiment": "distortion_rate",
            "parameters": {"n_start": 32, "n_end": 64, "samples": 256},
            "seeds": {"base": 11},
            "output": "dist.csv"})");
    for (const char* sub : {"s1", "s2", "s3"})
        std::filesystem::create_directories(dir.path / sub);

    CHECK(run_cli("run " + q(cfg) + " --seed 123 --out " +
                  q((dir.path / "s1").string()))
              .code == 0);
    CHECK(run_cli("run " + q(cfg) + " --seed 123 --out " +
                  q((dir.path / "s2").string()))
              .code == 0);
    CHECK(run_cli("run " + q(cfg) + " --seed 124 --out " +
                  q((dir.path / "s3").string()))
              .code == 0);

    const std::string s1 = read_text(dir.path / "s1" / "dist.csv");
    CHECK(s1 == read_text(dir.path / "s2" / "dist.csv"));
    CHECK(s1 != read_text(dir.path / "s3" / "dist.csv"));
}

TEST_CASE("--check turns failed audits into exit code 3") {
    TempDir dir("check");
    // hole radius exceeds the quarter-width cap, so every cell fails
    const auto cfg = write_text(
        dir.path / "hole_cfg.json",
        R"({"experiment": "planted_hole",
            "parameters": {"beta": 0.15, "n_start": 64, "n_end": 64,
                           "samples": 256},
            "output": "hole.csv"})");
    const auto plain =
        run_cli("run " + q(cfg) + " --out " + q(dir.path.string()));
    CHECK(plain.code == 0);
    const json summary = json::parse(plain.out);
    CHECK_FALSE(summary["checks_passed"].get<bool>());

    const auto strict = run_cli("run " + q(cfg) + " --check --out " +
                                q(dir.path.string()));
    CHECK(strict.code == 3);
}

TEST_CASE("a run refuses to overwrite its own config file") {
    TempDir dir("clobber");
    // summary sidecar swaps .csv for .json, which would land on the config
    const auto cfg = write_text(
        dir.path / "gap.json",
        R"({"experiment": "kappa_gap",
            "parameters": {"d_start": 10, "d_end": 20, "d_step": 10},
            "output": "gap.csv"})");
    const auto r = run_cli("run " + q(cfg) + " --out " + q(dir.path.string()));
    CHECK(r.code == 2);
    CHECK(r.out.find("overwrite") != std::string::npos);
    CHECK(read_text(dir.path / "gap.json").find("kappa_gap") !=
          std::string::npos);
}

TEST_CASE("fit reads a CSV column pair and reports the power law") {
    TempDir dir("fit");
    std::string table = "x,y,tag\n";
    for (int k = 0; k < 8; ++k) {
        const double x = std::pow(2.0, k);
        char line[128];
        std::snprintf(line, sizeof line, "%.17g,%.17g,row%d\n", x, 5.0 * x * x,
                      k);
        table += line;
    }
    const auto csv = write_text(dir.path / "square.csv", table);

    const auto r = run_cli("fit " + q(csv) + " --x x --y y --log-log");
    REQUIRE(r.code == 0);
    const json fit = json::parse(r.out);
    CHECK(fit["slope"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fit["r_squared"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit["point_count"] == 8);

    CHECK(run_cli("fit " + q(csv) + " --x x --y missing --log-log").code == 2);
}

TEST_CASE("fit composes with run output end to end") {
    TempDir dir("pipeline");
    const auto cfg = write_text(
        dir.path / "dist_cfg.json",
        R"({"experiment": "distortion_rate",
            "parameters": {"n_start": 32, "n_end": 512, "samples": 1024},
            "seeds": {"base": 2, "replications": 3},
            "output": "dist.csv"})");
    REQUIRE(run_cli("run " + q(cfg) + " --out " + q(dir.path.string())).code ==
            0);
    const auto r = run_cli("fit " + q((dir.path / "dist.csv").string()) +
                           " --x n --y value --log-log");
    REQUIRE(r.code == 0);
    const json fit = json::parse(r.out);
    CHECK(fit["slope"].get<double>() < -0.2);
    CHECK(fit["slope"].get<double>() > -0.8);
}
