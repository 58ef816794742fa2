#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "randinfo/cubature.hpp"
#include "randinfo/discrepancy.hpp"
#include "randinfo/errors.hpp"
#include "randinfo/experiments.hpp"
#include "randinfo/io.hpp"
#include "randinfo/lattice.hpp"
#include "randinfo/pointset.hpp"
#include "randinfo/rng.hpp"

using namespace randinfo;
using nlohmann::json;

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const char* tag) {
        path = std::filesystem::temp_directory_path() /
               (std::string("randinfo_") + tag + "_" +
                std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

}  // namespace

TEST_CASE("format_double round-trips doubles through text") {
    const double values[] = {0.1,
                             1.0 / 3.0,
                             0.70710678118654752,
                             -12345.678901234567,
                             1e-308,
                             0x1.0p-53,
                             0.0,
                             4096.0};
    for (double v : values) {
        const std::string s = io::format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("point set CSV and JSON round-trips preserve coordinates") {
    const auto p = pts::PointSet::from_rows(
        2, {{0.1, 1.0 / 3.0}, {0.7071067811865476, 0.25}, {0.0, 0.999}}, true);

    const auto from_csv = io::pointset_from_csv(io::pointset_to_csv(p), true);
    REQUIRE(from_csv.size() == p.size());
    REQUIRE(from_csv.dim() == 2);
    CHECK(from_csv.torus());
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(from_csv.coord(i, j) == p.coord(i, j));

    const json j = io::pointset_to_json(p);
    CHECK(j["dim"] == 2);
    CHECK(j["torus"] == true);
    const auto from_json = io::pointset_from_json(j);
    REQUIRE(from_json.size() == p.size());
    CHECK(from_json.torus());
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j2 = 0; j2 < 2; ++j2)
            CHECK(from_json.coord(i, j2) == p.coord(i, j2));

    CHECK_THROWS_AS(io::pointset_from_csv(""), ConfigError);
    CHECK_THROWS_AS(io::pointset_from_csv("0.5,0.5\n0.25\n"), ConfigError);
    CHECK_THROWS_AS(io::pointset_from_csv("0.5,abc\n"), ConfigError);
    CHECK_THROWS_AS(io::pointset_from_json(json{{"torus", false}}), ConfigError);
    CHECK_THROWS_AS(
        io::pointset_from_json(json{{"dim", 2}, {"torus", 1}, {"points", json::array()}}),
        ConfigError);
}

TEST_CASE("basis JSON round-trip matches entrywise") {
    const auto basis = lat::fibonacci_lattice(6).lattice.basis;
    const json j = io::basis_to_json(basis);
    const auto back = io::basis_from_json(j);
    REQUIRE(back.b.rows() == basis.b.rows());
    REQUIRE(back.b.cols() == basis.b.cols());
    for (Eigen::Index r = 0; r < basis.b.rows(); ++r)
        for (Eigen::Index c = 0; c < basis.b.cols(); ++c)
            CHECK(back.b(r, c) == basis.b(r, c));

    CHECK_THROWS_AS(io::basis_from_json(json{{"rows", json::array()}}),
                    ConfigError);
    CHECK_THROWS_AS(
        io::basis_from_json(json::parse(R"({"rows": [[1, 0], [1]]})")),
        ConfigError);
}

TEST_CASE("generator line round-trip and rejection") {
    CHECK(io::generator_to_line(21, {1, 13}) == "21 1 13");
    const auto parsed = io::generator_from_line("21 1 13");
    CHECK(parsed.first == 21);
    CHECK(parsed.second == std::vector<long long>{1, 13});
    const auto neg = io::generator_from_line("8 1 -3");
    CHECK(neg.second == std::vector<long long>{1, -3});

    CHECK_THROWS_AS(io::generator_from_line(""), ConfigError);
    CHECK_THROWS_AS(io::generator_from_line("21"), ConfigError);
    CHECK_THROWS_AS(io::generator_from_line("0 1"), ConfigError);
    CHECK_THROWS_AS(io::generator_from_line("21 1 x"), ConfigError);
}

TEST_CASE("cubature rule JSON round-trip") {
    const auto p = pts::PointSet::from_rows(1, {{0.0}, {0.25}, {0.5}, {0.75}},
                                            true);
    const auto rule = cub::equal_weight_rule(p);
    const auto back = io::rule_from_json(io::rule_to_json(rule));
    REQUIRE(back.points.size() == 4);
    CHECK(back.points.torus());
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(back.points.coord(i, 0) == rule.points.coord(i, 0));
        CHECK(back.weights[i] == rule.weights[i]);
    }
    CHECK_THROWS_AS(io::rule_from_json(json{{"weights", {0.5, 0.5}}}),
                    ConfigError);
}

TEST_CASE("discrepancy witness JSON round-trip for every set kind") {
    disc::DiscrepancyWitness w;
    w.count_fraction = 0.25;
    w.volume = 0.2;
    w.volume_error = 0.001;
    w.value = 0.05;

    w.set = disc::ConvexTestSet::halfspace({1.0, -0.5}, 0.25);
    auto back = io::witness_from_json(io::witness_to_json(w));
    CHECK(back.set.kind == disc::ConvexTestSet::Kind::halfspace);
    CHECK(back.set.a == w.set.a);
    CHECK(back.set.b == w.set.b);
    CHECK(back.count_fraction == w.count_fraction);
    CHECK(back.volume == w.volume);
    CHECK(back.volume_error == w.volume_error);
    CHECK(back.value == w.value);

    w.set = disc::ConvexTestSet::slab({0.0, 1.0}, 0.4, 0.6);
    back = io::witness_from_json(io::witness_to_json(w));
    CHECK(back.set.kind == disc::ConvexTestSet::Kind::slab);
    CHECK(back.set.a == w.set.a);
    CHECK(back.set.b_lo == w.set.b_lo);
    CHECK(back.set.b_hi == w.set.b_hi);

    w.set = disc::ConvexTestSet::ball({0.5, 0.5}, 0.125);
    back = io::witness_from_json(io::witness_to_json(w));
    CHECK(back.set.kind == disc::ConvexTestSet::Kind::ball);
    CHECK(back.set.center == w.set.center);
    CHECK(back.set.radius == w.set.radius);

    w.set = disc::ConvexTestSet::axis_box({0.1, 0.2}, {0.3, 0.4});
    back = io::witness_from_json(io::witness_to_json(w));
    CHECK(back.set.kind == disc::ConvexTestSet::Kind::axis_box);
    CHECK(back.set.lo == w.set.lo);
    CHECK(back.set.hi == w.set.hi);

    json bad = io::witness_to_json(w);
    bad["set"]["kind"] = "cylinder";
    CHECK_THROWS_AS(io::witness_from_json(bad), ConfigError);
}

TEST_CASE("table CSV lists point columns then the value") {
    const auto p = pts::PointSet::from_rows(2, {{0.25, 0.5}, {0.75, 0.125}},
                                            false);
    const std::string csv = io::table_to_csv(p, {1.5, -2.0});
    CHECK(csv ==
          "x1,x2,value\n"
          "0.25,0.5,1.5\n"
          "0.75,0.125,-2\n");
    CHECK_THROWS_AS(io::table_to_csv(p, {1.0}), PointCountMismatch);
}

TEST_CASE("file read and write round-trip") {
    TempDir dir("io");
    const std::string path = (dir.path / "blob.txt").string();
    const std::string content = "line one\nline two\n";
    io::write_file(path, content);
    CHECK(io::read_file(path) == content);
    CHECK_THROWS_AS(io::read_file((dir.path / "missing.txt").string()),
                    ConfigError);
}

TEST_CASE("rate_fit recovers exact and noisy power laws") {
    std::vector<std::pair<double, double>> line;
    for (int i = 1; i <= 8; ++i) line.push_back({double(i), double(i)});
    const auto ident = xcli::rate_fit(line, false, false);
    CHECK(ident.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ident.intercept == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ident.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ident.point_count == 8);
    const auto ident_log = xcli::rate_fit(line, true, true);
    CHECK(ident_log.slope == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<std::pair<double, double>> noisy;
    for (int k = 0; k < 8; ++k) {
        const double x = std::pow(2.0, k + 3);
        const double y =
            3.0 * std::pow(x, -0.5) * (1.0 + 0.01 * std::sin(double(k)));
        noisy.push_back({x, y});
    }
    const auto fit = xcli::rate_fit(noisy, true, true);
    CHECK(fit.slope > -0.55);
    CHECK(fit.slope < -0.45);
    CHECK(fit.r_squared > 0.99);
    CHECK(fit.r_squared <= 1.0);

    std::vector<std::pair<double, double>> flat;
    for (int i = 1; i <= 5; ++i) flat.push_back({double(i), 2.5});
    const auto konst = xcli::rate_fit(flat, true, true);
    CHECK(konst.slope == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(konst.r_squared == 1.0);
}

TEST_CASE("rate_fit rejects degenerate inputs") {
    CHECK_THROWS_AS(xcli::rate_fit({{1.0, 2.0}}, false, false), DegenerateInput);
    CHECK_THROWS_AS(xcli::rate_fit({{1.0, 2.0}, {1.0, 3.0}}, false, false),
                    DegenerateInput);
    CHECK_THROWS_AS(xcli::rate_fit({{-1.0, 2.0}, {2.0, 3.0}}, true, false),
                    DegenerateInput);
    CHECK_THROWS_AS(xcli::rate_fit({{1.0, 0.0}, {2.0, 3.0}}, false, true),
                    DegenerateInput);
}

TEST_CASE("derive_seed_path folds labels deterministically") {
    const auto a = xcli::derive_seed_path(7, {"alpha", "beta"});
    CHECK(a == xcli::derive_seed_path(7, {"alpha", "beta"}));
    CHECK(a == derive_seed(derive_seed(7, "alpha"), "beta"));
    CHECK(a != xcli::derive_seed_path(7, {"beta", "alpha"}));
    CHECK(a != xcli::derive_seed_path(8, {"alpha", "beta"}));
}

TEST_CASE("experiment names map both ways") {
    for (auto e : {xcli::Experiment::distortion_rate,
                   xcli::Experiment::covering_rate, xcli::Experiment::cohort_limit,
                   xcli::Experiment::spectral_audit, xcli::Experiment::iso_witness,
                   xcli::Experiment::recovery_phase, xcli::Experiment::recovery_rate,
                   xcli::Experiment::section_radius, xcli::Experiment::mls_rate,
                   xcli::Experiment::planted_hole, xcli::Experiment::kappa_gap})
        CHECK(xcli::experiment_from_name(xcli::experiment_name(e)) == e);
    CHECK_THROWS_AS(xcli::experiment_from_name("nope"), ConfigError);
}

TEST_CASE("config parsing validates fields and reports paths") {
    const auto minimal =
        xcli::ExperimentConfig::from_json(json{{"experiment", "kappa_gap"}});
    CHECK(minimal.experiment == xcli::Experiment::kappa_gap);
    CHECK(minimal.seeds.base == 0);
    CHECK(minimal.seeds.replications == 1);
    CHECK(minimal.output.empty());

    const json full = {{"experiment", "distortion_rate"},
                       {"parameters", {{"n_start", 32}, {"n_end", 64}}},
                       {"seeds", {{"base", 9}, {"replications", 3}}},
                       {"output", "out.csv"}};
    const auto cfg = xcli::ExperimentConfig::from_json(full);
    CHECK(cfg.seeds.base == 9);
    CHECK(cfg.seeds.replications == 3);
    CHECK(cfg.output == "out.csv");
    const auto round = xcli::ExperimentConfig::from_json(cfg.to_json());
    CHECK(round.to_json() == cfg.to_json());

    auto expect_path = [](const json& doc, const char* needle) {
        try {
            xcli::ExperimentConfig::from_json(doc);
            FAIL_CHECK("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_path(json{{"parameters", json::object()}}, "experiment");
    expect_path(json{{"experiment", "mystery"}}, "mystery");
    expect_path(json{{"experiment", "kappa_gap"}, {"extra", 1}}, "extra");
    expect_path(json{{"experiment", "kappa_gap"}, {"parameters", 5}},
                "parameters");
    expect_path(
        json{{"experiment", "kappa_gap"}, {"parameters", {{"flag", true}}}},
        "parameters.flag");
    expect_path(json{{"experiment", "kappa_gap"},
                     {"seeds", {{"replications", 0}}}},
                "seeds.replications");
    expect_path(json{{"experiment", "kappa_gap"}, {"seeds", {{"mode", 1}}}},
                "seeds.mode");
    expect_path(json{{"experiment", "kappa_gap"}, {"output", 4}}, "output");
}

TEST_CASE("run rejects unknown experiment parameters with a path") {
    xcli::ExperimentConfig cfg;
    cfg.experiment = xcli::Experiment::kappa_gap;
    cfg.parameters = json{{"bogus", 1}};
    try {
        xcli::run(cfg);
        FAIL_CHECK("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("parameters.bogus") !=
              std::string::npos);
    }
}

TEST_CASE("kappa_gap run emits recomputable rows and passes its check") {
    xcli::ExperimentConfig cfg;
    cfg.experiment = xcli::Experiment::kappa_gap;
    cfg.parameters = json{{"d_start", 10}, {"d_end", 30}, {"d_step", 10}};
    cfg.seeds.base = 5;
    const auto res = xcli::run(cfg);
    REQUIRE(res.rows.size() == 3);
    REQUIRE(res.columns == std::vector<std::string>{"d", "rep", "seed", "sum",
                                                    "log_sum", "log_gap",
                                                    "gap_over_cbrt", "error"});
    CHECK(res.checks_passed);
    CHECK(res.csv_path.empty());
    for (const auto& row : res.rows) {
        const std::size_t d = std::stoul(row[0]);
        const auto ks = disc::kappa_sum(d);
        CHECK(std::strtod(row[3].c_str(), nullptr) == ks.sum);
        CHECK(std::strtod(row[5].c_str(), nullptr) == ks.log_gap);
        CHECK(row[7].empty());
    }
    CHECK(res.summary["checks"]["gap_constant_bounded"].get<bool>());
    CHECK(res.summary["row_count"] == 3);
}

TEST_CASE("runs are deterministic and independent of the job count") {
    xcli::ExperimentConfig cfg;
    cfg.experiment = xcli::Experiment::distortion_rate;
    cfg.parameters = json{{"n_start", 32}, {"n_end", 128}, {"samples", 512}};
    cfg.seeds.base = 77;
    cfg.seeds.replications = 3;
    const auto a = xcli::run(cfg, 1);
    const auto b = xcli::run(cfg, 1);
    const auto c = xcli::run(cfg, 4);
    CHECK(xcli::rows_to_csv(a.columns, a.rows) ==
          xcli::rows_to_csv(b.columns, b.rows));
    CHECK(xcli::rows_to_csv(a.columns, a.rows) ==
          xcli::rows_to_csv(c.columns, c.rows));
    CHECK(a.summary == c.summary);

    std::set<std::string> seeds;
    for (const auto& row : a.rows) seeds.insert(row[2]);
    CHECK(seeds.size() == a.rows.size());

    xcli::ExperimentConfig other = cfg;
    other.seeds.base = 78;
    const auto d = xcli::run(other, 1);
    CHECK(xcli::rows_to_csv(a.columns, a.rows) !=
          xcli::rows_to_csv(d.columns, d.rows));
}

TEST_CASE("spectral audit rows regenerate their lattices") {
    xcli::ExperimentConfig cfg;
    cfg.experiment = xcli::Experiment::spectral_audit;
    cfg.parameters = json{{"n_max", 500}};
    cfg.seeds.base = 31;
    cfg.seeds.replications = 8;
    const auto res = xcli::run(cfg);
    CHECK(res.checks_passed);
    REQUIRE(res.rows.size() == 8);
    for (const auto& row : res.rows) {
        const auto parsed = io::generator_from_line(row[2] + " " + row[3]);
        REQUIRE(parsed.second.size() == std::stoul(row[1]));
        const auto lp = lat::rank1_lattice(parsed.first, parsed.second);
        const double sigma = lat::spectral_test(lp.lattice.basis);
        CHECK(std::strtod(row[5].c_str(), nullptr) == sigma);
    }
    CHECK(res.summary["metrics"]["minkowski_violations"] == 0);
    CHECK(res.summary["metrics"]["diameter_violations"] == 0);
    CHECK(res.summary["metrics"]["witness_violations"] == 0);
}

TEST_CASE("cell failures are recorded per row and fail the audit check") {
    xcli::ExperimentConfig cfg;
    cfg.experiment = xcli::Experiment::planted_hole;
    // radius 64^(-0.15) is far above the quarter-width cap, so every cell
    // throws and the run must survive with error rows
    cfg.parameters = json{{"beta", 0.15}, {"n_start", 64}, {"n_end", 128},
                          {"samples", 256}};
    cfg.seeds.replications = 2;
    const auto res = xcli::run(cfg);
    CHECK_FALSE(res.checks_passed);
    CHECK_FALSE(res.summary["checks"]["all_cells_computed"].get<bool>());
    REQUIRE(res.rows.size() == 4);
    for (const auto& row : res.rows) {
        CHECK(row[3] == "nan");
        CHECK_FALSE(row[4].empty());
    }
    CHECK(res.summary["errors"].size() == 4);
    CHECK(res.summary["fits"]["rate"].contains("error"));
}

TEST_CASE("recovery_rate keeps the pinned column layout") {
    xcli::ExperimentConfig cfg;
    cfg.experiment = xcli::Experiment::recovery_rate;
    cfg.parameters = json{{"m", 32}, {"n_start", 8}, {"n_end", 16}};
    cfg.seeds.base = 3;
    cfg.seeds.replications = 2;
    const auto res = xcli::run(cfg);
    REQUIRE(res.columns == std::vector<std::string>{"m", "n", "trial",
                                                    "decoder", "error", "seed"});
    REQUIRE(res.rows.size() == 4);  // two n values, two trials each
    for (const auto& row : res.rows) {
        CHECK(row[0] == "32");
        CHECK(row[3] == "l1");
        CHECK(std::strtod(row[4].c_str(), nullptr) >= 0.0);
    }
    CHECK(res.rows[0][1] == "8");
    CHECK(res.rows[0][2] == "0");
    CHECK(res.rows[1][2] == "1");
    CHECK(res.rows[2][1] == "16");
    CHECK(res.summary["fits"].contains("rate"));
}

TEST_CASE("run writes the CSV and summary beside each other") {
    TempDir dir("run");
    xcli::ExperimentConfig cfg;
    cfg.experiment = xcli::Experiment::kappa_gap;
    cfg.parameters = json{{"d_start", 10}, {"d_end", 20}, {"d_step", 10}};
    cfg.output = (dir.path / "gap.csv").string();
    const auto res = xcli::run(cfg);
    CHECK(res.csv_path == cfg.output);
    CHECK(res.summary_path == (dir.path / "gap.json").string());
    CHECK(io::read_file(res.csv_path) ==
          xcli::rows_to_csv(res.columns, res.rows));
    const json reloaded = json::parse(io::read_file(res.summary_path));
    CHECK(reloaded == res.summary);
}

TEST_CASE("CSV quoting follows RFC rules") {
    const std::string out = xcli::rows_to_csv(
        {"plain", "tricky"},
        {{"a", "with,comma"}, {"quote\"inside", "multi\nline"}});
    CHECK(out ==
          "plain,tricky\n"
          "a,\"with,comma\"\n"
          "\"quote\"\"inside\",\"multi\nline\"\n");
}
