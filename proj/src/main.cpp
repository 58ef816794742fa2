#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "randinfo/errors.hpp"
#include "randinfo/experiments.hpp"
#include "randinfo/io.hpp"

namespace {

using randinfo::io::read_file;
namespace xcli = randinfo::xcli;

// One CSV record with RFC 4180 quoting.
std::vector<std::string> parse_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::size_t column_index(const std::vector<std::string>& header,
                         const std::string& name, const char* flag) {
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == name) return j;
    throw randinfo::ConfigError(std::string(flag) + ": no column named '" +
                                name + "'");
}

int run_command(const std::string& config_path, bool have_out,
                const std::string& out_dir, bool have_seed, std::uint64_t seed,
                std::size_t jobs, bool check) {
    nlohmann::json doc = nlohmann::json::parse(read_file(config_path));
    auto cfg = xcli::ExperimentConfig::from_json(doc);
    if (have_seed) cfg.seeds.base = seed;
    if (cfg.output.empty())
        cfg.output = std::string(xcli::experiment_name(cfg.experiment)) + ".csv";
    if (have_out)
        cfg.output = (std::filesystem::path(out_dir) /
                      std::filesystem::path(cfg.output).filename())
                         .string();
    {
        namespace fs = std::filesystem;
        const fs::path cfg_file = fs::absolute(config_path).lexically_normal();
        fs::path csv = cfg.output;
        fs::path summary = csv;
        summary.replace_extension(".json");
        if (summary == csv) summary += ".json";
        for (const fs::path& p : {csv, summary})
            if (fs::absolute(p).lexically_normal() == cfg_file)
                throw randinfo::ConfigError(
                    "output: writing " + p.string() +
                    " would overwrite the config file; pick another name");
    }
    const auto result = xcli::run(cfg, jobs);
    std::fputs((result.summary.dump(2) + "\n").c_str(), stdout);
    if (check && !result.checks_passed) return 3;
    return 0;
}

int fit_command(const std::string& csv_path, const std::string& xcol,
                const std::string& ycol, bool loglog) {
    const std::string text = read_file(csv_path);
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    if (lines.empty()) throw randinfo::ConfigError("csv: empty file");
    const auto header = parse_csv_line(lines.front());
    const std::size_t xi = column_index(header, xcol, "--x");
    const std::size_t yi = column_index(header, ycol, "--y");
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cells = parse_csv_line(lines[i]);
        if (xi >= cells.size() || yi >= cells.size()) continue;
        char* endx = nullptr;
        char* endy = nullptr;
        const double x = std::strtod(cells[xi].c_str(), &endx);
        const double y = std::strtod(cells[yi].c_str(), &endy);
        if (endx == cells[xi].c_str() || endy == cells[yi].c_str()) continue;
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        pairs.push_back({x, y});
    }
    const auto fit = xcli::rate_fit(pairs, loglog, loglog);
    const nlohmann::json out = {{"slope", fit.slope},
                                {"intercept", fit.intercept},
                                {"r_squared", fit.r_squared},
                                {"point_count", fit.point_count}};
    std::fputs((out.dump(2) + "\n").c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sweep runner for random-information experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    bool check = false;
    auto* run_cmd = app.add_subcommand("run", "execute one experiment config");
    run_cmd->add_option("config", config_path, "JSON experiment config")
        ->required();
    auto* out_opt =
        run_cmd->add_option("--out", out_dir, "directory for CSV and summary");
    auto* seed_opt =
        run_cmd->add_option("--seed", seed, "override the base seed");
    run_cmd->add_option("--jobs", jobs, "worker threads for sweep cells");
    run_cmd->add_flag("--check", check,
                      "fail (exit 3) when the built-in checks do not pass");

    std::string csv_path, xcol, ycol;
    bool loglog = false;
    auto* fit_cmd =
        app.add_subcommand("fit", "least-squares rate fit over CSV columns");
    fit_cmd->add_option("csv", csv_path, "CSV file with a header row")
        ->required();
    fit_cmd->add_option("--x", xcol, "abscissa column name")->required();
    fit_cmd->add_option("--y", ycol, "ordinate column name")->required();
    fit_cmd->add_flag("--log-log", loglog, "fit in log-log coordinates");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed())
            return run_command(config_path, out_opt->count() > 0, out_dir,
                               seed_opt->count() > 0, seed, jobs, check);
        if (fit_cmd->parsed())
            return fit_command(csv_path, xcol, ycol, loglog);
    } catch (const randinfo::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const randinfo::DegenerateInput& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
