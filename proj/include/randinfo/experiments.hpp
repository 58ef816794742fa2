#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace randinfo::xcli {

enum class Experiment {
    distortion_rate,
    covering_rate,
    cohort_limit,
    spectral_audit,
    iso_witness,
    recovery_phase,
    recovery_rate,
    section_radius,
    mls_rate,
    planted_hole,
    kappa_gap,
};

const char* experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& name);

struct SeedSettings {
    std::uint64_t base = 0;
    std::size_t replications = 1;
};

// One experiment run: which sweep, its numeric (or string) parameters, the
// seeding, and where the CSV lands. The JSON summary is written next to the
// CSV with the extension swapped. An empty output path keeps everything in
// memory.
struct ExperimentConfig {
    Experiment experiment = Experiment::distortion_rate;
    nlohmann::json parameters = nlohmann::json::object();
    SeedSettings seeds;
    std::string output;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t point_count = 0;
};

// Ordinary least squares on (x, y) pairs, optionally after taking logs.
// Throws DegenerateInput on fewer than two distinct abscissae or on a
// non-positive value under a log transform.
RateFit rate_fit(const std::vector<std::pair<double, double>>& pairs,
                 bool log_x, bool log_y);

struct RunResult {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;  // cells, preformatted
    nlohmann::json summary;
    std::string csv_path;      // empty when nothing was written
    std::string summary_path;
    bool checks_passed = true;
};

// Executes every sweep cell (parameter point x replication), each on its own
// derived seed, and gathers rows in a fixed order. `jobs` worker threads
// share the cell queue; the output is identical for any job count. Cell
// failures are recorded in the row's error column and in the summary, never
// thrown.
RunResult run(const ExperimentConfig& config, std::size_t jobs = 1);

// Seed for a labelled cell: base folded with each label in turn.
std::uint64_t derive_seed_path(std::uint64_t base,
                               std::initializer_list<std::string_view> labels);

std::string rows_to_csv(const std::vector<std::string>& columns,
                        const std::vector<std::vector<std::string>>& rows);

}  // namespace randinfo::xcli
