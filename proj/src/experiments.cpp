#include "randinfo/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <thread>

#include <Eigen/Dense>

#include "randinfo/approx.hpp"
#include "randinfo/discrepancy.hpp"
#include "randinfo/ellipsoid.hpp"
#include "randinfo/errors.hpp"
#include "randinfo/io.hpp"
#include "randinfo/lattice.hpp"
#include "randinfo/pointset.hpp"
#include "randinfo/recovery.hpp"
#include "randinfo/rng.hpp"

namespace randinfo::xcli {

namespace {

using nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.14159265358979323846264338327950288;

std::string fmt(double v) { return io::format_double(v); }

struct SubRow {
    std::vector<std::string> prefix;  // leading columns, may be extended by work
    std::vector<double> meta;         // numeric keys for grouping (n, kind, ...)
    std::vector<double> vals;         // value columns
    std::optional<std::uint64_t> seed;  // per-row seed when it differs
};

struct Cell {
    std::string label;
    std::uint64_t seed = 0;
    std::vector<SubRow> rows;  // planned with one entry; work may add more
    std::string error;
};

struct Plan;
using WorkFn = std::function<void(Cell&)>;
using FinalizeFn = std::function<void(const Plan&, json&)>;

struct Plan {
    std::vector<std::string> columns;
    std::size_t prefix_width = 0;
    std::size_t value_count = 0;
    bool seed_last = false;  // recovery_rate puts the seed after the values
    json params;             // effective parameters, defaults filled in
    std::vector<Cell> cells;
    WorkFn work;
    FinalizeFn finalize;
};

using NumMap = std::map<std::string, double>;
using StrMap = std::map<std::string, std::string>;

NumMap collect_params(const json& params,
                      std::initializer_list<std::pair<const char*, double>> defaults,
                      StrMap* strings = nullptr) {
    NumMap out;
    for (const auto& kv : defaults) out[kv.first] = kv.second;
    for (const auto& item : params.items()) {
        const std::string& key = item.key();
        const json& v = item.value();
        if (strings != nullptr && strings->count(key) != 0) {
            if (!v.is_string())
                throw ConfigError("parameters." + key + ": expected a string");
            (*strings)[key] = v.get<std::string>();
            continue;
        }
        if (out.count(key) == 0)
            throw ConfigError("parameters." + key +
                              ": unknown parameter for this experiment");
        if (!v.is_number())
            throw ConfigError("parameters." + key + ": expected a number");
        out[key] = v.get<double>();
    }
    return out;
}

json params_json(const NumMap& nums, const StrMap* strings = nullptr) {
    json out = json::object();
    for (const auto& kv : nums) out[kv.first] = kv.second;
    if (strings != nullptr)
        for (const auto& kv : *strings) out[kv.first] = kv.second;
    return out;
}

std::size_t as_count(const NumMap& p, const std::string& key, double lo) {
    const double v = p.at(key);
    if (!(v >= lo) || v != std::floor(v) || v > 1e15)
        throw ConfigError("parameters." + key + ": expected an integer >= " +
                          fmt(lo));
    return static_cast<std::size_t>(v);
}

double as_positive(const NumMap& p, const std::string& key) {
    const double v = p.at(key);
    if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError("parameters." + key + ": expected a positive number");
    return v;
}

std::vector<std::size_t> dyadic_sweep(std::size_t start, std::size_t stop) {
    if (stop < start)
        throw ConfigError("parameters.n_end: must not be below n_start");
    std::vector<std::size_t> out;
    for (std::size_t v = start; v <= stop; v *= 2) {
        out.push_back(v);
        if (v > stop / 2) break;
    }
    return out;
}

std::vector<std::size_t> linear_sweep(std::size_t start, std::size_t step,
                                      std::size_t stop) {
    if (stop < start)
        throw ConfigError("parameters.n_end: must not be below n_start");
    std::vector<std::size_t> out;
    for (std::size_t v = start; v <= stop; v += step) out.push_back(v);
    return out;
}

// Mean of vals[val_idx] grouped by meta[meta_idx], failed cells skipped.
std::vector<std::pair<double, double>> group_means(const std::vector<Cell>& cells,
                                                   std::size_t meta_idx,
                                                   std::size_t val_idx,
                                                   double kind_filter = kNan,
                                                   std::size_t kind_idx = 0) {
    std::map<double, std::pair<double, std::size_t>> acc;
    for (const auto& c : cells) {
        if (!c.error.empty()) continue;
        for (const auto& r : c.rows) {
            if (!std::isnan(kind_filter) && r.meta[kind_idx] != kind_filter)
                continue;
            auto& slot = acc[r.meta[meta_idx]];
            slot.first += r.vals[val_idx];
            slot.second += 1;
        }
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(acc.size());
    for (const auto& kv : acc)
        out.push_back({kv.first, kv.second.first / double(kv.second.second)});
    return out;
}

// Maximum of vals[val_idx] grouped by meta[meta_idx], failed cells skipped.
std::vector<std::pair<double, double>> group_max(const std::vector<Cell>& cells,
                                                 std::size_t meta_idx,
                                                 std::size_t val_idx) {
    std::map<double, double> acc;
    for (const auto& c : cells) {
        if (!c.error.empty()) continue;
        for (const auto& r : c.rows) {
            auto it = acc.find(r.meta[meta_idx]);
            if (it == acc.end())
                acc[r.meta[meta_idx]] = r.vals[val_idx];
            else
                it->second = std::max(it->second, r.vals[val_idx]);
        }
    }
    return {acc.begin(), acc.end()};
}

json fit_json(const RateFit& f) {
    return {{"slope", f.slope},
            {"intercept", f.intercept},
            {"r_squared", f.r_squared},
            {"point_count", f.point_count}};
}

void add_check(json& summary, const std::string& name, bool ok) {
    summary["checks"][name] = ok;
}

// Fits log y against log x and applies an optional [lo, hi] band check named
// `check_name`; NaN bounds disable that side.
void fit_and_band(const Plan& plan, json& summary, const std::string& fit_name,
                  const std::vector<std::pair<double, double>>& pairs,
                  double lo, double hi, const std::string& check_name) {
    RateFit f;
    try {
        f = rate_fit(pairs, true, true);
    } catch (const std::exception& e) {
        summary["fits"][fit_name] = {{"error", e.what()}};
        if (!std::isnan(lo) || !std::isnan(hi)) add_check(summary, check_name, false);
        return;
    }
    summary["fits"][fit_name] = fit_json(f);
    if (std::isnan(lo) && std::isnan(hi)) return;
    bool ok = true;
    if (!std::isnan(lo)) ok = ok && f.slope >= lo;
    if (!std::isnan(hi)) ok = ok && f.slope <= hi;
    add_check(summary, check_name, ok);
    (void)plan;
}

std::vector<std::vector<double>> cube_grid(std::size_t dim, std::size_t m,
                                           double offset) {
    std::size_t n = 1;
    for (std::size_t j = 0; j < dim; ++j) {
        if (n > 4000000 / m) throw ConfigError("parameters.m_end: grid too large");
        n *= m;
    }
    std::vector<std::vector<double>> rows(n, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> idx(dim, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dim; ++j)
            rows[i][j] = (double(idx[j]) + offset) / double(m);
        for (std::size_t j = 0; j < dim; ++j) {
            if (++idx[j] < m) break;
            idx[j] = 0;
        }
    }
    return rows;
}

// ---- distortion_rate ----------------------------------------------------

Plan plan_distortion_rate(const ExperimentConfig& cfg) {
    const NumMap p = collect_params(cfg.parameters,
                                    {{"dim", 2}, {"gamma", 2}, {"n_start", 32},
                                     {"n_end", 4096}, {"samples", 4096},
                                     {"slope_min", -0.60}, {"slope_max", -0.40}});
    const std::size_t dim = as_count(p, "dim", 1);
    const double gamma = as_positive(p, "gamma");
    const std::size_t samples = as_count(p, "samples", 1);
    const auto ns = dyadic_sweep(as_count(p, "n_start", 1), as_count(p, "n_end", 1));
    const double lo = p.at("slope_min"), hi = p.at("slope_max");

    Plan plan;
    plan.columns = {"n", "rep", "seed", "value", "error"};
    plan.prefix_width = 2;
    plan.value_count = 1;
    plan.params = params_json(p);
    for (std::size_t n : ns)
        for (std::size_t r = 0; r < cfg.seeds.replications; ++r) {
            Cell c;
            c.label = "distortion_rate/n=" + std::to_string(n) +
                      "/rep=" + std::to_string(r);
            c.rows.push_back({{std::to_string(n), std::to_string(r)},
                              {double(n)},
                              {},
                              {}});
            plan.cells.push_back(std::move(c));
        }
    plan.work = [dim, gamma, samples](Cell& c) {
        const auto n = std::size_t(c.rows[0].meta[0]);
        const auto ps = pts::sample_uniform(dim, n, {c.seed, 0});
        pts::DistortionQuery q;
        q.gamma = gamma;
        q.sample_count = samples;
        q.seed = c.seed;
        c.rows[0].vals = {pts::distortion(ps, q)};
    };
    plan.finalize = [lo, hi](const Plan& pl, json& summary) {
        fit_and_band(pl, summary, "rate", group_means(pl.cells, 0, 0), lo, hi,
                     "slope_within_band");
    };
    return plan;
}

// ---- covering_rate ------------------------------------------------------

Plan plan_covering_rate(const ExperimentConfig& cfg) {
    const NumMap p = collect_params(cfg.parameters,
                                    {{"dim", 2}, {"n_start", 64}, {"n_end", 4096},
                                     {"resolution", 256}, {"slope_min", -0.62},
                                     {"slope_max", -0.38}});
    const std::size_t dim = as_count(p, "dim", 1);
    const std::size_t resolution = as_count(p, "resolution", 2);
    const auto ns = dyadic_sweep(as_count(p, "n_start", 2), as_count(p, "n_end", 2));
    const double lo = p.at("slope_min"), hi = p.at("slope_max");

    Plan plan;
    plan.columns = {"n", "rep", "seed", "value", "upper", "error"};
    plan.prefix_width = 2;
    plan.value_count = 2;
    plan.params = params_json(p);
    for (std::size_t n : ns)
        for (std::size_t r = 0; r < cfg.seeds.replications; ++r) {
            Cell c;
            c.label = "covering_rate/n=" + std::to_string(n) +
                      "/rep=" + std::to_string(r);
            c.rows.push_back({{std::to_string(n), std::to_string(r)},
                              {double(n)},
                              {},
                              {}});
            plan.cells.push_back(std::move(c));
        }
    plan.work = [dim, resolution](Cell& c) {
        const auto n = std::size_t(c.rows[0].meta[0]);
        const auto ps = pts::sample_uniform(dim, n, {c.seed, 0});
        const auto cov = pts::covering_radius(ps, resolution);
        c.rows[0].vals = {cov.estimate, cov.upper_bound};
    };
    plan.finalize = [lo, hi](const Plan& pl, json& summary) {
        auto pairs = group_means(pl.cells, 0, 0);
        for (auto& pr : pairs) pr.first = pr.first / std::log(pr.first);
        fit_and_band(pl, summary, "rate", pairs, lo, hi, "slope_within_band");
    };
    return plan;
}

// ---- cohort_limit -------------------------------------------------------

Plan plan_cohort_limit(const ExperimentConfig& cfg) {
    const NumMap p = collect_params(cfg.parameters,
                                    {{"dim", 2}, {"gamma", 2}, {"n", 4096},
                                     {"samples", 8192}, {"rel_tol", 0.15}});
    const std::size_t dim = as_count(p, "dim", 1);
    const double gamma = as_positive(p, "gamma");
    const std::size_t n = as_count(p, "n", 1);
    const std::size_t samples = as_count(p, "samples", 2);
    const double rel_tol = as_positive(p, "rel_tol");

    Plan plan;
    plan.columns = {"rep", "seed", "power_mean", "scaled", "error"};
    plan.prefix_width = 1;
    plan.value_count = 2;
    plan.params = params_json(p);
    for (std::size_t r = 0; r < cfg.seeds.replications; ++r) {
        Cell c;
        c.label = "cohort_limit/rep=" + std::to_string(r);
        c.rows.push_back({{std::to_string(r)}, {}, {}, {}});
        plan.cells.push_back(std::move(c));
    }
    plan.work = [dim, gamma, n, samples](Cell& c) {
        const auto ps = pts::sample_uniform(dim, n, {c.seed, 0});
        pts::DistortionQuery q;
        q.gamma = gamma;
        q.sample_count = samples;
        q.seed = c.seed;
        const auto st = pts::distortion_mc(ps, q);
        const double scaled = std::pow(double(n), gamma / double(dim)) * st.power_mean;
        c.rows[0].vals = {st.power_mean, scaled};
    };
    plan.finalize = [dim, gamma, rel_tol](const Plan& pl, json& summary) {
        double sum = 0.0, sumsq = 0.0;
        std::size_t k = 0;
        for (const auto& c : pl.cells)
            if (c.error.empty()) {
                sum += c.rows[0].vals[1];
                sumsq += c.rows[0].vals[1] * c.rows[0].vals[1];
                ++k;
            }
        const double mean = k ? sum / double(k) : kNan;
        const double var = k ? std::max(0.0, sumsq / double(k) - mean * mean) : kNan;
        const double ball_vol =
            std::pow(kPi, double(dim) / 2.0) / std::tgamma(double(dim) / 2.0 + 1.0);
        const double limit = std::tgamma(1.0 + gamma / double(dim)) *
                             std::pow(ball_vol, -gamma / double(dim));
        const double rel_gap = std::abs(mean / limit - 1.0);
        summary["metrics"] = {{"mean_scaled", mean},
                              {"se_scaled", k ? std::sqrt(var / double(k)) : kNan},
                              {"limit", limit},
                              {"rel_gap", rel_gap}};
        add_check(summary, "limit_match", k > 0 && rel_gap <= rel_tol);
    };
    return plan;
}

// ---- spectral_audit -----------------------------------------------------

Plan plan_spectral_audit(const ExperimentConfig& cfg) {
    const NumMap p = collect_params(cfg.parameters,
                                    {{"dim_min", 1}, {"dim_max", 4},
                                     {"n_max", 10000}, {"witness_slack", 1e-9}});
    const std::size_t dim_min = as_count(p, "dim_min", 1);
    const std::size_t dim_max = as_count(p, "dim_max", 1);
    if (dim_max < dim_min)
        throw ConfigError("parameters.dim_max: must not be below dim_min");
    const std::uint64_t n_max = as_count(p, "n_max", 2);
    const double slack = p.at("witness_slack");

    Plan plan;
    plan.columns = {"rep", "d", "n", "z", "seed", "sigma", "minkowski",
                    "lll_diam", "diam_bound", "witness", "slab", "best",
                    "sandwich_lower", "error"};
    plan.prefix_width = 4;
    plan.value_count = 8;
    plan.params = params_json(p);
    for (std::size_t r = 0; r < cfg.seeds.replications; ++r) {
        Cell c;
        c.label = "spectral_audit/rep=" + std::to_string(r);
        c.rows.push_back({{std::to_string(r)}, {}, {}, {}});
        plan.cells.push_back(std::move(c));
    }
    plan.work = [dim_min, dim_max, n_max](Cell& c) {
        Rng rng(c.seed, 0);
        const std::size_t d = dim_min + rng.next_below(dim_max - dim_min + 1);
        const std::uint64_t n = 2 + rng.next_below(n_max - 1);
        std::vector<long long> z(d, 0);
        do {
            z[0] = 1 + static_cast<long long>(rng.next_below(n - 1));
        } while (std::gcd(static_cast<std::uint64_t>(z[0]), n) != 1);
        for (std::size_t j = 1; j < d; ++j)
            z[j] = static_cast<long long>(rng.next_below(n));
        std::string ztxt;
        for (std::size_t j = 0; j < d; ++j) {
            if (j) ztxt.push_back(' ');
            ztxt += std::to_string(z[j]);
        }
        c.rows[0].prefix.push_back(std::to_string(d));
        c.rows[0].prefix.push_back(std::to_string(n));
        c.rows[0].prefix.push_back(ztxt);

        const auto lp = lat::rank1_lattice(n, z);
        const auto& basis = lp.lattice.basis;
        const double sigma = lat::spectral_test(basis);
        const double mink = lat::minkowski_lower_bound(d, n);
        const double diam =
            lat::fundamental_domain_diameter(lat::lll_reduce(basis));
        const double dbound =
            double(d) * std::pow(2.0, double(d) - 1.0) * sigma;
        const double wit =
            lat::hyperplane_section_witness(basis, lp.points).fraction;
        const auto slab_set = disc::dual_slab_witness(basis, lp.points);
        const double slab =
            disc::local_discrepancy(lp.points, slab_set, 1, {c.seed, 2}).value;
        const double sand = lat::iso_discrepancy_sandwich(basis).lower;
        c.rows[0].vals = {sigma,          mink, diam, dbound,
                          wit,            slab, std::max(wit, slab),
                          sand};
    };
    plan.finalize = [slack](const Plan& pl, json& summary) {
        std::size_t bad_mink = 0, bad_diam = 0, bad_wit = 0, ok_cells = 0;
        for (const auto& c : pl.cells) {
            if (!c.error.empty()) continue;
            ++ok_cells;
            const auto& v = c.rows[0].vals;
            if (!(v[0] >= v[1])) ++bad_mink;
            if (!(v[2] <= v[3])) ++bad_diam;
            if (!(v[6] >= v[7] - slack)) ++bad_wit;
        }
        summary["metrics"] = {{"lattice_count", ok_cells},
                              {"minkowski_violations", bad_mink},
                              {"diameter_violations", bad_diam},
                              {"witness_violations", bad_wit}};
        add_check(summary, "spectral_above_minkowski", ok_cells > 0 && bad_mink == 0);
        add_check(summary, "diameter_within_bound", ok_cells > 0 && bad_diam == 0);
        add_check(summary, "witness_above_sandwich", ok_cells > 0 && bad_wit == 0);
    };
    return plan;
}

// ---- iso_witness --------------------------------------------------------

Plan plan_iso_witness(const ExperimentConfig& cfg) {
    const NumMap p = collect_params(cfg.parameters,
                                    {{"dim", 3}, {"m_start", 2}, {"m_end", 8},
                                     {"budget", 4000}, {"sep_min", 0.1}});
    const std::size_t dim = as_count(p, "dim", 1);
    const std::size_t m_start = as_count(p, "m_start", 2);
    const std::size_t m_end = as_count(p, "m_end", 2);
    if (m_end < m_start)
        throw ConfigError("parameters.m_end: must not be below m_start");
    const std::size_t budget = as_count(p, "budget", 1);
    const double sep_min = p.at("sep_min");

    Plan plan;
    plan.columns = {"kind", "m", "n", "rep", "seed", "value", "error"};
    plan.prefix_width = 4;
    plan.value_count = 1;
    plan.params = params_json(p);
    for (int kind = 0; kind < 2; ++kind) {
        const char* kname = kind == 0 ? "grid" : "random";
        for (std::size_t m = m_start; m <= m_end; ++m) {
            std::size_t n = 1;
            for (std::size_t j = 0; j < dim; ++j) n *= m;
            for (std::size_t r = 0; r < cfg.seeds.replications; ++r) {
                Cell c;
                c.label = std::string("iso_witness/kind=") + kname +
                          "/m=" + std::to_string(m) + "/rep=" + std::to_string(r);
                c.rows.push_back({{kname, std::to_string(m), std::to_string(n),
                                   std::to_string(r)},
                                  {double(kind), double(m), double(n)},
                                  {},
                                  {}});
                plan.cells.push_back(std::move(c));
            }
        }
    }
    plan.work = [dim, budget](Cell& c) {
        const auto kind = int(c.rows[0].meta[0]);
        const auto m = std::size_t(c.rows[0].meta[1]);
        const auto n = std::size_t(c.rows[0].meta[2]);
        pts::PointSet ps =
            kind == 0
                ? pts::PointSet::from_rows(dim, cube_grid(dim, m, 0.0), false)
                : pts::sample_uniform(dim, n, {c.seed, 0});
        c.rows[0].vals = {disc::iso_lower_search(ps, budget, {c.seed, 1}).value};
    };
    plan.finalize = [sep_min](const Plan& pl, json& summary) {
        const auto grid_pairs = group_means(pl.cells, 2, 0, 0.0, 0);
        const auto rand_pairs = group_means(pl.cells, 2, 0, 1.0, 0);
        fit_and_band(pl, summary, "grid", grid_pairs, kNan, kNan, "");
        fit_and_band(pl, summary, "random", rand_pairs, kNan, kNan, "");
        bool ok = false;
        if (summary["fits"]["grid"].contains("slope") &&
            summary["fits"]["random"].contains("slope")) {
            const double sep = summary["fits"]["grid"]["slope"].get<double>() -
                               summary["fits"]["random"]["slope"].get<double>();
            summary["metrics"] = {{"slope_separation", sep}};
            ok = sep >= sep_min;
        }
        add_check(summary, "slope_separation", ok);
    };
    return plan;
}

// ---- recovery_phase -----------------------------------------------------

Plan plan_recovery_phase(const ExperimentConfig& cfg) {
    const NumMap p = collect_params(
        cfg.parameters,
        {{"m", 64}, {"s", 3}, {"n_start", 6}, {"n_step", 6}, {"n_end", 30},
         {"tol", 1e-6}, {"max_iters", 4000}, {"rate_high", 0.95},
         {"rate_low", 0.20}, {"mono_slack", 0.05}});
    const std::size_t m = as_count(p, "m", 1);
    const std::size_t s = as_count(p, "s", 1);
    if (s > m) throw ConfigError("parameters.s: must not exceed m");
    const auto ns = linear_sweep(as_count(p, "n_start", 1),
                                 as_count(p, "n_step", 1), as_count(p, "n_end", 1));
    const double tol = as_positive(p, "tol");
    const std::size_t max_iters = as_count(p, "max_iters", 1);
    const double rate_high = p.at("rate_high");
    const double rate_low = p.at("rate_low");
    const double mono_slack = p.at("mono_slack");

    Plan plan;
    plan.columns = {"n", "trial", "seed", "success", "rel_error", "error"};
    plan.prefix_width = 2;
    plan.value_count = 2;
    plan.params = params_json(p);
    for (std::size_t n : ns)
        for (std::size_t t = 0; t < cfg.seeds.replications; ++t) {
            Cell c;
            c.label = "recovery_phase/n=" + std::to_string(n) +
                      "/trial=" + std::to_string(t);
            c.rows.push_back({{std::to_string(n), std::to_string(t)},
                              {double(n)},
                              {},
                              {}});
            plan.cells.push_back(std::move(c));
        }
    plan.work = [m, s, tol, max_iters](Cell& c) {
        const auto n = std::size_t(c.rows[0].meta[0]);
        Rng rng(c.seed, 0);
        Eigen::MatrixXd a(n, m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
                a(Eigen::Index(i), Eigen::Index(j)) = rng.next_normal();
        std::set<std::size_t> support;
        while (support.size() < s) support.insert(rng.next_below(m));
        Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
        for (std::size_t j : support) x[Eigen::Index(j)] = rng.next_normal();
        const Eigen::VectorXd y = a * x;
        double rel = std::numeric_limits<double>::infinity();
        try {
            const Eigen::VectorXd xhat = rec::decode_l1(a, y, 1e-9, max_iters);
            rel = (xhat - x).norm() / std::max(1.0, x.norm());
        } catch (const Infeasible&) {
            // an unsolved program is an unsuccessful trial, not a broken cell
        }
        c.rows[0].vals = {rel <= tol ? 1.0 : 0.0, rel};
    };
    plan.finalize = [ns, rate_high, rate_low, mono_slack](const Plan& pl,
                                                          json& summary) {
        std::map<double, std::pair<std::size_t, std::size_t>> counts;
        for (const auto& c : pl.cells) {
            if (!c.error.empty()) continue;
            auto& slot = counts[c.rows[0].meta[0]];
            slot.first += c.rows[0].vals[0] > 0.5 ? 1 : 0;
            slot.second += 1;
        }
        json per_n = json::array();
        bool have_all = counts.size() == ns.size();
        for (const auto& kv : counts)
            per_n.push_back({{"n", kv.first},
                             {"successes", kv.second.first},
                             {"trials", kv.second.second},
                             {"rate", double(kv.second.first) /
                                          double(kv.second.second)}});
        summary["metrics"] = {{"per_n", per_n}};
        auto rate_at = [&](double n) {
            const auto& slot = counts.at(n);
            return double(slot.first) / double(slot.second);
        };
        bool high = false, low = false, mono = true;
        if (have_all && !ns.empty()) {
            high = rate_at(double(ns.back())) >= rate_high;
            low = rate_at(double(ns.front())) <= rate_low;
            double prev = -1.0;
            for (std::size_t n : ns) {
                const double r = rate_at(double(n));
                if (r + mono_slack < prev) mono = false;
                prev = std::max(prev, r);
            }
        } else {
            mono = false;
        }
        add_check(summary, "high_success_at_max_n", high);
        add_check(summary, "low_success_at_min_n", low);
        add_check(summary, "monotone_within_slack", mono);
    };
    return plan;
}

// ---- recovery_rate ------------------------------------------------------

Plan plan_recovery_rate(const ExperimentConfig& cfg) {
    StrMap strings{{"decoder", "l1"}};
    const NumMap p = collect_params(cfg.parameters,
                                    {{"m", 256}, {"lambda", 1.0}, {"p", 1.0},
                                     {"n_start", 16}, {"n_end", 128},
                                     {"slope_min", kNan}, {"slope_max", kNan}},
                                    &strings);
    const std::size_t m = as_count(p, "m", 1);
    const double lambda = p.at("lambda");
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw ConfigError("parameters.lambda: expected a finite value >= 0");
    const double pnorm = as_positive(p, "p");
    const auto ns = dyadic_sweep(as_count(p, "n_start", 1), as_count(p, "n_end", 1));
    const double lo = p.at("slope_min"), hi = p.at("slope_max");
    rec::Decoder decoder;
    if (strings.at("decoder") == "l1") {
        decoder = rec::Decoder::l1;
    } else if (strings.at("decoder") == "lr") {
        decoder = rec::Decoder::lr;
    } else {
        throw ConfigError("parameters.decoder: expected 'l1' or 'lr'");
    }

    const std::size_t trials = cfg.seeds.replications;
    const std::string decoder_text = strings.at("decoder");

    Plan plan;
    plan.columns = {"m", "n", "trial", "decoder", "error", "seed"};
    plan.prefix_width = 4;
    plan.value_count = 1;
    plan.seed_last = true;
    plan.params = params_json(p, &strings);
    for (std::size_t n : ns) {
        Cell c;
        c.label = "recovery_rate/n=" + std::to_string(n);
        c.rows.push_back({{std::to_string(m), std::to_string(n), "0",
                           decoder_text},
                          {double(n)},
                          {},
                          {}});
        plan.cells.push_back(std::move(c));
    }
    // The signal family cycles with the trial index inside the experiment
    // call, so all trials for one n run in a single cell.
    plan.work = [m, lambda, pnorm, decoder, decoder_text, trials](Cell& c) {
        const auto n = std::size_t(c.rows[0].meta[0]);
        const auto e = ell::PolySemiaxes(lambda, m).ellipsoid(pnorm);
        const auto stats =
            rec::recovery_error_experiment(e, n, trials, decoder, {c.seed, 0});
        c.rows.clear();
        for (const auto& trial : stats.trials) {
            SubRow r;
            r.prefix = {std::to_string(m), std::to_string(n),
                        std::to_string(trial.trial), decoder_text};
            r.meta = {double(n)};
            r.vals = {trial.error};
            r.seed = trial.seed;
            c.rows.push_back(std::move(r));
        }
    };
    plan.finalize = [lo, hi](const Plan& pl, json& summary) {
        fit_and_band(pl, summary, "rate", group_max(pl.cells, 0, 0), lo, hi,
                     "slope_within_band");
    };
    return plan;
}

// ---- section_radius -----------------------------------------------------

Plan plan_section_radius(const ExperimentConfig& cfg) {
    const NumMap p = collect_params(
        cfg.parameters,
        {{"m", 400}, {"lambda", 1.0}, {"p", 2.0}, {"n_start", 20}, {"n_step", 20},
         {"n_end", 100}, {"ratio_bound", 2.0}, {"ratio_frac", 0.95},
         {"lower_slack", 1e-9}});
    const std::size_t m = as_count(p, "m", 1);
    const double lambda = p.at("lambda");
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw ConfigError("parameters.lambda: expected a finite value >= 0");
    if (p.at("p") != 2.0)
        throw ConfigError("parameters.p: the exact section solver needs p = 2");
    const auto ns = linear_sweep(as_count(p, "n_start", 1),
                                 as_count(p, "n_step", 1), as_count(p, "n_end", 1));
    if (!ns.empty() && ns.back() >= m)
        throw ConfigError("parameters.n_end: must stay below m");
    const double ratio_bound = as_positive(p, "ratio_bound");
    const double ratio_frac = p.at("ratio_frac");
    const double lower_slack = p.at("lower_slack");

    Plan plan;
    plan.columns = {"n", "draw", "seed", "radius", "sigma_next", "shape",
                    "ratio", "error"};
    plan.prefix_width = 2;
    plan.value_count = 4;
    plan.params = params_json(p);
    for (std::size_t n : ns)
        for (std::size_t r = 0; r < cfg.seeds.replications; ++r) {
            Cell c;
            c.label = "section_radius/n=" + std::to_string(n) +
                      "/draw=" + std::to_string(r);
            c.rows.push_back({{std::to_string(n), std::to_string(r)},
                              {double(n)},
                              {},
                              {}});
            plan.cells.push_back(std::move(c));
        }
    plan.work = [m, lambda](Cell& c) {
        const auto n = std::size_t(c.rows[0].meta[0]);
        const auto info = rec::sample_gaussian_info(n, m, {c.seed, 0});
        const auto kernel = rec::kernel_basis(info);
        const auto e = ell::PolySemiaxes(lambda, m).ellipsoid(2.0);
        const double radius = rec::section_radius_exact_p2(e, kernel);
        const double sigma_next = std::pow(double(n + 1), -lambda);
        double tail = 0.0;
        for (std::size_t j = std::max<std::size_t>(1, n / 4); j <= m; ++j)
            tail += std::pow(double(j), -2.0 * lambda);
        const double shape = std::sqrt(tail / double(n));
        c.rows[0].vals = {radius, sigma_next, shape, radius / shape};
    };
    plan.finalize = [ratio_bound, ratio_frac, lower_slack](const Plan& pl,
                                                           json& summary) {
        std::size_t ok_cells = 0, below = 0, lower_bad = 0;
        double max_ratio = 0.0;
        for (const auto& c : pl.cells) {
            if (!c.error.empty()) continue;
            ++ok_cells;
            const auto& v = c.rows[0].vals;
            if (v[3] <= ratio_bound) ++below;
            max_ratio = std::max(max_ratio, v[3]);
            if (!(v[0] >= v[1] * (1.0 - lower_slack))) ++lower_bad;
        }
        const double frac =
            ok_cells ? double(below) / double(ok_cells) : 0.0;
        summary["metrics"] = {{"max_ratio", max_ratio},
                              {"frac_ratio_below_bound", frac},
                              {"lower_violations", lower_bad}};
        add_check(summary, "radius_above_next_semiaxis",
                  ok_cells > 0 && lower_bad == 0);
        add_check(summary, "ratio_mostly_bounded",
                  ok_cells > 0 && frac >= ratio_frac);
    };
    return plan;
}

// ---- mls_rate -----------------------------------------------------------

Plan plan_mls_rate(const ExperimentConfig& cfg) {
    const NumMap p = collect_params(
        cfg.parameters,
        {{"dim", 2}, {"degree", 2}, {"m_start", 8}, {"m_end", 32},
         {"samples", 600}, {"multiplier", 1.5}, {"q", 0.0},
         {"slope_min", -1.75}, {"slope_max", -1.25}});
    const std::size_t dim = as_count(p, "dim", 1);
    const std::size_t degree = as_count(p, "degree", 0);
    const std::size_t samples = as_count(p, "samples", 1);
    const double multiplier = as_positive(p, "multiplier");
    const double q_raw = p.at("q");  // zero selects the sample maximum
    if (q_raw < 0.0) throw ConfigError("parameters.q: expected q >= 0");
    const double q = q_raw == 0.0 ? std::numeric_limits<double>::infinity() : q_raw;
    const double lo = p.at("slope_min"), hi = p.at("slope_max");
    std::vector<std::size_t> ms;
    for (std::size_t m = as_count(p, "m_start", 2); m <= as_count(p, "m_end", 2);
         m *= 2)
        ms.push_back(m);
    if (ms.empty()) throw ConfigError("parameters.m_end: must not be below m_start");

    Plan plan;
    plan.columns = {"m", "n", "rep", "seed", "value", "error"};
    plan.prefix_width = 3;
    plan.value_count = 1;
    plan.params = params_json(p);
    for (std::size_t m : ms) {
        std::size_t n = 1;
        for (std::size_t j = 0; j < dim; ++j) n *= m;
        for (std::size_t r = 0; r < cfg.seeds.replications; ++r) {
            Cell c;
            c.label = "mls_rate/m=" + std::to_string(m) +
                      "/rep=" + std::to_string(r);
            c.rows.push_back({{std::to_string(m), std::to_string(n),
                               std::to_string(r)},
                              {double(m), double(n)},
                              {},
                              {}});
            plan.cells.push_back(std::move(c));
        }
    }
    plan.work = [dim, degree, samples, multiplier, q](Cell& c) {
        const auto m = std::size_t(c.rows[0].meta[0]);
        const auto ps = pts::PointSet::from_rows(dim, cube_grid(dim, m, 0.5), false);
        auto f = [dim](const std::vector<double>& x) {
            double v = 1.0;
            for (std::size_t j = 0; j < dim; ++j) {
                const double t = 2.0 * kPi * x[j];
                v *= (j % 2 == 0) ? std::sin(t) : std::cos(t);
            }
            return v;
        };
        std::vector<double> fv(ps.size());
        for (std::size_t i = 0; i < ps.size(); ++i) {
            std::vector<double> x(dim);
            for (std::size_t j = 0; j < dim; ++j) x[j] = ps.coord(i, j);
            fv[i] = f(x);
        }
        apx::MLSConfig config;
        config.degree = degree;
        config.scale_multiplier = multiplier;
        Rng rng(c.seed, 1);
        c.rows[0].vals = {apx::lq_error(f, fv, ps, q, config, samples, rng)};
    };
    plan.finalize = [lo, hi](const Plan& pl, json& summary) {
        fit_and_band(pl, summary, "rate", group_means(pl.cells, 1, 0), lo, hi,
                     "slope_within_band");
    };
    return plan;
}

// ---- planted_hole -------------------------------------------------------

Plan plan_planted_hole(const ExperimentConfig& cfg) {
    const NumMap p = collect_params(cfg.parameters,
                                    {{"dim", 2}, {"gamma", 2}, {"beta", 0.4},
                                     {"n_start", 64}, {"n_end", 4096},
                                     {"samples", 4096}, {"slope_min", kNan},
                                     {"slope_max", kNan}});
    const std::size_t dim = as_count(p, "dim", 1);
    const double gamma = as_positive(p, "gamma");
    const double beta = as_positive(p, "beta");
    const std::size_t samples = as_count(p, "samples", 1);
    const auto ns = dyadic_sweep(as_count(p, "n_start", 1), as_count(p, "n_end", 1));
    const double lo = p.at("slope_min"), hi = p.at("slope_max");

    Plan plan;
    plan.columns = {"n", "rep", "seed", "value", "error"};
    plan.prefix_width = 2;
    plan.value_count = 1;
    plan.params = params_json(p);
    for (std::size_t n : ns)
        for (std::size_t r = 0; r < cfg.seeds.replications; ++r) {
            Cell c;
            c.label = "planted_hole/n=" + std::to_string(n) +
                      "/rep=" + std::to_string(r);
            c.rows.push_back({{std::to_string(n), std::to_string(r)},
                              {double(n)},
                              {},
                              {}});
            plan.cells.push_back(std::move(c));
        }
    plan.work = [dim, gamma, beta, samples](Cell& c) {
        const auto n = std::size_t(c.rows[0].meta[0]);
        const auto ps = pts::planted_hole_points(dim, n, beta, {c.seed, 0});
        pts::DistortionQuery q;
        q.gamma = gamma;
        q.sample_count = samples;
        q.seed = c.seed;
        c.rows[0].vals = {pts::distortion(ps, q)};
    };
    plan.finalize = [lo, hi](const Plan& pl, json& summary) {
        fit_and_band(pl, summary, "rate", group_means(pl.cells, 0, 0), lo, hi,
                     "slope_within_band");
    };
    return plan;
}

// ---- kappa_gap ----------------------------------------------------------

Plan plan_kappa_gap(const ExperimentConfig& cfg) {
    const NumMap p = collect_params(cfg.parameters,
                                    {{"d_start", 10}, {"d_end", 200},
                                     {"d_step", 10}, {"c_bound", 3.0}});
    const std::size_t d_start = as_count(p, "d_start", 1);
    const std::size_t d_step = as_count(p, "d_step", 1);
    const std::size_t d_end = as_count(p, "d_end", 1);
    if (d_end < d_start)
        throw ConfigError("parameters.d_end: must not be below d_start");
    const double c_bound = as_positive(p, "c_bound");

    Plan plan;
    plan.columns = {"d", "rep", "seed", "sum", "log_sum", "log_gap",
                    "gap_over_cbrt", "error"};
    plan.prefix_width = 2;
    plan.value_count = 4;
    plan.params = params_json(p);
    for (std::size_t d = d_start; d <= d_end; d += d_step)
        for (std::size_t r = 0; r < cfg.seeds.replications; ++r) {
            Cell c;
            c.label = "kappa_gap/d=" + std::to_string(d) +
                      "/rep=" + std::to_string(r);
            c.rows.push_back({{std::to_string(d), std::to_string(r)},
                              {double(d)},
                              {},
                              {}});
            plan.cells.push_back(std::move(c));
        }
    plan.work = [](Cell& c) {
        const auto d = std::size_t(c.rows[0].meta[0]);
        const auto ks = disc::kappa_sum(d);
        c.rows[0].vals = {ks.sum, ks.log_sum, ks.log_gap,
                          std::abs(ks.log_gap) / std::cbrt(double(d))};
    };
    plan.finalize = [c_bound](const Plan& pl, json& summary) {
        double c_max = 0.0;
        std::size_t ok_cells = 0;
        for (const auto& c : pl.cells) {
            if (!c.error.empty()) continue;
            ++ok_cells;
            c_max = std::max(c_max, c.rows[0].vals[3]);
        }
        summary["metrics"] = {{"c_max", c_max}};
        add_check(summary, "gap_constant_bounded", ok_cells > 0 && c_max < c_bound);
    };
    return plan;
}

Plan build_plan(const ExperimentConfig& cfg) {
    switch (cfg.experiment) {
        case Experiment::distortion_rate: return plan_distortion_rate(cfg);
        case Experiment::covering_rate: return plan_covering_rate(cfg);
        case Experiment::cohort_limit: return plan_cohort_limit(cfg);
        case Experiment::spectral_audit: return plan_spectral_audit(cfg);
        case Experiment::iso_witness: return plan_iso_witness(cfg);
        case Experiment::recovery_phase: return plan_recovery_phase(cfg);
        case Experiment::recovery_rate: return plan_recovery_rate(cfg);
        case Experiment::section_radius: return plan_section_radius(cfg);
        case Experiment::mls_rate: return plan_mls_rate(cfg);
        case Experiment::planted_hole: return plan_planted_hole(cfg);
        case Experiment::kappa_gap: return plan_kappa_gap(cfg);
    }
    throw ConfigError("experiment: unknown experiment");
}

std::string quote_csv(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::distortion_rate: return "distortion_rate";
        case Experiment::covering_rate: return "covering_rate";
        case Experiment::cohort_limit: return "cohort_limit";
        case Experiment::spectral_audit: return "spectral_audit";
        case Experiment::iso_witness: return "iso_witness";
        case Experiment::recovery_phase: return "recovery_phase";
        case Experiment::recovery_rate: return "recovery_rate";
        case Experiment::section_radius: return "section_radius";
        case Experiment::mls_rate: return "mls_rate";
        case Experiment::planted_hole: return "planted_hole";
        case Experiment::kappa_gap: return "kappa_gap";
    }
    return "unknown";
}

Experiment experiment_from_name(const std::string& name) {
    static const std::map<std::string, Experiment> table = {
        {"distortion_rate", Experiment::distortion_rate},
        {"covering_rate", Experiment::covering_rate},
        {"cohort_limit", Experiment::cohort_limit},
        {"spectral_audit", Experiment::spectral_audit},
        {"iso_witness", Experiment::iso_witness},
        {"recovery_phase", Experiment::recovery_phase},
        {"recovery_rate", Experiment::recovery_rate},
        {"section_radius", Experiment::section_radius},
        {"mls_rate", Experiment::mls_rate},
        {"planted_hole", Experiment::planted_hole},
        {"kappa_gap", Experiment::kappa_gap},
    };
    const auto it = table.find(name);
    if (it == table.end())
        throw ConfigError("experiment: unknown experiment '" + name + "'");
    return it->second;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    for (const auto& item : j.items()) {
        const std::string& k = item.key();
        if (k != "experiment" && k != "parameters" && k != "seeds" && k != "output")
            throw ConfigError(k + ": unexpected field");
    }
    ExperimentConfig cfg;
    if (!j.contains("experiment") || !j["experiment"].is_string())
        throw ConfigError("experiment: expected a string");
    cfg.experiment = experiment_from_name(j["experiment"].get<std::string>());
    if (j.contains("parameters")) {
        if (!j["parameters"].is_object())
            throw ConfigError("parameters: expected an object");
        for (const auto& item : j["parameters"].items())
            if (!item.value().is_number() && !item.value().is_string())
                throw ConfigError("parameters." + item.key() +
                                  ": expected a number or string");
        cfg.parameters = j["parameters"];
    }
    if (j.contains("seeds")) {
        const json& s = j["seeds"];
        if (!s.is_object()) throw ConfigError("seeds: expected an object");
        for (const auto& item : s.items()) {
            const std::string& k = item.key();
            if (k != "base" && k != "replications")
                throw ConfigError("seeds." + k + ": unexpected field");
        }
        auto nonneg = [](const json& v) {
            return v.is_number_unsigned() ||
                   (v.is_number_integer() && v.get<std::int64_t>() >= 0);
        };
        if (s.contains("base")) {
            if (!nonneg(s["base"]))
                throw ConfigError("seeds.base: expected an unsigned integer");
            cfg.seeds.base = s["base"].get<std::uint64_t>();
        }
        if (s.contains("replications")) {
            if (!nonneg(s["replications"]) ||
                s["replications"].get<std::uint64_t>() == 0)
                throw ConfigError("seeds.replications: expected a positive integer");
            cfg.seeds.replications = s["replications"].get<std::size_t>();
        }
    }
    if (j.contains("output")) {
        if (!j["output"].is_string())
            throw ConfigError("output: expected a string");
        cfg.output = j["output"].get<std::string>();
    }
    return cfg;
}

json ExperimentConfig::to_json() const {
    return {{"experiment", experiment_name(experiment)},
            {"parameters", parameters},
            {"seeds", {{"base", seeds.base}, {"replications", seeds.replications}}},
            {"output", output}};
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& pairs,
                 bool log_x, bool log_y) {
    if (pairs.size() < 2)
        throw DegenerateInput("rate fit needs at least two points");
    std::vector<double> xs(pairs.size()), ys(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        double x = pairs[i].first, y = pairs[i].second;
        if (log_x) {
            if (!(x > 0.0))
                throw DegenerateInput("log transform needs positive x values");
            x = std::log(x);
        }
        if (log_y) {
            if (!(y > 0.0))
                throw DegenerateInput("log transform needs positive y values");
            y = std::log(y);
        }
        if (!std::isfinite(x) || !std::isfinite(y))
            throw DegenerateInput("rate fit needs finite values");
        xs[i] = x;
        ys[i] = y;
    }
    const double n = double(pairs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0))
        throw DegenerateInput("rate fit needs two distinct x values");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0
                        ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0)
                        : 1.0;
    fit.point_count = pairs.size();
    return fit;
}

std::uint64_t derive_seed_path(std::uint64_t base,
                               std::initializer_list<std::string_view> labels) {
    for (std::string_view label : labels) base = derive_seed(base, label);
    return base;
}

std::string rows_to_csv(const std::vector<std::string>& columns,
                        const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (j) out.push_back(',');
        out += quote_csv(columns[j]);
    }
    out.push_back('\n');
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out.push_back(',');
            out += quote_csv(row[j]);
        }
        out.push_back('\n');
    }
    return out;
}

RunResult run(const ExperimentConfig& config, std::size_t jobs) {
    if (config.seeds.replications == 0)
        throw ConfigError("seeds.replications: expected a positive integer");
    Plan plan = build_plan(config);

    std::set<std::uint64_t> seen;
    for (auto& c : plan.cells) {
        c.seed = derive_seed(config.seeds.base, c.label);
        if (!seen.insert(c.seed).second)
            throw NumericalFailure("derived seed collision between sweep cells: " +
                                   c.label);
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= plan.cells.size()) return;
            Cell& c = plan.cells[i];
            const auto planned = c.rows;
            try {
                plan.work(c);
            } catch (const std::exception& e) {
                c.error = e.what();
                c.rows = planned;
                for (auto& r : c.rows) r.vals.clear();
            }
        }
    };
    std::size_t workers = jobs == 0 ? 1 : jobs;
    workers = std::min(workers, std::max<std::size_t>(plan.cells.size(), 1));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (std::size_t k = 0; k < workers; ++k) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    RunResult result;
    result.columns = plan.columns;
    json errors = json::array();
    for (const auto& c : plan.cells) {
        if (!c.error.empty())
            errors.push_back({{"row", result.rows.size()},
                              {"label", c.label},
                              {"message", c.error}});
        for (const auto& r : c.rows) {
            std::vector<std::string> row = r.prefix;
            row.resize(plan.prefix_width, "");  // failures may lack derived keys
            const std::uint64_t seed_val = r.seed.value_or(c.seed);
            if (!plan.seed_last) row.push_back(std::to_string(seed_val));
            if (c.error.empty()) {
                for (double v : r.vals) row.push_back(fmt(v));
            } else {
                for (std::size_t k = 0; k < plan.value_count; ++k)
                    row.push_back("nan");
            }
            if (plan.seed_last) {
                row.push_back(std::to_string(seed_val));
            } else {
                row.push_back(c.error);
            }
            result.rows.push_back(std::move(row));
        }
    }

    json summary;
    summary["experiment"] = experiment_name(config.experiment);
    summary["parameters"] = plan.params;
    summary["seeds"] = {{"base", config.seeds.base},
                        {"replications", config.seeds.replications}};
    summary["row_count"] = result.rows.size();
    summary["columns"] = plan.columns;
    summary["errors"] = errors;
    summary["checks"] = json::object();
    plan.finalize(plan, summary);
    add_check(summary, "all_cells_computed", errors.empty());

    bool all_ok = true;
    for (const auto& item : summary["checks"].items())
        all_ok = all_ok && item.value().get<bool>();
    summary["checks_passed"] = all_ok;
    result.summary = summary;
    result.checks_passed = all_ok;

    if (!config.output.empty()) {
        const std::filesystem::path csv_path(config.output);
        if (csv_path.has_parent_path())
            std::filesystem::create_directories(csv_path.parent_path());
        io::write_file(csv_path.string(), rows_to_csv(result.columns, result.rows));
        std::filesystem::path sum_path = csv_path;
        sum_path.replace_extension(".json");
        if (sum_path == csv_path) sum_path += ".json";
        io::write_file(sum_path.string(), summary.dump(2) + "\n");
        result.csv_path = csv_path.string();
        result.summary_path = sum_path.string();
    }
    return result;
}

}  // namespace randinfo::xcli
