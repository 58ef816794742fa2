#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "randinfo/cubature.hpp"
#include "randinfo/discrepancy.hpp"
#include "randinfo/lattice.hpp"
#include "randinfo/pointset.hpp"

namespace randinfo::io {

// %.17g: shortest fixed format that round-trips doubles through text.
std::string format_double(double v);

// One point per row, coordinates comma-separated.
std::string pointset_to_csv(const pts::PointSet& p);
pts::PointSet pointset_from_csv(const std::string& text, bool torus = false);

// {"dim": d, "torus": flag, "points": [[...], ...]}
nlohmann::json pointset_to_json(const pts::PointSet& p);
pts::PointSet pointset_from_json(const nlohmann::json& j);

// {"dim": d, "rows": [[...], ...]} with matrix rows in order.
nlohmann::json basis_to_json(const lat::LatticeBasis& b);
lat::LatticeBasis basis_from_json(const nlohmann::json& j);

// "n z1 ... zd"
std::string generator_to_line(std::uint64_t n, const std::vector<long long>& z);
std::pair<std::uint64_t, std::vector<long long>> generator_from_line(
    const std::string& line);

// {"points": ..., "weights": [...]}
nlohmann::json rule_to_json(const cub::CubatureRule& rule);
cub::CubatureRule rule_from_json(const nlohmann::json& j);

// Witness value together with the parameters of the convex set behind it.
nlohmann::json witness_to_json(const disc::DiscrepancyWitness& w);
disc::DiscrepancyWitness witness_from_json(const nlohmann::json& j);

// Point columns followed by one value column.
std::string table_to_csv(const pts::PointSet& p,
                         const std::vector<double>& values);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace randinfo::io
