#include "randinfo/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "randinfo/errors.hpp"

namespace randinfo::io {

namespace {

double parse_double(const std::string& cell) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || end == nullptr)
        throw ConfigError("not a number: '" + cell + "'");
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    if (*end != '\0')
        throw ConfigError("trailing characters after number: '" + cell + "'");
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::vector<double>> rows_of(const nlohmann::json& j,
                                         const char* key) {
    if (!j.contains(key) || !j[key].is_array())
        throw ConfigError(std::string(key) + ": expected an array");
    std::vector<std::vector<double>> rows;
    for (const auto& r : j[key]) {
        if (!r.is_array())
            throw ConfigError(std::string(key) + ": expected arrays of numbers");
        rows.push_back(r.get<std::vector<double>>());
    }
    return rows;
}

pts::PointSet set_from_rows(std::size_t dim,
                            const std::vector<std::vector<double>>& rows,
                            bool torus) {
    for (const auto& r : rows)
        if (r.size() != dim)
            throw ConfigError("point with wrong coordinate count");
    return pts::PointSet::from_rows(dim, rows, torus);
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string pointset_to_csv(const pts::PointSet& p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < p.dim(); ++j) {
            if (j > 0) out.push_back(',');
            out += format_double(p.coord(i, j));
        }
        out.push_back('\n');
    }
    return out;
}

pts::PointSet pointset_from_csv(const std::string& text, bool torus) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split(line, ','))
            row.push_back(parse_double(cell));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("point set file has no rows");
    return set_from_rows(rows.front().size(), rows, torus);
}

nlohmann::json pointset_to_json(const pts::PointSet& p) {
    nlohmann::json pts_json = nlohmann::json::array();
    for (std::size_t i = 0; i < p.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < p.dim(); ++j) row.push_back(p.coord(i, j));
        pts_json.push_back(std::move(row));
    }
    return {{"dim", p.dim()}, {"torus", p.torus()}, {"points", std::move(pts_json)}};
}

pts::PointSet pointset_from_json(const nlohmann::json& j) {
    if (!j.contains("dim") || !j["dim"].is_number_unsigned())
        throw ConfigError("dim: expected a positive integer");
    if (!j.contains("torus") || !j["torus"].is_boolean())
        throw ConfigError("torus: expected a boolean");
    return set_from_rows(j["dim"].get<std::size_t>(), rows_of(j, "points"),
                         j["torus"].get<bool>());
}

nlohmann::json basis_to_json(const lat::LatticeBasis& b) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < b.b.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < b.b.cols(); ++j) row.push_back(b.b(i, j));
        rows.push_back(std::move(row));
    }
    return {{"dim", b.b.rows()}, {"rows", std::move(rows)}};
}

lat::LatticeBasis basis_from_json(const nlohmann::json& j) {
    const auto rows = rows_of(j, "rows");
    if (rows.empty()) throw ConfigError("rows: basis must not be empty");
    const std::size_t d = rows.size();
    lat::LatticeBasis out;
    out.b.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < d; ++i) {
        if (rows[i].size() != rows.front().size())
            throw ConfigError("rows: ragged basis matrix");
        for (std::size_t k = 0; k < rows[i].size(); ++k)
            out.b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
    return out;
}

std::string generator_to_line(std::uint64_t n, const std::vector<long long>& z) {
    std::string out = std::to_string(n);
    for (long long zi : z) {
        out.push_back(' ');
        out += std::to_string(zi);
    }
    return out;
}

std::pair<std::uint64_t, std::vector<long long>> generator_from_line(
    const std::string& line) {
    std::istringstream in(line);
    std::uint64_t n = 0;
    if (!(in >> n) || n == 0)
        throw ConfigError("generator line must start with a positive count");
    std::vector<long long> z;
    long long zi = 0;
    while (in >> zi) z.push_back(zi);
    if (!in.eof()) throw ConfigError("generator line has non-integer entries");
    if (z.empty()) throw ConfigError("generator line has no components");
    return {n, std::move(z)};
}

nlohmann::json rule_to_json(const cub::CubatureRule& rule) {
    return {{"points", pointset_to_json(rule.points)},
            {"weights", rule.weights}};
}

cub::CubatureRule rule_from_json(const nlohmann::json& j) {
    if (!j.contains("points")) throw ConfigError("points: missing");
    if (!j.contains("weights") || !j["weights"].is_array())
        throw ConfigError("weights: expected an array");
    return cub::CubatureRule(pointset_from_json(j["points"]),
                             j["weights"].get<std::vector<double>>());
}

namespace {

const char* kind_name(disc::ConvexTestSet::Kind k) {
    switch (k) {
        case disc::ConvexTestSet::Kind::halfspace: return "halfspace";
        case disc::ConvexTestSet::Kind::slab: return "slab";
        case disc::ConvexTestSet::Kind::ball: return "ball";
        case disc::ConvexTestSet::Kind::axis_box: return "axis_box";
    }
    throw ConfigError("unknown test-set kind");
}

std::vector<double> numbers_of(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array())
        throw ConfigError(std::string(key) + ": expected an array");
    return j[key].get<std::vector<double>>();
}

double num_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(std::string(key) + ": expected a number");
    return j[key].get<double>();
}

}  // namespace

nlohmann::json witness_to_json(const disc::DiscrepancyWitness& w) {
    nlohmann::json set;
    set["kind"] = kind_name(w.set.kind);
    switch (w.set.kind) {
        case disc::ConvexTestSet::Kind::halfspace:
            set["normal"] = w.set.a;
            set["offset"] = w.set.b;
            break;
        case disc::ConvexTestSet::Kind::slab:
            set["normal"] = w.set.a;
            set["lo"] = w.set.b_lo;
            set["hi"] = w.set.b_hi;
            break;
        case disc::ConvexTestSet::Kind::ball:
            set["center"] = w.set.center;
            set["radius"] = w.set.radius;
            break;
        case disc::ConvexTestSet::Kind::axis_box:
            set["lower"] = w.set.lo;
            set["upper"] = w.set.hi;
            break;
    }
    return {{"set", std::move(set)},
            {"count_fraction", w.count_fraction},
            {"volume", w.volume},
            {"volume_error", w.volume_error},
            {"value", w.value}};
}

disc::DiscrepancyWitness witness_from_json(const nlohmann::json& j) {
    if (!j.contains("set") || !j["set"].is_object())
        throw ConfigError("set: expected an object");
    const auto& s = j["set"];
    if (!s.contains("kind") || !s["kind"].is_string())
        throw ConfigError("set.kind: expected a string");
    const std::string kind = s["kind"].get<std::string>();
    disc::DiscrepancyWitness w;
    if (kind == "halfspace") {
        w.set = disc::ConvexTestSet::halfspace(numbers_of(s, "normal"),
                                               num_field(s, "offset"));
    } else if (kind == "slab") {
        w.set = disc::ConvexTestSet::slab(numbers_of(s, "normal"),
                                          num_field(s, "lo"), num_field(s, "hi"));
    } else if (kind == "ball") {
        w.set = disc::ConvexTestSet::ball(numbers_of(s, "center"),
                                          num_field(s, "radius"));
    } else if (kind == "axis_box") {
        w.set = disc::ConvexTestSet::axis_box(numbers_of(s, "lower"),
                                              numbers_of(s, "upper"));
    } else {
        throw ConfigError("set.kind: unknown kind '" + kind + "'");
    }
    w.count_fraction = num_field(j, "count_fraction");
    w.volume = num_field(j, "volume");
    w.volume_error = num_field(j, "volume_error");
    w.value = num_field(j, "value");
    return w;
}

std::string table_to_csv(const pts::PointSet& p,
                         const std::vector<double>& values) {
    if (values.size() != p.size())
        throw PointCountMismatch("table needs one value per point");
    std::string out;
    for (std::size_t j = 0; j < p.dim(); ++j) {
        out += "x" + std::to_string(j + 1);
        out.push_back(',');
    }
    out += "value\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < p.dim(); ++j) {
            out += format_double(p.coord(i, j));
            out.push_back(',');
        }
        out += format_double(values[i]);
        out.push_back('\n');
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
    if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace randinfo::io
