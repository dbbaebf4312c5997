/**
 * Point-cloud ingestion, exact fixed-point pairwise distances, and the
 * filtration schedule (sorted distinct pairwise distances, prefixed by 0).
 *
 * Vertex order is file order; that total order defines simplex orientation
 * everywhere downstream.
 */

#ifndef QTDA_POINT_CLOUD_HPP
#define QTDA_POINT_CLOUD_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "fixed_point.hpp"

namespace qtda {

/** N labelled points in R^d with fixed-point b-bit coordinates. */
struct PointCloud {
    std::vector<std::vector<std::int64_t>> coords;  ///< raw fixed-point coordinates, [N][d]
    FixedPointFormat format;
    std::vector<std::string> labels;  ///< ordered vertex names (simplex orientation order)

    int size() const { return static_cast<int>(coords.size()); }
    int dim() const { return coords.empty() ? 0 : static_cast<int>(coords.front().size()); }

    double coord(int i, int j) const { return dequantize(coords[i][j], format); }
};

/**
 * Symmetric matrix of exact squared distances.  Entries are raw integers at
 * scale 2^(2*frac_bits); `value(i,j)` converts back to a real squared
 * distance.
 */
struct DistanceMatrix {
    int n = 0;
    int frac_bits = 0;                            ///< of the source cloud; sq scale is 2*frac_bits
    std::vector<std::vector<std::int64_t>> sq_raw;  ///< [N][N] raw squared distances

    double value(int i, int j) const {
        return std::ldexp(static_cast<double>(sq_raw[i][j]), -2 * frac_bits);
    }
};

/**
 * Strictly increasing scale values mu_0 = 0 < mu_1 < ... one per distinct
 * pairwise distance.  Scales are carried as exact raw squared distances so
 * that threshold tests downstream stay exact.
 */
struct FiltrationSchedule {
    int frac_bits = 0;
    std::vector<std::int64_t> sq_raw;  ///< raw squared scale values, strictly increasing, sq_raw[0] = 0

    int size() const { return static_cast<int>(sq_raw.size()); }

    double mu(int i) const {
        return std::sqrt(std::ldexp(static_cast<double>(sq_raw[i]), -2 * frac_bits));
    }
};

namespace detail {

inline std::vector<std::string> default_labels(int n) {
    // A, B, ..., Z, P26, P27, ... -- single letters for desk-scale examples.
    std::vector<std::string> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (i < 26)
            out.push_back(std::string(1, static_cast<char>('A' + i)));
        else
            out.push_back("P" + std::to_string(i));
    }
    return out;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    return out;
}

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/** Build a cloud from real coordinates, quantizing into the given format. */
inline PointCloud make_point_cloud(const std::vector<std::vector<double>>& points,
                                   const FixedPointFormat& fmt,
                                   std::vector<std::string> labels = {}) {
    if (points.empty()) throw ConfigError("point cloud must contain at least one point");
    PointCloud cloud;
    cloud.format = fmt;
    const std::size_t d = points.front().size();
    if (d == 0) throw ConfigError("points must have dimension >= 1");
    for (const auto& p : points) {
        if (p.size() != d) throw ConfigError("inconsistent point dimension");
        std::vector<std::int64_t> row;
        row.reserve(d);
        for (double x : p) row.push_back(quantize(x, fmt));
        cloud.coords.push_back(std::move(row));
    }
    if (labels.empty())
        cloud.labels = detail::default_labels(cloud.size());
    else if (static_cast<int>(labels.size()) != cloud.size())
        throw ConfigError("label count does not match point count");
    else
        cloud.labels = std::move(labels);
    return cloud;
}

/**
 * Parse a CSV stream: one row per point, comma-separated decimals, optional
 * header line `# labels: A,B,...`.
 */
inline PointCloud load_point_cloud_csv(std::istream& in, int bits, int frac_bits) {
    std::vector<std::vector<double>> points;
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            const std::string tag = "# labels:";
            if (t.rfind(tag, 0) == 0)
                for (const auto& l : detail::split(t.substr(tag.size()), ','))
                    labels.push_back(detail::trim(l));
            continue;
        }
        std::vector<double> row;
        for (const auto& cell : detail::split(t, ',')) {
            try {
                std::size_t pos = 0;
                double v = std::stod(detail::trim(cell), &pos);
                row.push_back(v);
            } catch (const std::exception&) {
                throw ConfigError("CSV parse failure at cell '" + cell + "'");
            }
        }
        points.push_back(std::move(row));
    }
    return make_point_cloud(points, FixedPointFormat{bits, frac_bits}, std::move(labels));
}

/** Parse JSON `{"points": [[...],...], "labels": [...], "bits": b}`. */
inline PointCloud load_point_cloud_json(std::istream& in, int default_bits, int frac_bits) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("JSON parse failure: ") + e.what());
    }
    if (!j.contains("points") || !j["points"].is_array())
        throw ConfigError("JSON cloud must contain a 'points' array");
    std::vector<std::vector<double>> points;
    for (const auto& p : j["points"]) points.push_back(p.get<std::vector<double>>());
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
    const int bits = j.value("bits", default_bits);
    return make_point_cloud(points, FixedPointFormat{bits, frac_bits}, std::move(labels));
}

/** File-path front end selecting the parser by `format` ("csv" or "json"). */
inline PointCloud load_point_cloud(const std::string& path, const std::string& format,
                                   int bits = 32, int frac_bits = 12) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open point-cloud file: " + path);
    if (format == "csv") return load_point_cloud_csv(in, bits, frac_bits);
    if (format == "json") return load_point_cloud_json(in, bits, frac_bits);
    throw ConfigError("unknown point-cloud format: " + format);
}

/** Exact fixed-point squared distances; overflow is a hard error. */
inline DistanceMatrix pairwise_distances(const PointCloud& cloud) {
    const int n = cloud.size();
    const int d = cloud.dim();
    DistanceMatrix dm;
    dm.n = n;
    dm.frac_bits = cloud.format.frac_bits;
    dm.sq_raw.assign(n, std::vector<std::int64_t>(n, 0));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            std::int64_t acc = 0;
            for (int l = 0; l < d; ++l) {
                const std::int64_t diff =
                    detail::checked_sub_i64(cloud.coords[i][l], cloud.coords[j][l]);
                acc = detail::checked_add_i64(acc, detail::checked_mul_i64(diff, diff));
            }
            dm.sq_raw[i][j] = dm.sq_raw[j][i] = acc;
        }
    }
    return dm;
}

/** Sorted deduplicated pairwise distances, prefixed by scale 0. */
inline FiltrationSchedule filtration_scales(const DistanceMatrix& dm) {
    FiltrationSchedule fs;
    fs.frac_bits = dm.frac_bits;
    std::vector<std::int64_t> vals;
    for (int i = 0; i < dm.n; ++i)
        for (int j = i + 1; j < dm.n; ++j) vals.push_back(dm.sq_raw[i][j]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    fs.sq_raw.push_back(0);
    for (std::int64_t v : vals)
        if (v != 0) fs.sq_raw.push_back(v);
    return fs;
}

}  // namespace qtda

#endif  // QTDA_POINT_CLOUD_HPP
