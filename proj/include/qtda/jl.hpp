/**
 * Johnson-Lindenstrauss preprocessing: project a high-dimensional cloud to
 * dimension ceil(c * ln(N) / eps^2) with a Gaussian random matrix, certify
 * that all pairwise distances are preserved within (1 +- eps), and redraw
 * on certificate failure.
 */

#ifndef QTDA_JL_HPP
#define QTDA_JL_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "errors.hpp"
#include "point_cloud.hpp"

namespace qtda {

/// Implementation constant c in the target-dimension formula.
inline constexpr double kJlDimensionConstant = 8.0;
/// Redraws before giving up on the distortion certificate.
inline constexpr int kJlMaxRetries = 16;

inline int jl_target_dimension(int n_points, double eps_jl) {
    if (eps_jl <= 0.0 || eps_jl >= 1.0) throw ConfigError("eps_jl must lie in (0, 1)");
    return static_cast<int>(
        std::ceil(kJlDimensionConstant * std::log(static_cast<double>(n_points)) /
                  (eps_jl * eps_jl)));
}

/** True iff every pairwise distance ratio lies in [1-eps, 1+eps]. */
inline bool jl_certificate(const PointCloud& original, const PointCloud& projected,
                           double eps_jl) {
    const DistanceMatrix d0 = pairwise_distances(original);
    const DistanceMatrix d1 = pairwise_distances(projected);
    for (int i = 0; i < d0.n; ++i) {
        for (int j = i + 1; j < d0.n; ++j) {
            const double a = std::sqrt(d0.value(i, j));
            const double b = std::sqrt(d1.value(i, j));
            if (a == 0.0) {
                if (b != 0.0) return false;
                continue;
            }
            const double r = b / a;
            if (r < 1.0 - eps_jl || r > 1.0 + eps_jl) return false;
        }
    }
    return true;
}

/**
 * Seeded certificate-and-retry projection.  The projected cloud is
 * re-quantized in the source fixed-point format; the certificate is checked
 * on the quantized result so downstream exact thresholds stay covered.
 */
inline PointCloud jl_project(const PointCloud& cloud, double eps_jl, std::uint64_t seed) {
    const int target = jl_target_dimension(cloud.size(), eps_jl);
    if (target >= cloud.dim())
        throw ConfigError("JL target dimension " + std::to_string(target) +
                          " >= input dimension " + std::to_string(cloud.dim()) +
                          "; projection pointless");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(target));
    for (int attempt = 0; attempt < kJlMaxRetries; ++attempt) {
        std::vector<std::vector<double>> mat(target, std::vector<double>(cloud.dim()));
        for (auto& row : mat)
            for (double& x : row) x = gauss(rng) * scale;
        std::vector<std::vector<double>> projected(cloud.size(), std::vector<double>(target, 0.0));
        for (int p = 0; p < cloud.size(); ++p)
            for (int r = 0; r < target; ++r) {
                double acc = 0.0;
                for (int cidx = 0; cidx < cloud.dim(); ++cidx)
                    acc += mat[r][cidx] * cloud.coord(p, cidx);
                projected[p][r] = acc;
            }
        PointCloud out = make_point_cloud(projected, cloud.format, cloud.labels);
        if (jl_certificate(cloud, out, eps_jl)) return out;
    }
    throw ComputeError("JL distortion certificate failed after " +
                       std::to_string(kJlMaxRetries) + " redraws");
}

}  // namespace qtda

#endif  // QTDA_JL_HPP
