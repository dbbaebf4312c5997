/**
 * Gap parameters the algorithm's runtime depends on (smallest nonzero
 * singular values, the Pi_Ker*Pi_Im gap, Laplacian spectral gaps), the
 * empirical gap-scaling sweep harness, harmonic representatives, and the
 * fixed Zeno-counterexample numerics.
 */

#ifndef QTDA_GAPS_HPP
#define QTDA_GAPS_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "betti.hpp"
#include "boundary.hpp"
#include "complex.hpp"
#include "point_cloud.hpp"
#include "projectors.hpp"

namespace qtda {

/** The gap parameters for one nested pair (absent = operator all-zero). */
struct GapReport {
    std::optional<double> lambda_dk_i;    ///< smallest nonzero sigma of d_k^i
    std::optional<double> lambda_dk1_j;   ///< smallest nonzero sigma of d_{k+1}^j
    std::optional<double> lambda_dk1_ij;  ///< same for the restricted operator d_{k+1}^{i,j}
    std::optional<double> lambda_pipi;    ///< 1 - largest sub-unit sigma of Pi_Ker*Pi_Im
    std::optional<double> lambda_laplacian;  ///< smallest nonzero eigenvalue of Delta_k^{i,j}
};

namespace detail {

/** Smallest nonzero singular value (zero split 1e-9 relative), or absent. */
inline std::optional<double> min_nonzero_sv(const Eigen::MatrixXd& a) {
    if (a.rows() == 0 || a.cols() == 0 || a.norm() == 0.0) return std::nullopt;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const Eigen::VectorXd& s = svd.singularValues();
    const double cut = kSingularZeroTol * s(0);
    std::optional<double> best;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > cut) best = s(i);
    return best;
}

}  // namespace detail

/** Exact-SVD gap extraction for a nested pair. */
inline GapReport boundary_gaps(const CliqueComplex& cx_i, const CliqueComplex& cx_j, int k) {
    detail::require_nested(cx_i, cx_j);
    GapReport g;
    g.lambda_dk_i = detail::min_nonzero_sv(boundary_matrix(cx_i, k).to_real());
    g.lambda_dk1_j = detail::min_nonzero_sv(boundary_matrix(cx_j, k + 1).to_real());
    g.lambda_dk1_ij =
        detail::min_nonzero_sv(restricted_boundary(cx_i, cx_j, k).matrix.to_real());
    const LaplacianBundle lap = persistent_laplacian(cx_i, cx_j, k);
    if (lap.size() > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap.to_real());
        const Eigen::VectorXd& ev = es.eigenvalues();
        const double top = std::max(std::abs(ev(ev.size() - 1)), std::abs(ev(0)));
        std::optional<double> best;
        for (int i = ev.size() - 1; i >= 0; --i)
            if (ev(i) > kSingularZeroTol * std::max(top, 1.0)) best = ev(i);
        g.lambda_laplacian = best;
    }
    return g;
}

/**
 * Lambda_PiPi = 1 - max{sigma < 1} over the singular values of
 * Pi_Ker(d_k^i) * Pi_Im(d_{k+1}^{i,j}); returns 1 when no sub-unit sigma
 * exists (in particular for i = j).
 */
inline double pi_pi_gap(const CliqueComplex& cx_i, const CliqueComplex& cx_j, int k) {
    detail::require_nested(cx_i, cx_j);
    const int nk = cx_i.count(k);
    if (nk == 0) return 1.0;
    const Eigen::MatrixXd down = boundary_matrix(cx_i, k).to_real();
    const double a_down = std::max(1.0, down.norm());
    const double gap_down = detail::min_nonzero_sv(down).value_or(a_down);
    const ProjectorSpec pk =
        kernel_projector(down, a_down, gap_down, 1e-9, ProjectorSpec::Mode::ideal);
    const Eigen::MatrixXd up = restricted_boundary(cx_i, cx_j, k).matrix.to_real();
    const double a_up = std::max(1.0, up.norm());
    ProjectorSpec pi;
    if (up.cols() == 0 || up.norm() == 0.0) {
        pi.matrix = Eigen::MatrixXd::Zero(nk, nk);
    } else {
        const double gap_up = detail::min_nonzero_sv(up).value_or(a_up);
        pi = image_projector(up, a_up, gap_up, 1e-9, ProjectorSpec::Mode::ideal);
    }
    const Eigen::MatrixXd M = pk.matrix * pi.matrix;
    if (M.norm() == 0.0) return 1.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const Eigen::VectorXd& s = svd.singularValues();
    // Largest singular value strictly between the numerical-zero and
    // numerical-one bands; commuting projectors (i = j in particular) have
    // none and give exactly 1.
    for (int i = 0; i < s.size(); ++i) {
        if (s(i) >= 1.0 - kSingularZeroTol) continue;
        if (s(i) <= kSingularZeroTol) break;  // sorted decreasing: only noise left
        return 1.0 - s(i);
    }
    return 1.0;
}

/** One emitted sweep row. */
struct SweepRow {
    int N = 0, k = 0, trial = 0;
    double mu = 0.0;
    int s_k = 0;
    std::optional<double> lambda_dk, lambda_dk1, lambda_lap;
    double lambda_pipi = 1.0;
    int beta = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    int skipped = 0;  ///< trials whose generator produced an empty S_k

    /** Plot-ready CSV; absent gaps render as empty cells. */
    std::string to_csv() const {
        std::ostringstream os;
        os << "N,k,trial,mu,S_k,lambda_dk,lambda_dk1,lambda_pipi,lambda_lap,beta\n";
        auto cell = [](const std::optional<double>& v) {
            return v ? std::to_string(*v) : std::string();
        };
        for (const auto& r : rows)
            os << r.N << "," << r.k << "," << r.trial << "," << r.mu << "," << r.s_k << ","
               << cell(r.lambda_dk) << "," << cell(r.lambda_dk1) << "," << r.lambda_pipi << ","
               << cell(r.lambda_lap) << "," << r.beta << "\n";
        return os.str();
    }
};

enum class SweepGenerator { random_geometric, random_graph };

/**
 * Empirical gap sweep over instance sizes: per (N, trial) draws a cloud
 * (uniform unit square, or a p=1/2 random graph realized through the
 * two-distance trick), picks the scale pair straddling the 30th-percentile
 * distance, and records every gap plus |S_k| and beta.  No scaling law is
 * asserted; rows are for offline plotting.
 */
inline SweepResult gap_scaling_sweep(SweepGenerator gen, const std::vector<int>& sizes, int k,
                                     int trials, std::uint64_t seed) {
    SweepResult out;
    const FixedPointFormat fmt{32, 12};
    for (int n : sizes) {
        for (int t = 0; t < trials; ++t) {
            std::mt19937_64 rng(seed ^ (static_cast<std::uint64_t>(n) << 32) ^
                                static_cast<std::uint64_t>(t));
            std::vector<std::vector<double>> pts;
            if (gen == SweepGenerator::random_geometric) {
                std::uniform_real_distribution<double> uni(0.0, 1.0);
                for (int i = 0; i < n; ++i) pts.push_back({uni(rng), uni(rng)});
            } else {
                // Random graph p = 1/2: embed so that edge distances are 1 and
                // non-edge distances 2 cannot occur geometrically; realized by
                // thresholding a symmetric random squared-distance table.
                pts.clear();
            }
            DistanceMatrix dm;
            if (gen == SweepGenerator::random_geometric) {
                dm = pairwise_distances(make_point_cloud(pts, fmt));
            } else {
                dm.n = n;
                dm.frac_bits = 0;
                dm.sq_raw.assign(n, std::vector<std::int64_t>(n, 0));
                std::bernoulli_distribution edge(0.5);
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j)
                        dm.sq_raw[i][j] = dm.sq_raw[j][i] = edge(rng) ? 1 : 4;
            }
            const FiltrationSchedule fs = filtration_scales(dm);
            if (fs.size() < 2) {
                ++out.skipped;
                continue;
            }
            const int idx_i = std::max(1, static_cast<int>(0.3 * (fs.size() - 1)));
            const int idx_j = std::min(fs.size() - 1, idx_i + 1);
            const CliqueComplex cx_i = build_clique_complex(dm, fs, idx_i, k);
            const CliqueComplex cx_j = build_clique_complex(dm, fs, idx_j, k);
            if (cx_i.count(k) == 0) {
                ++out.skipped;
                continue;
            }
            const GapReport g = boundary_gaps(cx_i, cx_j, k);
            SweepRow row;
            row.N = n;
            row.k = k;
            row.trial = t;
            row.mu = cx_i.mu;
            row.s_k = cx_i.count(k);
            row.lambda_dk = g.lambda_dk_i;
            row.lambda_dk1 = g.lambda_dk1_j;
            row.lambda_lap = g.lambda_laplacian;
            row.lambda_pipi = pi_pi_gap(cx_i, cx_j, k);
            row.beta = persistent_betti_rank_formula(cx_i, cx_j, k);
            out.rows.push_back(row);
        }
    }
    return out;
}

/** Orthonormal kernel basis of Delta_k (columns), from the real spectrum. */
inline Eigen::MatrixXd harmonic_representative(const CliqueComplex& cx, int k) {
    const LaplacianBundle lap = combinatorial_laplacian(cx, k);
    const int m = lap.size();
    if (m == 0) return Eigen::MatrixXd::Zero(0, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap.to_real());
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double top = std::max(1.0, std::abs(ev(m - 1)));
    std::vector<int> idx;
    for (int i = 0; i < m; ++i)
        if (std::abs(ev(i)) <= kSingularZeroTol * top) idx.push_back(i);
    Eigen::MatrixXd basis(m, static_cast<int>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) basis.col(c) = es.eigenvectors().col(idx[c]);
    return basis;
}

/** Result of the fixed square-plus-apex counterexample. */
struct ZenoReport {
    Eigen::VectorXd kernel_chain;         ///< kernel of Delta_1 at the larger scale
    std::vector<std::string> edge_basis;  ///< labels of the 1-simplices at scale j
    double overlap_major = 0.0;           ///< squared overlap with the dominant eigenvector
    double overlap_minor = 0.0;           ///< squared overlap with the subdominant one
};

/**
 * Square ABCD (side 2) with apex X above AB at distance ~2.42: between the
 * two scales the hole 0.5(AB+BC+CD-AD) does not evolve adiabatically into
 * the new harmonic representative.  Returns the kernel chain at scale j and
 * the squared overlaps of the initial hole state with the eigenvectors of
 * Q_0 (H(1) - H(0)) Q_0 on the degenerate ground space of H(0).
 */
inline ZenoReport zeno_counterexample() {
    const double apex_y = std::sqrt(2.42 * 2.42 - 1.0);
    const std::vector<std::vector<double>> pts = {
        {0.0, 0.0}, {2.0, 0.0}, {2.0, -2.0}, {0.0, -2.0}, {1.0, apex_y}};
    const PointCloud cloud = make_point_cloud(pts, FixedPointFormat{32, 16},
                                              {"A", "B", "C", "D", "X"});
    const DistanceMatrix dm = pairwise_distances(cloud);
    const std::int64_t sq_side = dm.sq_raw[0][1];  // d_AB = 2
    const std::int64_t sq_apex = dm.sq_raw[0][4];  // d_AX ~ 2.42
    const CliqueComplex cx_i = build_clique_complex(dm, sq_side, 1, 0, cloud.labels);
    const CliqueComplex cx_j = build_clique_complex(dm, sq_apex, 1, 1, cloud.labels);

    ZenoReport rep;
    const auto& edges_j = cx_j.simplices(1);
    for (const auto& e : edges_j) rep.edge_basis.push_back(cx_j.label_of(e));
    const int m = static_cast<int>(edges_j.size());

    // H(0) = Delta_1^i embedded in the scale-j edge basis; H(1) = Delta_1^j.
    const Eigen::MatrixXd h1 = combinatorial_laplacian(cx_j, 1).to_real();
    const Eigen::MatrixXd delta_i = combinatorial_laplacian(cx_i, 1).to_real();
    Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(m, m);
    const auto& edges_i = cx_i.simplices(1);
    for (int a = 0; a < static_cast<int>(edges_i.size()); ++a)
        for (int b = 0; b < static_cast<int>(edges_i.size()); ++b)
            h0(cx_j.index_of(edges_i[a]), cx_j.index_of(edges_i[b])) = delta_i(a, b);

    // Kernel of H(1) (the new harmonic representative).
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es1(h1);
    rep.kernel_chain = es1.eigenvectors().col(0);

    // Degenerate ground space of H(0) and the first-order perturbation in it.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es0(h0);
    std::vector<int> zero_idx;
    for (int i = 0; i < m; ++i)
        if (es0.eigenvalues()(i) < 1e-9) zero_idx.push_back(i);
    Eigen::MatrixXd K(m, static_cast<int>(zero_idx.size()));
    for (std::size_t c = 0; c < zero_idx.size(); ++c) K.col(c) = es0.eigenvectors().col(zero_idx[c]);
    const Eigen::MatrixXd reduced = K.transpose() * (h1 - h0) * K;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esr(reduced);

    // Initial hole state 0.5(AB + BC + CD - AD) in the scale-j edge basis.
    Eigen::VectorXd v0 = Eigen::VectorXd::Zero(m);
    auto set_edge = [&](int u, int v, double val) { v0(cx_j.index_of({u, v})) = val; };
    set_edge(0, 1, 0.5);   // AB
    set_edge(1, 2, 0.5);   // BC
    set_edge(2, 3, 0.5);   // CD
    set_edge(0, 3, -0.5);  // AD
    const Eigen::VectorXd coords = K.transpose() * v0;
    std::vector<double> overlaps;
    for (int c = 0; c < reduced.cols(); ++c) {
        const double ov = esr.eigenvectors().col(c).dot(coords);
        overlaps.push_back(ov * ov);
    }
    std::sort(overlaps.rbegin(), overlaps.rend());
    rep.overlap_major = overlaps.size() > 0 ? overlaps[0] : 0.0;
    rep.overlap_minor = overlaps.size() > 1 ? overlaps[1] : 0.0;
    return rep;
}

}  // namespace qtda

#endif  // QTDA_GAPS_HPP
