/**
 * Three independent classical computations of (persistent) Betti numbers:
 * textbook column reduction over GF(2) of the full filtration, the exact
 * rank formula, and kernel dimensions of (persistent) combinatorial
 * Laplacians -- plus a deflated power method for spectral kernel counting.
 */

#ifndef QTDA_BETTI_HPP
#define QTDA_BETTI_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "boundary.hpp"
#include "complex.hpp"
#include "matrix.hpp"
#include "point_cloud.hpp"

namespace qtda {

/** Creator/destroyer pairs of the full filtration (death -1 = essential). */
struct PersistencePairing {
    struct Pair {
        int birth_index = 0;   ///< scale index at which the creator enters
        int death_index = -1;  ///< scale index of the destroyer, or -1 (infinite)
        int k = 0;             ///< feature dimension
        Simplex creator;
        std::optional<Simplex> destroyer;
    };
    std::vector<Pair> pairs;

    /** Standard persistence readout: features born by scale i, still alive after scale j. */
    int betti(int i, int j, int k) const {
        int count = 0;
        for (const auto& p : pairs)
            if (p.k == k && p.birth_index <= i && (p.death_index < 0 || p.death_index > j))
                ++count;
        return count;
    }
};

/** Map (i, j, k) -> beta_k^{i,j}; diagonal entries are the plain beta_k^i. */
struct BettiTable {
    std::map<std::tuple<int, int, int>, int> entries;

    nlohmann::json to_json() const {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& [key, beta] : entries) {
            const auto& [i, j, k] = key;
            list.push_back({{"i", i}, {"j", j}, {"k", k}, {"beta", beta}});
        }
        return nlohmann::json{{"entries", list}};
    }
};

namespace detail {

/** Entry scale of a simplex: the largest pairwise squared distance inside it. */
inline std::int64_t entry_sq(const Simplex& s, const DistanceMatrix& dm) {
    std::int64_t m = 0;
    for (std::size_t a = 0; a < s.size(); ++a)
        for (std::size_t b = a + 1; b < s.size(); ++b)
            m = std::max(m, dm.sq_raw[s[a]][s[b]]);
    return m;
}

inline int scale_index_of(std::int64_t sq, const FiltrationSchedule& fs) {
    auto it = std::lower_bound(fs.sq_raw.begin(), fs.sq_raw.end(), sq);
    if (it == fs.sq_raw.end() || *it != sq)
        throw ComputeError("simplex entry scale missing from the filtration schedule");
    return static_cast<int>(it - fs.sq_raw.begin());
}

}  // namespace detail

/**
 * Single left-to-right column reduction over GF(2) of the whole filtration
 * boundary matrix (simplices ordered by entry scale, then dimension, then
 * lexicographic tuple); one pass yields beta_k^{i,j} for all scale pairs.
 */
inline PersistencePairing persistence_column_reduction(const FiltrationSchedule& fs,
                                                       const DistanceMatrix& dm, int k_max) {
    // Materialize the final complex one dimension above k_max so that
    // destroyers of k_max-features are present.
    const CliqueComplex full =
        build_clique_complex(dm, fs.sq_raw.back(), std::min(k_max + 1, dm.n - 1));

    struct Cell {
        Simplex s;
        int dim;
        std::int64_t sq;
        int scale_index;
    };
    std::vector<Cell> cells;
    for (int d = 0; d < static_cast<int>(full.simplices_by_dim.size()); ++d)
        for (const auto& s : full.simplices(d)) {
            const std::int64_t sq = detail::entry_sq(s, dm);
            cells.push_back({s, d, sq, detail::scale_index_of(sq, fs)});
        }
    std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        if (a.sq != b.sq) return a.sq < b.sq;
        if (a.dim != b.dim) return a.dim < b.dim;
        return a.s < b.s;
    });

    std::map<Simplex, int> position;
    for (int i = 0; i < static_cast<int>(cells.size()); ++i) position[cells[i].s] = i;

    // Columns as sorted row-position lists over GF(2); low = largest entry.
    const int n = static_cast<int>(cells.size());
    std::vector<std::vector<int>> column(n);
    for (int c = 0; c < n; ++c) {
        const Simplex& s = cells[c].s;
        if (s.size() == 1) continue;
        Simplex face(s.size() - 1);
        for (std::size_t l = 0; l < s.size(); ++l) {
            for (std::size_t t = 0, w = 0; t < s.size(); ++t)
                if (t != l) face[w++] = s[t];
            column[c].push_back(position.at(face));
        }
        std::sort(column[c].begin(), column[c].end());
    }

    auto xor_into = [](std::vector<int>& a, const std::vector<int>& b) {
        std::vector<int> out;
        std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                      std::back_inserter(out));
        a = std::move(out);
    };

    std::vector<int> owner(n, -1);  // low row -> reduced column
    std::vector<int> paired_death(n, -1);
    for (int c = 0; c < n; ++c) {
        while (!column[c].empty() && owner[column[c].back()] >= 0)
            xor_into(column[c], column[owner[column[c].back()]]);
        if (!column[c].empty()) {
            const int low = column[c].back();
            owner[low] = c;
            paired_death[low] = c;
        }
    }

    PersistencePairing out;
    for (int c = 0; c < n; ++c) {
        const bool is_positive = column[c].empty();
        if (!is_positive) continue;  // destroyer column, not a creator
        PersistencePairing::Pair p;
        p.k = cells[c].dim;
        p.birth_index = cells[c].scale_index;
        p.creator = cells[c].s;
        if (paired_death[c] >= 0) {
            p.death_index = cells[paired_death[c]].scale_index;
            p.destroyer = cells[paired_death[c]].s;
        }
        // Zero-persistence pairs (born and filled at the same scale) carry no
        // information for any (i, j) readout but are kept for completeness.
        out.pairs.push_back(std::move(p));
    }
    return out;
}

/** beta_k = (|S_k| - rank d_k) - rank d_{k+1}, exact in the chosen field. */
inline int betti_rank_formula(const CliqueComplex& cx, int k,
                              const FieldTag& field = FieldTag::rational()) {
    const int nk = cx.count(k);
    if (nk == 0) return 0;
    int rank_down = 0;
    if (k >= 1) rank_down = linalg::rank(boundary_matrix(cx, k).to_dense(), field);
    int rank_up = 0;
    if (cx.count(k + 1) > 0) rank_up = linalg::rank(boundary_matrix(cx, k + 1).to_dense(), field);
    return (nk - rank_down) - rank_up;
}

/**
 * beta_k^{i,j} = dim Ker d_k^i - dim(Ker d_k^i ∩ Im d_{k+1}^j), computed
 * through the subspace identity dim(U ∩ V) = dim U + dim V - rank[U | V]
 * with both subspaces embedded in the S_k^j coordinates.
 */
inline int persistent_betti_rank_formula(const CliqueComplex& cx_i, const CliqueComplex& cx_j,
                                         int k, const FieldTag& field = FieldTag::rational()) {
    detail::require_nested(cx_i, cx_j);
    const int nki = cx_i.count(k);
    if (nki == 0) return 0;

    // Kernel basis of d_k^i; its column count is dim Ker d_k^i.
    DenseRational ker_i;
    if (k >= 1) {
        const DenseRational down = boundary_matrix(cx_i, k).to_dense();
        ker_i = linalg::kernel_basis(down, field);
    } else {
        ker_i = detail::dense_zero(nki, nki);
        for (int c = 0; c < nki; ++c) ker_i[c][c] = 1;  // kernel of the zero map
    }
    const int dim_ker = ker_i.empty() ? 0 : static_cast<int>(ker_i.front().size());
    if (cx_j.count(k + 1) == 0 || dim_ker == 0) return dim_ker;

    // Embed the kernel basis into the S_k^j basis.
    const int nkj = cx_j.count(k);
    DenseRational U = detail::dense_zero(nkj, static_cast<int>(ker_i.front().size()));
    const auto& simp_i = cx_i.simplices(k);
    for (int r = 0; r < nki; ++r) {
        const int rj = cx_j.index_of(simp_i[r]);
        for (std::size_t c = 0; c < ker_i.front().size(); ++c) U[rj][c] = ker_i[r][c];
    }
    const DenseRational V = boundary_matrix(cx_j, k + 1).to_dense();
    const int dim_im = linalg::rank(V, field);
    const int rank_uv = linalg::rank(linalg::hcat(U, V), field);
    const int dim_meet = dim_ker + dim_im - rank_uv;
    return dim_ker - dim_meet;
}

/** Result of the deflated power method, with raw matrix-vector counts. */
struct PowerMethodResult {
    int kernel_dim = 0;
    bool converged = true;
    long matvecs = 0;
};

/**
 * Deflated power iteration on (lambda_max I - Delta): extract top
 * eigenvectors of the complement one at a time, counting eigenvalues within
 * `tol` of lambda_max.  Correct whenever the spectral gap exceeds tol.
 */
inline PowerMethodResult betti_power_method(const Eigen::MatrixXd& delta, double tol,
                                            long max_iter, std::uint64_t seed) {
    const int m = static_cast<int>(delta.rows());
    PowerMethodResult res;
    if (m == 0) return res;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Residual-certified power iteration on the deflated operator: for a
    // symmetric A, ||A v - lam v|| <= r places a true eigenvalue within r of
    // lam, so iterating until r <= tol/4 makes the band test below rigorous.
    const auto iterate = [&](const Eigen::MatrixXd& a, const std::vector<Eigen::VectorXd>& defl,
                             Eigen::VectorXd& v, double& lam) {
        for (long it = 0; it < max_iter; ++it) {
            Eigen::VectorXd w = a * v;
            ++res.matvecs;
            for (const auto& u : defl) w -= u.dot(w) * u;
            lam = v.dot(w);
            if ((w - lam * v).norm() <= std::max(tol / 4.0, 1e-13 * std::max(1.0, std::abs(lam))))
                return true;
            const double n = w.norm();
            if (n < 1e-200) {  // annihilated: v sits in the eigenvalue-0 space
                lam = 0.0;
                return true;
            }
            v = w / n;
        }
        return false;
    };

    // lambda_max of Delta by plain power iteration.
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v(i) = gauss(rng);
    v.normalize();
    double lam_max = 0.0;
    if (!iterate(delta, {}, v, lam_max)) {
        res.converged = false;
        return res;
    }
    if (lam_max <= tol) {
        // Numerically the zero matrix: the whole space is kernel.
        res.kernel_dim = m;
        return res;
    }

    const Eigen::MatrixXd M = lam_max * Eigen::MatrixXd::Identity(m, m) - delta;
    std::vector<Eigen::VectorXd> found;
    while (static_cast<int>(found.size()) < m) {
        for (int i = 0; i < m; ++i) v(i) = gauss(rng);
        for (const auto& u : found) v -= u.dot(v) * u;
        if (v.norm() < 1e-12) break;
        v.normalize();
        double lam = 0.0;
        if (!iterate(M, found, v, lam)) {
            res.converged = false;
            return res;
        }
        if (lam < lam_max - tol / 2.0) break;  // left the near-kernel band of Delta
        for (const auto& u : found) v -= u.dot(v) * u;  // re-orthogonalize before deflating on v
        v.normalize();
        found.push_back(v);
    }
    res.kernel_dim = static_cast<int>(found.size());
    return res;
}

/** Kernel dimension of the persistent Laplacian (exact rank route). */
inline int persistent_betti_via_laplacian(const CliqueComplex& cx_i, const CliqueComplex& cx_j,
                                          int k) {
    return persistent_laplacian(cx_i, cx_j, k).kernel_dimension();
}

/** True iff GF(2) and rational Betti numbers differ (torsion present). */
inline bool torsion_flagged(const CliqueComplex& cx_i, const CliqueComplex& cx_j, int k) {
    return persistent_betti_rank_formula(cx_i, cx_j, k, FieldTag::rational()) !=
           persistent_betti_rank_formula(cx_i, cx_j, k, FieldTag::gf2());
}

/** Persistence pairs CSV: `k,birth_scale,death_scale` with `inf` for essentials. */
inline std::string pairing_to_csv(const PersistencePairing& pairing,
                                  const FiltrationSchedule& fs) {
    std::string out = "k,birth_scale,death_scale\n";
    for (const auto& p : pairing.pairs) {
        out += std::to_string(p.k) + "," + std::to_string(fs.mu(p.birth_index)) + ",";
        out += p.death_index < 0 ? "inf" : std::to_string(fs.mu(p.death_index));
        out += "\n";
    }
    return out;
}

}  // namespace qtda

#endif  // QTDA_BETTI_HPP
