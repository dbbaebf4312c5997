/**
 * Signed boundary operators, combinatorial and persistent Laplacians, and
 * the restricted boundary operator between nested scales, pinned against the
 * exact square and square-plus-apex configurations where the naive
 * projector sandwich gives the wrong rank.
 */

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qtda/qtda.hpp"

using namespace qtda;

namespace {

PointCloud pentagon() {
    return make_point_cloud({{0, 0}, {3, 0}, {3, -2}, {0, -2}, {1.5, -3}},
                            FixedPointFormat{32, 12}, {"A", "B", "C", "D", "E"});
}

PointCloud square() {
    return make_point_cloud({{0, 0}, {3, 0}, {3, -2}, {0, -2}}, FixedPointFormat{32, 12},
                            {"A", "B", "C", "D"});
}

/** Square with an apex above the first side; the counterexample geometry. */
PointCloud square_with_apex() {
    const double h = std::sqrt(2.42 * 2.42 - 1.0);
    return make_point_cloud({{0, 0}, {2, 0}, {2, -2}, {0, -2}, {1, h}},
                            FixedPointFormat{32, 16}, {"A", "B", "C", "D", "X"});
}

bool all_zero(const DenseRational& m) {
    for (const auto& row : m)
        for (const auto& v : row)
            if (v != 0) return false;
    return true;
}

}  // namespace

TEST_CASE("boundary of a boundary vanishes") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 6);
        std::vector<std::vector<double>> pts;
        for (int i = 0; i < n; ++i) pts.push_back({uni(rng), uni(rng)});
        const DistanceMatrix dm = pairwise_distances(make_point_cloud(pts, FixedPointFormat{32, 12}));
        const FiltrationSchedule fs = filtration_scales(dm);
        const CliqueComplex cx =
            build_clique_complex(dm, fs, fs.size() - 1, std::min(3, n - 1));
        for (int k = 1; k + 1 <= 3 && cx.count(k + 1) > 0; ++k) {
            const DenseRational prod = linalg::multiply(boundary_matrix(cx, k).to_dense(),
                                                        boundary_matrix(cx, k + 1).to_dense());
            CHECK(all_zero(prod));
        }
    }
}

TEST_CASE("pentagon boundary operator entries at the larger scale") {
    const DistanceMatrix dm = pairwise_distances(pentagon());
    const FiltrationSchedule fs = filtration_scales(dm);
    const CliqueComplex cx = build_clique_complex(dm, fs, 3, 2);
    const SparseSignedMatrix b1 = boundary_matrix(cx, 1);
    REQUIRE(b1.n_rows == 5);
    REQUIRE(b1.n_cols == 6);
    CHECK(b1.col_labels == std::vector<std::string>{"AB", "AD", "BC", "CD", "CE", "DE"});
    const DenseRational d = b1.to_dense();
    CHECK(d[0][0] == -1);  // A in AB
    CHECK(d[1][0] == 1);   // B in AB
    CHECK(d[2][3] == -1);  // C in CD
    CHECK(d[3][3] == 1);   // D in CD

    const SparseSignedMatrix b2 = boundary_matrix(cx, 2);
    REQUIRE(b2.n_cols == 1);  // CDE
    const DenseRational d2 = b2.to_dense();
    // d(CDE) = CD - CE + DE in the sorted edge basis.
    CHECK(d2[3][0] == 1);
    CHECK(d2[4][0] == -1);
    CHECK(d2[5][0] == 1);
}

TEST_CASE("combinatorial Laplacians are symmetric and positive semidefinite") {
    const DistanceMatrix dm = pairwise_distances(pentagon());
    const FiltrationSchedule fs = filtration_scales(dm);
    const CliqueComplex cx = build_clique_complex(dm, fs, 3, 2);
    for (int k = 0; k <= 2; ++k) {
        const LaplacianBundle lap = combinatorial_laplacian(cx, k);
        const Eigen::MatrixXd m = lap.to_real();
        CHECK((m - m.transpose()).norm() == 0.0);
        if (m.rows() > 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
            CHECK(es.eigenvalues().minCoeff() >= -1e-10);
        }
    }
}

TEST_CASE("Laplacian kernel dimensions reproduce Betti numbers of a cycle") {
    const DistanceMatrix dm = pairwise_distances(pentagon());
    const FiltrationSchedule fs = filtration_scales(dm);
    const CliqueComplex cx = build_clique_complex(dm, fs, 3, 2);
    CHECK(combinatorial_laplacian(cx, 0).kernel_dimension() == 1);
    CHECK(combinatorial_laplacian(cx, 1).kernel_dimension() == 1);
}

TEST_CASE("restricted boundary of the square pair is the rank-1 operator") {
    const DistanceMatrix dm = pairwise_distances(square());
    const FiltrationSchedule fs = filtration_scales(dm);
    const int i = fs.size() - 2;  // all four edges, no diagonals
    const int j = fs.size() - 1;  // diagonals close the square into two triangles
    const CliqueComplex cx_i = build_clique_complex(dm, fs, i, 2);
    const CliqueComplex cx_j = build_clique_complex(dm, fs, j, 2);
    REQUIRE(cx_i.count(1) == 4);
    REQUIRE(cx_j.count(2) == 4);

    const RestrictedBoundary rb = restricted_boundary(cx_i, cx_j, 1);
    CHECK(rb.rank() == 1);
    const DenseRational m = rb.matrix.to_dense();
    REQUIRE(m.size() == 4);
    // Row space spanned by (1, 1, 1, -1) in the (AB, AD, BC, CD) edge basis:
    // every column is proportional to (1, -1, 1, 1) after reordering signs,
    // i.e. c0*(AB) + c1*(AD) + c2*(BC) + c3*(CD) with c0 = c2 = c3 = -c1.
    for (std::size_t c = 0; c < m.front().size(); ++c) {
        const Rational pivot = m[0][c];
        CHECK(m[2][c] == pivot);
        CHECK(m[3][c] == pivot);
        CHECK(m[1][c] == -pivot);
    }

    // The change of basis must be invertible (full rank).
    CHECK(linalg::rank_rational(rb.change_of_basis) ==
          static_cast<int>(rb.change_of_basis.size()));

    // The naive projector sandwich overestimates the rank.
    CHECK(linalg::rank_rational(naive_restricted_boundary(cx_i, cx_j, 1).to_dense()) == 3);
}

TEST_CASE("square pair has no persistent 1-cycle, apex pair has exactly one") {
    {
        const DistanceMatrix dm = pairwise_distances(square());
        const FiltrationSchedule fs = filtration_scales(dm);
        const CliqueComplex cx_i = build_clique_complex(dm, fs, fs.size() - 2, 2);
        const CliqueComplex cx_j = build_clique_complex(dm, fs, fs.size() - 1, 2);
        CHECK(persistent_betti_rank_formula(cx_i, cx_j, 1) == 0);
        CHECK(persistent_laplacian(cx_i, cx_j, 1).kernel_dimension() == 0);
    }
    {
        const DistanceMatrix dm = pairwise_distances(square_with_apex());
        const FiltrationSchedule fs = filtration_scales(dm);
        // Scale i: the four sides only; scale j additionally connects the
        // apex to its two nearest corners, capping nothing.
        const CliqueComplex cx_i = build_clique_complex(dm, fs, 1, 2);
        const CliqueComplex cx_j = build_clique_complex(dm, fs, 2, 2);
        CHECK(persistent_betti_rank_formula(cx_i, cx_j, 1) == 1);
        CHECK(persistent_laplacian(cx_i, cx_j, 1).kernel_dimension() == 1);
        // The naive sandwich kills all but one column here, underestimating
        // the structure in the other direction.
        CHECK(linalg::rank_rational(naive_restricted_boundary(cx_i, cx_j, 1).to_dense()) == 1);
    }
}

TEST_CASE("persistent Laplacian at equal scales collapses to the ordinary one") {
    const DistanceMatrix dm = pairwise_distances(pentagon());
    const FiltrationSchedule fs = filtration_scales(dm);
    for (int s : {2, 3}) {
        const CliqueComplex cx = build_clique_complex(dm, fs, s, 2);
        for (int k = 0; k <= 1; ++k) {
            const LaplacianBundle pers = persistent_laplacian(cx, cx, k);
            const LaplacianBundle comb = combinatorial_laplacian(cx, k);
            CHECK(pers.delta == comb.delta);
        }
    }
}

TEST_CASE("restricted-boundary and Schur constructions agree on random pairs") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 15; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 5);
        std::vector<std::vector<double>> pts;
        for (int i = 0; i < n; ++i) pts.push_back({uni(rng), uni(rng)});
        const DistanceMatrix dm = pairwise_distances(make_point_cloud(pts, FixedPointFormat{32, 12}));
        const FiltrationSchedule fs = filtration_scales(dm);
        const int i = static_cast<int>(rng() % fs.size());
        const int j = i + static_cast<int>(rng() % (fs.size() - i));
        const CliqueComplex cx_i = build_clique_complex(dm, fs, i, 2);
        const CliqueComplex cx_j = build_clique_complex(dm, fs, j, 2);
        for (int k = 0; k <= 2; ++k) {
            // The constructor itself cross-checks the two routes and throws
            // on disagreement; additionally verify PSD symmetry here.
            const LaplacianBundle lap = persistent_laplacian(cx_i, cx_j, k);
            const Eigen::MatrixXd m = lap.to_real();
            CHECK((m - m.transpose()).norm() == 0.0);
            if (m.rows() > 0) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
                CHECK(es.eigenvalues().minCoeff() >= -1e-9);
            }
        }
    }
}

TEST_CASE("nested-pair preconditions are enforced") {
    const DistanceMatrix dm = pairwise_distances(square());
    const FiltrationSchedule fs = filtration_scales(dm);
    const CliqueComplex small = build_clique_complex(dm, fs, 0, 2);
    const CliqueComplex big = build_clique_complex(dm, fs, fs.size() - 1, 2);
    CHECK_THROWS_AS(restricted_boundary(big, small, 1), ConfigError);
    CHECK_THROWS_AS(persistent_laplacian(big, small, 1), ConfigError);
}
