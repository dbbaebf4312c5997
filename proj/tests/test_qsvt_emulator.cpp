/**
 * Threshold polynomials, singular-value projectors, error budgets, and the
 * matrix-level emulation of the persistent-Betti estimation pipeline.
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

struct Pair {
    CliqueComplex cx_i, cx_j;
};

Pair random_pair(std::mt19937_64& rng, int k_max) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    while (true) {
        const int n = 4 + static_cast<int>(rng() % 4);
        std::vector<std::vector<double>> pts;
        for (int i = 0; i < n; ++i) pts.push_back({uni(rng), uni(rng)});
        const DistanceMatrix dm = pairwise_distances(make_point_cloud(pts, FixedPointFormat{32, 12}));
        const FiltrationSchedule fs = filtration_scales(dm);
        if (fs.size() < 3) continue;
        const int i = 1 + static_cast<int>(rng() % (fs.size() - 2));
        const int j = i + 1 + static_cast<int>(rng() % (fs.size() - i - 1));
        Pair p{build_clique_complex(dm, fs, i, k_max), build_clique_complex(dm, fs, j, k_max)};
        if (p.cx_i.count(1) > 0) return p;
    }
}

}  // namespace

TEST_CASE("threshold polynomials satisfy the band contract") {
    for (double w : {0.05, 0.1, 0.2, 0.4}) {
        for (double eps : {1e-2, 1e-4, 1e-6}) {
            const double c = 0.5;
            for (auto orient : {ThresholdPolynomial::Orientation::low_pass,
                                ThresholdPolynomial::Orientation::high_pass}) {
                const ThresholdPolynomial p = threshold_polynomial(c, w, eps, orient);
                CHECK(p.degree % 2 == 0);  // even in x by construction
                CHECK(p.degree <=
                      kThresholdDegreeConstant * (1.0 / w) * std::log2(1.0 / eps) + 2.0);
                double sup = 0.0;
                for (int g = 0; g <= 2000; ++g) {
                    const double x = static_cast<double>(g) / 2000.0;
                    if (std::abs(x - c) < w) continue;  // transition band excluded
                    const bool below = x < c;
                    const double target =
                        (orient == ThresholdPolynomial::Orientation::low_pass) == below ? 1.0
                                                                                        : 0.0;
                    sup = std::max(sup, std::abs(p(x) - target));
                }
                CHECK(sup <= eps);
            }
        }
    }
}

TEST_CASE("threshold polynomials are even functions") {
    const ThresholdPolynomial p =
        threshold_polynomial(0.3, 0.1, 1e-4, ThresholdPolynomial::Orientation::low_pass);
    for (double x : {0.1, 0.25, 0.6, 0.93}) CHECK(p(x) == p(-x));
}

TEST_CASE("ideal projectors are exact orthogonal projectors") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const Pair pr = random_pair(rng, 2);
        const Eigen::MatrixXd B = boundary_matrix(pr.cx_i, 1).to_real();
        const double alpha = std::sqrt(static_cast<double>(pr.cx_i.count(0)));
        const GapReport g = boundary_gaps(pr.cx_i, pr.cx_j, 1);
        const double gap = g.lambda_dk_i.value_or(alpha);

        const ProjectorSpec pk =
            kernel_projector(B, alpha, gap, 0.0, ProjectorSpec::Mode::ideal);
        const Eigen::MatrixXd& P = pk.matrix;
        CHECK((P * P - P).norm() < 1e-10);
        CHECK((P - P.transpose()).norm() < 1e-12);
        CHECK((B * P).norm() < 1e-9);  // projects onto the kernel

        const Eigen::MatrixXd Bup = boundary_matrix(pr.cx_j, 2).to_real();
        if (Bup.size() > 0 && Bup.norm() > 0) {
            const double a2 = std::sqrt(static_cast<double>(pr.cx_j.count(1)));
            const ProjectorSpec pi = image_projector(
                Bup, a2, g.lambda_dk1_j.value_or(a2), 0.0, ProjectorSpec::Mode::ideal);
            const Eigen::MatrixXd& Q = pi.matrix;
            CHECK((Q * Q - Q).norm() < 1e-10);
            CHECK((Q * Bup - Bup).norm() < 1e-9);  // acts as identity on the image
        }
    }
}

TEST_CASE("poly projectors stay within the propagated error bound") {
    std::mt19937_64 rng(47);
    int tested = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const Pair pr = random_pair(rng, 2);
        const Eigen::MatrixXd B = boundary_matrix(pr.cx_i, 1).to_real();
        const double alpha = std::sqrt(static_cast<double>(pr.cx_i.count(0)));
        const GapReport g = boundary_gaps(pr.cx_i, pr.cx_j, 1);
        if (!g.lambda_dk_i) continue;
        const double eps = 1e-4;
        const ProjectorSpec ideal =
            kernel_projector(B, alpha, *g.lambda_dk_i, 0.0, ProjectorSpec::Mode::ideal);
        const ProjectorSpec poly =
            kernel_projector(B, alpha, *g.lambda_dk_i, eps, ProjectorSpec::Mode::poly);
        const double err =
            (poly.matrix - ideal.matrix).operatorNorm();
        const double bound = encoding_error_propagation({EncodingParams{alpha, 1.0, 0.0}},
                                                        poly.eps, poly.eps, poly.poly_degree);
        CHECK(err <= bound);
        CHECK(err <= 2.0 * eps);  // orthogonal directions: per-value error only
        ++tested;
    }
    CHECK(tested >= 20);
}

TEST_CASE("purified maximally mixed state measures rank over dimension") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 15; ++trial) {
        const Pair pr = random_pair(rng, 2);
        const Eigen::MatrixXd B = boundary_matrix(pr.cx_i, 1).to_real();
        const double alpha = std::sqrt(static_cast<double>(pr.cx_i.count(0)));
        const GapReport g = boundary_gaps(pr.cx_i, pr.cx_j, 1);
        const ProjectorSpec pk = kernel_projector(B, alpha, g.lambda_dk_i.value_or(alpha), 0.0,
                                                  ProjectorSpec::Mode::ideal);
        const double d = pr.cx_i.count(1);
        const double rank = std::round(pk.matrix.trace());
        const double a = purified_overlap(pk, pr.cx_i, 1);
        CHECK(std::abs(a * a - rank / d) <= 1e-12);
    }
}

TEST_CASE("projector product at equal scales collapses to the image projector") {
    const DistanceMatrix dm = pairwise_distances(pentagon());
    const FiltrationSchedule fs = filtration_scales(dm);
    const CliqueComplex cx = build_clique_complex(dm, fs, 3, 2);

    CHECK(pi_pi_gap(cx, cx, 1) == 1.0);

    const Eigen::MatrixXd Bdown = boundary_matrix(cx, 1).to_real();
    const Eigen::MatrixXd Bup = boundary_matrix(cx, 2).to_real();
    const GapReport g = boundary_gaps(cx, cx, 1);
    const ProjectorSpec pk =
        kernel_projector(Bdown, 3.0, *g.lambda_dk_i, 0.0, ProjectorSpec::Mode::ideal);
    const ProjectorSpec pi =
        image_projector(Bup, 3.0, *g.lambda_dk1_j, 0.0, ProjectorSpec::Mode::ideal);
    const ProjectorSpec both = ker_im_projector(pk, pi, 1.0, 0.0, ProjectorSpec::Mode::ideal);
    CHECK((both.matrix - pi.matrix).norm() < 1e-10);
}

TEST_CASE("declared gaps above the truth are rejected") {
    const DistanceMatrix dm = pairwise_distances(pentagon());
    const FiltrationSchedule fs = filtration_scales(dm);
    const CliqueComplex cx = build_clique_complex(dm, fs, 3, 2);
    const Eigen::MatrixXd B = boundary_matrix(cx, 1).to_real();
    const GapReport g = boundary_gaps(cx, cx, 1);
    CHECK_THROWS_AS(
        kernel_projector(B, 3.0, *g.lambda_dk_i * 2.0, 0.0, ProjectorSpec::Mode::ideal),
        ComputeError);
    CHECK_THROWS_AS(kernel_projector(B, 0.5, *g.lambda_dk_i, 0.0, ProjectorSpec::Mode::ideal),
                    ConfigError);  // alpha below the spectral norm
}

TEST_CASE("error budget splits the additive target as specified") {
    for (Mapping m : {Mapping::direct, Mapping::compact}) {
        const ErrorBudget b =
            error_budget(0.4, 0.05, m, 8, 1, BudgetGaps{0.5, 0.5, 1.0},
                         BudgetDims{20, 28, 5, 3, 2});
        CHECK_THAT(b.eps3, Catch::Matchers::WithinAbs(0.25, 1e-12));  // (1 - 1/sqrt(4)) / 2
        CHECK_THAT(b.eps_f, Catch::Matchers::WithinAbs(0.125, 1e-12));
        for (int i = 0; i < 3; ++i) {
            CHECK(b.delta[i] >= 1e-6);
            CHECK(b.delta[i] <= 0.25);
            CHECK(b.eps_x[i] <= b.eps3 + 1e-12);
        }
        if (m == Mapping::compact) {
            CHECK(b.eps_m > 0.0);
            CHECK(b.eps_s > 0.0);
        }
    }
}

TEST_CASE("amplitude binary search converges within its half-width") {
    const ErrorBudget budget = error_budget(0.3, 0.05, Mapping::direct, 8, 1,
                                            BudgetGaps{0.5, 0.5, 1.0}, BudgetDims{20, 28, 5, 3, 2});
    std::mt19937_64 rng(2024);
    for (double a_true : {0.0, 0.17, 0.5, 0.83, 1.0}) {
        int hits = 0;
        for (int rep = 0; rep < 20; ++rep) {
            const RankEstimate est = amplitude_binary_search(a_true, 0.05, 0.05, budget, rng);
            CHECK(est.samples > 0);
            CHECK(est.calls_v_psi > 0);
            if (std::abs(est.value - a_true) <= 0.05) ++hits;
        }
        CHECK(hits >= 17);  // eta = 0.05 failure budget with margin
    }
}

TEST_CASE("ideal-mode emulation reproduces the classical value exactly") {
    const DistanceMatrix dm = pairwise_distances(pentagon());
    const FiltrationSchedule fs = filtration_scales(dm);
    const CliqueComplex cx_i = build_clique_complex(dm, fs, 3, 1);
    const CliqueComplex cx_j = build_clique_complex(dm, fs, 4, 1);
    const int truth = persistent_betti_rank_formula(cx_i, cx_j, 1);

    const EmulationReport rep = estimate_persistent_betti_quantum(
        cx_i, cx_j, 1, 0.4, 0.05, ProjectorSpec::Mode::ideal, 7);
    REQUIRE(rep.beta_rounded.has_value());
    CHECK(*rep.beta_rounded == truth);
}

TEST_CASE("emulation is deterministic per seed and mapping-stable") {
    const DistanceMatrix dm = pairwise_distances(pentagon());
    const FiltrationSchedule fs = filtration_scales(dm);
    const CliqueComplex cx_i = build_clique_complex(dm, fs, 3, 1);
    const CliqueComplex cx_j = build_clique_complex(dm, fs, 4, 1);

    const auto a = estimate_persistent_betti_quantum(cx_i, cx_j, 1, 0.4, 0.05,
                                                     ProjectorSpec::Mode::poly, 123);
    const auto b = estimate_persistent_betti_quantum(cx_i, cx_j, 1, 0.4, 0.05,
                                                     ProjectorSpec::Mode::poly, 123);
    CHECK(a.to_json().dump() == b.to_json().dump());

    const auto c = estimate_persistent_betti_quantum(
        cx_i, cx_j, 1, 0.4, 0.05, ProjectorSpec::Mode::poly, 123, Mapping::compact);
    REQUIRE(c.beta_rounded.has_value());
    REQUIRE(a.beta_rounded.has_value());
    CHECK(*c.beta_rounded == *a.beta_rounded);  // mapping changes cost, not truth
}

TEST_CASE("poly-mode emulation matches the oracle on most seeds") {
    const DistanceMatrix dm = pairwise_distances(pentagon());
    const FiltrationSchedule fs = filtration_scales(dm);
    const CliqueComplex cx_i = build_clique_complex(dm, fs, 3, 1);
    const CliqueComplex cx_j = build_clique_complex(dm, fs, 4, 1);
    const int truth = persistent_betti_rank_formula(cx_i, cx_j, 1);

    int hits = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto rep = estimate_persistent_betti_quantum(cx_i, cx_j, 1, 0.4, 0.05,
                                                           ProjectorSpec::Mode::poly, seed);
        if (rep.beta_rounded && *rep.beta_rounded == truth) ++hits;
    }
    CHECK(hits >= 28);
}
