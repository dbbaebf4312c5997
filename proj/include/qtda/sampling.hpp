/**
 * The sampling side of the emulation: per-instance error budget,
 * amplitude-estimation-by-binary-search with Chernoff-majority voting, and
 * the three-instance assembly of the persistent Betti estimate.
 *
 * Faults enter only through the success-probability formulas of the
 * rank-estimation analysis (no per-gate noise injection).
 */

#ifndef QTDA_SAMPLING_HPP
#define QTDA_SAMPLING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "betti.hpp"
#include "gaps.hpp"
#include "projectors.hpp"

namespace qtda {

/// Calls to V_psi / V_Pi per repetition: ceil(C * (1/delta) * log2(1/eps_f)).
inline constexpr double kAmplitudeCallConstant = 1.0;

enum class Mapping { direct, compact };

/** Known instance dimensions feeding the half-width table (test mode). */
struct BudgetDims {
    double s_k = 1;      ///< |S_k^i|
    double binom = 1;    ///< binom(N, k+1)
    double dim_ker = 1;  ///< dim Ker d_k^i
    double dim_kerim = 1;  ///< dim(Ker ∩ Im)
    double beta = 1;
};

/** Gap inputs to the budget. */
struct BudgetGaps {
    double lambda_dk = 1.0;
    double lambda_dk1 = 1.0;
    double lambda_pipi = 1.0;
};

/**
 * The full error budget: instance half-widths delta_1..delta_3 and the
 * subroutine error assignments, with the propagated per-instance error
 * checked against eps_3 = (1 - 1/sqrt(C)) / 2.
 */
struct ErrorBudget {
    double C = 4.0;
    double eps3 = 0.25;
    double eps_f = 0.125;
    double delta[3] = {0.1, 0.1, 0.1};
    double eps_psi = 0.0, eps_p = 0.0, eps_k = 0.0, eps_i = 0.0, eps_m = 0.0, eps_s = 0.0;
    double chi_psi = 0.0, chi_pi = 0.0;
    double eps_x[3] = {0.0, 0.0, 0.0};  ///< propagated per-instance errors
    Mapping mapping = Mapping::direct;

    nlohmann::json to_json() const {
        return nlohmann::json{
            {"C", C},           {"eps3", eps3},       {"eps_f", eps_f},
            {"delta", {delta[0], delta[1], delta[2]}},
            {"eps_psi", eps_psi}, {"eps_p", eps_p},   {"eps_k", eps_k},
            {"eps_i", eps_i},     {"eps_m", eps_m},   {"eps_s", eps_s},
            {"chi_psi", chi_psi}, {"chi_pi", chi_pi},
            {"eps_x", {eps_x[0], eps_x[1], eps_x[2]}},
            {"mapping", mapping == Mapping::direct ? "direct" : "compact"}};
    }
};

/// Prefactor on the chi / eps assignments (the asymptotic assignments are
/// stated only up to constants; this choice provably lands below eps3).
inline constexpr double kBudgetPrefactor = 1.0 / 1024.0;

/**
 * Instantiate the error budget for additive target Delta and failure
 * probability eta.  Throws ComputeError when any derived error leaves
 * (0, 1) or the propagated instance error exceeds eps_3 (infeasible).
 */
inline ErrorBudget error_budget(double Delta, double eta, Mapping mapping, int N, int k,
                                const BudgetGaps& gaps, const BudgetDims& dims,
                                double C = 4.0) {
    if (!(Delta > 0.0)) throw ConfigError("Delta must be positive");
    if (!(eta > 0.0) || !(eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
    if (!(C > 1.0)) throw ConfigError("success constant C must exceed 1");
    if (!(gaps.lambda_dk > 0.0) || !(gaps.lambda_dk1 > 0.0) || !(gaps.lambda_pipi > 0.0))
        throw ConfigError("gaps must be positive");
    ErrorBudget b;
    b.mapping = mapping;
    b.C = C;
    b.eps3 = 0.5 * (1.0 - 1.0 / std::sqrt(C));
    b.eps_f = b.eps3 / 2.0;

    const double s3 = std::sqrt(3.0);
    auto clamp_delta = [](double d) { return std::clamp(d, 1e-6, 0.25); };
    b.delta[0] = clamp_delta(Delta / (2.0 * s3 * std::max(dims.beta, 1.0)) *
                             std::sqrt(dims.s_k / dims.binom));
    b.delta[1] =
        clamp_delta(Delta / (2.0 * std::sqrt(3.0 * dims.s_k * std::max(dims.dim_ker, 1.0))));
    b.delta[2] =
        clamp_delta(Delta / (2.0 * std::sqrt(3.0 * dims.s_k * std::max(dims.dim_kerim, 1.0))));
    const double dmin = std::min({b.delta[0], b.delta[1], b.delta[2]});

    const double L = std::max(1.0, std::log2(1.0 / b.eps3));
    const double Lm = std::max(1.0, std::log2(L / (b.eps3 * dmin)));
    const double lpp = std::min(gaps.lambda_pipi, 1.0);
    const double e3 = b.eps3;

    b.eps_psi = kBudgetPrefactor * dmin * dmin * e3 * e3 / (L * L);
    b.eps_p = b.eps_psi;
    b.eps_k = kBudgetPrefactor * lpp * lpp * std::pow(dmin, 4) * std::pow(e3, 4) /
              (std::pow(L, 4) * Lm * Lm);
    b.eps_i = b.eps_k;
    if (mapping == Mapping::compact) {
        const double min_gap = std::min(gaps.lambda_dk, gaps.lambda_dk1);
        const double Lp =
            std::max(1.0, std::log2(1.0 / (lpp * lpp * std::pow(e3, 4) * std::pow(dmin, 4))));
        b.eps_m = kBudgetPrefactor * std::pow(lpp, 4) * std::pow(dmin, 8) * std::pow(e3, 8) *
                  min_gap * min_gap /
                  ((N + 1.0) * (k + 1.0) * std::pow(L, 8) * std::pow(Lm, 4) * Lp * Lp);
        b.eps_s = kBudgetPrefactor * std::pow(dmin, 8) * std::pow(e3, 8) *
                  std::pow(dims.s_k / dims.binom, 2) / (std::pow(L, 8) * std::pow(Lm, 4));
    }
    b.chi_psi = b.eps_psi + b.eps_s;
    b.chi_pi = b.eps_p;

    const double Lf = std::max(1.0, std::log2(1.0 / b.eps_f));
    const double inner = 2.0 * b.chi_psi + b.chi_pi + b.eps_k + b.eps_i +
                         (mapping == Mapping::compact ? 6.0 * std::sqrt(b.eps_m) : 0.0);
    for (int x = 0; x < 3; ++x) {
        b.eps_x[x] = (4.0 / b.delta[x]) * Lf * std::sqrt(inner) + b.eps_f;
        if (!(b.eps_x[x] > 0.0) || b.eps_x[x] >= 1.0)
            throw ComputeError("derived instance error outside (0, 1)");
        if (b.eps_x[x] > b.eps3 + 1e-12)
            throw ComputeError("error budget infeasible: propagated error exceeds eps_3");
    }
    if (b.eps3 >= 0.5) throw ComputeError("discrimination error >= 1/2: repetitions diverge");
    return b;
}

/** One rank-estimation instance's outcome and circuit-call ledger. */
struct RankEstimate {
    double value = 0.0;     ///< estimated sqrt(d_g / d)
    double delta = 0.0;     ///< interval half-width target
    long samples = 0;       ///< Bernoulli repetitions consumed
    long calls_v_psi = 0;   ///< simulated calls to V_psi
    long calls_v_pi = 0;    ///< simulated calls to V_Pi
    double eta = 0.0;       ///< per-instance failure budget

    nlohmann::json to_json(double target) const {
        return nlohmann::json{{"target", target},
                              {"delta", delta},
                              {"samples", samples},
                              {"calls", {{"V_psi", calls_v_psi}, {"V_Pi", calls_v_pi}}}};
    }
};

/**
 * Incoherent binary search over the amplitude threshold: at each level the
 * discrimination experiment is simulated with the budget's success
 * probabilities and decided by a Chernoff majority; O(log(1/delta)) levels
 * give an estimate within delta of the true amplitude with probability
 * >= 1 - eta.
 */
inline RankEstimate amplitude_binary_search(double a_true, double delta, double eta,
                                            const ErrorBudget& budget, std::mt19937_64& rng) {
    if (a_true < 0.0 || a_true > 1.0) throw ConfigError("amplitude must lie in [0, 1]");
    if (!(delta > 0.0) || delta >= 1.0) throw ConfigError("delta must lie in (0, 1)");
    RankEstimate est;
    est.delta = delta;
    est.eta = eta;
    const double eps = budget.eps3;
    const double fid = 1.0 - budget.chi_psi;
    const double p_above = (1.0 - eps) * (1.0 - eps) * fid * fid;  // P(0|c < a)
    const double p_below = eps * eps * fid * fid;                  // P(0|c > a)
    const double mid = 0.5 * (p_above + p_below);
    const int levels = std::max(1, static_cast<int>(std::ceil(std::log2(1.0 / delta))));
    const double theta = eta / levels;  // per-level failure budget
    const double margin = 0.5 * (p_above - p_below);
    const long reps = std::max<long>(
        1, static_cast<long>(std::ceil(std::log(1.0 / theta) / (2.0 * margin * margin))));
    const long calls_per_sample = std::max<long>(
        1, static_cast<long>(std::ceil(kAmplitudeCallConstant * (1.0 / delta) *
                                       std::max(1.0, std::log2(1.0 / budget.eps_f)))));

    double lo = 0.0, hi = 1.0;
    for (int level = 0; level < levels; ++level) {
        const double c = 0.5 * (lo + hi);
        const double p = a_true > c ? p_above : p_below;
        std::binomial_distribution<long> bin(reps, p);
        const long zeros = bin(rng);
        est.samples += reps;
        est.calls_v_psi += reps * calls_per_sample;
        est.calls_v_pi += reps * calls_per_sample;
        if (static_cast<double>(zeros) / reps > mid)
            lo = c;
        else
            hi = c;
    }
    est.value = 0.5 * (lo + hi);
    return est;
}

/** Mode-selected result of the three-instance persistent Betti estimation. */
struct EmulationReport {
    double beta_raw = 0.0;                 ///< Z = W^2 * D * (X^2 - Y^2)
    std::optional<long> beta_rounded;      ///< present iff Delta < 0.5
    double targets[3] = {0, 0, 0};         ///< true amplitudes W, X, Y
    RankEstimate instances[3];
    ErrorBudget budget;
    std::uint64_t seed = 0;
    std::string rounding_note;

    nlohmann::json to_json() const {
        nlohmann::json inst = nlohmann::json::array();
        for (int i = 0; i < 3; ++i) inst.push_back(instances[i].to_json(targets[i]));
        nlohmann::json j{{"beta_estimate", beta_rounded ? nlohmann::json(*beta_rounded)
                                                        : nlohmann::json(beta_raw)},
                         {"beta_raw", beta_raw},
                         {"instances", inst},
                         {"budget", budget.to_json()},
                         {"seed", seed}};
        if (!rounding_note.empty()) j["rounding"] = rounding_note;
        return j;
    }
};

namespace detail {

inline double binom_real(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

/// Construction tolerance for poly-mode projectors: budget values can be far
/// below what desk-scale polynomial degrees warrant; the sampling model
/// carries the budget's statistical errors, so the matrix-level projector
/// only needs to classify singular values cleanly.
inline double clamp_poly_eps(double eps) { return std::clamp(eps, 1e-9, 0.1); }

}  // namespace detail

/**
 * Full three-instance emulation: realize the projectors at the requested
 * fidelity mode, read off the amplitudes W, X, Y, run the three binary
 * searches at the budget half-widths, and assemble
 * Z = W^2 * binom(N, k+1) * (X^2 - Y^2), rounded when Delta < 0.5.
 */
inline EmulationReport estimate_persistent_betti_quantum(const CliqueComplex& cx_i,
                                                         const CliqueComplex& cx_j, int k,
                                                         double Delta, double eta,
                                                         ProjectorSpec::Mode mode,
                                                         std::uint64_t seed,
                                                         Mapping mapping = Mapping::direct) {
    detail::require_nested(cx_i, cx_j);
    const int s_k = cx_i.count(k);
    if (s_k == 0) throw ComputeError("S_k^i is empty: nothing to estimate");
    const int N = cx_i.n_vertices;
    const double binom = detail::binom_real(N, k + 1);

    // Exact operators and their spectra (test mode: truth available).
    const Eigen::MatrixXd down = boundary_matrix(cx_i, k).to_real();
    const RestrictedBoundary rb = restricted_boundary(cx_i, cx_j, k);
    const Eigen::MatrixXd up = rb.matrix.to_real();
    const int dim_ker = s_k - (k >= 1 ? linalg::rank_rational(boundary_matrix(cx_i, k).to_dense())
                                      : 0);
    const int dim_kerim = rb.rank();
    const int beta_true = dim_ker - dim_kerim;

    BudgetGaps gaps;
    const double a_down = std::max(1.0, down.norm());
    const double a_up = std::max(1.0, up.norm());
    gaps.lambda_dk = detail::min_nonzero_sv(down).value_or(a_down);
    gaps.lambda_dk1 = detail::min_nonzero_sv(up).value_or(a_up);
    gaps.lambda_pipi = pi_pi_gap(cx_i, cx_j, k);
    BudgetDims dims{static_cast<double>(s_k), binom, static_cast<double>(dim_ker),
                    static_cast<double>(dim_kerim), static_cast<double>(beta_true)};

    EmulationReport rep;
    rep.seed = seed;
    rep.budget = error_budget(Delta, eta, mapping, N, k, gaps, dims);

    const ProjectorSpec pk = kernel_projector(down, a_down, gaps.lambda_dk,
                                              detail::clamp_poly_eps(rep.budget.eps_k), mode);
    ProjectorSpec pi;
    if (up.cols() == 0 || up.norm() == 0.0) {
        pi.matrix = Eigen::MatrixXd::Zero(s_k, s_k);
        pi.provenance = ProjectorSpec::Provenance::Im;
        pi.mode = mode;
    } else {
        pi = image_projector(up, a_up, gaps.lambda_dk1,
                             detail::clamp_poly_eps(rep.budget.eps_i), mode);
    }
    const ProjectorSpec pp = ker_im_projector(pk, pi, gaps.lambda_pipi,
                                              detail::clamp_poly_eps(rep.budget.eps_p), mode);

    rep.targets[0] = std::sqrt(s_k / binom);
    rep.targets[1] = std::sqrt(std::max(0.0, pk.matrix.trace()) / s_k);
    rep.targets[2] = std::sqrt(std::max(0.0, pp.matrix.trace()) / s_k);

    std::mt19937_64 master(seed);
    for (int x = 0; x < 3; ++x) {
        std::mt19937_64 stream(master());
        rep.instances[x] = amplitude_binary_search(std::min(1.0, rep.targets[x]),
                                                   rep.budget.delta[x], eta / 3.0,
                                                   rep.budget, stream);
    }
    const double W = rep.instances[0].value;
    const double X = rep.instances[1].value;
    const double Y = rep.instances[2].value;
    rep.beta_raw = W * W * binom * (X * X - Y * Y);
    if (Delta < 0.5) {
        rep.beta_rounded = std::max<long>(0, std::lround(rep.beta_raw));
        rep.rounding_note = "rounded to nearest non-negative integer (Delta < 0.5)";
    } else {
        rep.rounding_note = "raw estimate reported (Delta >= 0.5)";
    }
    return rep;
}

}  // namespace qtda

#endif  // QTDA_SAMPLING_HPP
