/**
 * Matrix-level realization of the three singular-value threshold
 * projectors (kernel, image, kernel-intersect-image), the purified
 * rank-ratio amplitude, and the error-propagation bound for chained
 * projected unitary encodings.
 *
 * Projectors act on explicit |S_k^i|-dimensional matrices; quantum cost is
 * tracked symbolically elsewhere.
 */

#ifndef QTDA_PROJECTORS_HPP
#define QTDA_PROJECTORS_HPP

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chebyshev.hpp"
#include "complex.hpp"
#include "errors.hpp"

namespace qtda {

/// Relative zero/nonzero split for singular values.
inline constexpr double kSingularZeroTol = 1e-9;

/** The (alpha, m, eps) triple of a projected unitary encoding. */
struct EncodingParams {
    double alpha = 1.0;    ///< normalization; >= spectral norm of the encoded operator
    double ancillas = 0.0; ///< m
    double error = 0.0;    ///< eps
};

/** Product rule: an (a1*a2, m1+m2, a1*e2 + a2*e1) encoding of the product. */
inline EncodingParams product_encoding(const EncodingParams& a, const EncodingParams& b) {
    return {a.alpha * b.alpha, a.ancillas + b.ancillas, a.alpha * b.error + b.alpha * a.error};
}

/** A realized orthogonal projector with its provenance. */
struct ProjectorSpec {
    enum class Provenance { Ker, Im, KerIm };
    enum class Mode { ideal, poly };
    Eigen::MatrixXd matrix;
    Provenance provenance = Provenance::Ker;
    Mode mode = Mode::ideal;
    double gap = 1.0;       ///< the gap parameter used
    double eps = 0.0;       ///< construction error (0 for ideal)
    double alpha = 1.0;     ///< encoding normalization used
    int poly_degree = 0;    ///< threshold-polynomial degree (0 for ideal)
};

namespace detail {

struct FullSvd {
    Eigen::MatrixXd U, V;          ///< complete orthonormal bases
    Eigen::VectorXd sigma;         ///< min(m, n) values, descending
    double sv(int i) const {       ///< singular value padded with zeros
        return i < sigma.size() ? sigma(i) : 0.0;
    }
};

inline FullSvd full_svd(const Eigen::MatrixXd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {svd.matrixU(), svd.matrixV(), svd.singularValues()};
}

/** Smallest singular value above the relative zero split, or -1 if none. */
inline double smallest_nonzero(const Eigen::VectorXd& sigma) {
    if (sigma.size() == 0) return -1.0;
    const double cut = kSingularZeroTol * sigma(0);
    double best = -1.0;
    for (int i = 0; i < sigma.size(); ++i)
        if (sigma(i) > cut) best = sigma(i);
    return best;
}

}  // namespace detail

/**
 * Projector onto the sigma = 0 right-singular space of B/alpha (the kernel
 * of B).  Poly mode applies an even low-pass threshold centered at
 * Lambda/(2 alpha); ideal mode classifies by exact SVD.
 */
inline ProjectorSpec kernel_projector(const Eigen::MatrixXd& B, double alpha, double gap,
                                      double eps, ProjectorSpec::Mode mode) {
    const int n = static_cast<int>(B.cols());
    ProjectorSpec spec;
    spec.provenance = ProjectorSpec::Provenance::Ker;
    spec.mode = mode;
    spec.gap = gap;
    spec.eps = mode == ProjectorSpec::Mode::poly ? eps : 0.0;
    spec.alpha = alpha;
    if (n == 0) {
        spec.matrix = Eigen::MatrixXd::Zero(0, 0);
        return spec;
    }
    if (B.rows() == 0 || B.norm() == 0.0) {
        // The zero map: everything is kernel.
        spec.matrix = Eigen::MatrixXd::Identity(n, n);
        return spec;
    }
    const auto svd = detail::full_svd(B);
    if (alpha + 1e-12 < svd.sigma(0))
        throw ConfigError("encoding normalization alpha below the spectral norm");
    const double min_nz = detail::smallest_nonzero(svd.sigma);
    if (min_nz > 0.0 && gap > min_nz + 1e-12)
        throw ComputeError("declared gap exceeds the smallest nonzero singular value");
    const double cut = gap / (2.0 * alpha);
    spec.matrix = Eigen::MatrixXd::Zero(n, n);
    ThresholdPolynomial poly;
    if (mode == ProjectorSpec::Mode::poly) {
        poly = threshold_polynomial(cut, cut / 2.0, eps,
                                    ThresholdPolynomial::Orientation::low_pass);
        spec.poly_degree = poly.degree;
    }
    for (int i = 0; i < n; ++i) {
        const double s = svd.sv(i) / alpha;
        const double f = mode == ProjectorSpec::Mode::ideal ? (s < cut ? 1.0 : 0.0) : poly(s);
        if (f != 0.0) spec.matrix += f * svd.V.col(i) * svd.V.col(i).transpose();
    }
    return spec;
}

/**
 * Projector onto the sigma > 0 left-singular space of B (the image of B),
 * realized with the high-pass orientation of the same threshold.
 */
inline ProjectorSpec image_projector(const Eigen::MatrixXd& B, double alpha, double gap,
                                     double eps, ProjectorSpec::Mode mode) {
    const int m = static_cast<int>(B.rows());
    ProjectorSpec spec;
    spec.provenance = ProjectorSpec::Provenance::Im;
    spec.mode = mode;
    spec.gap = gap;
    spec.eps = mode == ProjectorSpec::Mode::poly ? eps : 0.0;
    spec.alpha = alpha;
    spec.matrix = Eigen::MatrixXd::Zero(m, m);
    if (m == 0 || B.cols() == 0 || B.norm() == 0.0) return spec;  // empty image
    const auto svd = detail::full_svd(B);
    if (alpha + 1e-12 < svd.sigma(0))
        throw ConfigError("encoding normalization alpha below the spectral norm");
    const double min_nz = detail::smallest_nonzero(svd.sigma);
    if (min_nz > 0.0 && gap > min_nz + 1e-12)
        throw ComputeError("declared gap exceeds the smallest nonzero singular value");
    const double cut = gap / (2.0 * alpha);
    ThresholdPolynomial poly;
    if (mode == ProjectorSpec::Mode::poly) {
        poly = threshold_polynomial(cut, cut / 2.0, eps,
                                    ThresholdPolynomial::Orientation::high_pass);
        spec.poly_degree = poly.degree;
    }
    for (int i = 0; i < m; ++i) {
        const double s = svd.sv(i) / alpha;
        const double f = mode == ProjectorSpec::Mode::ideal ? (s >= cut ? 1.0 : 0.0) : poly(s);
        if (f != 0.0) spec.matrix += f * svd.U.col(i) * svd.U.col(i).transpose();
    }
    return spec;
}

/**
 * Projector onto the sigma = 1 singular space of Pi_Ker * Pi_Im, i.e. onto
 * Ker ∩ Im.  Poly mode thresholds at 1 - Lambda_PiPi/2; with i = j the
 * product is already Pi_Im and Lambda_PiPi = 1 is usable.
 */
inline ProjectorSpec ker_im_projector(const ProjectorSpec& pk, const ProjectorSpec& pi,
                                      double gap_pipi, double eps,
                                      ProjectorSpec::Mode mode) {
    if (pk.matrix.cols() != pi.matrix.rows())
        throw ConfigError("projector dimensions do not match");
    if (!(gap_pipi > 0.0) || gap_pipi > 1.0)
        throw ConfigError("Lambda_PiPi must lie in (0, 1]");
    const Eigen::MatrixXd M = pk.matrix * pi.matrix;
    const int n = static_cast<int>(M.cols());
    ProjectorSpec spec;
    spec.provenance = ProjectorSpec::Provenance::KerIm;
    spec.mode = mode;
    spec.gap = gap_pipi;
    spec.eps = mode == ProjectorSpec::Mode::poly ? eps : 0.0;
    spec.alpha = 1.0;
    spec.matrix = Eigen::MatrixXd::Zero(n, n);
    if (n == 0 || M.norm() == 0.0) return spec;
    const auto svd = detail::full_svd(M);
    // Test-mode guard: the declared gap must not exceed the true deviation.
    // Poly-mode inputs perturb the unit cluster by up to their construction
    // errors, which enter the tolerance as slack.
    const double slack = 2.0 * (pk.eps + pi.eps) + 1e-9;
    double top_below_one = -1.0;
    for (int i = 0; i < svd.sigma.size(); ++i)
        if (svd.sigma(i) < 1.0 - kSingularZeroTol - slack) {
            top_below_one = svd.sigma(i);
            break;
        }
    if (top_below_one > 0.0 && gap_pipi > 1.0 - top_below_one + slack)
        throw ComputeError("declared Lambda_PiPi exceeds the true sub-unit gap");
    const double cut = 1.0 - gap_pipi / 2.0;
    ThresholdPolynomial poly;
    if (mode == ProjectorSpec::Mode::poly) {
        poly = threshold_polynomial(cut, gap_pipi / 4.0, eps,
                                    ThresholdPolynomial::Orientation::high_pass);
        spec.poly_degree = poly.degree;
    }
    for (int i = 0; i < n; ++i) {
        const double s = svd.sv(i);
        const double f = mode == ProjectorSpec::Mode::ideal ? (s >= cut ? 1.0 : 0.0)
                                                            : poly(std::min(s, 1.0));
        if (f != 0.0) spec.matrix += f * svd.V.col(i) * svd.V.col(i).transpose();
    }
    return spec;
}

/**
 * The amplitude a = sqrt(trace(Pi)/|S_k^i|) that the purified maximally
 * mixed state encodes: measuring Pi on |psi_m> = sum_s |s>|s>/sqrt(d)
 * succeeds with probability rank(Pi)/d.
 */
inline double purified_overlap(const ProjectorSpec& p, const CliqueComplex& cx, int k) {
    const int d = cx.count(k);
    if (p.matrix.rows() != d || p.matrix.cols() != d)
        throw ConfigError("projector basis does not match |S_k^i|");
    if (d == 0) throw ConfigError("empty simplex basis");
    const double t = p.matrix.trace();
    return std::sqrt(std::max(0.0, t) / d);
}

/**
 * Robustness bound for a degree-d QSVT sequence built from a chain of
 * projected unitary encodings with faulty projector-controlled NOTs:
 * 4 d sqrt(eps_L + eps_R + eps), with eps the normalized error of the chain
 * folded by the product rule.
 */
inline double encoding_error_propagation(const std::vector<EncodingParams>& chain,
                                         double eps_left, double eps_right, int degree) {
    if (eps_left < 0.0 || eps_left >= 1.0 || eps_right < 0.0 || eps_right >= 1.0)
        throw ConfigError("component errors must lie in [0, 1)");
    EncodingParams total{1.0, 0.0, 0.0};
    for (const auto& e : chain) {
        if (e.error < 0.0) throw ConfigError("encoding error must be non-negative");
        total = product_encoding(total, e);
    }
    const double eps_norm = total.alpha > 0.0 ? total.error / total.alpha : total.error;
    return 4.0 * degree * std::sqrt(eps_left + eps_right + eps_norm);
}

}  // namespace qtda

#endif  // QTDA_PROJECTORS_HPP
