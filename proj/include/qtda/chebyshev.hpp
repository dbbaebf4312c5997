/**
 * Even threshold polynomials for singular-value filtering: an erf-smoothed
 * step, expanded in the Chebyshev basis of t = 2x^2 - 1 (which makes the
 * polynomial even in x and resolves thresholds near x = 0 without extra
 * degree).
 *
 * Band contract: P(x) in [1-eps, 1] on the pass side of the band
 * [c-w, c+w], P(x) in [0, eps] on the stop side, |P| <= 1 on [-1, 1], and
 * degree <= C * (1/w) * log2(1/eps) with C recorded below.
 */

#ifndef QTDA_CHEBYSHEV_HPP
#define QTDA_CHEBYSHEV_HPP

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "errors.hpp"

namespace qtda {

/// Degree-bound constant: degree <= kThresholdDegreeConstant * (1/w) * log2(1/eps).
inline constexpr double kThresholdDegreeConstant = 3.0;

struct ThresholdPolynomial {
    enum class Orientation { low_pass, high_pass };
    std::vector<double> coeffs;  ///< Chebyshev coefficients in t = 2x^2 - 1
    Orientation orientation = Orientation::high_pass;
    double center = 0.0;     ///< transition center c
    double half_width = 0.0; ///< half-width w
    double sup_error = 0.0;  ///< eps outside the band
    int degree = 0;          ///< polynomial degree in x (= 2 * (coeffs.size() - 1))

    /** Clenshaw evaluation at x in [-1, 1]. */
    double operator()(double x) const {
        const double t = 2.0 * x * x - 1.0;
        double b1 = 0.0, b2 = 0.0;
        for (int k = static_cast<int>(coeffs.size()) - 1; k >= 1; --k) {
            const double b0 = 2.0 * t * b1 - b2 + coeffs[k];
            b2 = b1;
            b1 = b0;
        }
        return t * b1 - b2 + coeffs[0];
    }
};

namespace detail {

/** Inverse error function by Newton iteration on std::erf. */
inline double erf_inv(double y) {
    if (y <= -1.0 || y >= 1.0) throw ComputeError("erf_inv argument out of range");
    // Initial guess (Winitzki approximation), then Newton to machine precision.
    const double a = 0.147;
    const double ln1my2 = std::log(1.0 - y * y);
    const double term = 2.0 / (3.14159265358979323846 * a) + ln1my2 / 2.0;
    double x = std::copysign(std::sqrt(std::sqrt(term * term - ln1my2 / a) - term), y);
    for (int it = 0; it < 60; ++it) {
        const double err = std::erf(x) - y;
        const double deriv = 2.0 / std::sqrt(3.14159265358979323846) * std::exp(-x * x);
        const double step = err / deriv;
        x -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

}  // namespace detail

/**
 * Build the even threshold polynomial.  high_pass: ~1 above the band, ~0
 * below; low_pass is the mirror image.
 */
inline ThresholdPolynomial threshold_polynomial(double center, double half_width,
                                                double sup_error,
                                                ThresholdPolynomial::Orientation orientation) {
    const double c = center, w = half_width, eps = sup_error;
    if (!(w > 0.0) || !(w < c)) throw ConfigError("threshold band requires 0 < w < c");
    if (c + w > 1.0) throw ConfigError("threshold band must lie inside [0, 1]");
    if (!(eps > 0.0) || !(eps >= 1e-14) || !(eps < 1.0))
        throw ConfigError("sup_error must lie in [1e-14, 1)");

    // Construction is pure in (c, w, eps, orientation); memoize it, since
    // repeated-seed emulation rebuilds the same filters many times over.
    using CacheKey = std::tuple<double, double, double, int>;
    static std::map<CacheKey, ThresholdPolynomial> cache;
    static std::mutex cache_mutex;
    const CacheKey key{c, w, eps, orientation == ThresholdPolynomial::Orientation::high_pass};
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        const auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    // Work in u = x^2: pass/stop boundaries map to hi = (c+w)^2, lo = (c-w)^2.
    const double lo = (c - w) * (c - w);
    const double hi = (c + w) * (c + w);
    const double cu = 0.5 * (lo + hi);
    // erf tail eps/8 at the band edges; Chebyshev truncation gets another eps/8.
    const double eps_tail = eps / 8.0;
    const double eps_trunc = eps / 8.0;
    const double T = detail::erf_inv(1.0 - 2.0 * eps_tail);
    const double sigma = (hi - lo) / (2.0 * T);
    const int sign = orientation == ThresholdPolynomial::Orientation::high_pass ? 1 : -1;
    auto smooth_step = [&](double u) {
        return 0.5 * (1.0 + std::erf(sign * (u - cu) / sigma));
    };

    // Chebyshev coefficients of f(t), u = (t+1)/2, via the cosine transform
    // at Chebyshev nodes; node count generous relative to the expected degree.
    const int deg_estimate =
        static_cast<int>(std::ceil((1.0 / w) * std::log2(1.0 / eps))) + 8;
    const int M = std::min(1 << 16, 8 * deg_estimate + 64);
    // Coefficients beyond the degree estimate decay below the truncation
    // budget, so only the leading K are accumulated; cos(k theta) runs by
    // recurrence to keep the transform O(M K).
    const int K = std::min(M, deg_estimate + 64);
    std::vector<double> coef(K, 0.0);
    for (int m = 0; m < M; ++m) {
        const double theta = 3.14159265358979323846 * (m + 0.5) / M;
        const double ct = std::cos(theta);
        const double f = smooth_step((ct + 1.0) / 2.0);
        double c_prev = 1.0, c_cur = ct;
        coef[0] += f;
        if (K > 1) coef[1] += f * c_cur;
        for (int k = 2; k < K; ++k) {
            const double c_next = 2.0 * ct * c_cur - c_prev;
            c_prev = c_cur;
            c_cur = c_next;
            coef[k] += f * c_cur;
        }
    }
    for (int k = 0; k < K; ++k) coef[k] *= (k == 0 ? 1.0 : 2.0) / M;
    // Truncate where the coefficient tail drops below the truncation budget.
    double tail = 0.0;
    int keep = K;
    for (int k = K - 1; k >= 1; --k) {
        tail += std::abs(coef[k]);
        if (tail > eps_trunc) {
            keep = k + 2;
            break;
        }
        keep = k;
    }
    coef.resize(std::max(keep, 1));

    // Fold the affine squeeze into [eps/2, 1 - eps/2] so the band contract's
    // one-sided inequalities hold with margin.
    const double squeeze = 1.0 - eps / 2.0 - eps / 2.0;
    for (double& x : coef) x *= squeeze;
    coef[0] += eps / 2.0;

    ThresholdPolynomial p;
    p.coeffs = std::move(coef);
    p.orientation = orientation;
    p.center = c;
    p.half_width = w;
    p.sup_error = eps;
    p.degree = 2 * (static_cast<int>(p.coeffs.size()) - 1);

    if (p.degree > kThresholdDegreeConstant * (1.0 / w) * std::log2(1.0 / eps) + 2)
        throw ComputeError("threshold polynomial degree exceeded the declared bound");
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        if (cache.size() >= 4096) cache.clear();
        cache.emplace(key, p);
    }
    return p;
}

}  // namespace qtda

#endif  // QTDA_CHEBYSHEV_HPP
