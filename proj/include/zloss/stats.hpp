#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "zloss/error.hpp"
#include "zloss/optimize.hpp"

namespace zloss {

struct DescriptiveStats {
    double mean = 0.0;
    double std = 0.0;
    std::size_t count = 0;
    int ddof = 0;
};

struct GaussianParams {
    double mu = 0.0;
    double sigma = 1.0;
};

/// Skew-normal with shape alpha, location xi and scale omega. shape == 0 is
/// the Gaussian N(loc, scale^2).
struct SkewNormalParams {
    double shape = 0.0;
    double loc = 0.0;
    double scale = 1.0;
};

/// Two-pass mean and standard deviation with denominator (n - ddof).
inline DescriptiveStats mean_std(std::span<const double> values, int ddof) {
    if (values.empty()) fail(errc::invalid_input, "mean_std: empty input");
    if (ddof != 0 && ddof != 1) fail(errc::invalid_input, "mean_std: ddof must be 0 or 1");
    const std::size_t n = values.size();
    if (ddof == 1 && n < 2) fail(errc::degenerate_sample, "mean_std: ddof=1 needs at least two values");

    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(n - static_cast<std::size_t>(ddof));
    return {mean, std::sqrt(var), n, ddof};
}

inline std::vector<double> z_scores(std::span<const double> values, const DescriptiveStats& stats,
                                    double eps = 1e-8) {
    std::vector<double> z(values.size());
    const double denom = stats.std + eps;
    for (std::size_t i = 0; i < values.size(); ++i) z[i] = (values[i] - stats.mean) / denom;
    return z;
}

inline double normal_pdf(double z) noexcept {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) noexcept {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

inline double gaussian_pdf(double x, const GaussianParams& p) noexcept {
    return normal_pdf((x - p.mu) / p.sigma) / p.sigma;
}

inline double skewnorm_pdf(double x, const SkewNormalParams& p) noexcept {
    const double z = (x - p.loc) / p.scale;
    return 2.0 / p.scale * normal_pdf(z) * normal_cdf(p.shape * z);
}

/// Numerically stable logistic function.
inline double sigmoid(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double logit(double p) {
    if (!(p > 0.0 && p < 1.0)) fail(errc::invalid_input, "logit: probability must lie in (0, 1)");
    return std::log(p) - std::log1p(-p);
}

namespace detail {
inline constexpr double pdf_floor = 1e-300;

inline double floored_log(double pdf) noexcept { return std::log(std::max(pdf, pdf_floor)); }
} // namespace detail

// Sum of log densities; each density is floored at 1e-300 so a far-off
// sample yields a large finite penalty instead of -inf.
inline double log_likelihood(std::span<const double> samples, const GaussianParams& p) noexcept {
    double ll = 0.0;
    for (double x : samples) ll += detail::floored_log(gaussian_pdf(x, p));
    return ll;
}

inline double log_likelihood(std::span<const double> samples, const SkewNormalParams& p) noexcept {
    double ll = 0.0;
    for (double x : samples) ll += detail::floored_log(skewnorm_pdf(x, p));
    return ll;
}

/// Mean and population standard deviation (ddof 0).
inline GaussianParams fit_gaussian(std::span<const double> samples) {
    if (samples.size() < 2) fail(errc::insufficient_data, "fit_gaussian: need at least two samples");
    const auto s = mean_std(samples, 0);
    if (!(s.std > 0.0)) fail(errc::degenerate_sample, "fit_gaussian: sample has zero variance");
    return {s.mean, s.std};
}

struct SkewNormalFitOptions {
    std::size_t min_samples = 8;
    // Samples piled against a bound (saturated probabilities) have their
    // likelihood supremum at |alpha| -> infinity; the fit stops at this bound.
    double max_abs_shape = 50.0;
    NelderMeadOptions simplex{};
};

struct SkewNormalFit {
    SkewNormalParams params;
    double log_likelihood = 0.0;
    int iterations = 0;
};

namespace detail {

// Largest |skewness| a skew-normal can produce (delta -> 1).
inline constexpr double max_skewnorm_skewness = 0.9952717464311565;

// Method-of-moments (alpha, xi, omega) for a sample standardised to mean 0
// and population std 1, given its skewness.
inline SkewNormalParams skewnorm_moment_start(double skewness) {
    const double limit = 0.99 * max_skewnorm_skewness;
    const double g = std::clamp(skewness, -limit, limit);
    const double g23 = std::pow(std::abs(g), 2.0 / 3.0);
    const double k = std::pow((4.0 - std::numbers::pi) / 2.0, 2.0 / 3.0);
    double delta = std::sqrt(std::numbers::pi / 2.0 * g23 / (g23 + k));
    if (g < 0.0) delta = -delta;
    const double alpha = delta / std::sqrt(1.0 - delta * delta);
    const double omega = 1.0 / std::sqrt(1.0 - 2.0 * delta * delta / std::numbers::pi);
    const double xi = -omega * delta * std::sqrt(2.0 / std::numbers::pi);
    return {alpha, xi, omega};
}

} // namespace detail

/// Maximum-likelihood skew-normal fit. The sample is standardised, a
/// method-of-moments start is refined by Nelder-Mead over
/// (alpha, xi, log omega), and the result is mapped back. The returned
/// likelihood is never below the Gaussian fit's: alpha = 0 is inside the
/// search space and is used if the simplex ends up worse.
inline SkewNormalFit fit_skewnorm_mle(std::span<const double> samples,
                                      const SkewNormalFitOptions& opts = {}) {
    if (samples.size() < opts.min_samples) {
        fail(errc::insufficient_data, "fit_skewnorm: need at least " +
                                          std::to_string(opts.min_samples) + " samples, got " +
                                          std::to_string(samples.size()));
    }
    if (!(opts.max_abs_shape > 0.0)) fail(errc::invalid_input, "fit_skewnorm: max_abs_shape must be positive");
    const auto s = mean_std(samples, 0);
    if (!(s.std > 0.0)) fail(errc::insufficient_data, "fit_skewnorm: sample has zero variance");

    std::vector<double> standard(samples.size());
    double m3 = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        standard[i] = (samples[i] - s.mean) / s.std;
        m3 += standard[i] * standard[i] * standard[i];
    }
    m3 /= static_cast<double>(samples.size());

    const std::span<const double> xs(standard);
    const double cap = opts.max_abs_shape;
    const double n = static_cast<double>(samples.size());
    auto objective = [&](std::span<const double> theta) {
        const double alpha = std::clamp(theta[0], -cap, cap);
        const double excess = std::abs(theta[0]) - cap;
        const double penalty = excess > 0.0 ? n * excess * excess : 0.0;
        return penalty - log_likelihood(xs, SkewNormalParams{alpha, theta[1], std::exp(theta[2])});
    };

    const SkewNormalParams start = detail::skewnorm_moment_start(m3);
    const std::array<double, 3> x0{start.shape, start.loc, std::log(start.scale)};
    const std::array<double, 3> step{0.5, 0.1, 0.1};

    auto best = nelder_mead(objective, x0, step, opts.simplex);
    int iterations = best.iterations;
    // One restart from the reported optimum guards against a collapsed simplex.
    auto again = nelder_mead(objective, best.x, step, opts.simplex);
    iterations += again.iterations;
    if (again.value <= best.value) best = std::move(again);
    if (!best.converged) {
        fail(errc::fit_failed, "fit_skewnorm: simplex did not converge within " +
                                   std::to_string(opts.simplex.max_iterations) + " iterations");
    }

    SkewNormalParams fitted{std::clamp(best.x[0], -cap, cap), s.mean + s.std * best.x[1], s.std * std::exp(best.x[2])};
    double ll = log_likelihood(samples, fitted);
    const GaussianParams gauss{s.mean, s.std};
    const double ll_gauss = log_likelihood(samples, gauss);
    if (ll < ll_gauss) {
        fitted = {0.0, gauss.mu, gauss.sigma};
        ll = ll_gauss;
    }
    return {fitted, ll, iterations};
}

inline SkewNormalParams fit_skewnorm(std::span<const double> samples,
                                     const SkewNormalFitOptions& opts = {}) {
    return fit_skewnorm_mle(samples, opts).params;
}

/// Points where the two Gaussian densities are equal, ascending. Equal
/// sigmas give the single midpoint root.
inline std::vector<double> gauss_intersection(const GaussianParams& p0, const GaussianParams& p1) {
    const double v0 = p0.sigma * p0.sigma;
    const double v1 = p1.sigma * p1.sigma;
    const double a = 1.0 / (2.0 * v0) - 1.0 / (2.0 * v1);
    const double b = p1.mu / v1 - p0.mu / v0;
    const double c = p0.mu * p0.mu / (2.0 * v0) - p1.mu * p1.mu / (2.0 * v1) - std::log(p1.sigma / p0.sigma);

    if (a == 0.0) {
        if (b == 0.0) fail(errc::degenerate_input, "gauss_intersection: identical distributions");
        return {0.5 * (p0.mu + p1.mu)};
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return {};
    if (disc == 0.0) return {-b / (2.0 * a)};
    // Citardauq form avoids cancellation when one root is much larger.
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    std::vector<double> roots{q / a, c / q};
    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace zloss
