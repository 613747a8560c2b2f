#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "zloss/error.hpp"
#include "zloss/kernels.hpp"
#include "zloss/roots.hpp"
#include "zloss/stats.hpp"

namespace zloss {

enum class CutoffMethod { gaussian, skewnormal };

using ClassFit = std::variant<GaussianParams, SkewNormalParams>;

struct CutoffResult {
    std::optional<double> logit_cutoff; // gaussian path only
    double prob_cutoff = 0.5;
    CutoffMethod method = CutoffMethod::gaussian;
    ClassFit class0_fit;
    ClassFit class1_fit;
    std::array<std::size_t, 2> inlier_counts{};
    bool fallback = false; // skew-normal path used the class-mean midpoint
};

/// Per-class z-score inlier mask (unbiased std, std < 1e-8 replaced by 1).
inline Mask class_inlier_mask(std::span<const double> scores, std::span<const int> labels, double threshold) {
    const auto z = class_z_scores(scores, labels);
    return class_threshold_mask(z, labels, threshold, threshold);
}

namespace detail {

inline std::array<std::vector<double>, 2> split_inliers(std::span<const double> values,
                                                        std::span<const int> labels, const Mask& mask) {
    std::array<std::vector<double>, 2> out;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (mask[i]) out[static_cast<std::size_t>(labels[i])].push_back(values[i]);
    return out;
}

inline std::string count_message(const char* head, const std::array<std::vector<double>, 2>& parts) {
    return std::string(head) + " (class 0: " + std::to_string(parts[0].size()) +
           ", class 1: " + std::to_string(parts[1].size()) + ")";
}

} // namespace detail

/// Chooses the intersection of the two Gaussians nearest the midpoint of
/// their means; ties go to the smaller root.
inline double logit_cutoff_from_fits(const GaussianParams& p0, const GaussianParams& p1) {
    const auto roots = gauss_intersection(p0, p1);
    if (roots.empty()) fail(errc::degenerate_input, "logit_cutoff_from_fits: densities do not intersect");
    const double mid = 0.5 * (p0.mu + p1.mu);
    double best = roots.front();
    for (double r : roots)
        if (std::abs(r - mid) < std::abs(best - mid)) best = r;
    return best;
}

inline CutoffResult optimal_logit_cutoff(std::span<const double> logits, std::span<const int> labels,
                                         double z_threshold = 2.0) {
    const Mask mask = class_inlier_mask(logits, labels, z_threshold);
    const auto parts = detail::split_inliers(logits, labels, mask);
    if (parts[0].size() < 2 || parts[1].size() < 2) {
        fail(errc::insufficient_data,
             detail::count_message("Not enough inlier points in each class to fit Gaussians.", parts));
    }
    const GaussianParams p0 = fit_gaussian(parts[0]);
    const GaussianParams p1 = fit_gaussian(parts[1]);
    const double cut = logit_cutoff_from_fits(p0, p1);

    CutoffResult out;
    out.method = CutoffMethod::gaussian;
    out.logit_cutoff = cut;
    out.prob_cutoff = sigmoid(cut);
    out.class0_fit = p0;
    out.class1_fit = p1;
    out.inlier_counts = {parts[0].size(), parts[1].size()};
    return out;
}

struct SkewCutoffOptions {
    double bracket_lo = 0.001;
    double bracket_hi = 0.999;
    double root_tol = 1e-12;
    SkewNormalFitOptions fit{};
};

/// Probability-space cutoff: logits go through the sigmoid, are masked per
/// class on the probability z-scores, and a skew-normal is fitted per class.
/// The cutoff is the density crossing inside the bracket; without a sign
/// change (or with identical fits) it falls back to the midpoint of the two
/// class mean probabilities.
inline CutoffResult optimal_prob_cutoff_skewnorm(std::span<const double> logits, std::span<const int> labels,
                                                 double z_threshold = 2.0, const SkewCutoffOptions& opts = {}) {
    std::vector<double> probs(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) probs[i] = sigmoid(logits[i]);
    const Mask mask = class_inlier_mask(probs, labels, z_threshold);
    const auto parts = detail::split_inliers(probs, labels, mask);
    if (parts[0].size() < opts.fit.min_samples || parts[1].size() < opts.fit.min_samples) {
        fail(errc::insufficient_data,
             detail::count_message("Not enough inlier points in each class to fit SkewNormals.", parts));
    }
    const SkewNormalParams s0 = fit_skewnorm(parts[0], opts.fit);
    const SkewNormalParams s1 = fit_skewnorm(parts[1], opts.fit);

    CutoffResult out;
    out.method = CutoffMethod::skewnormal;
    out.class0_fit = s0;
    out.class1_fit = s1;
    out.inlier_counts = {parts[0].size(), parts[1].size()};

    const bool identical = s0.shape == s1.shape && s0.loc == s1.loc && s0.scale == s1.scale;
    auto diff = [&](double x) { return skewnorm_pdf(x, s0) - skewnorm_pdf(x, s1); };
    try {
        if (identical) fail(errc::no_sign_change, "identical class fits");
        out.prob_cutoff = brent_root(diff, opts.bracket_lo, opts.bracket_hi, opts.root_tol);
    } catch (const error& e) {
        if (e.code() != errc::no_sign_change) throw;
        const double m0 = mean_std(parts[0], 0).mean;
        const double m1 = mean_std(parts[1], 0).mean;
        out.prob_cutoff = 0.5 * (m0 + m1);
        out.fallback = true;
    }
    return out;
}

} // namespace zloss
