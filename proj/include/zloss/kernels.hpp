#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "zloss/error.hpp"
#include "zloss/stats.hpp"

namespace zloss {

using Mask = std::vector<bool>;

/// Output of every loss kernel. `grad` is d(loss)/d(prediction) with the mask
/// held constant, so it is exactly zero wherever `mask` is false.
struct MaskedLossResult {
    double loss = 0.0;
    std::vector<double> grad;
    Mask mask;
    std::size_t valid_count = 0;
};

/// Which batch statistic drives the regression mask: the targets themselves
/// or the per-sample squared errors.
enum class MaskMode { target_z, error_z };

inline constexpr double default_eps = 1e-8;

namespace detail {

inline void check_pair(std::size_t a, std::size_t b, const char* what) {
    if (a == 0) fail(errc::invalid_input, std::string(what) + ": empty batch");
    if (a != b) {
        fail(errc::invalid_input, std::string(what) + ": length mismatch (" + std::to_string(a) +
                                      " vs " + std::to_string(b) + ")");
    }
}

inline void check_labels(std::span<const int> labels, const char* what) {
    for (int y : labels)
        if (y != 0 && y != 1) fail(errc::invalid_input, std::string(what) + ": labels must be 0 or 1");
}

inline double bce_with_logits(double x, double y) noexcept {
    return std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
}

} // namespace detail

/// z-scores of a batch against its own mean and unbiased std, with the
/// divisor guarded by `eps`. A singleton batch has no spread and scores 0.
inline std::vector<double> batch_z_scores(std::span<const double> values, double eps = default_eps) {
    if (values.size() < 2) return std::vector<double>(values.size(), 0.0);
    return z_scores(values, mean_std(values, 1), eps);
}

inline Mask threshold_mask(std::span<const double> z, double threshold) {
    Mask mask(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) mask[i] = std::abs(z[i]) <= threshold;
    return mask;
}

/// Signed per-class z-scores: each sample is scored against the mean and
/// unbiased std of the samples sharing its label. A std below 1e-8 (or a
/// class of one) is replaced by 1.
inline std::vector<double> class_z_scores(std::span<const double> scores, std::span<const int> labels) {
    detail::check_pair(scores.size(), labels.size(), "class_z_scores");
    detail::check_labels(labels, "class_z_scores");
    std::vector<double> z(scores.size(), 0.0);
    std::vector<double> members;
    for (int cls : {0, 1}) {
        members.clear();
        for (std::size_t i = 0; i < scores.size(); ++i)
            if (labels[i] == cls) members.push_back(scores[i]);
        if (members.empty()) continue;
        double mean = members.front();
        double std = 1.0;
        if (members.size() >= 2) {
            const auto s = mean_std(members, 1);
            mean = s.mean;
            std = s.std < 1e-8 ? 1.0 : s.std;
        }
        for (std::size_t i = 0; i < scores.size(); ++i)
            if (labels[i] == cls) z[i] = (scores[i] - mean) / std;
    }
    return z;
}

inline Mask class_threshold_mask(std::span<const double> z, std::span<const int> labels,
                                 double threshold0, double threshold1) {
    Mask mask(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        mask[i] = std::abs(z[i]) <= (labels[i] == 0 ? threshold0 : threshold1);
    return mask;
}

/// Mean squared error over the inliers of the batch. Samples whose |z| exceeds
/// `threshold` contribute neither loss nor gradient.
inline MaskedLossResult z_mse_loss(std::span<const double> predictions, std::span<const double> targets,
                                   double threshold, MaskMode mode = MaskMode::target_z,
                                   double eps = default_eps) {
    detail::check_pair(predictions.size(), targets.size(), "z_mse_loss");
    if (!(threshold > 0.0)) fail(errc::invalid_input, "z_mse_loss: threshold must be positive");
    const std::size_t n = predictions.size();

    std::vector<double> residual(n), squared(n);
    for (std::size_t i = 0; i < n; ++i) {
        residual[i] = predictions[i] - targets[i];
        squared[i] = residual[i] * residual[i];
    }
    const auto z = batch_z_scores(mode == MaskMode::target_z ? targets : std::span<const double>(squared), eps);

    MaskedLossResult out;
    out.mask = threshold_mask(z, threshold);
    out.valid_count = static_cast<std::size_t>(std::count(out.mask.begin(), out.mask.end(), true));
    const double denom = static_cast<double>(out.valid_count) + eps;
    out.grad.assign(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!out.mask[i]) continue;
        total += squared[i];
        out.grad[i] = 2.0 * residual[i] / denom;
    }
    out.loss = total / denom;
    return out;
}

/// Binary cross-entropy on logits, masked per class: a sample is an inlier when
/// its logit lies within `threshold0` (label 0) or `threshold1` (label 1) sigmas
/// of its class's batch mean.
inline MaskedLossResult z_bce_with_logits_loss(std::span<const double> logits, std::span<const int> labels,
                                               double threshold0, double threshold1) {
    detail::check_pair(logits.size(), labels.size(), "z_bce_with_logits_loss");
    if (!(threshold0 > 0.0 && threshold1 > 0.0))
        fail(errc::invalid_input, "z_bce_with_logits_loss: thresholds must be positive");
    const std::size_t n = logits.size();
    const auto z = class_z_scores(logits, labels);

    MaskedLossResult out;
    out.mask = class_threshold_mask(z, labels, threshold0, threshold1);
    out.valid_count = static_cast<std::size_t>(std::count(out.mask.begin(), out.mask.end(), true));
    const double denom = static_cast<double>(out.valid_count) + default_eps;
    out.grad.assign(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!out.mask[i]) continue;
        total += detail::bce_with_logits(logits[i], labels[i]);
        out.grad[i] = (sigmoid(logits[i]) - labels[i]) / denom;
    }
    out.loss = total / denom;
    return out;
}

inline MaskedLossResult z_bce_with_logits_loss(std::span<const double> logits, std::span<const int> labels,
                                               double threshold) {
    return z_bce_with_logits_loss(logits, labels, threshold, threshold);
}

// The unmasked baselines divide by (n + eps) like the masked kernels, so a
// saturated mask reproduces them bit for bit.
inline MaskedLossResult plain_mse(std::span<const double> predictions, std::span<const double> targets) {
    detail::check_pair(predictions.size(), targets.size(), "plain_mse");
    const std::size_t n = predictions.size();
    MaskedLossResult out;
    out.mask.assign(n, true);
    out.valid_count = n;
    out.grad.resize(n);
    const double denom = static_cast<double>(n) + default_eps;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = predictions[i] - targets[i];
        total += r * r;
        out.grad[i] = 2.0 * r / denom;
    }
    out.loss = total / denom;
    return out;
}

inline MaskedLossResult plain_bce_with_logits(std::span<const double> logits, std::span<const int> labels) {
    detail::check_pair(logits.size(), labels.size(), "plain_bce_with_logits");
    detail::check_labels(labels, "plain_bce_with_logits");
    const std::size_t n = logits.size();
    MaskedLossResult out;
    out.mask.assign(n, true);
    out.valid_count = n;
    out.grad.resize(n);
    const double denom = static_cast<double>(n) + default_eps;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += detail::bce_with_logits(logits[i], labels[i]);
        out.grad[i] = (sigmoid(logits[i]) - labels[i]) / denom;
    }
    out.loss = total / denom;
    return out;
}

// Linear annealing from start_sigma (epoch 0) to end_sigma (epoch max_epochs).
inline double sigma_threshold(int epoch, int max_epochs, double start_sigma = 100.0, double end_sigma = 2.0) {
    if (max_epochs < 1) fail(errc::invalid_input, "sigma_threshold: max_epochs must be >= 1");
    if (epoch < 0 || epoch > max_epochs) {
        fail(errc::invalid_input, "sigma_threshold: epoch " + std::to_string(epoch) + " outside [0, " +
                                      std::to_string(max_epochs) + "]");
    }
    const double progress = static_cast<double>(epoch) / static_cast<double>(max_epochs);
    return start_sigma + (end_sigma - start_sigma) * progress;
}

struct SigmaSchedule {
    double start_sigma = 100.0;
    double end_sigma = 2.0;
    int max_epochs = 1;

    void validate() const {
        if (!(end_sigma > 0.0 && start_sigma >= end_sigma))
            fail(errc::invalid_input, "SigmaSchedule: need start_sigma >= end_sigma > 0");
        if (max_epochs < 1) fail(errc::invalid_input, "SigmaSchedule: max_epochs must be >= 1");
    }

    double at(int epoch) const {
        validate();
        return sigma_threshold(epoch, max_epochs, start_sigma, end_sigma);
    }

    static SigmaSchedule fixed(double sigma) { return {sigma, sigma, 1}; }

    // Reaches end_sigma on the last of `epochs` epochs (0-based).
    SigmaSchedule spanning(int epochs) const { return {start_sigma, end_sigma, std::max(1, epochs - 1)}; }
};

} // namespace zloss
