#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "zloss/cutoff.hpp"
#include "zloss/error.hpp"
#include "zloss/kernels.hpp"
#include "zloss/rng.hpp"
#include "zloss/synth.hpp"

namespace zloss {

enum class DetectionMethod { batch, full };

struct DetectionReport {
    DetectionMethod method = DetectionMethod::full;
    std::size_t batch_size = 0; // 0 for the full-dataset method
    double threshold = 0.0;
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;

    std::size_t detections() const noexcept { return tp + fp; }
    bool operator==(const DetectionReport&) const = default;
};

/// Confusion counts of predicted against true outlier flags; precision,
/// recall and F1 are 0 whenever their denominator is 0.
inline DetectionReport score_detection(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
    if (predicted.size() != truth.size()) fail(errc::invalid_input, "score_detection: length mismatch");
    DetectionReport r;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] && truth[i]) ++r.tp;
        else if (predicted[i]) ++r.fp;
        else if (truth[i]) ++r.fn;
        else ++r.tn;
    }
    auto ratio = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    r.precision = ratio(r.tp, r.tp + r.fp);
    r.recall = ratio(r.tp, r.tp + r.fn);
    r.f1 = r.precision + r.recall == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

namespace detail {

inline void check_detection_inputs(std::span<const double> values, std::optional<std::span<const int>> labels,
                                   const std::vector<bool>& truth) {
    if (values.empty()) fail(errc::invalid_input, "detection: empty input");
    if (truth.size() != values.size()) fail(errc::invalid_input, "detection: truth length mismatch");
    if (labels && labels->size() != values.size()) fail(errc::invalid_input, "detection: label length mismatch");
}

// Inlier mask of one group: target z-scores without labels, per-class
// z-scores with labels.
inline Mask group_mask(std::span<const double> values, std::optional<std::span<const int>> labels,
                       double threshold) {
    if (labels) return class_inlier_mask(values, *labels, threshold);
    return threshold_mask(batch_z_scores(values), threshold);
}

} // namespace detail

/// Full-dataset method: one mask over every sample. A sample is detected
/// when it is masked out.
inline DetectionReport detect_full(std::span<const double> values, std::optional<std::span<const int>> labels,
                                   const std::vector<bool>& truth, double threshold) {
    detail::check_detection_inputs(values, labels, truth);
    const Mask mask = detail::group_mask(values, labels, threshold);
    std::vector<bool> detected(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) detected[i] = !mask[i];
    DetectionReport r = score_detection(detected, truth);
    r.method = DetectionMethod::full;
    r.batch_size = 0;
    r.threshold = threshold;
    return r;
}

/// Batchwise method: one seeded shuffle, consecutive batches of
/// `batch_size` (short tail kept, batches under 2 samples skipped), a mask
/// per batch. Each batch is evaluated in ascending index order, so a single
/// batch covering the data reproduces detect_full exactly.
inline DetectionReport detect_batchwise(std::span<const double> values, std::optional<std::span<const int>> labels,
                                        const std::vector<bool>& truth, std::size_t batch_size, double threshold,
                                        std::uint64_t seed) {
    detail::check_detection_inputs(values, labels, truth);
    if (batch_size < 2) fail(errc::invalid_input, "detect_batchwise: batch_size must be >= 2");
    const std::size_t n = values.size();
    Rng rng(seed);
    const auto order = shuffled_indices(n, rng);

    std::vector<bool> detected(n, false);
    std::vector<std::size_t> rows;
    std::vector<double> batch_values;
    std::vector<int> batch_labels;
    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t stop = std::min(n, start + batch_size);
        if (stop - start < 2) continue;
        rows.assign(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(stop));
        std::sort(rows.begin(), rows.end());
        batch_values.resize(rows.size());
        batch_labels.resize(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) {
            batch_values[k] = values[rows[k]];
            if (labels) batch_labels[k] = (*labels)[rows[k]];
        }
        std::optional<std::span<const int>> bl;
        if (labels) bl = std::span<const int>(batch_labels);
        const Mask mask = detail::group_mask(batch_values, bl, threshold);
        for (std::size_t k = 0; k < rows.size(); ++k) detected[rows[k]] = !mask[k];
    }
    DetectionReport r = score_detection(detected, truth);
    r.method = DetectionMethod::batch;
    r.batch_size = batch_size;
    r.threshold = threshold;
    return r;
}

// Model-free scores: regression scores its targets, classification the
// projection onto the first feature axis, grouped by observed label.

inline DetectionReport detect_full(const SyntheticRegressionSet& data, double threshold) {
    return detect_full(data.y, std::nullopt, data.outlier_flag, threshold);
}

inline DetectionReport detect_batchwise(const SyntheticRegressionSet& data, std::size_t batch_size, double threshold,
                                        std::uint64_t seed) {
    return detect_batchwise(data.y, std::nullopt, data.outlier_flag, batch_size, threshold, seed);
}

inline DetectionReport detect_full(const SyntheticClassificationSet& data, double threshold) {
    const auto scores = data.x.column(0);
    return detect_full(scores, std::span<const int>(data.label), data.outlier_flag, threshold);
}

inline DetectionReport detect_batchwise(const SyntheticClassificationSet& data, std::size_t batch_size,
                                        double threshold, std::uint64_t seed) {
    const auto scores = data.x.column(0);
    return detect_batchwise(scores, std::span<const int>(data.label), data.outlier_flag, batch_size, threshold, seed);
}

} // namespace zloss
