#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "zloss/error.hpp"
#include "zloss/kernels.hpp"
#include "zloss/model.hpp"
#include "zloss/rng.hpp"
#include "zloss/synth.hpp"

namespace zloss {

enum class LossKind { zmse, mse, zbce, bce };
enum class ModelKind { linear, logistic, mlp };

struct TrainConfig {
    int epochs = 100;
    std::size_t batch_size = 64;
    double learning_rate = 0.05;
    LossKind loss = LossKind::zmse;
    MaskMode mask_mode = MaskMode::target_z;
    // Annealed over epochs 0 .. schedule.max_epochs, then held at end_sigma.
    // Use spanning(epochs) to anneal across the whole run.
    SigmaSchedule schedule = SigmaSchedule::fixed(2.0);
    std::uint64_t seed = 0;
    ModelKind model = ModelKind::linear;
    std::size_t mlp_width = 16;

    void validate() const {
        if (epochs < 1) fail(errc::invalid_input, "TrainConfig: epochs must be >= 1");
        if (batch_size < 1) fail(errc::invalid_input, "TrainConfig: batch_size must be >= 1");
        if (!(learning_rate > 0.0)) fail(errc::invalid_input, "TrainConfig: learning_rate must be positive");
        if (model == ModelKind::mlp && mlp_width < 1) fail(errc::invalid_input, "TrainConfig: mlp width must be >= 1");
        schedule.validate();
    }

    double sigma_at(int epoch) const { return schedule.at(std::min(epoch, schedule.max_epochs)); }
};

struct EpochStats {
    int epoch = 0;
    double sigma = 0.0;
    double train_loss = 0.0;       // mean of the epoch's batch losses
    std::size_t masked_out_count = 0;
    double model_metric = 0.0;     // regression: weight error; classification: balanced accuracy
};

struct TrainResult {
    Model model;
    std::vector<EpochStats> history;
};

/// Called after every parameter update with the 0-based step index.
using StepObserver = std::function<void(std::size_t step, std::span<const double> params)>;

inline bool is_regression_loss(LossKind k) noexcept { return k == LossKind::zmse || k == LossKind::mse; }

/// Euclidean distance between learned and true weights (bias excluded).
inline double slope_error(const AffineModel& m, std::span<const double> true_weights) {
    double ss = 0.0;
    const auto w = m.weights();
    for (std::size_t j = 0; j < w.size(); ++j) ss += (w[j] - true_weights[j]) * (w[j] - true_weights[j]);
    return std::sqrt(ss);
}

inline double balanced_accuracy(std::span<const double> logits, std::span<const int> truth) {
    std::size_t hit[2] = {0, 0};
    std::size_t total[2] = {0, 0};
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const int y = truth[i];
        const int pred = logits[i] > 0.0 ? 1 : 0;
        ++total[y];
        if (pred == y) ++hit[y];
    }
    double acc = 0.0;
    int classes = 0;
    for (int c = 0; c < 2; ++c) {
        if (total[c] == 0) continue;
        acc += static_cast<double>(hit[c]) / static_cast<double>(total[c]);
        ++classes;
    }
    return classes == 0 ? 0.0 : acc / classes;
}

namespace detail {

inline Model make_model(const TrainConfig& cfg, std::size_t dim) {
    if (cfg.model == ModelKind::mlp) return MlpModel(dim, cfg.mlp_width, derive_seed(cfg.seed, 0xA11CE));
    return AffineModel(dim);
}

// Shared mini-batch SGD loop. `batch_loss` maps (outputs, rows, sigma) to a
// MaskedLossResult; `metric` is evaluated on the model after each epoch.
template <class BatchLoss, class Metric>
TrainResult run_sgd(const Matrix& x, const TrainConfig& cfg, BatchLoss&& batch_loss, Metric&& metric,
                    const StepObserver& observer) {
    cfg.validate();
    TrainResult result{make_model(cfg, x.cols), {}};
    Rng rng(derive_seed(cfg.seed, 0x5EED));
    const std::size_t n = x.rows;
    std::size_t step = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double sigma = cfg.sigma_at(epoch);
        const auto order = shuffled_indices(n, rng);
        EpochStats stats;
        stats.epoch = epoch;
        stats.sigma = sigma;
        double loss_sum = 0.0;
        std::size_t batches = 0;

        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t stop = std::min(n, start + cfg.batch_size);
            const std::span<const std::size_t> rows(order.data() + start, stop - start);
            std::visit(
                [&](auto& m) {
                    const auto out = m.forward(x, rows);
                    const MaskedLossResult r = batch_loss(std::span<const double>(out), rows, sigma);
                    if (!std::isfinite(r.loss)) {
                        fail(errc::training_diverged, "training diverged at epoch " + std::to_string(epoch));
                    }
                    const auto g = m.backward(x, rows, r.grad);
                    auto p = m.parameters();
                    for (std::size_t k = 0; k < p.size(); ++k) p[k] -= cfg.learning_rate * g[k];
                    loss_sum += r.loss;
                    stats.masked_out_count += rows.size() - r.valid_count;
                },
                result.model);
            ++batches;
            if (observer) std::visit([&](const auto& m) { observer(step, m.parameters()); }, result.model);
            ++step;
        }
        stats.train_loss = loss_sum / static_cast<double>(batches);
        stats.model_metric = metric(result.model);
        if (!std::isfinite(stats.model_metric) ||
            !std::visit([](const auto& m) {
                return std::all_of(m.parameters().begin(), m.parameters().end(),
                                   [](double v) { return std::isfinite(v); });
            }, result.model)) {
            fail(errc::training_diverged, "training diverged at epoch " + std::to_string(epoch));
        }
        result.history.push_back(stats);
    }
    return result;
}

} // namespace detail

/// Mini-batch SGD on a regression set with zmse or mse, using the schedule's
/// sigma for each epoch. model_metric is the weight error for linear models and, for the MLP, the
/// RMS deviation from the noise-free target function.
inline TrainResult train(const SyntheticRegressionSet& data, const TrainConfig& cfg,
                         const StepObserver& observer = {}) {
    if (!is_regression_loss(cfg.loss)) fail(errc::invalid_input, "train: classification loss on regression data");
    if (cfg.model == ModelKind::logistic) fail(errc::invalid_input, "train: logistic model on regression data");
    std::vector<double> targets(data.y.size());
    std::vector<double> clean(data.y.size());
    for (std::size_t i = 0; i < data.y.size(); ++i) clean[i] = data.clean_target(i);

    auto loss = [&](std::span<const double> out, std::span<const std::size_t> rows, double sigma) {
        targets.resize(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) targets[k] = data.y[rows[k]];
        if (cfg.loss == LossKind::mse) return plain_mse(out, targets);
        return z_mse_loss(out, targets, sigma, cfg.mask_mode);
    };
    auto metric = [&](const Model& m) {
        if (const auto* affine = std::get_if<AffineModel>(&m)) return slope_error(*affine, data.true_weights);
        const auto pred = predict(m, data.x);
        double ss = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) ss += (pred[i] - clean[i]) * (pred[i] - clean[i]);
        return std::sqrt(ss / static_cast<double>(pred.size()));
    };
    return detail::run_sgd(data.x, cfg, loss, metric, observer);
}

/// Mini-batch SGD on a classification set with zbce or bce; model_metric is
/// balanced accuracy (logit > 0) against the true cluster labels.
inline TrainResult train(const SyntheticClassificationSet& data, const TrainConfig& cfg,
                         const StepObserver& observer = {}) {
    if (is_regression_loss(cfg.loss)) fail(errc::invalid_input, "train: regression loss on classification data");
    if (cfg.model == ModelKind::linear) fail(errc::invalid_input, "train: linear model on classification data");
    std::vector<int> labels;
    std::vector<int> truth(data.label.size());
    for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = data.true_label(i);

    auto loss = [&](std::span<const double> out, std::span<const std::size_t> rows, double sigma) {
        labels.resize(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) labels[k] = data.label[rows[k]];
        if (cfg.loss == LossKind::bce) return plain_bce_with_logits(out, labels);
        return z_bce_with_logits_loss(out, labels, sigma);
    };
    auto metric = [&](const Model& m) { return balanced_accuracy(predict(m, data.x), truth); };
    return detail::run_sgd(data.x, cfg, loss, metric, observer);
}

} // namespace zloss
