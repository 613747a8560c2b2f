#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <string_view>
#include <thread>
#include <vector>

#include "zloss/detect.hpp"
#include "zloss/error.hpp"
#include "zloss/model.hpp"
#include "zloss/synth.hpp"

namespace zloss {

enum class Task { regression, classification };

constexpr std::string_view to_string(Task t) noexcept {
    return t == Task::regression ? "regression" : "classification";
}

constexpr std::string_view to_string(DetectionMethod m) noexcept {
    return m == DetectionMethod::batch ? "batch" : "full";
}

struct SweepConfig {
    Task task = Task::regression;
    std::size_t n = 2000;
    std::size_t d = 1;
    double outlier_frac = 0.1;
    double margin = 6.0;      // regression offset margin, or cluster separation for classification
    double noise_std = 1.0;   // regression only
    double sigma = 1.5;
    std::vector<std::size_t> batch_sizes{16, 32, 64, 96, 128, 256, 512};
    int trials = 10;
    std::uint64_t seed = 42;
    unsigned threads = 0;     // 0: hardware concurrency

    void validate() const {
        if (batch_sizes.empty()) fail(errc::invalid_input, "sweep: batch size list is empty");
        for (auto bs : batch_sizes)
            if (bs < 2) fail(errc::invalid_input, "sweep: batch sizes must be >= 2");
        if (trials < 1) fail(errc::invalid_input, "sweep: trials must be >= 1");
        if (!(sigma > 0.0)) fail(errc::invalid_input, "sweep: sigma must be positive");
    }
};

struct SweepRow {
    Task task = Task::regression;
    int trial = 0;
    std::size_t n = 0;
    double outlier_frac = 0.0;
    DetectionReport report;

    bool operator==(const SweepRow&) const = default;
};

inline std::uint64_t trial_seed(std::uint64_t base, int trial) noexcept {
    return derive_seed(base, static_cast<std::uint64_t>(trial));
}

/// Detection rows of one trial: one batch row per batch size, then the full row.
inline std::vector<SweepRow> run_sweep_trial(const SweepConfig& cfg, int trial) {
    const std::uint64_t seed = trial_seed(cfg.seed, trial);
    std::vector<SweepRow> rows;
    auto emit = [&](const DetectionReport& r) { rows.push_back({cfg.task, trial, cfg.n, cfg.outlier_frac, r}); };
    auto run = [&](const auto& data) {
        for (auto bs : cfg.batch_sizes) emit(detect_batchwise(data, bs, cfg.sigma, derive_seed(seed, bs)));
        emit(detect_full(data, cfg.sigma));
    };
    if (cfg.task == Task::regression) {
        run(gen_regression(cfg.n, cfg.d, cfg.outlier_frac, cfg.margin, cfg.noise_std, seed));
    } else {
        run(gen_classification(cfg.n, cfg.d, cfg.outlier_frac, cfg.margin, seed));
    }
    return rows;
}

/// Trials run on worker threads, each with its own derived seed; rows come
/// back ordered by trial regardless of scheduling.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const auto trials = static_cast<std::size_t>(cfg.trials);
    std::vector<std::vector<SweepRow>> per_trial(trials);
    std::vector<std::exception_ptr> errors(trials);
    unsigned workers = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, trials));

    auto work = [&](unsigned w) {
        for (std::size_t t = w; t < trials; t += workers) {
            try {
                per_trial[t] = run_sweep_trial(cfg, static_cast<int>(t));
            } catch (...) {
                errors[t] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<SweepRow> rows;
    for (auto& part : per_trial) rows.insert(rows.end(), part.begin(), part.end());
    return rows;
}

// Model-based detection: masks come from a trained model's outputs instead
// of the raw data. Regression scores the squared residuals, classification
// the per-class logits.

inline DetectionReport detect_with_model(const Model& model, const SyntheticRegressionSet& data, double threshold) {
    const auto pred = predict(model, data.x);
    std::vector<double> sq(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) sq[i] = (pred[i] - data.y[i]) * (pred[i] - data.y[i]);
    return detect_full(sq, std::nullopt, data.outlier_flag, threshold);
}

inline DetectionReport detect_with_model(const Model& model, const SyntheticClassificationSet& data,
                                         double threshold) {
    const auto logits = predict(model, data.x);
    return detect_full(logits, std::span<const int>(data.label), data.outlier_flag, threshold);
}

} // namespace zloss
