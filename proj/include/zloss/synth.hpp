#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "zloss/error.hpp"
#include "zloss/matrix.hpp"
#include "zloss/rng.hpp"

namespace zloss {

struct SyntheticRegressionSet {
    Matrix x;
    std::vector<double> y;
    std::vector<bool> outlier_flag;
    std::vector<double> true_weights;
    double true_bias = 0.0;
    double noise_std = 1.0;

    double clean_target(std::size_t i) const {
        double v = true_bias;
        const auto r = x.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) v += true_weights[j] * r[j];
        return v;
    }
};

struct SyntheticClassificationSet {
    Matrix x;
    std::vector<int> label;          // observed (possibly wrong) label
    std::vector<bool> outlier_flag;  // true when the label disagrees with the source cluster
    double cluster_sep = 1.0;

    int true_label(std::size_t i) const { return outlier_flag[i] ? 1 - label[i] : label[i]; }
};

/// Linear data y = w.x + b + N(0, noise_std^2) with unit-normal features.
/// round(n * outlier_frac) samples instead get an offset of
/// s * (margin + |u|) * noise_std, s a random sign and u ~ N(0, 1).
/// Weights have magnitude in [0.5, 1.5] / sqrt(d) with random signs; the bias
/// is uniform in [-1, 1].
inline SyntheticRegressionSet gen_regression(std::size_t n, std::size_t d, double outlier_frac, double margin,
                                             double noise_std, std::uint64_t seed) {
    if (n < 10) fail(errc::invalid_input, "gen_regression: n must be >= 10");
    if (d < 1) fail(errc::invalid_input, "gen_regression: d must be >= 1");
    if (!(outlier_frac >= 0.0 && outlier_frac < 0.5))
        fail(errc::invalid_input, "gen_regression: outlier_frac must lie in [0, 0.5)");
    if (!(margin >= 3.0)) fail(errc::invalid_input, "gen_regression: margin must be >= 3");
    if (!(noise_std > 0.0)) fail(errc::invalid_input, "gen_regression: noise_std must be positive");

    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> magnitude(0.5, 1.5);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    SyntheticRegressionSet out;
    out.noise_std = noise_std;
    out.true_weights.resize(d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (double& w : out.true_weights) w = (coin(rng) ? 1.0 : -1.0) * magnitude(rng) * scale;
    out.true_bias = unit(rng);

    out.x = Matrix(n, d);
    for (double& v : out.x.data) v = normal(rng);

    const auto n_out = static_cast<std::size_t>(std::lround(static_cast<double>(n) * outlier_frac));
    out.outlier_flag.assign(n, false);
    const auto order = shuffled_indices(n, rng);
    for (std::size_t k = 0; k < n_out; ++k) out.outlier_flag[order[k]] = true;

    out.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double noise;
        if (out.outlier_flag[i]) {
            const double sign = coin(rng) ? 1.0 : -1.0;
            noise = sign * (margin + std::abs(normal(rng))) * noise_std;
        } else {
            noise = normal(rng) * noise_std;
        }
        out.y[i] = out.clean_target(i) + noise;
    }
    return out;
}

/// Two balanced Gaussian clusters centred at -+cluster_sep/2 on the first
/// axis (unit variance on every axis). Outliers are points drawn from one
/// cluster but labelled as the other, half of them in each class.
inline SyntheticClassificationSet gen_classification(std::size_t n, std::size_t d, double outlier_frac,
                                                     double cluster_sep, std::uint64_t seed) {
    if (n < 20 || n % 2 != 0) fail(errc::invalid_input, "gen_classification: n must be even and >= 20");
    if (d < 1) fail(errc::invalid_input, "gen_classification: d must be >= 1");
    if (!(outlier_frac >= 0.0 && outlier_frac < 0.5))
        fail(errc::invalid_input, "gen_classification: outlier_frac must lie in [0, 0.5)");
    if (!(cluster_sep > 0.0)) fail(errc::invalid_input, "gen_classification: cluster_sep must be positive");

    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    const std::size_t half = n / 2;
    const auto n_out = static_cast<std::size_t>(std::lround(static_cast<double>(n) * outlier_frac));
    const std::size_t out1 = n_out / 2;
    const std::size_t out0 = n_out - out1;

    // Slots 0..half-1 are class 0, the rest class 1; the first outK of each
    // class are the mislabelled ones. A shuffle then assigns slots to rows.
    const auto slot_of_row = shuffled_indices(n, rng);

    SyntheticClassificationSet out;
    out.cluster_sep = cluster_sep;
    out.x = Matrix(n, d);
    out.label.resize(n);
    out.outlier_flag.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t slot = slot_of_row[i];
        const int cls = slot < half ? 0 : 1;
        const std::size_t rank = cls == 0 ? slot : slot - half;
        const bool flagged = rank < (cls == 0 ? out0 : out1);
        const int cluster = flagged ? 1 - cls : cls;
        out.label[i] = cls;
        out.outlier_flag[i] = flagged;
        const double centre = (cluster == 1 ? 0.5 : -0.5) * cluster_sep;
        auto r = out.x.row(i);
        r[0] = centre + normal(rng);
        for (std::size_t j = 1; j < d; ++j) r[j] = normal(rng);
    }
    return out;
}

} // namespace zloss
