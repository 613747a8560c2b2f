#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "zloss/matrix.hpp"
#include "zloss/rng.hpp"

namespace zloss {

/// out = w.x + b. Serves as the linear regressor and, read as a logit, the
/// logistic classifier. Parameter layout: [w_0 .. w_{d-1}, b].
class AffineModel {
public:
    explicit AffineModel(std::size_t input_dim) : dim_(input_dim), params_(input_dim + 1, 0.0) {}

    std::size_t input_dim() const noexcept { return dim_; }
    std::span<double> parameters() noexcept { return params_; }
    std::span<const double> parameters() const noexcept { return params_; }

    std::span<const double> weights() const noexcept { return {params_.data(), dim_}; }
    double bias() const noexcept { return params_[dim_]; }

    double forward_row(std::span<const double> x) const noexcept {
        double v = params_[dim_];
        for (std::size_t j = 0; j < dim_; ++j) v += params_[j] * x[j];
        return v;
    }

    std::vector<double> forward(const Matrix& x, std::span<const std::size_t> rows) const {
        std::vector<double> out(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) out[k] = forward_row(x.row(rows[k]));
        return out;
    }

    /// Parameter gradient given d(loss)/d(output) for each row.
    std::vector<double> backward(const Matrix& x, std::span<const std::size_t> rows,
                                 std::span<const double> dout) const {
        std::vector<double> g(params_.size(), 0.0);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (dout[k] == 0.0) continue;
            const auto r = x.row(rows[k]);
            for (std::size_t j = 0; j < dim_; ++j) g[j] += dout[k] * r[j];
            g[dim_] += dout[k];
        }
        return g;
    }

private:
    std::size_t dim_;
    std::vector<double> params_;
};

/// One hidden tanh layer, scalar linear output.
/// Parameter layout: [W1 (width x d, row-major), b1 (width), w2 (width), b2].
class MlpModel {
public:
    MlpModel(std::size_t input_dim, std::size_t width, std::uint64_t seed)
        : dim_(input_dim), width_(width), params_(width * input_dim + 2 * width + 1, 0.0) {
        Rng rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        const double s1 = 1.0 / std::sqrt(static_cast<double>(dim_));
        const double s2 = 1.0 / std::sqrt(static_cast<double>(width_));
        for (std::size_t i = 0; i < width_ * dim_; ++i) params_[i] = normal(rng) * s1;
        for (std::size_t h = 0; h < width_; ++h) params_[w2_offset() + h] = normal(rng) * s2;
    }

    std::size_t input_dim() const noexcept { return dim_; }
    std::size_t width() const noexcept { return width_; }
    std::span<double> parameters() noexcept { return params_; }
    std::span<const double> parameters() const noexcept { return params_; }

    double forward_row(std::span<const double> x) const {
        double out = params_[b2_offset()];
        for (std::size_t h = 0; h < width_; ++h) out += params_[w2_offset() + h] * hidden(x, h);
        return out;
    }

    std::vector<double> forward(const Matrix& x, std::span<const std::size_t> rows) const {
        std::vector<double> out(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) out[k] = forward_row(x.row(rows[k]));
        return out;
    }

    std::vector<double> backward(const Matrix& x, std::span<const std::size_t> rows,
                                 std::span<const double> dout) const {
        std::vector<double> g(params_.size(), 0.0);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (dout[k] == 0.0) continue;
            const auto r = x.row(rows[k]);
            g[b2_offset()] += dout[k];
            for (std::size_t h = 0; h < width_; ++h) {
                const double a = hidden(r, h);
                const double w2 = params_[w2_offset() + h];
                g[w2_offset() + h] += dout[k] * a;
                const double dpre = dout[k] * w2 * (1.0 - a * a);
                for (std::size_t j = 0; j < dim_; ++j) g[h * dim_ + j] += dpre * r[j];
                g[b1_offset() + h] += dpre;
            }
        }
        return g;
    }

private:
    std::size_t b1_offset() const noexcept { return width_ * dim_; }
    std::size_t w2_offset() const noexcept { return width_ * dim_ + width_; }
    std::size_t b2_offset() const noexcept { return width_ * dim_ + 2 * width_; }

    double hidden(std::span<const double> x, std::size_t h) const {
        double pre = params_[b1_offset() + h];
        for (std::size_t j = 0; j < dim_; ++j) pre += params_[h * dim_ + j] * x[j];
        return std::tanh(pre);
    }

    std::size_t dim_;
    std::size_t width_;
    std::vector<double> params_;
};

using Model = std::variant<AffineModel, MlpModel>;

inline std::vector<double> predict(const Model& model, const Matrix& x) {
    std::vector<std::size_t> rows(x.rows);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return std::visit([&](const auto& m) { return m.forward(x, rows); }, model);
}

} // namespace zloss
