#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace zloss {

struct NelderMeadOptions {
    int max_iterations = 500;
    double xtol = 1e-8;  // max vertex distance from the best vertex, per coordinate
    double ftol = 1e-12; // relative spread of objective values across the simplex
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimisation with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2). The initial
/// simplex is `start` plus one vertex per coordinate offset by `step[i]`.
/// Converged means both the simplex diameter and the objective spread are
/// below tolerance.
template <class F>
NelderMeadResult nelder_mead(F&& objective, std::span<const double> start,
                             std::span<const double> step,
                             const NelderMeadOptions& opts = {}) {
    const std::size_t dim = start.size();
    std::vector<std::vector<double>> simplex(dim + 1, std::vector<double>(start.begin(), start.end()));
    for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += step[i];

    std::vector<double> values(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) values[i] = objective(std::span<const double>(simplex[i]));

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), trial(dim), trial2(dim);

    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
        std::vector<std::vector<double>> s2(dim + 1);
        std::vector<double> v2(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) {
            s2[i] = std::move(simplex[order[i]]);
            v2[i] = values[order[i]];
        }
        simplex = std::move(s2);
        values = std::move(v2);
    };

    auto point_along = [&](double coef, std::vector<double>& out) {
        for (std::size_t j = 0; j < dim; ++j)
            out[j] = centroid[j] + coef * (simplex[dim][j] - centroid[j]);
    };

    NelderMeadResult result;
    int iter = 0;
    sort_simplex();
    for (; iter < opts.max_iterations; ++iter) {
        double xspread = 0.0;
        for (std::size_t i = 1; i <= dim; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                xspread = std::max(xspread, std::abs(simplex[i][j] - simplex[0][j]));
        const double fspread = values[dim] - values[0];
        if (xspread <= opts.xtol && fspread <= opts.ftol * (1.0 + std::abs(values[0]))) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
        for (double& c : centroid) c /= static_cast<double>(dim);

        point_along(-1.0, trial);
        const double f_reflect = objective(std::span<const double>(trial));
        if (f_reflect < values[0]) {
            point_along(-2.0, trial2);
            const double f_expand = objective(std::span<const double>(trial2));
            if (f_expand < f_reflect) {
                simplex[dim] = trial2;
                values[dim] = f_expand;
            } else {
                simplex[dim] = trial;
                values[dim] = f_reflect;
            }
        } else if (f_reflect < values[dim - 1]) {
            simplex[dim] = trial;
            values[dim] = f_reflect;
        } else {
            const bool outside = f_reflect < values[dim];
            point_along(outside ? -0.5 : 0.5, trial2);
            const double f_contract = objective(std::span<const double>(trial2));
            if (f_contract < std::min(f_reflect, values[dim])) {
                simplex[dim] = trial2;
                values[dim] = f_contract;
            } else {
                for (std::size_t i = 1; i <= dim; ++i) {
                    for (std::size_t j = 0; j < dim; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    values[i] = objective(std::span<const double>(simplex[i]));
                }
            }
        }
        sort_simplex();
    }
    result.x = simplex[0];
    result.value = values[0];
    result.iterations = iter;
    return result;
}

} // namespace zloss
