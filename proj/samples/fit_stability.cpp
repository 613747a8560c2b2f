// How stable are per-batch distribution fits? For each batch size, fit a
// Gaussian and a skew-normal to one class's sigmoid outputs in many batches
// and report the spread of the fitted parameters across batches.

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "zloss/stats.hpp"
#include "zloss/rng.hpp"

int main() {
    using namespace zloss;
    Rng rng(3);
    std::normal_distribution<double> logit(-2.0, 1.0);
    auto spread = [](const std::vector<double>& v) { return mean_std(v, 1).std; };

    std::printf("batch  gauss_mu_sd  gauss_sigma_sd  skew_loc_sd  skew_scale_sd  skew_shape_sd\n");
    for (std::size_t bs : {16u, 32u, 64u, 128u, 256u, 512u}) {
        std::vector<double> mu, sigma, loc, scale, shape;
        for (int b = 0; b < 200; ++b) {
            std::vector<double> p(bs);
            for (double& v : p) v = sigmoid(logit(rng));
            const auto g = fit_gaussian(p);
            mu.push_back(g.mu);
            sigma.push_back(g.sigma);
            try {
                const auto s = fit_skewnorm(p);
                loc.push_back(s.loc);
                scale.push_back(s.scale);
                shape.push_back(s.shape);
            } catch (const error&) {
            }
        }
        std::printf("%5zu  %11.4f  %14.4f  %11.4f  %13.4f  %13.3f\n", bs, spread(mu), spread(sigma), spread(loc),
                    spread(scale), spread(shape));
    }
}
