#pragma once

// Test-side oracles, kept independent of the library's simulation and
// measure-change code paths. The streaming Girsanov oracle integrates
// driftless paths one at a time on a fine grid and reweights the terminal
// statistic, never materializing an ensemble.

#include "ismp/rng.hpp"
#include "ismp/stats.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace ismp::test_oracles {

struct StreamingOracleResult {
    MeanSE weighted_xT; // E[X(T)] under the drifted law
    MeanSE weight;      // E[dQ/dP], should be one
};

inline StreamingOracleResult girsanov_fine_grid_oracle(
    const std::function<double(double t, double x, double a)>& b, double alpha_const,
    double sigma, double x0, double T, int num_steps, int num_paths, std::uint64_t seed) {
    const double dt = T / num_steps;
    const double sqrt_dt = std::sqrt(dt);
    const double inv_var = 1.0 / (sigma * sigma);
    std::vector<double> wx(num_paths), w(num_paths);
#pragma omp parallel for schedule(static)
    for (int p = 0; p < num_paths; ++p) {
        CounterRng rng(seed, static_cast<std::uint64_t>(p));
        double x = x0, log_w = 0.0;
        for (int k = 0; k < num_steps; ++k) {
            const double db = sqrt_dt * rng.normal();
            const double drift = b(dt * k, x, alpha_const);
            const double q = drift * inv_var; // q sigma dB with q = b sigma/|sigma|^2
            log_w += q * sigma * db - 0.5 * q * q * sigma * sigma * dt;
            x += sigma * db;
        }
        w[p] = std::exp(log_w);
        wx[p] = w[p] * x;
    }
    return {mean_se(wx), mean_se(w)};
}

} // namespace ismp::test_oracles
