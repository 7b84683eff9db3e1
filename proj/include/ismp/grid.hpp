#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ismp {

// Uniform time grid t_k = k * dt on [0, T].
struct TimeGrid {
    double horizon_T;
    int num_steps;
    double dt;

    TimeGrid(double T, int N) : horizon_T(T), num_steps(N), dt(T / N) {
        if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: T must be > 0");
        if (N < 2) throw std::invalid_argument("TimeGrid: N must be >= 2");
    }

    double t(int k) const { return dt * k; }

    // Largest k with t_k <= time (clamped to [0, N]).
    int index_of(double time) const {
        int k = static_cast<int>(std::floor(time / dt + 1e-9));
        if (k < 0) k = 0;
        if (k > num_steps) k = num_steps;
        return k;
    }
};

// Constant diffusion vector; |sigma|^2 > 0 is the nondegeneracy assumption.
struct SigmaVector {
    std::vector<double> sigma;
    double norm_sq;
    double norm;

    explicit SigmaVector(std::vector<double> s) : sigma(std::move(s)) {
        norm_sq = 0.0;
        for (double v : sigma) norm_sq += v * v;
        if (!(norm_sq > 0.0))
            throw std::invalid_argument("SigmaVector: |sigma|^2 must be > 0");
        norm = std::sqrt(norm_sq);
    }

    int dim() const { return static_cast<int>(sigma.size()); }
};

} // namespace ismp
