#pragma once

#include "ismp/control.hpp"
#include "ismp/drift.hpp"
#include "ismp/grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ismp {

struct SeedRecord {
    std::uint64_t root_seed = 0;
    std::uint64_t stream_salt = 0; // mixes the purpose of the draw into the stream id
};

// M Euler-Maruyama trajectories with their driving increments and applied
// control on a shared grid. Written by exactly one producer, read-only after.
class PathEnsemble {
public:
    PathEnsemble(TimeGrid grid, SigmaVector sigma, double x0, int num_paths, int control_dim);

    TimeGrid grid;
    SigmaVector sigma;
    double x0;
    int num_paths;
    int m; // control dimension
    bool driftless = false;
    bool control_per_path = false;
    SeedRecord seeds;

    std::vector<double> X;        // M x (N+1)
    std::vector<double> dB;       // M x N x d
    std::vector<double> control;  // N x m, or M x N x m when control_per_path

    double x(int p, int k) const { return X[static_cast<std::size_t>(p) * (grid.num_steps + 1) + k]; }
    double& x(int p, int k) { return X[static_cast<std::size_t>(p) * (grid.num_steps + 1) + k]; }
    std::span<const double> x_row(int p) const {
        return {X.data() + static_cast<std::size_t>(p) * (grid.num_steps + 1),
                static_cast<std::size_t>(grid.num_steps + 1)};
    }
    std::span<const double> db(int p, int k) const {
        const std::size_t d = sigma.sigma.size();
        return {dB.data() + (static_cast<std::size_t>(p) * grid.num_steps + k) * d, d};
    }
    std::span<double> db_mut(int p, int k) {
        const std::size_t d = sigma.sigma.size();
        return {dB.data() + (static_cast<std::size_t>(p) * grid.num_steps + k) * d, d};
    }
    // sigma . dB_k, the effective scalar noise increment of step k.
    double noise_increment(int p, int k) const {
        auto v = db(p, k);
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += sigma.sigma[i] * v[i];
        return s;
    }
    std::span<const double> applied(int p, int k) const {
        const std::size_t mm = static_cast<std::size_t>(m);
        if (control_per_path)
            return {control.data() + (static_cast<std::size_t>(p) * grid.num_steps + k) * mm, mm};
        return {control.data() + static_cast<std::size_t>(k) * mm, mm};
    }
};

PathEnsemble simulate_paths(const DriftSpec& drift, const SigmaVector& sigma,
                            const ControlSpec& control, const TimeGrid& grid, double x0,
                            int num_paths, std::uint64_t seed);

// Noise-source sanity report (empirical mean/variance of the increments).
struct NoiseSanity {
    double worst_mean_abs = 0.0;   // max over components of |mean(dB)|
    double mean_tol = 0.0;         // 5 sqrt(dt) / sqrt(M N)
    double worst_var_rel_err = 0.0;
    bool pass = false;
};
NoiseSanity noise_sanity_check(const PathEnsemble& e);

// CSV rows (path, k, t, x, control..., dB...).
void ensemble_to_csv(const PathEnsemble& e, std::ostream& os);

// Compact binary dump, little-endian: magic "ISMP1", u32 dims {M, N, d, m,
// control_per_path}, f64 {T, x0, sigma...}, then X, dB, control row-major.
void ensemble_write_binary(const PathEnsemble& e, const std::string& path);
PathEnsemble ensemble_read_binary(const std::string& path);

} // namespace ismp
