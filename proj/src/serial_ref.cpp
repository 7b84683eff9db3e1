#include "ismp/serial_ref.hpp"

#include "ismp/rng.hpp"

#include <cmath>

namespace ismp::ref {

PathEnsemble simulate_paths_serial(const DriftSpec& drift, const SigmaVector& sigma,
                                   const ControlSpec& control, const TimeGrid& grid, double x0,
                                   int num_paths, std::uint64_t seed) {
    control.validate();
    PathEnsemble e(grid, sigma, x0, num_paths, control.m);
    e.driftless = !drift.b1 && !drift.b2;
    e.seeds = {seed, 0};
    e.control_per_path = control.mode == ControlMode::feedback;
    const int N = grid.num_steps;
    const int d = sigma.dim();
    const double sqrt_dt = std::sqrt(grid.dt);

    if (e.control_per_path)
        e.control.assign(static_cast<std::size_t>(num_paths) * N * control.m, 0.0);
    else
        e.control = control.lattice;

    std::vector<double> a(control.m);
    for (int p = 0; p < num_paths; ++p) {
        CounterRng rng(seed, static_cast<std::uint64_t>(p));
        double xk = x0;
        e.x(p, 0) = xk;
        for (int k = 0; k < N; ++k) {
            const double t = grid.t(k);
            control.value(k, t, xk, a);
            if (e.control_per_path) {
                double* dst = e.control.data() + (static_cast<std::size_t>(p) * N + k) * control.m;
                for (int j = 0; j < control.m; ++j) dst[j] = a[j];
            }
            auto db = e.db_mut(p, k);
            double noise = 0.0;
            for (int i = 0; i < d; ++i) {
                db[i] = sqrt_dt * rng.normal();
                noise += sigma.sigma[i] * db[i];
            }
            const double b = e.driftless ? 0.0 : drift.eval(t, xk, a);
            xk += b * grid.dt + noise;
            e.x(p, k + 1) = xk;
        }
    }
    return e;
}

std::vector<double> tanaka_curve_serial(const PathEnsemble& e, double a) {
    const int N = e.grid.num_steps;
    std::vector<double> L(static_cast<std::size_t>(e.num_paths) * (N + 1), 0.0);
    for (int p = 0; p < e.num_paths; ++p) {
        double acc = 0.0;
        const double base = std::abs(e.x(p, 0) - a);
        L[static_cast<std::size_t>(p) * (N + 1)] = 0.0;
        for (int k = 0; k < N; ++k) {
            const double xj = e.x(p, k);
            const double sgn = xj - a > 0.0 ? 1.0 : -1.0;
            acc += sgn * (e.x(p, k + 1) - xj);
            double lk = std::abs(e.x(p, k + 1) - a) - base - acc;
            if (lk < 0.0) lk = 0.0;
            L[static_cast<std::size_t>(p) * (N + 1) + k + 1] = lk;
        }
    }
    return L;
}

} // namespace ismp::ref
