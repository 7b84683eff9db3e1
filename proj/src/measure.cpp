#include "ismp/measure.hpp"

#include <cmath>
#include <stdexcept>

namespace ismp {

std::vector<double> doleans_exponential(const QProcess& q, const PathEnsemble& e, int up_to) {
    if (up_to < 0 || up_to > e.grid.num_steps)
        throw std::invalid_argument("doleans_exponential: up_to out of range");
    const int d = e.sigma.dim();
    const double dt = e.grid.dt;
    std::vector<double> out(e.num_paths);
#pragma omp parallel for schedule(static)
    for (int p = 0; p < e.num_paths; ++p) {
        std::vector<double> qv(d);
        double log_e = 0.0;
        for (int k = 0; k < up_to; ++k) {
            q(k, e.grid.t(k), e.x(p, k), qv);
            auto db = e.db(p, k);
            double dot = 0.0, qsq = 0.0;
            for (int i = 0; i < d; ++i) {
                dot += qv[i] * db[i];
                qsq += qv[i] * qv[i];
            }
            log_e += dot - 0.5 * qsq * dt;
        }
        if (!std::isfinite(log_e))
            throw std::runtime_error("doleans_exponential: non-finite exponent");
        out[p] = std::exp(log_e);
    }
    return out;
}

std::vector<double> girsanov_weights(const DriftSpec& drift, const ControlSpec& control,
                                     const PathEnsemble& driftless) {
    if (!driftless.driftless)
        throw std::invalid_argument("girsanov_weights: ensemble must be simulated with b == 0");
    const int d = driftless.sigma.dim();
    const double inv_nsq = 1.0 / driftless.sigma.norm_sq;
    const int N = driftless.grid.num_steps;
    const double dt = driftless.grid.dt;

    std::vector<double> out(driftless.num_paths);
#pragma omp parallel for schedule(static)
    for (int p = 0; p < driftless.num_paths; ++p) {
        std::vector<double> a(control.m);
        double log_e = 0.0;
        for (int k = 0; k < N; ++k) {
            const double t = driftless.grid.t(k);
            const double x = driftless.x(p, k);
            control.value(k, t, x, a);
            const double b = drift.eval(t, x, a);
            auto db = driftless.db(p, k);
            double dot = 0.0;
            for (int i = 0; i < d; ++i) dot += driftless.sigma.sigma[i] * db[i];
            const double q_scale = b * inv_nsq; // q = b sigma / |sigma|^2
            log_e += q_scale * dot - 0.5 * q_scale * q_scale * driftless.sigma.norm_sq * dt;
        }
        out[p] = std::exp(log_e);
    }
    return out;
}

} // namespace ismp
