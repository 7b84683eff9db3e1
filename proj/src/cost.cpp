#include "ismp/cost.hpp"

#include "ismp/rng.hpp"

#include <cmath>
#include <vector>

namespace ismp {

namespace {

double rel_err(double got, double want) {
    const double scale = std::max({std::abs(got), std::abs(want), 1e-6});
    return std::abs(got - want) / scale;
}

} // namespace

DerivativeCheckReport check_cost_derivatives(const CostSpec& cost, int m, std::uint64_t seed,
                                             int samples) {
    CounterRng rng(seed, 0xC057);
    DerivativeCheckReport r;
    const double h = 1e-5;
    std::vector<double> a(m), ap(m), am(m), grad(m);
    for (int it = 0; it < samples; ++it) {
        const double t = rng.uniform();
        const double x = 4.0 * rng.normal();
        for (int i = 0; i < m; ++i) a[i] = rng.normal();

        if (cost.f && cost.df_dx) {
            const double fd = (cost.f(t, x + h, a) - cost.f(t, x - h, a)) / (2 * h);
            r.worst_rel_err = std::max(r.worst_rel_err, rel_err(cost.df_dx(t, x, a), fd));
        }
        if (cost.f && cost.df_da) {
            cost.eval_df_da(t, x, a, grad);
            for (int i = 0; i < m; ++i) {
                ap = a;
                am = a;
                ap[i] += h;
                am[i] -= h;
                const double fd = (cost.f(t, x, ap) - cost.f(t, x, am)) / (2 * h);
                r.worst_rel_err = std::max(r.worst_rel_err, rel_err(grad[i], fd));
            }
        }
        if (cost.g && cost.dg_dx) {
            const double fd = (cost.g(x + h) - cost.g(x - h)) / (2 * h);
            r.worst_rel_err = std::max(r.worst_rel_err, rel_err(cost.dg_dx(x), fd));
        }
    }
    r.pass = r.worst_rel_err <= 1e-4;
    return r;
}

DerivativeCheckReport check_drift_derivatives(const DriftSpec& drift, int m, std::uint64_t seed,
                                              int samples) {
    CounterRng rng(seed, 0xD21F);
    DerivativeCheckReport r;
    const double h = 1e-5;
    std::vector<double> a(m), ap(m), am(m), grad(m);
    for (int it = 0; it < samples; ++it) {
        const double t = rng.uniform();
        const double x = 4.0 * rng.normal();
        for (int i = 0; i < m; ++i) a[i] = rng.normal();

        if (drift.b2 && drift.db2_dx) {
            const double fd = (drift.b2(t, x + h, a) - drift.b2(t, x - h, a)) / (2 * h);
            r.worst_rel_err = std::max(r.worst_rel_err, rel_err(drift.db2_dx(t, x, a), fd));
        }
        if (drift.b2 && drift.db2_da) {
            drift.eval_db2_da(t, x, a, grad);
            for (int i = 0; i < m; ++i) {
                ap = a;
                am = a;
                ap[i] += h;
                am[i] -= h;
                const double fd = (drift.b2(t, x, ap) - drift.b2(t, x, am)) / (2 * h);
                r.worst_rel_err = std::max(r.worst_rel_err, rel_err(grad[i], fd));
            }
        }
    }
    r.pass = r.worst_rel_err <= 1e-4;
    return r;
}

bool check_growth_bound(const CostSpec& cost, int m, std::uint64_t seed, int samples) {
    CounterRng rng(seed, 0x6407);
    std::vector<double> a(m);
    for (int it = 0; it < samples; ++it) {
        const double t = rng.uniform();
        const double x = 6.0 * rng.normal();
        for (int i = 0; i < m; ++i) a[i] = rng.normal();
        const double lhs = std::abs(cost.eval_f(t, x, a)) + std::abs(cost.eval_g(x));
        if (lhs > cost.growth_C * (1.0 + std::abs(x)) + 1e-9) return false;
    }
    return true;
}

} // namespace ismp
