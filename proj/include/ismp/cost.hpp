#pragma once

#include "ismp/drift.hpp"

#include <functional>
#include <span>

namespace ismp {

// Running profit f(t,x,a) and bequest g(x) with derivative callbacks and the
// linear-growth constant C: |f| + |g| <= C(1 + |x|).
struct CostSpec {
    ControlField f;
    ControlField df_dx;
    ControlGradField df_da;
    std::function<double(double x)> g;
    std::function<double(double x)> dg_dx;
    double growth_C = 0.0;
    bool g_concave = false; // declared; probed numerically by the verifier

    double eval_f(double t, double x, std::span<const double> a) const { return f ? f(t, x, a) : 0.0; }
    double eval_df_dx(double t, double x, std::span<const double> a) const {
        return df_dx ? df_dx(t, x, a) : 0.0;
    }
    void eval_df_da(double t, double x, std::span<const double> a, std::span<double> out) const {
        if (df_da) df_da(t, x, a, out);
        else for (auto& v : out) v = 0.0;
    }
    double eval_g(double x) const { return g ? g(x) : 0.0; }
    double eval_dg_dx(double x) const { return dg_dx ? dg_dx(x) : 0.0; }
};

struct DerivativeCheckReport {
    double worst_rel_err = 0.0;
    bool pass = false;
};

// Central-difference contract check of the declared derivative callbacks at
// randomly sampled points (rel tol 1e-4); applies to both cost and drift.
DerivativeCheckReport check_cost_derivatives(const CostSpec& cost, int m, std::uint64_t seed,
                                             int samples = 64);
DerivativeCheckReport check_drift_derivatives(const DriftSpec& drift, int m, std::uint64_t seed,
                                              int samples = 64);

// Samples the linear-growth bound |f| + |g| <= C(1+|x|).
bool check_growth_bound(const CostSpec& cost, int m, std::uint64_t seed, int samples = 64);

} // namespace ismp
