#include "ismp/flow.hpp"

#include <cmath>
#include <stdexcept>

namespace ismp {

const char* flow_estimator_name(FlowEstimator e) {
    switch (e) {
        case FlowEstimator::smooth_exp: return "smooth-exp";
        case FlowEstimator::finite_diff: return "finite-diff";
        case FlowEstimator::localtime_rep: return "localtime-rep";
    }
    return "?";
}

namespace {

FlowEstimate window_from_cumlog(const FlowCumlog& c, const TimeGrid& grid, double t, double s,
                                FlowEstimator tag, int level) {
    const int kt = grid.index_of(t);
    const int ks = grid.index_of(s);
    if (kt > ks) throw std::invalid_argument("flow window requires t <= s");
    FlowEstimate out;
    out.estimator = tag;
    out.window_t = t;
    out.window_s = s;
    out.drift_level = level;
    out.phi.assign(c.num_paths, 1.0);
    for (int p = 0; p < c.num_paths; ++p) out.phi[p] = std::exp(c.at(p, ks) - c.at(p, kt));
    return out;
}

} // namespace

FlowCumlog flow_cumlog_smooth(const DriftSpec& drift, const PathEnsemble& e) {
    if (!drift.has_b1_derivative())
        throw std::invalid_argument(
            "flow_cumlog_smooth: drift has no x-derivative; mollify the irregular part first");
    const int N = e.grid.num_steps;
    FlowCumlog c;
    c.estimator = FlowEstimator::smooth_exp;
    c.drift_level = drift.mollify_level;
    c.num_paths = e.num_paths;
    c.num_steps = N;
    c.C.assign(static_cast<std::size_t>(e.num_paths) * (N + 1), 0.0);
    const double dt = e.grid.dt;
#pragma omp parallel for schedule(static)
    for (int p = 0; p < e.num_paths; ++p) {
        double* row = c.C.data() + static_cast<std::size_t>(p) * (N + 1);
        double acc = 0.0;
        for (int k = 0; k < N; ++k) {
            acc += drift.eval_db_dx(e.grid.t(k), e.x(p, k), e.applied(p, k)) * dt;
            row[k + 1] = acc;
        }
    }
    return c;
}

FlowEstimate flow_smooth_exp(const DriftSpec& drift, const PathEnsemble& e, double t, double s) {
    FlowCumlog c = flow_cumlog_smooth(drift, e);
    return window_from_cumlog(c, e.grid, t, s, FlowEstimator::smooth_exp, drift.mollify_level);
}

FlowCumlog flow_cumlog_localtime(const DriftSpec& drift, const PathEnsemble& e,
                                 const SignScale& signs) {
    if (!signs.calibrated)
        throw std::runtime_error(
            "flow_cumlog_localtime: run calibrate_reversal_signs before using the local-time "
            "representation");
    const int N = e.grid.num_steps;
    FlowCumlog c;
    c.estimator = FlowEstimator::localtime_rep;
    c.drift_level = drift.mollify_level;
    c.num_paths = e.num_paths;
    c.num_steps = N;
    c.C.assign(static_cast<std::size_t>(e.num_paths) * (N + 1), 0.0);
    const double dt = e.grid.dt;

    // Local-time part of the exponent; absent b1 reduces exactly to the
    // smooth formula. The representation carries a minus sign and the
    // 1/|sigma|^2 normalization of the quadratic variation.
    std::vector<double> lt;
    if (drift.b1) {
        Integrand f;
        f.f = drift.b1;
        f.df_dz = drift.db1_dx; // enables the variance correction when smooth
        lt = lt_reversal_cumulative(f, e, signs);
    }
    const double lt_scale = -1.0 / e.sigma.norm_sq;

#pragma omp parallel for schedule(static)
    for (int p = 0; p < e.num_paths; ++p) {
        double* row = c.C.data() + static_cast<std::size_t>(p) * (N + 1);
        const double* ltrow = drift.b1 ? lt.data() + static_cast<std::size_t>(p) * (N + 1)
                                       : nullptr;
        double acc = 0.0;
        for (int k = 0; k < N; ++k) {
            acc += drift.eval_db2_dx(e.grid.t(k), e.x(p, k), e.applied(p, k)) * dt;
            row[k + 1] = acc + (ltrow ? lt_scale * ltrow[k + 1] : 0.0);
        }
    }
    return c;
}

FlowEstimate flow_localtime_rep(const DriftSpec& drift, const PathEnsemble& e,
                                const SignScale& signs, double t, double s) {
    FlowCumlog c = flow_cumlog_localtime(drift, e, signs);
    return window_from_cumlog(c, e.grid, t, s, FlowEstimator::localtime_rep, drift.mollify_level);
}

namespace {

// Re-integrate one path from index kt with the stored increments, starting
// from a bumped state.
double reintegrate_bumped(const DriftSpec& drift, const ControlSpec& control,
                          const PathEnsemble& e, int p, int kt, int ks, double bump) {
    std::vector<double> a(control.m);
    double x = e.x(p, kt) + bump;
    for (int k = kt; k < ks; ++k) {
        const double t = e.grid.t(k);
        control.value(k, t, x, a);
        x += drift.eval(t, x, a) * e.grid.dt + e.noise_increment(p, k);
    }
    return x;
}

} // namespace

FlowEstimate flow_finite_difference(const DriftSpec& drift, const ControlSpec& control,
                                    const PathEnsemble& base, double h, double t, double s,
                                    bool richardson) {
    if (!(h > 0.0)) throw std::invalid_argument("flow_finite_difference: h must be > 0");
    if (h < 10.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(base.x0)))
        throw std::invalid_argument("flow_finite_difference: h below noise floor");
    const int kt = base.grid.index_of(t);
    const int ks = base.grid.index_of(s);
    if (kt > ks) throw std::invalid_argument("flow window requires t <= s");

    FlowEstimate out;
    out.estimator = FlowEstimator::finite_diff;
    out.window_t = t;
    out.window_s = s;
    out.drift_level = drift.mollify_level;
    out.phi.assign(base.num_paths, 1.0);
    int violations = 0;
#pragma omp parallel for schedule(static) reduction(+ : violations)
    for (int p = 0; p < base.num_paths; ++p) {
        const double xs = base.x(p, ks);
        const double xh = reintegrate_bumped(drift, control, base, p, kt, ks, h);
        double phi = (xh - xs) / h;
        if (richardson) {
            const double xh2 = reintegrate_bumped(drift, control, base, p, kt, ks, 0.5 * h);
            phi = 2.0 * (xh2 - xs) / (0.5 * h) - phi;
        }
        out.phi[p] = phi;
        if (phi <= 0.0) ++violations;
    }
    out.positivity_violations = violations;
    return out;
}

FlowConvergenceTable flow_convergence_study(const DriftSpec& exact_drift,
                                            const std::vector<int>& levels,
                                            const std::vector<ControlSpec>& level_controls,
                                            const ControlSpec& ref_control,
                                            const SigmaVector& sigma, const TimeGrid& grid,
                                            double x0, int num_paths, std::uint64_t seed,
                                            const SignScale& signs, double t, double s) {
    if (levels.size() != level_controls.size())
        throw std::invalid_argument("flow_convergence_study: one control per level required");
    for (std::size_t i = 1; i < levels.size(); ++i)
        if (levels[i] <= levels[i - 1])
            throw std::invalid_argument("flow_convergence_study: levels must increase");

    PathEnsemble ref = simulate_paths(exact_drift, sigma, ref_control, grid, x0, num_paths, seed);
    FlowEstimate phi_ref = flow_localtime_rep(exact_drift, ref, signs, t, s);

    FlowConvergenceTable table;
    table.reference = "localtime-rep";
    for (std::size_t i = 0; i < levels.size(); ++i) {
        DriftSpec dn = exact_drift;
        if (exact_drift.b1) {
            MollifiedDrift mn = mollify_drift(exact_drift.b1, exact_drift.bound_b1, levels[i]);
            dn = mn.apply(exact_drift);
        }
        PathEnsemble en =
            simulate_paths(dn, sigma, level_controls[i], grid, x0, num_paths, seed);
        FlowEstimate phin = flow_smooth_exp(dn, en, t, s);
        double acc = 0.0;
        for (int p = 0; p < num_paths; ++p) {
            const double d = phin.phi[p] - phi_ref.phi[p];
            acc += d * d;
        }
        table.levels.push_back(levels[i]);
        table.mse.push_back(acc / num_paths);
    }
    return table;
}

} // namespace ismp
