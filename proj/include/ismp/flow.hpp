#pragma once

#include "ismp/ensemble.hpp"
#include "ismp/localtime.hpp"

#include <string>
#include <vector>

namespace ismp {

enum class FlowEstimator { smooth_exp, finite_diff, localtime_rep };

const char* flow_estimator_name(FlowEstimator e);

// Per-path first-variation values Phi(t, s) over a window 0 <= t <= s <= T.
struct FlowEstimate {
    FlowEstimator estimator = FlowEstimator::smooth_exp;
    double window_t = 0.0, window_s = 0.0;
    int drift_level = 0; // 0 = exact b1, n = mollified level
    std::vector<double> phi;
    int positivity_violations = 0; // finite-diff only; exponentials are positive
};

// Cumulative log-flow C_k = log Phi(0, t_k) per path, so that
// Phi(t_k, t_j) = exp(C_j - C_k) for k <= j. Backbone of the adjoint sweep.
struct FlowCumlog {
    FlowEstimator estimator = FlowEstimator::smooth_exp;
    int drift_level = 0;
    int num_paths = 0;
    int num_steps = 0;
    std::vector<double> C; // M x (N+1)

    double at(int p, int k) const {
        return C[static_cast<std::size_t>(p) * (num_steps + 1) + k];
    }
};

// exp(sum [db1_dx + db2_dx](t_j, X_j, a_j) dt); requires a differentiable
// drift (analytic or mollified).
FlowCumlog flow_cumlog_smooth(const DriftSpec& drift, const PathEnsemble& e);
FlowEstimate flow_smooth_exp(const DriftSpec& drift, const PathEnsemble& e, double t, double s);

// Local-time representation: exp(-int int b1 L^X(du,dz) / |sigma|^2
// + int db2_dx du), with the space-time integral from the calibrated
// time-reversal estimator transported to the controlled paths.
FlowCumlog flow_cumlog_localtime(const DriftSpec& drift, const PathEnsemble& e,
                                 const SignScale& signs);
FlowEstimate flow_localtime_rep(const DriftSpec& drift, const PathEnsemble& e,
                                const SignScale& signs, double t, double s);

// Common-random-number bump estimate (X^{x0+h}(s) - X^{x0}(s))/h, re-running
// the tail of each path from the window start with the stored increments.
// With `richardson`, pairs h with h/2: 2 phi_{h/2} - phi_h.
FlowEstimate flow_finite_difference(const DriftSpec& drift, const ControlSpec& control,
                                    const PathEnsemble& base, double h, double t, double s,
                                    bool richardson = true);

struct FlowConvergenceTable {
    std::vector<int> levels;
    std::vector<double> mse; // E|Phi_n - Phi_ref|^2
    std::string reference;
};

// Mollified smooth-exp flows against the local-time reference, one row per
// level; controls may vary with the level (delta(alpha_n, alpha) -> 0).
FlowConvergenceTable flow_convergence_study(const DriftSpec& exact_drift,
                                            const std::vector<int>& levels,
                                            const std::vector<ControlSpec>& level_controls,
                                            const ControlSpec& ref_control,
                                            const SigmaVector& sigma, const TimeGrid& grid,
                                            double x0, int num_paths, std::uint64_t seed,
                                            const SignScale& signs, double t, double s);

} // namespace ismp
