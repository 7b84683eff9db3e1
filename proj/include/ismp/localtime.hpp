#pragma once

#include "ismp/ensemble.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ismp {

// Local time level curve L(t_k, a) per path, from the Tanaka-Meyer formula.
struct LocalTimeCurve {
    double level = 0.0;
    int num_paths = 0;
    int num_steps = 0;
    std::vector<double> L; // M x (N+1), nonnegative, nondecreasing in k

    double at(int p, int k) const {
        return L[static_cast<std::size_t>(p) * (num_steps + 1) + k];
    }
};

LocalTimeCurve tanaka_local_time(const PathEnsemble& e, double a);

// Space-time integrand f(t, z), optionally with its dz-derivative.
struct Integrand {
    std::function<double(double t, double z)> f;
    std::function<double(double t, double z)> df_dz; // may be null
    std::string name;
};

// Sign/scale pair of the time-reversal estimator, fixed once by calibration
// against the smooth-identity estimator (the smooth case is unambiguous
// ground truth for the paper's sign conventions).
struct SignScale {
    int sigma_sign = 1;  // multiplies the whole decomposition
    int kappa_sign = 1;  // multiplies the singular ds-term
    bool calibrated = false;
    double mismatch = -1.0;        // pooled relative RMS of the winning pair
    double runner_up_ratio = 0.0;  // second-best mismatch / best mismatch
};

struct LocalTimeIntegral {
    enum class Tag { smooth_identity, time_reversal };
    Tag tag = Tag::smooth_identity;
    double window_s = 0.0, window_t = 0.0;
    SignScale sign_scale;
    std::vector<double> value; // per path
};

// int_s^t int f(u,z) L^X(du,dz) = -|sigma|^2 sum_j df_dz(t_j, X_j) dt for
// continuously differentiable f.
LocalTimeIntegral lt_integral_smooth(const Integrand& f, const PathEnsemble& e, double s,
                                     double t);

// Forward/time-reversed decomposition of the same integral for merely
// measurable f; requires a driftless ensemble (X = x0 + sigma.B) and a
// calibrated sign pair.
LocalTimeIntegral lt_integral_reversal(const Integrand& f, const PathEnsemble& e, double s,
                                       double t, const SignScale& signs);

// As above but without the driftless check: valid on controlled ensembles
// through the Girsanov equivalence (the decomposition is a pathwise identity
// holding almost surely under either measure).
LocalTimeIntegral lt_integral_reversal_transported(const Integrand& f, const PathEnsemble& e,
                                                   double s, double t, const SignScale& signs);

// Cumulative values V(t_k) = int_0^{t_k} int f L(du,dz) per path (reversal
// estimator); M x (N+1) row-major. Used by the flow representation.
std::vector<double> lt_reversal_cumulative(const Integrand& f, const PathEnsemble& e,
                                           const SignScale& signs);

// Picks the (sigma_sign, kappa_sign) pair minimizing the pooled relative RMS
// mismatch against lt_integral_smooth over a family of smooth integrands.
SignScale calibrate_reversal_signs(const PathEnsemble& brownian,
                                   const std::vector<Integrand>& family);

struct HxNormReport {
    double x = 0.0;
    double norm_value = 0.0;
    double term1 = 0.0, term2 = 0.0;
    bool finite = false;
    std::string diagnostic;
};

// Two-term weighted norm of the integrand space on [0,1] x R centered at x.
HxNormReport hx_norm(const Integrand& f, double x);

// Occupation-density identity diagnostic: sum_a L(t_k, a) da over a uniform
// level grid (mean +- 5 sample sd, 201 levels), divided by |sigma|^2 t_k.
// Returns the per-path ratios; values near 1 are consistent.
std::vector<double> occupation_identity_ratio(const PathEnsemble& e, int k, int num_levels = 201);

} // namespace ismp
