#pragma once

#include "ismp/adjoint.hpp"
#include "ismp/control.hpp"
#include "ismp/cost.hpp"
#include "ismp/ensemble.hpp"
#include "ismp/flow.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ismp {

// One control problem instance: dynamics, costs, admissible box.
struct ControlProblem {
    std::string name;
    DriftSpec drift;   // exact drift; b1 may be irregular
    CostSpec cost;
    SigmaVector sigma{std::vector<double>{1.0}};
    TimeGrid grid{1.0, 512};
    double x0 = 0.0;
    Box box = Box::interval(-10.0, 10.0);
    int m = 1;

    // Level n > 0 replaces b1 by its mollification; level 0 is the exact drift.
    DriftSpec drift_at_level(int n) const;
};

struct ValueEstimate {
    double j = 0.0;
    double se = 0.0;
    int drift_level = 0;
};

ValueEstimate estimate_value(const ControlProblem& prob, const ControlSpec& control, int level,
                             int num_paths, std::uint64_t seed);

// J evaluated on an already-simulated ensemble (shares paths with callers).
ValueEstimate value_on_ensemble(const ControlProblem& prob, const PathEnsemble& e);

struct AdjointConfig {
    RegressionBasis basis;
    SignScale signs;   // required when the exact drift has an irregular b1
    int num_paths = 10000;
    std::uint64_t seed = 1;
};

// Ensemble + flow + adjoint for one control at one drift level. Picks the
// smooth-exp flow whenever the drift is differentiable and the local-time
// representation otherwise.
struct AdjointPipeline {
    PathEnsemble ensemble;
    FlowCumlog flow;
    AdjointEstimate adjoint;
    DriftSpec drift_used;
};

AdjointPipeline run_adjoint_pipeline(const ControlProblem& prob, const ControlSpec& control,
                                     int level, const AdjointConfig& cfg);

struct SMPReport {
    enum class Condition { necessary, sufficient };
    Condition condition = Condition::necessary;
    double worst_violation = 0.0; // necessary: min_k,beta E[dH.(beta-alpha)]
    double tolerance = 0.0;       // tolerance in force at the worst point
    std::vector<double> profile;     // per time step
    std::vector<double> profile_tol; // 3 SE + floor per time step
    bool hypothesis_ok = true; // sufficient only: concavity probes
    bool pass = false;
    std::string message;
};

// Theorem-style necessary condition: E[dH/da . (beta - alpha)] >= -tol for
// every probe beta (box corners plus center by default) at every t_k.
SMPReport verify_necessary(const ControlProblem& prob, const ControlSpec& candidate,
                           const AdjointPipeline& pipe,
                           const std::vector<std::vector<double>>& probes, double tol_floor);

struct ConcavityProbeConfig {
    int samples = 256;
    double tol = 1e-8;
    std::uint64_t seed = 7;
};

// Sufficient condition: stationarity ||E dH/da|| within tolerance at every
// t_k, plus midpoint-concavity probes of g and H in (x, a). A probe failure
// reports non-applicability rather than a stationarity violation.
SMPReport verify_sufficient(const ControlProblem& prob, const ControlSpec& candidate,
                            const AdjointPipeline& pipe, const ConcavityProbeConfig& probe,
                            double tol_floor);

struct OptimizeOptions {
    int iterations = 200;
    double rho0 = 0.5;
    double rho_decay_steps = 50.0; // rho_i = rho0 / (1 + i / decay)
    double stop_sup_move = 1e-6;
    int level = 0;
    AdjointConfig adjoint;
};

struct OptimizerTrace {
    std::vector<double> j;
    std::vector<double> j_se;
    std::vector<double> sup_move;
    bool aborted = false;
    std::string message;
};

struct OptimizeResult {
    ControlSpec control;
    OptimizerTrace trace;
};

// Projected gradient ascent on the open-loop lattice, step rho_i, direction
// E[dH/da(t_k)] from the adjoint pipeline recomputed every iteration.
OptimizeResult optimize_control(const ControlProblem& prob, const ControlSpec& initial,
                                const OptimizeOptions& opt);

struct ConvergenceStudy {
    std::vector<int> levels;
    std::vector<double> path_gap;   // E|X_n^{a1}(T) - X^{a2}(T)|
    std::vector<double> bound_term; // Gaussian-weighted drift-difference quadrature
    std::vector<bool> bound_finite;
    std::vector<double> cost_gap;     // |J_n - J|
    std::vector<double> cost_gap_se;
    std::vector<double> cost_gap_abs; // E|J_n - J| per path: the proof-side bound
    double delta = 0.0; // control distance between the pair
};

// Lemma-style path stability: E|X_n^{a1}(t) - X^{a2}(t)| per level plus the
// bound components (delta term and the drift-difference integral).
ConvergenceStudy mollified_convergence_study(const ControlProblem& prob, const ControlSpec& a1,
                                             const ControlSpec& a2, const std::vector<int>& levels,
                                             int num_paths, std::uint64_t seed);

// |J_n(alpha) - J(alpha)| per level with common-random-number SEs.
ConvergenceStudy cost_convergence_study(const ControlProblem& prob, const ControlSpec& control,
                                        const std::vector<int>& levels, int num_paths,
                                        std::uint64_t seed);

struct GateauxReport {
    double analytic = 0.0;
    double analytic_se = 0.0;
    std::vector<double> eps;
    std::vector<double> fd;          // (J(alpha+eps eta) - J(alpha))/eps
    double richardson = 0.0;         // 2 fd(eps/2) - fd(eps) from the last pair
    double tolerance = 0.0;          // 3 combined SE + O(eps) allowance
    bool pass = false;
};

// Variational-process derivative vs common-random-number finite differences.
GateauxReport gateaux_check(const ControlProblem& prob, int level, const ControlSpec& alpha,
                            const std::vector<double>& eta, const std::vector<double>& eps_list,
                            int num_paths, std::uint64_t seed);

struct EkelandRow {
    int level = 0;
    double eps_n = 0.0;
    double radius = 0.0;  // (2 eps_n)^{1/2}
    double distance_to_next = 0.0;
    bool within_radius = false;
};

struct EkelandReport {
    std::vector<EkelandRow> rows; // informational only
};

// Diagnostic mirror of the variational-principle step: compares optimizer
// iterates across consecutive mollification levels with the (2 eps_n)^{1/2}
// radius from the cost study.
EkelandReport ekeland_diagnostic(const ControlProblem& prob, const std::vector<int>& levels,
                                 const ControlSpec& initial, const OptimizeOptions& opt,
                                 int study_paths, std::uint64_t seed);

} // namespace ismp
