#pragma once

#include "ismp/cost.hpp"
#include "ismp/flow.hpp"
#include "ismp/regression.hpp"

#include <span>
#include <vector>

namespace ismp {

// H(t,x,y,a) = f(t,x,a) + (b1(t,x) + b2(t,x,a)) y.
double hamiltonian(double t, double x, double y, std::span<const double> a,
                   const DriftSpec& drift, const CostSpec& cost);

// dH/da = df_da + db2_da y (b1 does not depend on the control).
void grad_a_hamiltonian(double t, double x, double y, std::span<const double> a,
                        const DriftSpec& drift, const CostSpec& cost, std::span<double> out);

// Pathwise adjoint values Y(t_k) from the flow representation and
// least-squares Monte Carlo conditional expectations on X(t_k).
struct AdjointEstimate {
    int num_paths = 0;
    int num_steps = 0;
    RegressionBasis basis;
    std::vector<double> Y;         // M x (N+1); Y(T) = dg_dx(X_T) exactly
    std::vector<double> condition; // regression condition number per step

    double at(int p, int k) const {
        return Y[static_cast<std::size_t>(p) * (num_steps + 1) + k];
    }
};

AdjointEstimate adjoint_flow_lsmc(const PathEnsemble& e, const FlowCumlog& flow,
                                  const CostSpec& cost, const RegressionBasis& basis);

// Martingale residual of the linear adjoint equation on a smooth drift:
// dY + (df_dx + db_dx Y) dt should have conditionally zero mean.
struct BsdeResidualReport {
    std::vector<double> mean; // per step k = 0..N-1
    std::vector<double> se;
    double worst_zscore = 0.0;   // max_k |mean_k| / se_k
    double mean_abs = 0.0;       // average |mean_k| over steps
};

BsdeResidualReport bsde_residual_check(const AdjointEstimate& adj, const PathEnsemble& e,
                                       const DriftSpec& smooth_drift, const CostSpec& cost);

} // namespace ismp
