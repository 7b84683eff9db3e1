#include "ismp/adjoint.hpp"

#include "ismp/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace ismp {

double hamiltonian(double t, double x, double y, std::span<const double> a,
                   const DriftSpec& drift, const CostSpec& cost) {
    return cost.eval_f(t, x, a) + drift.eval(t, x, a) * y;
}

void grad_a_hamiltonian(double t, double x, double y, std::span<const double> a,
                        const DriftSpec& drift, const CostSpec& cost, std::span<double> out) {
    const std::size_t m = a.size();
    std::vector<double> tmp(m);
    cost.eval_df_da(t, x, a, out);
    drift.eval_db2_da(t, x, a, tmp);
    for (std::size_t i = 0; i < m; ++i) out[i] += tmp[i] * y;
}

AdjointEstimate adjoint_flow_lsmc(const PathEnsemble& e, const FlowCumlog& flow,
                                  const CostSpec& cost, const RegressionBasis& basis) {
    if (flow.num_paths != e.num_paths || flow.num_steps != e.grid.num_steps)
        throw std::invalid_argument("adjoint_flow_lsmc: flow/ensemble shape mismatch");
    const int N = e.grid.num_steps;
    const int M = e.num_paths;
    const double dt = e.grid.dt;

    AdjointEstimate out;
    out.num_paths = M;
    out.num_steps = N;
    out.basis = basis;
    out.Y.assign(static_cast<std::size_t>(M) * (N + 1), 0.0);
    out.condition.assign(N + 1, 1.0);

    // payload(k) = Phi(t_k,T) g'(X_T) + sum_{j>=k} Phi(t_k,t_j) f_x(t_j) dt
    //            = exp(-C_k) * [exp(C_N) g'(X_T) + sum_{j>=k} exp(C_j) f_x dt]
    std::vector<double> payload(static_cast<std::size_t>(M) * (N + 1), 0.0);
#pragma omp parallel for schedule(static)
    for (int p = 0; p < M; ++p) {
        double* row = payload.data() + static_cast<std::size_t>(p) * (N + 1);
        const double gT = cost.eval_dg_dx(e.x(p, N));
        double acc = std::exp(flow.at(p, N)) * gT;
        row[N] = gT;
        for (int k = N - 1; k >= 0; --k) {
            acc += std::exp(flow.at(p, k)) *
                   cost.eval_df_dx(e.grid.t(k), e.x(p, k), e.applied(p, k)) * dt;
            row[k] = std::exp(-flow.at(p, k)) * acc;
        }
    }

    // Terminal slice is exact; earlier slices are cross-sectional regressions,
    // independent across k.
    for (int p = 0; p < M; ++p) out.Y[static_cast<std::size_t>(p) * (N + 1) + N] = payload[static_cast<std::size_t>(p) * (N + 1) + N];

    std::string deferred_error;
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < N; ++k) {
        try {
            std::vector<double> xs(M), ys(M);
            for (int p = 0; p < M; ++p) {
                xs[p] = e.x(p, k);
                ys[p] = payload[static_cast<std::size_t>(p) * (N + 1) + k];
            }
            RidgeFit fit = ridge_regress(basis, xs, ys);
            for (int p = 0; p < M; ++p)
                out.Y[static_cast<std::size_t>(p) * (N + 1) + k] = fit.predict(basis, xs[p]);
            out.condition[k] = fit.condition;
        } catch (const std::exception& ex) {
#pragma omp critical
            if (deferred_error.empty()) deferred_error = ex.what();
        }
    }
    if (!deferred_error.empty()) throw std::runtime_error(deferred_error);
    return out;
}

BsdeResidualReport bsde_residual_check(const AdjointEstimate& adj, const PathEnsemble& e,
                                       const DriftSpec& smooth_drift, const CostSpec& cost) {
    if (!smooth_drift.has_b1_derivative())
        throw std::invalid_argument("bsde_residual_check: drift must be smooth (mollified)");
    const int N = e.grid.num_steps;
    const int M = e.num_paths;
    const double dt = e.grid.dt;

    BsdeResidualReport rep;
    rep.mean.assign(N, 0.0);
    rep.se.assign(N, 0.0);
    std::vector<double> r(M);
    for (int k = 0; k < N; ++k) {
        for (int p = 0; p < M; ++p) {
            const double t = e.grid.t(k);
            const double x = e.x(p, k);
            auto a = e.applied(p, k);
            const double y = adj.at(p, k);
            const double gen = cost.eval_df_dx(t, x, a) + smooth_drift.eval_db_dx(t, x, a) * y;
            r[p] = adj.at(p, k + 1) - y + gen * dt;
        }
        const MeanSE ms = mean_se(r);
        rep.mean[k] = ms.mean;
        rep.se[k] = ms.se;
        const double z = ms.se > 0 ? std::abs(ms.mean) / ms.se : 0.0;
        rep.worst_zscore = std::max(rep.worst_zscore, z);
        rep.mean_abs += std::abs(ms.mean) / N;
    }
    return rep;
}

} // namespace ismp
