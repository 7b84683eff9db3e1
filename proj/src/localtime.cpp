#include "ismp/localtime.hpp"

#include "ismp/quadrature.hpp"
#include "ismp/stats.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ismp {

LocalTimeCurve tanaka_local_time(const PathEnsemble& e, double a) {
    const int N = e.grid.num_steps;
    LocalTimeCurve c;
    c.level = a;
    c.num_paths = e.num_paths;
    c.num_steps = N;
    c.L.assign(static_cast<std::size_t>(e.num_paths) * (N + 1), 0.0);
#pragma omp parallel for schedule(static)
    for (int p = 0; p < e.num_paths; ++p) {
        // sgn = -1 on (-inf, 0], +1 on (0, inf); the discrete increments are
        // nonnegative by construction, clamp only round-off.
        double acc = 0.0;
        const double base = std::abs(e.x(p, 0) - a);
        for (int k = 0; k < N; ++k) {
            const double xj = e.x(p, k);
            const double sgn = xj - a > 0.0 ? 1.0 : -1.0;
            acc += sgn * (e.x(p, k + 1) - xj);
            double lk = std::abs(e.x(p, k + 1) - a) - base - acc;
            if (lk < 0.0) lk = 0.0;
            c.L[static_cast<std::size_t>(p) * (N + 1) + k + 1] = lk;
        }
    }
    return c;
}

LocalTimeIntegral lt_integral_smooth(const Integrand& f, const PathEnsemble& e, double s,
                                     double t) {
    if (!f.df_dz)
        throw std::invalid_argument(
            "lt_integral_smooth: integrand has no dz-derivative; use the time-reversal estimator");
    const int ks = e.grid.index_of(s);
    const int kt = e.grid.index_of(t);
    const double scale = e.sigma.norm_sq * e.grid.dt;

    LocalTimeIntegral out;
    out.tag = LocalTimeIntegral::Tag::smooth_identity;
    out.window_s = s;
    out.window_t = t;
    out.value.assign(e.num_paths, 0.0);
#pragma omp parallel for schedule(static)
    for (int p = 0; p < e.num_paths; ++p) {
        double acc = 0.0;
        for (int k = ks; k < kt; ++k) acc += f.df_dz(e.grid.t(k), e.x(p, k));
        out.value[p] = -scale * acc;
    }
    return out;
}

namespace {

// Cumulative forward / reversed / singular sums of the decomposition for one
// path; V_k = sigma_sign * a * (F_k + R_k + kappa_sign * S_k).
struct ReversalSums {
    std::vector<double> F, R, S; // each length N+1, cumulative in k
};

void reversal_sums_path(const Integrand& f, const PathEnsemble& e, int p, ReversalSums& w) {
    const int N = e.grid.num_steps;
    const double dt = e.grid.dt;
    const double T = e.grid.horizon_T;
    const double a = e.sigma.norm;
    const double inv_a = 1.0 / a;
    const bool milstein = static_cast<bool>(f.df_dz);

    w.F.assign(N + 1, 0.0);
    w.R.assign(N + 1, 0.0);
    w.S.assign(N + 1, 0.0);

    // Forward Ito sums of f(t_j, X_j) against dB_j = (X_{j+1} - X_j)/a.
    for (int j = 0; j < N; ++j) {
        const double tj = e.grid.t(j);
        const double xj = e.x(p, j);
        const double db = (e.x(p, j + 1) - xj) * inv_a;
        double inc = f.f(tj, xj) * db;
        if (milstein) inc += 0.5 * a * f.df_dz(tj, xj) * (db * db - dt);
        w.F[j + 1] = w.F[j] + inc;
    }

    // Reversed-time sums. Bhat_j = B(T - t_j) = (X(N-j) - x0)/a; the k-th
    // cumulative value picks up reversed index j = N - k. The singular factor
    // 1/(T - t_j) is evaluated at the left endpoint of each step and never
    // reaches T (guard band of one step).
    for (int k = 1; k <= N; ++k) {
        const int j = N - k;
        const double tj = e.grid.t(j);
        const double bh_j = (e.x(p, N - j) - e.x0) * inv_a;
        const double bh_j1 = (e.x(p, N - j - 1) - e.x0) * inv_a;
        const double xhat = e.x(p, N - j); // X(T - t_j)
        const double tr = T - tj;
        const double sing = bh_j / tr;
        const double dw = (bh_j1 - bh_j) - sing * dt;
        const double fv = f.f(tr, xhat);
        double rinc = fv * dw;
        if (milstein) rinc += 0.5 * a * f.df_dz(tr, xhat) * (dw * dw - dt);
        w.R[k] = w.R[k - 1] + rinc;
        w.S[k] = w.S[k - 1] + fv * sing * dt;
    }
}

std::vector<double> reversal_cumulative_impl(const Integrand& f, const PathEnsemble& e,
                                             int sigma_sign, int kappa_sign) {
    const int N = e.grid.num_steps;
    const double a = e.sigma.norm;
    std::vector<double> out(static_cast<std::size_t>(e.num_paths) * (N + 1), 0.0);
#pragma omp parallel for schedule(static)
    for (int p = 0; p < e.num_paths; ++p) {
        ReversalSums w;
        reversal_sums_path(f, e, p, w);
        double* row = out.data() + static_cast<std::size_t>(p) * (N + 1);
        for (int k = 0; k <= N; ++k)
            row[k] = sigma_sign * a * (w.F[k] + w.R[k] + kappa_sign * w.S[k]);
    }
    return out;
}

LocalTimeIntegral reversal_window(const Integrand& f, const PathEnsemble& e, double s, double t,
                                  const SignScale& signs) {
    if (!signs.calibrated)
        throw std::runtime_error(
            "lt_integral_reversal: sign pair not calibrated; run calibrate_reversal_signs first");
    const int ks = e.grid.index_of(s);
    const int kt = e.grid.index_of(t);
    std::vector<double> cum = reversal_cumulative_impl(f, e, signs.sigma_sign, signs.kappa_sign);

    LocalTimeIntegral out;
    out.tag = LocalTimeIntegral::Tag::time_reversal;
    out.window_s = s;
    out.window_t = t;
    out.sign_scale = signs;
    out.value.assign(e.num_paths, 0.0);
    const int N = e.grid.num_steps;
    for (int p = 0; p < e.num_paths; ++p) {
        const double* row = cum.data() + static_cast<std::size_t>(p) * (N + 1);
        out.value[p] = row[kt] - row[ks];
    }
    return out;
}

} // namespace

LocalTimeIntegral lt_integral_reversal(const Integrand& f, const PathEnsemble& e, double s,
                                       double t, const SignScale& signs) {
    if (!e.driftless)
        throw std::invalid_argument(
            "lt_integral_reversal: ensemble must be driftless; use the transported variant for "
            "controlled paths");
    return reversal_window(f, e, s, t, signs);
}

LocalTimeIntegral lt_integral_reversal_transported(const Integrand& f, const PathEnsemble& e,
                                                   double s, double t, const SignScale& signs) {
    return reversal_window(f, e, s, t, signs);
}

std::vector<double> lt_reversal_cumulative(const Integrand& f, const PathEnsemble& e,
                                           const SignScale& signs) {
    if (!signs.calibrated)
        throw std::runtime_error(
            "lt_reversal_cumulative: sign pair not calibrated; run calibrate_reversal_signs "
            "first");
    return reversal_cumulative_impl(f, e, signs.sigma_sign, signs.kappa_sign);
}

SignScale calibrate_reversal_signs(const PathEnsemble& brownian,
                                   const std::vector<Integrand>& family) {
    if (family.size() < 3)
        throw std::invalid_argument("calibrate_reversal_signs: need at least 3 test integrands");
    if (!brownian.driftless)
        throw std::invalid_argument("calibrate_reversal_signs: ensemble must be driftless");
    for (const auto& f : family)
        if (!f.df_dz)
            throw std::invalid_argument(
                "calibrate_reversal_signs: family must be smooth (dz-derivatives required)");

    const double t_end = brownian.grid.horizon_T;
    const int N = brownian.grid.num_steps;
    const int M = brownian.num_paths;

    // Reference values and the two sign-independent halves of the
    // decomposition, per integrand. Single-threaded by design so ties break
    // deterministically.
    double denom = 0.0;
    std::vector<std::vector<double>> sm(family.size());
    // per integrand and path: a*(F+R) and a*S at the window end
    std::vector<std::vector<double>> fr(family.size()), ss(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) {
        sm[i] = lt_integral_smooth(family[i], brownian, 0.0, t_end).value;
        fr[i].assign(M, 0.0);
        ss[i].assign(M, 0.0);
        const double a = brownian.sigma.norm;
        for (int p = 0; p < M; ++p) {
            ReversalSums w;
            reversal_sums_path(family[i], brownian, p, w);
            fr[i][p] = a * (w.F[N] + w.R[N]);
            ss[i][p] = a * w.S[N];
        }
        for (int p = 0; p < M; ++p) denom += sm[i][p] * sm[i][p];
    }
    if (!(denom > 0.0))
        throw std::runtime_error(
            "calibrate_reversal_signs: family is degenerate (all smooth references vanish); "
            "provide a nonconstant integrand");

    const int sign_choices[2] = {1, -1};
    double best = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    int best_sigma = 1, best_kappa = 1;
    for (int si : sign_choices)
        for (int ka : sign_choices) {
            double num = 0.0;
            for (std::size_t i = 0; i < family.size(); ++i)
                for (int p = 0; p < M; ++p) {
                    const double rev = si * (fr[i][p] + ka * ss[i][p]);
                    const double d = rev - sm[i][p];
                    num += d * d;
                }
            const double mism = std::sqrt(num / denom);
            if (mism < best) {
                second = best;
                best = mism;
                best_sigma = si;
                best_kappa = ka;
            } else if (mism < second) {
                second = mism;
            }
        }

    if (!(best < 0.20)) {
        std::ostringstream os;
        os << "calibrate_reversal_signs: no sign pair achieves mismatch below 20% (best "
           << best << "); the estimator implementation is inconsistent";
        throw std::runtime_error(os.str());
    }

    SignScale out;
    out.sigma_sign = best_sigma;
    out.kappa_sign = best_kappa;
    out.calibrated = true;
    out.mismatch = best;
    out.runner_up_ratio = second / best;
    return out;
}

HxNormReport hx_norm(const Integrand& f, double x) {
    HxNormReport r;
    r.x = x;
    static const QuadratureRule gh = gauss_hermite(64);
    static const QuadratureRule glag = gauss_laguerre(48);
    static const QuadratureRule gl = gauss_legendre(48, 0.0, 1.0);

    // s = tau^2 grades the mesh toward s = 0 where the second term's kernel
    // concentrates; the |u| factor of that term is absorbed exactly by the
    // substitution w = u^2/2 (Laguerre weight).
    double t1 = 0.0, t2 = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double tau = gl.nodes[i];
        const double s = tau * tau;
        const double g1 = gauss_normal_expectation(gh, [&](double u) {
            const double v = f.f(s, x + tau * u);
            return v * v;
        });
        double g2 = 0.0;
        for (std::size_t j = 0; j < glag.nodes.size(); ++j) {
            const double u = std::sqrt(2.0 * glag.nodes[j]);
            g2 += glag.weights[j] *
                  0.5 * (std::abs(f.f(s, x + tau * u)) + std::abs(f.f(s, x - tau * u)));
        }
        t1 += gl.weights[i] * 2.0 * tau * g1; // ds = 2 tau dtau
        t2 += gl.weights[i] * (4.0 / std::sqrt(2.0 * M_PI)) * g2;
    }
    r.term1 = 2.0 * std::sqrt(std::max(t1, 0.0));
    r.term2 = t2;
    r.norm_value = r.term1 + r.term2;
    r.finite = std::isfinite(r.norm_value);
    if (!r.finite) r.diagnostic = "quadrature returned a non-finite value";
    return r;
}

std::vector<double> occupation_identity_ratio(const PathEnsemble& e, int k, int num_levels) {
    if (k < 1 || k > e.grid.num_steps)
        throw std::invalid_argument("occupation_identity_ratio: bad time index");
    // Level grid spans mean +- 5 sample sd of X(t_k).
    std::vector<double> xs(e.num_paths);
    for (int p = 0; p < e.num_paths; ++p) xs[p] = e.x(p, k);
    const MeanSE ms = mean_se(xs);
    const double lo = ms.mean - 5.0 * ms.sd;
    const double hi = ms.mean + 5.0 * ms.sd;
    const double da = (hi - lo) / (num_levels - 1);

    std::vector<double> acc(e.num_paths, 0.0);
    for (int i = 0; i < num_levels; ++i) {
        const double a = lo + i * da;
        LocalTimeCurve c = tanaka_local_time(e, a);
        for (int p = 0; p < e.num_paths; ++p) acc[p] += c.at(p, k) * da;
    }
    const double denom = e.sigma.norm_sq * e.grid.t(k);
    for (double& v : acc) v /= denom;
    return acc;
}

} // namespace ismp
