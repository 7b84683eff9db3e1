#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ismp/benchmarks.hpp"
#include "ismp/experiments.hpp"
#include "ismp/smp.hpp"
#include "ismp/stats.hpp"

#include <cmath>

using namespace ismp;

namespace {

ControlSpec optimal_b1_control(const ControlProblem& prob, double c = 0.5) {
    const int N = prob.grid.num_steps;
    std::vector<double> lat(N);
    for (int k = 0; k < N; ++k)
        lat[k] = 1.0 + c * (prob.grid.horizon_T - prob.grid.t(k));
    return ControlSpec::open_loop_lattice(std::move(lat), 1, N, prob.box);
}

// Discrete-time value of B1 under a deterministic lattice control; the noise
// enters J with zero mean, so this is the exact expectation of the Euler
// scheme.
double b1_discrete_value(const ControlProblem& prob, const ControlSpec& ctrl, double c) {
    const int N = prob.grid.num_steps;
    const double dt = prob.grid.dt;
    double ex = prob.x0, j = 0.0;
    for (int k = 0; k < N; ++k) {
        const double a = ctrl.lattice[k];
        j += (c * ex - 0.5 * a * a) * dt;
        ex += a * dt;
    }
    return j + ex;
}

AdjointConfig quick_adjoint(int paths, std::uint64_t seed) {
    AdjointConfig cfg;
    cfg.num_paths = paths;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("estimate_value oracles") {
    SUBCASE("driftless linear bequest recovers x0") {
        ControlProblem prob = make_b1(1.0, 128);
        prob.cost.f = nullptr;
        prob.cost.df_dx = nullptr;
        prob.cost.df_da = nullptr;
        prob.drift = DriftSpec{}; // b == 0
        prob.x0 = 0.7;
        ControlSpec c = ControlSpec::constant(0.0, 128, prob.box);
        ValueEstimate v = estimate_value(prob, c, 0, 20000, 41);
        CHECK(std::abs(v.j - 0.7) <= 3.0 * v.se);
    }
    SUBCASE("unit running profit is the horizon, zero variance") {
        ControlProblem prob = make_b1(2.0, 128);
        prob.cost.f = [](double, double, std::span<const double>) { return 1.0; };
        prob.cost.df_dx = nullptr;
        prob.cost.df_da = nullptr;
        prob.cost.g = nullptr;
        prob.cost.dg_dx = nullptr;
        ControlSpec c = ControlSpec::constant(0.0, 128, prob.box);
        ValueEstimate v = estimate_value(prob, c, 0, 500, 42);
        CHECK(v.j == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(v.se <= 1e-12);
    }
    SUBCASE("benchmark B1 at the analytic optimum") {
        const double c = 0.5;
        ControlProblem prob = make_b1(1.0, 512, c);
        ControlSpec opt = optimal_b1_control(prob, c);
        ValueEstimate v = estimate_value(prob, opt, 0, 20000, 43);
        const double disc = b1_discrete_value(prob, opt, c);
        CHECK(std::abs(v.j - disc) <= 3.0 * v.se);
        // continuous-time closed form, Euler bias allowance O(dt)
        CHECK(std::abs(v.j - benchmark("B1").optimal_value) <= 3.0 * v.se + 5e-3);
    }
}

TEST_CASE("necessary-condition verifier") {
    const double c = 0.5;
    ControlProblem prob = make_b1(1.0, 128, c);
    auto probes = prob.box.corners_and_center();

    SUBCASE("passes at the analytic optimum") {
        ControlSpec opt = optimal_b1_control(prob, c);
        AdjointPipeline pipe = run_adjoint_pipeline(prob, opt, 0, quick_adjoint(4000, 44));
        SMPReport rep = verify_necessary(prob, opt, pipe, probes, 1e-3);
        CHECK(rep.pass);
    }
    SUBCASE("fails after a half-unit perturbation on the first half") {
        ControlSpec bad = optimal_b1_control(prob, c);
        for (int k = 0; k < 64; ++k) bad.lattice[k] += 0.5;
        AdjointPipeline pipe = run_adjoint_pipeline(prob, bad, 0, quick_adjoint(4000, 45));
        SMPReport rep = verify_necessary(prob, bad, pipe, probes, 1e-3);
        CHECK_FALSE(rep.pass);
        CHECK(rep.worst_violation < -rep.tolerance);
    }
    SUBCASE("single-point admissible set passes trivially") {
        ControlProblem tiny = make_b1(1.0, 64, c);
        tiny.box = Box::interval(0.3, 0.3);
        ControlSpec only = ControlSpec::constant(0.3, 64, tiny.box);
        AdjointPipeline pipe = run_adjoint_pipeline(tiny, only, 0, quick_adjoint(1000, 46));
        SMPReport rep =
            verify_necessary(tiny, only, pipe, tiny.box.corners_and_center(), 1e-3);
        CHECK(rep.pass);
        CHECK(std::abs(rep.worst_violation) <= 1e-12);
    }
    SUBCASE("empty probe set is rejected") {
        ControlSpec opt = optimal_b1_control(prob, c);
        AdjointPipeline pipe = run_adjoint_pipeline(prob, opt, 0, quick_adjoint(500, 47));
        CHECK_THROWS(verify_necessary(prob, opt, pipe, {}, 1e-3));
    }
}

TEST_CASE("sufficient-condition verifier") {
    const double c = 0.5;
    ControlProblem prob = make_b1(1.0, 128, c);

    SUBCASE("passes at the optimum with concave data") {
        ControlSpec opt = optimal_b1_control(prob, c);
        AdjointPipeline pipe = run_adjoint_pipeline(prob, opt, 0, quick_adjoint(4000, 48));
        SMPReport rep = verify_sufficient(prob, opt, pipe, ConcavityProbeConfig{}, 1e-3);
        CHECK(rep.hypothesis_ok);
        CHECK(rep.pass);
        // interior stationarity also satisfies the variational inequality
        SMPReport nec =
            verify_necessary(prob, opt, pipe, prob.box.corners_and_center(), 1e-3);
        CHECK(nec.pass);
    }
    SUBCASE("flipped running-cost sign trips the concavity probe, not stationarity") {
        ControlProblem convex = prob;
        convex.cost.f = [](double, double x, std::span<const double> a) {
            return 0.5 * x + 0.5 * a[0] * a[0];
        };
        convex.cost.df_da = [](double, double, std::span<const double> a,
                               std::span<double> out) { out[0] = a[0]; };
        ControlSpec any = ControlSpec::constant(0.2, 128, convex.box);
        AdjointPipeline pipe = run_adjoint_pipeline(convex, any, 0, quick_adjoint(1000, 49));
        SMPReport rep = verify_sufficient(convex, any, pipe, ConcavityProbeConfig{}, 1e-3);
        CHECK_FALSE(rep.hypothesis_ok);
        CHECK_FALSE(rep.pass);
        CHECK(rep.message.find("not applicable") != std::string::npos);
    }
}

TEST_CASE("projected-gradient optimizer on B1") {
    const double c = 0.5;
    ControlProblem prob = make_b1(1.0, 256, c);
    OptimizeOptions opt;
    opt.adjoint = quick_adjoint(4000, 50);
    opt.iterations = 200;

    SUBCASE("converges to the analytic control from zero") {
        ControlSpec init = ControlSpec::constant(0.0, 256, prob.box);
        OptimizeResult res = optimize_control(prob, init, opt);
        CHECK_FALSE(res.trace.aborted);
        double sup = 0.0;
        for (int k = 0; k < 256; ++k) {
            const double want = 1.0 + c * (prob.grid.horizon_T - prob.grid.t(k));
            sup = std::max(sup, std::abs(res.control.lattice[k] - want));
        }
        CHECK(sup <= 1e-2);
        // trace is monotone up to twice the Monte Carlo noise
        for (std::size_t i = 1; i < res.trace.j.size(); ++i)
            CHECK(res.trace.j[i] >=
                  res.trace.j[i - 1] - 2.0 * (res.trace.j_se[i] + res.trace.j_se[i - 1]));
    }
    SUBCASE("a stationary start does not move") {
        ControlSpec opt_ctrl = optimal_b1_control(prob, c);
        OptimizeOptions one = opt;
        one.iterations = 1;
        OptimizeResult res = optimize_control(prob, opt_ctrl, one);
        double sup = 0.0;
        for (int k = 0; k < 256; ++k)
            sup = std::max(sup, std::abs(res.control.lattice[k] - opt_ctrl.lattice[k]));
        CHECK(sup <= 1e-4);
    }
    SUBCASE("binding box clips the profile and still verifies") {
        ControlProblem clipped = make_b1(1.0, 128, c);
        clipped.box = Box::interval(0.0, 0.5);
        OptimizeOptions o = opt;
        o.adjoint = quick_adjoint(3000, 51);
        o.iterations = 120;
        ControlSpec init = ControlSpec::constant(0.1, 128, clipped.box);
        OptimizeResult res = optimize_control(clipped, init, o);
        for (int k = 0; k < 128; ++k)
            CHECK(res.control.lattice[k] == doctest::Approx(0.5).epsilon(1e-6));
        AdjointPipeline pipe =
            run_adjoint_pipeline(clipped, res.control, 0, quick_adjoint(3000, 52));
        SMPReport rep = verify_necessary(clipped, res.control, pipe,
                                         clipped.box.corners_and_center(), 1e-3);
        CHECK(rep.pass);
    }
}

TEST_CASE("box projection is idempotent") {
    Box box({-1.0, 0.0}, {1.0, 2.5});
    std::vector<double> v = {3.0, -4.0};
    box.project(v);
    std::vector<double> once = v;
    box.project(v);
    CHECK(v == once);
    CHECK(v[0] == 1.0);
    CHECK(v[1] == 0.0);
}

TEST_CASE("cost scaling leaves the optimizer fixed point unchanged") {
    const double c = 0.5, lambda = 3.0;
    ControlProblem prob = make_b1(1.0, 64, c);
    ControlProblem scaled = prob;
    scaled.cost.f = [c, lambda](double, double x, std::span<const double> a) {
        return lambda * (c * x - 0.5 * a[0] * a[0]);
    };
    scaled.cost.df_dx = [c, lambda](double, double, std::span<const double>) {
        return lambda * c;
    };
    scaled.cost.df_da = [lambda](double, double, std::span<const double> a,
                                 std::span<double> out) { out[0] = -lambda * a[0]; };
    scaled.cost.g = [lambda](double x) { return lambda * x; };
    scaled.cost.dg_dx = [lambda](double) { return lambda; };
    scaled.cost.growth_C = lambda * prob.cost.growth_C;

    OptimizeOptions opt;
    opt.adjoint = quick_adjoint(2000, 53);
    opt.iterations = 150;
    opt.rho0 = 0.5 / lambda; // same effective step on the scaled gradient
    ControlSpec init = ControlSpec::constant(0.0, 64, prob.box);
    OptimizeOptions base_opt = opt;
    base_opt.rho0 = 0.5;
    OptimizeResult base = optimize_control(prob, init, base_opt);
    OptimizeResult scl = optimize_control(scaled, init, opt);
    double sup = 0.0;
    for (int k = 0; k < 64; ++k)
        sup = std::max(sup, std::abs(base.control.lattice[k] - scl.control.lattice[k]));
    CHECK(sup <= 1e-2);

    // the adjoint itself scales linearly
    AdjointPipeline p1 = run_adjoint_pipeline(prob, base.control, 0, quick_adjoint(500, 54));
    AdjointPipeline p2 = run_adjoint_pipeline(scaled, base.control, 0, quick_adjoint(500, 54));
    CHECK(p2.adjoint.at(0, 0) == doctest::Approx(lambda * p1.adjoint.at(0, 0)).epsilon(1e-6));
}

TEST_CASE("mollified path-stability study") {
    SUBCASE("smooth irregular part: bound dominates with one fitted constant") {
        ControlProblem b2 = make_b2(1.0, 512);
        ControlSpec c = ControlSpec::constant(0.2, 512, b2.box);
        ConvergenceStudy st = mollified_convergence_study(b2, c, c, {4, 16, 64}, 2000, 60);
        CHECK(st.delta == 0.0);
        for (std::size_t i = 1; i < st.levels.size(); ++i) {
            CHECK(st.path_gap[i] <= st.path_gap[i - 1] + 1e-9);
            CHECK(st.bound_term[i] <= st.bound_term[i - 1] + 1e-12);
        }
        double cfit = 0.0;
        for (std::size_t i = 0; i < st.levels.size(); ++i)
            cfit += st.path_gap[i] / std::max(st.bound_term[i], 1e-12) / st.levels.size();
        for (std::size_t i = 0; i < st.levels.size(); ++i)
            CHECK(st.path_gap[i] <= 2.0 * cfit * std::max(st.bound_term[i], 1e-12));
    }
    SUBCASE("control offset shows up linearly in the plateau") {
        ControlProblem b1 = make_b1(1.0, 256);
        std::vector<double> deltas = {0.1, 0.2, 0.3};
        std::vector<double> plateaus;
        ControlSpec base = ControlSpec::constant(0.2, 256, b1.box);
        for (double dv : deltas) {
            ControlSpec shifted = ControlSpec::constant(0.2 + dv, 256, b1.box);
            ConvergenceStudy st =
                mollified_convergence_study(b1, shifted, base, {64}, 2000, 61);
            plateaus.push_back(st.path_gap[0]);
            CHECK(st.delta == doctest::Approx(dv).epsilon(1e-9));
        }
        // linear regression through the origin; R^2 against the line
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            num += deltas[i] * plateaus[i];
            den += deltas[i] * deltas[i];
        }
        const double slope = num / den;
        double ss_res = 0.0, ss_tot = 0.0;
        const double mean_p = (plateaus[0] + plateaus[1] + plateaus[2]) / 3.0;
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            ss_res += std::pow(plateaus[i] - slope * deltas[i], 2);
            ss_tot += std::pow(plateaus[i] - mean_p, 2);
        }
        CHECK(1.0 - ss_res / ss_tot >= 0.9);
    }
    SUBCASE("nothing to mollify: zero gap and zero bound") {
        ControlProblem b1 = make_b1(1.0, 128);
        ControlSpec c = ControlSpec::constant(0.2, 128, b1.box);
        ConvergenceStudy st = mollified_convergence_study(b1, c, c, {4, 16}, 500, 62);
        for (double g : st.path_gap) CHECK(g == 0.0);
        for (double b : st.bound_term) CHECK(b == 0.0);
    }
}

TEST_CASE("cost convergence study") {
    SUBCASE("smooth drift gaps sit inside the noise") {
        ControlProblem b2 = make_b2(1.0, 512);
        ControlSpec c = ControlSpec::constant(0.2, 512, b2.box);
        ConvergenceStudy st = cost_convergence_study(b2, c, {4, 16, 64}, 2000, 63);
        for (std::size_t i = 0; i < st.levels.size(); ++i)
            CHECK(st.cost_gap[i] <= 3.0 * st.cost_gap_se[i] + 2e-3);
    }
    SUBCASE("discontinuous drift gaps decrease") {
        // The pathwise absolute gap carries the Lemma-2.2 signal; the raw
        // mean gap on these linear costs cancels into the Monte Carlo noise.
        ControlProblem b3 = make_b3(1.0, 512);
        ControlSpec c = ControlSpec::constant(0.2, 512, b3.box);
        ConvergenceStudy st = cost_convergence_study(b3, c, {4, 16, 64}, 6000, 64);
        CHECK(st.cost_gap_abs[1] < st.cost_gap_abs[0]);
        CHECK(st.cost_gap_abs[2] < st.cost_gap_abs[1]);
        CHECK(st.cost_gap_abs[2] <= 0.5 * st.cost_gap_abs[0]);
        for (std::size_t i = 0; i < st.levels.size(); ++i)
            CHECK(st.cost_gap[i] <= st.cost_gap_abs[i] + 1e-12);
    }
    SUBCASE("gap scales with the bequest slope") {
        ControlProblem b3 = make_b3(1.0, 256);
        b3.cost.f = nullptr;
        b3.cost.df_dx = nullptr;
        b3.cost.df_da = nullptr;
        ControlSpec c = ControlSpec::constant(0.2, 256, b3.box);
        ConvergenceStudy s1 = cost_convergence_study(b3, c, {4}, 6000, 65);
        ControlProblem doubled = b3;
        doubled.cost.g = [](double x) { return 2.0 * x; };
        doubled.cost.dg_dx = [](double) { return 2.0; };
        ConvergenceStudy s2 = cost_convergence_study(doubled, c, {4}, 6000, 65);
        CHECK(std::abs(s2.cost_gap_abs[0] - 2.0 * s1.cost_gap_abs[0]) <=
              0.25 * 2.0 * s1.cost_gap_abs[0]);
    }
}

TEST_CASE("Gateaux derivative cross-checks") {
    ControlProblem b1 = make_b1(1.0, 128);
    const int N = 128;
    ControlSpec alpha = ControlSpec::constant(0.2, N, b1.box);

    SUBCASE("state-independent drift has an explicit variational integral") {
        std::vector<double> eta(N);
        for (int k = 0; k < N; ++k) eta[k] = std::sin(2.0 * M_PI * k / N) + 0.2;
        GateauxReport rep = gateaux_check(b1, 4, alpha, eta, {1e-2, 5e-3}, 8000, 70);
        CHECK(rep.pass);
        // V(T) = int db2_da eta dt with db2_da == 1; the analytic value is
        // sum over the lattice of (df_da eta + df_dx V + g' V) terms.
        const double dt = b1.grid.dt;
        double V = 0.0, want = 0.0;
        for (int k = 0; k < N; ++k) {
            want += (0.5 * V - 0.2 * eta[k]) * dt;
            V += eta[k] * dt;
        }
        want += V;
        CHECK(rep.analytic == doctest::Approx(want).epsilon(1e-6));
    }
    SUBCASE("zero direction gives exactly zero") {
        std::vector<double> eta(N, 0.0);
        GateauxReport rep = gateaux_check(b1, 4, alpha, eta, {1e-2, 5e-3}, 2000, 71);
        CHECK(rep.analytic == 0.0);
        for (double v : rep.fd) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("Richardson pairing recovers the derivative of the quadratic cost") {
        std::vector<double> eta(N, 1.0);
        GateauxReport rep = gateaux_check(b1, 4, alpha, eta, {2e-2, 1e-2}, 8000, 72);
        CHECK(rep.pass);
        CHECK(std::abs(rep.richardson - rep.analytic) <= rep.tolerance);
    }
    SUBCASE("direction leaving the box is rejected") {
        std::vector<double> eta(N, 1.0);
        ControlSpec edge = ControlSpec::constant(9.99, N, b1.box);
        CHECK_THROWS(gateaux_check(b1, 4, edge, eta, {1e-1, 5e-2}, 200, 73));
    }
}

TEST_CASE("Ekeland diagnostic") {
    SUBCASE("identical iterates sit inside any radius") {
        EkelandRow row;
        row.eps_n = 0.0;
        row.radius = 0.0;
        row.distance_to_next = 0.0;
        CHECK(row.distance_to_next <= row.radius + 1e-12);
    }
    SUBCASE("smooth problems report negligible gaps and distances") {
        ControlProblem b1 = make_b1(1.0, 64);
        OptimizeOptions opt;
        opt.iterations = 60;
        opt.adjoint = quick_adjoint(1000, 74);
        ControlSpec init = ControlSpec::constant(0.0, 64, b1.box);
        EkelandReport rep = ekeland_diagnostic(b1, {4, 16}, init, opt, 2000, 74);
        REQUIRE(rep.rows.size() == 2);
        for (const auto& row : rep.rows) {
            CHECK(row.eps_n <= 5e-3);
            CHECK(row.distance_to_next <= 5e-2);
        }
    }
    SUBCASE("discontinuous benchmark: radius shrinks with the level") {
        ControlProblem b3 = make_b3(1.0, 128);
        OptimizeOptions opt;
        opt.iterations = 25;
        opt.adjoint = quick_adjoint(1000, 75);
        ControlSpec init = ControlSpec::constant(0.2, 128, b3.box);
        EkelandReport rep = ekeland_diagnostic(b3, {4, 16, 64}, init, opt, 4000, 75);
        REQUIRE(rep.rows.size() == 3);
        CHECK(rep.rows[2].radius < rep.rows[0].radius);
        for (const auto& row : rep.rows) CHECK(std::isfinite(row.distance_to_next));
    }
}
