#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ismp/benchmarks.hpp"
#include "ismp/ensemble.hpp"
#include "ismp/measure.hpp"
#include "ismp/serial_ref.hpp"
#include "ismp/stats.hpp"
#include "oracles.hpp"

#include <cmath>
#include <filesystem>

using namespace ismp;

namespace {

const SigmaVector kUnitSigma({1.0});

ControlSpec zero_control(int steps) {
    return ControlSpec::constant(0.0, steps, Box::interval(-2.0, 2.0));
}

PathEnsemble brownian(int paths, int steps, std::uint64_t seed, double T = 1.0) {
    return simulate_paths(DriftSpec{}, kUnitSigma, zero_control(steps), TimeGrid(T, steps), 0.0,
                          paths, seed);
}

} // namespace

TEST_CASE("grid and sigma invariants") {
    CHECK_THROWS(TimeGrid(0.0, 8));
    CHECK_THROWS(TimeGrid(1.0, 1));
    CHECK_THROWS(SigmaVector({0.0, 0.0}));
    TimeGrid g(2.0, 8);
    CHECK(g.dt == doctest::Approx(0.25));
    CHECK(g.t(8) == doctest::Approx(2.0));
    CHECK(g.index_of(1.0) == 4);
    SigmaVector s({0.6, 0.8});
    CHECK(s.norm_sq == doctest::Approx(1.0));
}

TEST_CASE("driftless simulation matches the Brownian law") {
    const int M = 20000, N = 64;
    PathEnsemble e = brownian(M, N, 11);
    std::vector<double> xt(M);
    for (int p = 0; p < M; ++p) xt[p] = e.x(p, N);
    const MeanSE ms = mean_se(xt);
    CHECK(std::abs(ms.mean) <= 3.0 / std::sqrt(double(M)));
    CHECK(ms.sd * ms.sd == doctest::Approx(1.0).epsilon(0.05));

    NoiseSanity ns = noise_sanity_check(e);
    CHECK(ns.pass);
}

TEST_CASE("constant control integrates the drift part exactly") {
    const int M = 20000, N = 128;
    const double c = 0.7;
    ControlProblem prob = make_b1(1.0, N);
    ControlSpec alpha = ControlSpec::constant(c, N, prob.box);
    PathEnsemble e =
        simulate_paths(prob.drift, prob.sigma, alpha, prob.grid, 0.25, M, 5);
    std::vector<double> xt(M);
    for (int p = 0; p < M; ++p) xt[p] = e.x(p, N);
    const MeanSE ms = mean_se(xt);
    CHECK(std::abs(ms.mean - (0.25 + c)) <= 3.0 / std::sqrt(double(M)));
}

TEST_CASE("discontinuous drift against the fine-grid measure-change oracle") {
    // theta 1_{x>0} drift; Girsanov reweighting of driftless paths on a much
    // finer grid is the independent route to E[X(T)].
    const double theta = 0.5;
    DriftSpec d;
    d.b1 = [theta](double, double x) { return x > 0.0 ? theta : 0.0; };
    d.bound_b1 = theta;

    const int Mdir = 20000, Ndir = 1024;
    ControlSpec zc = zero_control(Ndir);
    PathEnsemble direct =
        simulate_paths(d, kUnitSigma, zc, TimeGrid(1.0, Ndir), 0.0, Mdir, 21);
    std::vector<double> xt(Mdir);
    for (int p = 0; p < Mdir; ++p) xt[p] = direct.x(p, Ndir);
    const MeanSE dir_ms = mean_se(xt);

    auto orc = test_oracles::girsanov_fine_grid_oracle(
        [theta](double, double x, double) { return x > 0.0 ? theta : 0.0; }, 0.0, 1.0, 0.0, 1.0,
        1 << 16, 4000, 77);
    CHECK(std::abs(orc.weight.mean - 1.0) <= 4.0 * orc.weight.se);

    const double tol =
        3.0 * std::sqrt(dir_ms.se * dir_ms.se + orc.weighted_xT.se * orc.weighted_xT.se);
    CHECK(std::abs(dir_ms.mean - orc.weighted_xT.mean) <= tol);
}

TEST_CASE("drift contract violations carry the offending point") {
    DriftSpec d;
    d.b1 = [](double, double x) { return x > 0.5 ? 2.0 : 0.0; };
    d.bound_b1 = 1.0; // deliberately too small
    ControlSpec c = zero_control(32);
    CHECK_THROWS_AS(simulate_paths(d, kUnitSigma, c, TimeGrid(1.0, 32), 1.0, 64, 3),
                    drift_contract_error);

    DriftSpec bad;
    bad.b1 = [](double, double) { return std::numeric_limits<double>::quiet_NaN(); };
    bad.bound_b1 = 1.0;
    CHECK_THROWS(simulate_paths(bad, kUnitSigma, c, TimeGrid(1.0, 32), 0.0, 8, 3));
}

TEST_CASE("mollification preserves constants exactly") {
    MollifiedDrift m = mollify_drift([](double, double) { return 0.75; }, 0.75, 5);
    for (double x : {-2.0, -0.3, 0.0, 1.7}) {
        CHECK(m.b1n(0.1, x) == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(std::abs(m.db1n_dx(0.1, x)) <= 1e-10);
    }
}

TEST_CASE("mollified step takes the midpoint value at the jump") {
    auto step = [](double, double x) { return x > 0.0 ? 1.0 : 0.0; };
    for (int n : {4, 16, 64}) {
        MollifiedDrift m = mollify_drift(step, 1.0, n);
        CHECK(std::abs(m.b1n(0.0, 0.0) - 0.5) <= 0.01);
        // bound preserved at sampled points
        for (double x : {-0.4, -1.0 / n, 0.0, 1.0 / n, 0.4})
            CHECK(std::abs(m.b1n(0.0, x)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("mollification error decreases quadratically for smooth drifts") {
    auto smooth = [](double, double x) { return std::sin(x); };
    auto sup_err = [&](int n) {
        MollifiedDrift m = mollify_drift(smooth, 1.0, n);
        double worst = 0.0;
        for (int i = 0; i <= 80; ++i) {
            const double x = -4.0 + 0.1 * i;
            worst = std::max(worst, std::abs(m.b1n(0.0, x) - std::sin(x)));
        }
        return worst;
    };
    const double e4 = sup_err(4), e8 = sup_err(8), e16 = sup_err(16);
    CHECK(e8 < e4);
    CHECK(e16 < e8);
    CHECK(e4 / e8 > 3.0);
    CHECK(e8 / e16 > 3.0);
}

TEST_CASE("Doleans exponential") {
    const int M = 20000, N = 128;
    PathEnsemble e = brownian(M, N, 9);

    SUBCASE("zero integrand gives exactly one") {
        auto q0 = [](int, double, double, std::span<double> q) { q[0] = 0.0; };
        std::vector<double> v = doleans_exponential(q0, e, N);
        for (int p = 0; p < M; p += 997) CHECK(v[p] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("unit integrand is a mean-one martingale with second moment e") {
        auto q1 = [](int, double, double, std::span<double> q) { q[0] = 1.0; };
        std::vector<double> v = doleans_exponential(q1, e, N);
        const MeanSE ms = mean_se(v);
        CHECK(std::abs(ms.mean - 1.0) <= 4.0 * ms.se);

        std::vector<double> v2(M);
        for (int p = 0; p < M; ++p) v2[p] = v[p] * v[p];
        const MeanSE m2 = mean_se(v2);
        CHECK(std::abs(m2.mean - std::exp(1.0)) <= 4.0 * m2.se);
    }
}

TEST_CASE("Girsanov weights") {
    const int M = 20000, N = 256;
    PathEnsemble e = brownian(M, N, 33);

    SUBCASE("zero drift gives unit weights") {
        std::vector<double> w = girsanov_weights(DriftSpec{}, zero_control(N), e);
        for (int p = 0; p < M; p += 1009) CHECK(w[p] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("constant drift agrees with direct simulation and has mean one") {
        DriftSpec d;
        d.b1 = [](double, double) { return 0.4; };
        d.bound_b1 = 0.4;
        std::vector<double> w = girsanov_weights(d, zero_control(N), e);
        const MeanSE mw = mean_se(w);
        CHECK(std::abs(mw.mean - 1.0) <= 4.0 * mw.se);

        std::vector<double> wx(M);
        for (int p = 0; p < M; ++p) wx[p] = w[p] * e.x(p, N);
        const MeanSE rew = mean_se(wx);
        PathEnsemble drifted =
            simulate_paths(d, kUnitSigma, zero_control(N), TimeGrid(1.0, N), 0.0, M, 34);
        std::vector<double> xt(M);
        for (int p = 0; p < M; ++p) xt[p] = drifted.x(p, N);
        const MeanSE dir = mean_se(xt);
        const double tol = 3.0 * std::sqrt(rew.se * rew.se + dir.se * dir.se);
        CHECK(std::abs(rew.mean - dir.mean) <= tol);
    }
    SUBCASE("requires a driftless ensemble") {
        DriftSpec d;
        d.b1 = [](double, double) { return 0.4; };
        d.bound_b1 = 0.4;
        PathEnsemble drifted =
            simulate_paths(d, kUnitSigma, zero_control(N), TimeGrid(1.0, N), 0.0, 16, 1);
        CHECK_THROWS(girsanov_weights(d, zero_control(N), drifted));
    }
}

TEST_CASE("control distance") {
    const int N = 64;
    PathEnsemble e = brownian(32, N, 2);
    Box box = Box::interval(-2.0, 2.0);
    ControlSpec a0 = ControlSpec::constant(0.0, N, box);
    ControlSpec ac = ControlSpec::constant(0.9, N, box);
    CHECK(control_distance(a0, a0, e) == 0.0);
    CHECK(control_distance(a0, ac, e) == doctest::Approx(0.9));

    std::vector<double> ramp(N);
    for (int k = 0; k < N; ++k) ramp[k] = 0.5 * e.grid.t(k);
    ControlSpec ar = ControlSpec::open_loop_lattice(ramp, 1, N, box);
    const double expected = 0.5 * e.grid.t(N - 1);
    CHECK(control_distance(a0, ar, e) == doctest::Approx(expected));

    ControlSpec mismatched = ControlSpec::constant(0.0, N / 2, box);
    CHECK_THROWS(control_distance(a0, mismatched, e));
}

TEST_CASE("control box membership is enforced") {
    Box box = Box::interval(-1.0, 1.0);
    CHECK_THROWS(ControlSpec::constant(3.0, 16, box));
    ControlSpec fb = ControlSpec::feedback(
        [](double, double x, std::span<double> out) { out[0] = 2.0 * (x > 0 ? 1 : 0); }, 1, box);
    DriftSpec d;
    CHECK_THROWS(simulate_paths(d, kUnitSigma, fb, TimeGrid(1.0, 16), 1.0, 8, 3));
}

TEST_CASE("fourth moment of the sup is stable under path doubling") {
    ControlProblem prob = make_b2(1.0, 128);
    ControlSpec c = ControlSpec::constant(0.2, 128, prob.box);
    auto sup4 = [&](int M, std::uint64_t seed) {
        PathEnsemble e = simulate_paths(prob.drift, prob.sigma, c, prob.grid, 0.0, M, seed);
        std::vector<double> v(M);
        for (int p = 0; p < M; ++p) {
            double worst = 0.0;
            for (int k = 0; k <= 128; ++k) worst = std::max(worst, std::abs(e.x(p, k)));
            v[p] = worst * worst * worst * worst;
        }
        return mean_se(v).mean;
    };
    const double m1 = sup4(4000, 40), m2 = sup4(8000, 41);
    CHECK(std::isfinite(m1));
    CHECK(m2 / m1 > 0.8);
    CHECK(m2 / m1 < 1.25);
}

TEST_CASE("girsanov weight mean approaches one as paths grow") {
    DriftSpec d;
    d.b1 = [](double, double x) { return x > 0.0 ? 0.5 : 0.0; };
    d.bound_b1 = 0.5;
    const int N = 256;
    double prev_gap = 1.0;
    for (int M : {1000, 10000, 100000}) {
        PathEnsemble e = brownian(M, N, 55);
        std::vector<double> w = girsanov_weights(d, zero_control(N), e);
        const MeanSE ms = mean_se(w);
        const double gap = std::abs(ms.mean - 1.0);
        CHECK(gap <= 5.0 * ms.se);
        if (M > 1000) CHECK(gap <= std::max(prev_gap * 2.0, 5.0 * ms.se));
        prev_gap = gap;
    }
}

TEST_CASE("drift derivative callbacks match finite differences") {
    for (const auto& b : benchmark_registry()) {
        CHECK(check_drift_derivatives(b.problem.drift, b.problem.m, 123).pass);
        CHECK(check_cost_derivatives(b.problem.cost, b.problem.m, 321).pass);
        CHECK(check_growth_bound(b.problem.cost, b.problem.m, 213));
    }
}

TEST_CASE("ensemble binary round trip") {
    PathEnsemble e = brownian(16, 32, 4);
    const std::string path = (std::filesystem::temp_directory_path() / "ismp_rt.bin").string();
    ensemble_write_binary(e, path);
    PathEnsemble r = ensemble_read_binary(path);
    CHECK(r.X == e.X);
    CHECK(r.dB == e.dB);
    CHECK(r.grid.num_steps == e.grid.num_steps);
    std::filesystem::remove(path);
}

TEST_CASE("identical seeds reproduce identical ensembles") {
    PathEnsemble a = brownian(64, 64, 99);
    PathEnsemble b = brownian(64, 64, 99);
    CHECK(a.X == b.X);
    PathEnsemble serial =
        ref::simulate_paths_serial(DriftSpec{}, kUnitSigma, zero_control(64), TimeGrid(1.0, 64),
                                   0.0, 64, 99);
    CHECK(a.X == serial.X);
    CHECK(a.dB == serial.dB);
}
