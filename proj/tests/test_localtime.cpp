#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ismp/localtime.hpp"
#include "ismp/serial_ref.hpp"
#include "ismp/stats.hpp"

#include <cmath>

using namespace ismp;

namespace {

const SigmaVector kUnitSigma({1.0});

ControlSpec zero_control(int steps) {
    return ControlSpec::constant(0.0, steps, Box::interval(-1.0, 1.0));
}

PathEnsemble brownian(int paths, int steps, std::uint64_t seed, double T = 1.0, double x0 = 0.0) {
    return simulate_paths(DriftSpec{}, kUnitSigma, zero_control(steps), TimeGrid(T, steps), x0,
                          paths, seed);
}

Integrand integrand_const(double c) {
    return {[c](double, double) { return c; }, [](double, double) { return 0.0; }, "const"};
}

Integrand integrand_sin() {
    return {[](double, double z) { return std::sin(z); },
            [](double, double z) { return std::cos(z); }, "sin"};
}

Integrand integrand_cos() {
    return {[](double, double z) { return std::cos(z); },
            [](double, double z) { return -std::sin(z); }, "cos"};
}

std::vector<Integrand> default_family() {
    return {integrand_const(1.0), integrand_sin(), integrand_cos()};
}

SignScale calibrated(const PathEnsemble& e) {
    return calibrate_reversal_signs(e, default_family());
}

} // namespace

TEST_CASE("Tanaka local time mean at the origin") {
    PathEnsemble e = brownian(10000, 4096, 101);
    LocalTimeCurve c = tanaka_local_time(e, 0.0);
    std::vector<double> lt(e.num_paths);
    for (int p = 0; p < e.num_paths; ++p) lt[p] = c.at(p, 4096);
    const MeanSE ms = mean_se(lt);
    const double want = std::sqrt(2.0 / M_PI);
    CHECK(std::abs(ms.mean - want) <= 3.0 * ms.se);
}

TEST_CASE("local time vanishes far from the path range") {
    PathEnsemble e = brownian(4000, 512, 55);
    const double far = 10.0; // x0 + 10 sqrt(T) |sigma|
    LocalTimeCurve c = tanaka_local_time(e, far);
    int zero_paths = 0;
    for (int p = 0; p < e.num_paths; ++p)
        if (c.at(p, 512) <= 1e-12) ++zero_paths;
    CHECK(double(zero_paths) / e.num_paths >= 0.999);
}

TEST_CASE("deterministic path accumulates no local time off its level") {
    PathEnsemble e(TimeGrid(1.0, 64), kUnitSigma, 0.7, 4, 1);
    for (int p = 0; p < 4; ++p)
        for (int k = 0; k <= 64; ++k) e.x(p, k) = 0.7; // dB == 0
    LocalTimeCurve c = tanaka_local_time(e, 0.2);
    for (int p = 0; p < 4; ++p) CHECK(c.at(p, 64) == 0.0);
}

TEST_CASE("local time curves are nonnegative and nondecreasing") {
    PathEnsemble e = brownian(500, 1024, 7);
    for (double a : {0.0, 0.3}) {
        LocalTimeCurve c = tanaka_local_time(e, a);
        for (int p = 0; p < e.num_paths; p += 17)
            for (int k = 0; k < 1024; ++k) {
                CHECK(c.at(p, k) >= 0.0);
                CHECK(c.at(p, k + 1) >= c.at(p, k) - 1e-12);
            }
    }
    std::vector<double> serial = ref::tanaka_curve_serial(e, 0.0);
    CHECK(tanaka_local_time(e, 0.0).L == serial);
}

TEST_CASE("smooth-identity integral") {
    PathEnsemble e = brownian(200, 1024, 13);

    SUBCASE("constants integrate to zero exactly") {
        LocalTimeIntegral v = lt_integral_smooth(integrand_const(3.0), e, 0.0, 1.0);
        for (double x : v.value) CHECK(x == 0.0);
    }
    SUBCASE("sin z reproduces the direct substitution") {
        LocalTimeIntegral v = lt_integral_smooth(integrand_sin(), e, 0.0, 1.0);
        for (int p = 0; p < e.num_paths; p += 41) {
            double want = 0.0;
            for (int k = 0; k < 1024; ++k) want -= std::cos(e.x(p, k)) * e.grid.dt;
            CHECK(v.value[p] == doctest::Approx(want).epsilon(1e-12));
        }
    }
    SUBCASE("f(t,z) = z gives -|sigma|^2 (t - s) pathwise") {
        Integrand lin{[](double, double z) { return z; }, [](double, double) { return 1.0; },
                      "z"};
        LocalTimeIntegral v = lt_integral_smooth(lin, e, 0.25, 0.75);
        for (int p = 0; p < e.num_paths; p += 23)
            CHECK(v.value[p] == doctest::Approx(-0.5).epsilon(1e-9));
    }
    SUBCASE("linearity holds exactly per path") {
        Integrand combo{[](double t, double z) { return 2.0 * std::sin(z) - 3.0 * std::cos(z); },
                        [](double t, double z) { return 2.0 * std::cos(z) + 3.0 * std::sin(z); },
                        "combo"};
        LocalTimeIntegral a = lt_integral_smooth(integrand_sin(), e, 0.0, 1.0);
        LocalTimeIntegral b = lt_integral_smooth(integrand_cos(), e, 0.0, 1.0);
        LocalTimeIntegral c = lt_integral_smooth(combo, e, 0.0, 1.0);
        for (int p = 0; p < e.num_paths; p += 29)
            CHECK(c.value[p] ==
                  doctest::Approx(2.0 * a.value[p] - 3.0 * b.value[p]).epsilon(1e-10));
    }
    SUBCASE("missing derivative demands the reversal estimator") {
        Integrand f{[](double, double z) { return z > 0 ? 1.0 : 0.0; }, nullptr, "step"};
        CHECK_THROWS(lt_integral_smooth(f, e, 0.0, 1.0));
    }
}

TEST_CASE("sign calibration finds a unique pair") {
    PathEnsemble e = brownian(2000, 2048, 303);
    SignScale s = calibrated(e);
    CHECK(s.calibrated);
    CHECK(s.mismatch < 0.05);
    CHECK(s.runner_up_ratio >= 3.0);

    SUBCASE("degenerate family is rejected") {
        std::vector<Integrand> zeros = {integrand_const(0.0), integrand_const(0.0),
                                        integrand_const(0.0)};
        CHECK_THROWS(calibrate_reversal_signs(e, zeros));
    }
    SUBCASE("uncalibrated engine is rejected") {
        SignScale raw;
        CHECK_THROWS(lt_integral_reversal(integrand_sin(), e, 0.0, 1.0, raw));
    }
}

TEST_CASE("reversal estimator agrees with the smooth identity") {
    PathEnsemble e = brownian(4000, 4096, 404);
    SignScale s = calibrated(e);

    SUBCASE("constant integrand cancels exactly after calibration") {
        LocalTimeIntegral rev = lt_integral_reversal(integrand_const(1.0), e, 0.0, 1.0, s);
        CHECK(rms(rev.value) <= 1e-10);
    }
    SUBCASE("sin z within five percent relative RMS") {
        LocalTimeIntegral rev = lt_integral_reversal(integrand_sin(), e, 0.0, 1.0, s);
        LocalTimeIntegral smo = lt_integral_smooth(integrand_sin(), e, 0.0, 1.0);
        std::vector<double> diff(e.num_paths);
        for (int p = 0; p < e.num_paths; ++p) diff[p] = rev.value[p] - smo.value[p];
        CHECK(rms(diff) <= 0.05 * rms(smo.value));
    }
    SUBCASE("drifted ensembles are rejected by the strict variant") {
        DriftSpec d;
        d.b1 = [](double, double) { return 0.3; };
        d.bound_b1 = 0.3;
        PathEnsemble drifted = simulate_paths(d, kUnitSigma, zero_control(256),
                                              TimeGrid(1.0, 256), 0.0, 16, 5);
        CHECK_THROWS(lt_integral_reversal(integrand_sin(), drifted, 0.0, 1.0, s));
        CHECK_NOTHROW(
            lt_integral_reversal_transported(integrand_sin(), drifted, 0.0, 1.0, s));
    }
}

TEST_CASE("irregular integrand is stable under grid refinement") {
    Integrand step{[](double, double z) { return z > 0.0 ? 1.0 : 0.0; }, nullptr, "step"};
    auto rms_at = [&](int N) {
        PathEnsemble e = brownian(2000, N, 505);
        SignScale s = calibrated(e);
        LocalTimeIntegral v = lt_integral_reversal(step, e, 0.0, 1.0, s);
        return rms(v.value);
    };
    const double r1 = rms_at(4096), r2 = rms_at(8192);
    CHECK(std::abs(r1 - r2) <= 0.10 * r1);
}

TEST_CASE("Hx norm quadrature") {
    SUBCASE("zero integrand") {
        HxNormReport r = hx_norm(integrand_const(0.0), 0.0);
        CHECK(r.norm_value == 0.0);
        CHECK(r.finite);
    }
    SUBCASE("unit integrand matches the closed-form Gaussian integrals") {
        HxNormReport r = hx_norm(integrand_const(1.0), 0.0);
        CHECK(r.finite);
        CHECK(r.term1 == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(r.term2 == doctest::Approx(4.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-6));
    }
    SUBCASE("bounded integrands are dominated by the constant") {
        const double c = 0.7;
        Integrand f{[c](double, double z) { return c * std::sin(3 * z); }, nullptr, "csin"};
        HxNormReport r = hx_norm(f, 0.4);
        HxNormReport unit = hx_norm(integrand_const(1.0), 0.4);
        CHECK(r.finite);
        CHECK(r.norm_value <= c * unit.norm_value + 1e-9);
    }
}

TEST_CASE("occupation-density identity at fine resolution") {
    PathEnsemble e = brownian(200, 8192, 606);
    std::vector<double> ratio = occupation_identity_ratio(e, 8192);
    const MeanSE ms = mean_se(ratio);
    CHECK(std::abs(ms.mean - 1.0) <= 0.05);
    std::vector<double> err(ratio.size());
    for (std::size_t i = 0; i < ratio.size(); ++i) err[i] = std::abs(ratio[i] - 1.0);
    std::nth_element(err.begin(), err.begin() + err.size() / 2, err.end());
    CHECK(err[err.size() / 2] <= 0.05);
}

TEST_CASE("mollification differences vanish in the local-time integral") {
    // E|F_{1,n}|^2 with F_{1,n} the reversal integral of b_{1,n} - b_1.
    auto b1 = [](double, double z) { return z > 0.0 ? 1.0 : 0.0; };
    PathEnsemble e = brownian(2000, 2048, 707);
    SignScale s = calibrated(e);
    std::vector<double> second_moment;
    for (int n : {4, 16, 64}) {
        MollifiedDrift m = mollify_drift(b1, 1.0, n);
        Integrand diff{[m, b1](double t, double z) { return m.b1n(t, z) - b1(t, z); }, nullptr,
                       "b1n-b1"};
        LocalTimeIntegral v = lt_integral_reversal(diff, e, 0.0, 1.0, s);
        double acc = 0.0;
        for (double x : v.value) acc += x * x;
        second_moment.push_back(acc / v.value.size());
    }
    CHECK(second_moment[1] < second_moment[0]);
    CHECK(second_moment[2] < second_moment[1]);
    CHECK(second_moment[2] <= second_moment[0] / 4.0);
}

TEST_CASE("exponential local-time moments stay bounded") {
    // Bounded kink drift (Lipschitz, derivative jumps): mollifications are
    // uniformly bounded and the exponential moments settle quickly, unlike
    // the unit step whose lambda = -2 moment is dominated by local-time
    // tails at every level.
    PathEnsemble e = brownian(2000, 2048, 808);
    SignScale s = calibrated(e);
    auto bound_for = [&](double height) {
        auto b1 = [height](double, double z) {
            return height * std::clamp(2.0 * z, -1.0, 1.0);
        };
        double worst = 0.0;
        std::vector<double> per_level;
        for (int n : {4, 16, 64}) {
            MollifiedDrift m = mollify_drift(b1, height, n);
            Integrand f{m.b1n, m.db1n_dx, "b1n"};
            LocalTimeIntegral v = lt_integral_reversal(f, e, 0.0, 1.0, s);
            double level_worst = 0.0;
            for (double lambda : {-2.0, -1.0, 1.0, 2.0}) {
                std::vector<double> ex(v.value.size());
                for (std::size_t p = 0; p < v.value.size(); ++p)
                    ex[p] = std::exp(lambda * v.value[p]);
                const double mean = mean_se(ex).mean;
                CHECK(std::isfinite(mean));
                level_worst = std::max(level_worst, mean);
            }
            per_level.push_back(level_worst);
            worst = std::max(worst, level_worst);
        }
        // stability across levels: each within 20% of their common mean
        const double avg = (per_level[0] + per_level[1] + per_level[2]) / 3.0;
        for (double v : per_level) CHECK(std::abs(v - avg) <= 0.20 * avg);
        return worst;
    };
    const double b_half = bound_for(0.5);
    const double b_one = bound_for(1.0);
    CHECK(b_one >= b_half);
}
