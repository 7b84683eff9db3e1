// Timing comparison of the OpenMP kernels against their serial references,
// plus a bitwise agreement check on each pair.

#include "ismp/benchmarks.hpp"
#include "ismp/localtime.hpp"
#include "ismp/serial_ref.hpp"

#include <chrono>
#include <cstdio>
#include <omp.h>

using namespace ismp;

namespace {

template <class F>
double time_ms(F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

} // namespace

int main(int argc, char** argv) {
    int M = 4000, N = 2048;
    if (argc > 1) M = std::atoi(argv[1]);
    if (argc > 2) N = std::atoi(argv[2]);
    std::printf("paths %d, steps %d, omp max threads %d\n", M, N, omp_get_max_threads());

    ControlProblem prob = make_b2(1.0, N);
    ControlSpec c = ControlSpec::constant(0.2, N, prob.box);

    PathEnsemble par = simulate_paths(prob.drift, prob.sigma, c, prob.grid, prob.x0, M, 7);
    PathEnsemble ser =
        ref::simulate_paths_serial(prob.drift, prob.sigma, c, prob.grid, prob.x0, M, 7);
    const double t_sim_par = time_ms([&] {
        PathEnsemble e = simulate_paths(prob.drift, prob.sigma, c, prob.grid, prob.x0, M, 7);
        (void)e;
    });
    const double t_sim_ser = time_ms([&] {
        PathEnsemble e =
            ref::simulate_paths_serial(prob.drift, prob.sigma, c, prob.grid, prob.x0, M, 7);
        (void)e;
    });
    std::printf("simulate_paths   omp %8.1f ms  serial %8.1f ms  speedup %.2fx  bitwise %s\n",
                t_sim_par, t_sim_ser, t_sim_ser / t_sim_par,
                bitwise_equal(par.X, ser.X) ? "OK" : "MISMATCH");

    LocalTimeCurve lt_par;
    std::vector<double> lt_ser;
    const double t_lt_par = time_ms([&] { lt_par = tanaka_local_time(par, 0.0); });
    const double t_lt_ser = time_ms([&] { lt_ser = ref::tanaka_curve_serial(par, 0.0); });
    std::printf("tanaka_localtime omp %8.1f ms  serial %8.1f ms  speedup %.2fx  bitwise %s\n",
                t_lt_par, t_lt_ser, t_lt_ser / t_lt_par,
                bitwise_equal(lt_par.L, lt_ser) ? "OK" : "MISMATCH");
    return 0;
}
