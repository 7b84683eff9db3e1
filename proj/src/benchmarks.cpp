#include "ismp/benchmarks.hpp"

#include <cmath>
#include <stdexcept>

namespace ismp {

namespace {

constexpr double kBoxLo = -10.0, kBoxHi = 10.0;

CostSpec linear_bequest_cost(double c) {
    CostSpec cost;
    cost.f = [c](double, double x, std::span<const double> a) {
        double asq = 0.0;
        for (double v : a) asq += v * v;
        return c * x - 0.5 * asq;
    };
    cost.df_dx = [c](double, double, std::span<const double>) { return c; };
    cost.df_da = [](double, double, std::span<const double> a, std::span<double> out) {
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
    };
    cost.g = [](double x) { return x; };
    cost.dg_dx = [](double) { return 1.0; };
    cost.growth_C = 2.0 + 0.5 * kBoxHi * kBoxHi; // covers c|x| + |a|^2/2 + |x| on the box
    cost.g_concave = true;
    return cost;
}

void add_linear_control_drift(DriftSpec& d) {
    d.b2 = [](double, double, std::span<const double> a) { return a[0]; };
    d.db2_dx = [](double, double, std::span<const double>) { return 0.0; };
    d.db2_da = [](double, double, std::span<const double>, std::span<double> out) {
        out[0] = 1.0;
    };
    d.bound_b2 = kBoxHi;
    d.bound_db2 = 1.0;
}

ControlProblem base_problem(const std::string& name, double T, int N, double c) {
    ControlProblem p{name,
                     DriftSpec{},
                     linear_bequest_cost(c),
                     SigmaVector({1.0}),
                     TimeGrid(T, N),
                     0.0,
                     Box::interval(kBoxLo, kBoxHi),
                     1};
    add_linear_control_drift(p.drift);
    return p;
}

} // namespace

ControlProblem make_b1(double T, int N, double c) { return base_problem("B1", T, N, c); }

ControlProblem make_b2(double T, int N) {
    ControlProblem p = base_problem("B2", T, N, 0.5);
    p.drift.b1 = [](double, double x) { return std::tanh(5.0 * x); };
    p.drift.db1_dx = [](double, double x) {
        const double c = std::cosh(5.0 * x);
        return 5.0 / (c * c);
    };
    p.drift.bound_b1 = 1.0;
    return p;
}

ControlProblem make_b3(double T, int N, double theta) {
    ControlProblem p = base_problem("B3", T, N, 0.5);
    p.drift.b1 = [theta](double, double x) { return x > 0.0 ? theta : 0.0; };
    p.drift.bound_b1 = theta;
    return p;
}

const std::vector<BenchmarkInfo>& benchmark_registry() {
    static const std::vector<BenchmarkInfo> reg = [] {
        std::vector<BenchmarkInfo> v;

        const double c = 0.5, T = 1.0;
        BenchmarkInfo b1;
        b1.name = "B1";
        b1.description = "linear bequest, quadratic control cost, drift b = a";
        b1.oracle = "analytic";
        b1.backs = "adjoint closed form; optimizer round trip; verifiers";
        b1.problem = make_b1();
        b1.optimal_control = [c, T](double t) { return 1.0 + c * (T - t); };
        // J* = x0 (1 + cT) + T/2 + c T^2/2 + c^2 T^3/6 (pointwise maximizer
        // alpha(t) = 1 + c(T - t) of the reduced deterministic objective).
        b1.optimal_value = T / 2.0 + c * T * T / 2.0 + c * c * T * T * T / 6.0;
        b1.has_closed_form = true;
        v.push_back(std::move(b1));

        BenchmarkInfo b2;
        b2.name = "B2";
        b2.description = "smooth irregularizable drift b1 = tanh(5x), b2 = a";
        b2.oracle = "cross-estimator";
        b2.backs = "flow estimator triangle; measure-change checks";
        b2.problem = make_b2();
        v.push_back(std::move(b2));

        BenchmarkInfo b3;
        b3.name = "B3";
        b3.description = "discontinuous drift b1 = 0.5 1_{x>0}, b2 = a";
        b3.oracle = "stability";
        b3.backs = "mollified convergence studies; Gateaux checks; Girsanov agreement";
        b3.problem = make_b3();
        v.push_back(std::move(b3));
        return v;
    }();
    return reg;
}

const BenchmarkInfo& benchmark(const std::string& name) {
    for (const auto& b : benchmark_registry())
        if (b.name == name) return b;
    throw std::invalid_argument("unknown benchmark: " + name);
}

} // namespace ismp
