#pragma once

#include "ismp/smp.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ismp {

struct BenchmarkInfo {
    std::string name;
    std::string description;
    std::string oracle; // analytic | cross-estimator | stability
    std::string backs;  // acceptance areas this benchmark supports
    ControlProblem problem;
    std::function<double(double t)> optimal_control; // null when no closed form
    double optimal_value = 0.0;
    bool has_closed_form = false;
};

// B1: linear bequest, quadratic control cost, drift b = a.
// B2: smooth irregularizable drift b1 = tanh(5x).
// B3: discontinuous drift b1 = theta 1_{x>0} (theta = 0.5).
const std::vector<BenchmarkInfo>& benchmark_registry();
const BenchmarkInfo& benchmark(const std::string& name);

// Fresh problem instances with a caller-chosen grid.
ControlProblem make_b1(double T = 1.0, int N = 512, double c = 0.5);
ControlProblem make_b2(double T = 1.0, int N = 512);
ControlProblem make_b3(double T = 1.0, int N = 512, double theta = 0.5);

} // namespace ismp
