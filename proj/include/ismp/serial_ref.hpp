#pragma once

// Plain single-threaded reference implementations of the OpenMP kernels.
// Kept deliberately simple; the test suite asserts bitwise agreement with
// the parallel versions and the bench tool compares their timings.

#include "ismp/ensemble.hpp"

#include <vector>

namespace ismp::ref {

PathEnsemble simulate_paths_serial(const DriftSpec& drift, const SigmaVector& sigma,
                                   const ControlSpec& control, const TimeGrid& grid, double x0,
                                   int num_paths, std::uint64_t seed);

// Tanaka-Meyer local time at level a, per path, serial loop.
std::vector<double> tanaka_curve_serial(const PathEnsemble& e, double a);

} // namespace ismp::ref
