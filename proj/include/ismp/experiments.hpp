#pragma once

#include "ismp/config.hpp"
#include "ismp/localtime.hpp"
#include "ismp/smp.hpp"

#include <iosfwd>
#include <string>

namespace ismp {

// Executes the experiment named in [experiment] kind, writing CSV artifacts,
// a summary and a manifest into out_dir. Returns the process exit code:
// 0 pass, 1 error (thrown), 2 verification failure.
int run_experiment(const Config& cfg, const std::string& out_dir);

// Long-format plotting CSVs derived from a completed run directory.
int emit_plot_data(const std::string& run_dir, std::ostream& diag);

void list_benchmarks(std::ostream& os, bool machine);

// Sign calibration on a fresh driftless ensemble with the default family
// {1, sin z, cos z}.
SignScale default_calibration(int num_paths = 4000, int num_steps = 4096,
                              std::uint64_t seed = 20240901, double T = 1.0);

// E|Y_n(t) - Y_ref(t)| averaged over the grid, one row per mollification
// level; the reference adjoint uses the local-time flow on the exact drift.
struct AdjointStabilityStudy {
    std::vector<int> levels;
    std::vector<double> y_gap;
};
AdjointStabilityStudy adjoint_stability_study(const ControlProblem& prob,
                                              const ControlSpec& control,
                                              const std::vector<int>& levels,
                                              const AdjointConfig& cfg);

// Problem/control construction shared by the CLI and the test suites.
ControlProblem problem_from_config(const Config& cfg);
ControlSpec control_from_config(const Config& cfg, const ControlProblem& prob);

} // namespace ismp
