#include "ismp/experiments.hpp"
#include "ismp/manifest.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <omp.h>

namespace {

void apply_thread_cap() {
    if (const char* env = std::getenv("ISMP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
}

} // namespace

int main(int argc, char** argv) {
    apply_thread_cap();

    CLI::App app{"Monte Carlo toolkit for stochastic maximum-principle experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir, run_dir, calib_out = "calibration.json";
    bool machine = false;
    int calib_paths = 4000, calib_steps = 4096;
    std::uint64_t calib_seed = 20240901;

    auto* run = app.add_subcommand("run", "execute an experiment config");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory (default: from config or 'out')");

    auto* lb = app.add_subcommand("list-benchmarks", "print the benchmark registry");
    lb->add_flag("--machine", machine, "emit structured JSON");

    auto* plot = app.add_subcommand("emit-plot-data", "tidy CSVs from a finished run");
    plot->add_option("run_dir", run_dir, "run directory")->required();

    auto* cal = app.add_subcommand("calibrate-localtime",
                                   "calibrate the time-reversal estimator sign pair");
    cal->add_option("--paths", calib_paths, "Monte Carlo paths");
    cal->add_option("--steps", calib_steps, "time steps");
    cal->add_option("--seed", calib_seed, "root seed");
    cal->add_option("--out", calib_out, "output JSON file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            ismp::Config cfg = ismp::Config::parse_file(config_path);
            std::string dir = !out_dir.empty() ? out_dir
                                               : cfg.get_str("experiment", "out", "out");
            const int code = ismp::run_experiment(cfg, dir);
            std::cout << (code == 0 ? "PASS" : code == 2 ? "VERIFICATION FAILED" : "ERROR")
                      << " (exit " << code << "), artifacts in " << dir << "\n";
            return code;
        }
        if (lb->parsed()) {
            ismp::list_benchmarks(std::cout, machine);
            return 0;
        }
        if (plot->parsed()) return ismp::emit_plot_data(run_dir, std::cerr);
        if (cal->parsed()) {
            ismp::SignScale s = ismp::default_calibration(calib_paths, calib_steps, calib_seed);
            ismp::write_calibration_json(s, calib_out);
            std::cout << "sigma_sign " << s.sigma_sign << " kappa_sign " << s.kappa_sign
                      << " mismatch " << s.mismatch << " -> " << calib_out << "\n";
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
