#include "ismp/experiments.hpp"

#include "ismp/benchmarks.hpp"
#include "ismp/manifest.hpp"
#include "ismp/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

namespace fs = std::filesystem;

namespace ismp {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct ArtifactWriter {
    fs::path dir;
    std::vector<std::string> files;

    std::ofstream open(const std::string& name) {
        fs::create_directories(dir);
        std::ofstream f(dir / name);
        if (!f) throw std::runtime_error("cannot write artifact: " + (dir / name).string());
        files.push_back(name);
        return f;
    }
};

Integrand make_integrand_const(double c) {
    return {[c](double, double) { return c; }, [](double, double) { return 0.0; }, "const"};
}

std::vector<Integrand> default_family() {
    return {make_integrand_const(1.0),
            {[](double, double z) { return std::sin(z); },
             [](double, double z) { return std::cos(z); }, "sin"},
            {[](double, double z) { return std::cos(z); },
             [](double, double z) { return -std::sin(z); }, "cos"}};
}

} // namespace

SignScale default_calibration(int num_paths, int num_steps, std::uint64_t seed, double T) {
    TimeGrid grid(T, num_steps);
    SigmaVector sigma({1.0});
    ControlSpec zero = ControlSpec::constant(0.0, num_steps, Box::interval(-1.0, 1.0));
    PathEnsemble e =
        simulate_paths(DriftSpec{}, sigma, zero, grid, 0.0, num_paths, seed);
    return calibrate_reversal_signs(e, default_family());
}

AdjointStabilityStudy adjoint_stability_study(const ControlProblem& prob,
                                              const ControlSpec& control,
                                              const std::vector<int>& levels,
                                              const AdjointConfig& cfg) {
    AdjointStabilityStudy out;
    AdjointPipeline ref = run_adjoint_pipeline(prob, control, 0, cfg);
    const int N = prob.grid.num_steps;
    for (int n : levels) {
        AdjointPipeline pn = run_adjoint_pipeline(prob, control, n, cfg);
        double acc = 0.0;
        for (int k = 0; k <= N; ++k) {
            double g = 0.0;
            for (int p = 0; p < cfg.num_paths; ++p)
                g += std::abs(pn.adjoint.at(p, k) - ref.adjoint.at(p, k));
            acc += g / cfg.num_paths;
        }
        out.levels.push_back(n);
        out.y_gap.push_back(acc / (N + 1));
    }
    return out;
}

ControlProblem problem_from_config(const Config& cfg) {
    const double T = cfg.get_double("grid", "T", 1.0);
    const int N = static_cast<int>(cfg.get_int("grid", "N", 512));

    const std::string bench = cfg.get_str("experiment", "benchmark", "");
    ControlProblem prob = [&]() -> ControlProblem {
        if (bench == "B1") return make_b1(T, N, cfg.get_double("cost", "c", 0.5));
        if (bench == "B2") return make_b2(T, N);
        if (bench == "B3") return make_b3(T, N, cfg.get_double("drift", "theta", 0.5));
        if (!bench.empty()) throw config_error("unknown benchmark in config: " + bench);

        // Custom problem: drift builtin or table, linear-bequest cost family.
        ControlProblem p = make_b1(T, N, cfg.get_double("cost", "c", 0.5));
        p.name = "custom";
        const std::string builtin = cfg.get_str("drift", "builtin", "none");
        if (builtin == "step") {
            const double theta = cfg.get_double("drift", "theta", 0.5);
            p.drift.b1 = [theta](double, double x) { return x > 0.0 ? theta : 0.0; };
            p.drift.bound_b1 = std::abs(theta);
        } else if (builtin == "tanh") {
            const double scale = cfg.get_double("drift", "scale", 5.0);
            p.drift.b1 = [scale](double, double x) { return std::tanh(scale * x); };
            p.drift.db1_dx = [scale](double, double x) {
                const double c = std::cosh(scale * x);
                return scale / (c * c);
            };
            p.drift.bound_b1 = 1.0;
        } else if (builtin == "table") {
            // Piecewise-constant b1: value v_i on [x_i, x_{i+1}), v_0 below.
            auto xs = cfg.get_doubles("drift", "table_x");
            auto vs = cfg.get_doubles("drift", "table_v");
            if (vs.size() != xs.size() + 1)
                throw config_error("drift table needs one more value than breakpoints");
            double bound = 0.0;
            for (double v : vs) bound = std::max(bound, std::abs(v));
            p.drift.b1 = [xs, vs](double, double x) {
                std::size_t i = 0;
                while (i < xs.size() && x >= xs[i]) ++i;
                return vs[i];
            };
            p.drift.bound_b1 = bound;
        } else if (builtin != "none") {
            throw config_error("unknown drift builtin: " + builtin);
        }
        return p;
    }();

    if (bench.empty()) {
        // custom problems must spell out the diffusion
        prob.sigma = SigmaVector(cfg.get_doubles("sigma", "values"));
    } else if (cfg.has("sigma", "values")) {
        prob.sigma = SigmaVector(cfg.get_doubles("sigma", "values"));
    }
    prob.x0 = cfg.get_double("grid", "x0", 0.0);
    if (cfg.has("control", "lo") || cfg.has("control", "hi"))
        prob.box = Box::interval(cfg.get_double("control", "lo", -10.0),
                                 cfg.get_double("control", "hi", 10.0));
    return prob;
}

ControlSpec control_from_config(const Config& cfg, const ControlProblem& prob) {
    const int N = prob.grid.num_steps;
    const std::string init = cfg.get_str("control", "init", "0");
    ControlSpec c = [&] {
        if (init == "optimal") {
            const BenchmarkInfo& b = benchmark(cfg.get_str("experiment", "benchmark"));
            if (!b.has_closed_form)
                throw config_error("control init=optimal requires a closed-form benchmark");
            std::vector<double> lat(N);
            for (int k = 0; k < N; ++k) lat[k] = b.optimal_control(prob.grid.t(k));
            return ControlSpec::open_loop_lattice(std::move(lat), 1, N, prob.box);
        }
        if (cfg.has("control", "values")) {
            auto vals = cfg.get_doubles("control", "values");
            if (vals.size() != static_cast<std::size_t>(N) * prob.m)
                throw config_error("control values length does not match the grid");
            return ControlSpec::open_loop_lattice(std::move(vals), prob.m, N, prob.box);
        }
        double v = 0.0;
        try {
            v = std::stod(init);
        } catch (const std::exception&) {
            throw config_error("control init must be a number, 'optimal', or use values=");
        }
        return ControlSpec::constant(v, N, prob.box);
    }();

    // Optional deliberate perturbation on [0, T/2] for constructed failures.
    const double perturb = cfg.get_double("control", "perturb", 0.0);
    if (perturb != 0.0) {
        for (int k = 0; k < N; ++k)
            if (prob.grid.t(k) < 0.5 * prob.grid.horizon_T)
                for (int i = 0; i < prob.m; ++i)
                    c.lattice[static_cast<std::size_t>(k) * prob.m + i] += perturb;
        for (int k = 0; k < N; ++k) {
            std::span<double> row{c.lattice.data() + static_cast<std::size_t>(k) * prob.m,
                                  static_cast<std::size_t>(prob.m)};
            prob.box.project(row);
        }
    }
    return c;
}

namespace {

RegressionBasis basis_from_config(const Config& cfg, const ControlProblem& prob) {
    RegressionBasis basis;
    basis.degree = static_cast<int>(cfg.get_int("adjoint", "degree", 4));
    const bool irregular = prob.drift.b1 && !prob.drift.db1_dx;
    basis.augment_abs = cfg.get_int("adjoint", "augment", irregular ? 1 : 0) != 0;
    basis.augment_indicator = basis.augment_abs;
    basis.abs_center = prob.x0;
    basis.indicator_threshold = 0.0;
    return basis;
}

void write_control_csv(ArtifactWriter& w, const ControlProblem& prob, const ControlSpec& c) {
    auto f = w.open("control.csv");
    f << "k,t";
    for (int i = 0; i < prob.m; ++i) f << ",a" << i;
    f << "\n";
    for (int k = 0; k < prob.grid.num_steps; ++k) {
        f << k << "," << num(prob.grid.t(k));
        for (int i = 0; i < prob.m; ++i)
            f << "," << num(c.lattice[static_cast<std::size_t>(k) * prob.m + i]);
        f << "\n";
    }
}

void write_smp_report_csv(ArtifactWriter& w, const std::string& name, const SMPReport& r,
                          const TimeGrid& grid) {
    auto f = w.open(name);
    f << "k,t,profile,tol\n";
    for (std::size_t k = 0; k < r.profile.size(); ++k)
        f << k << "," << num(grid.t(static_cast<int>(k))) << "," << num(r.profile[k]) << ","
          << num(r.profile_tol[k]) << "\n";
}

int run_simulate(const Config& cfg, const ControlProblem& prob, ArtifactWriter& w,
                 RunManifest& man) {
    const int M = static_cast<int>(cfg.get_int("mc", "paths", 1000));
    const int level = static_cast<int>(cfg.get_int("drift", "mollify_n", 0));
    ControlSpec c = control_from_config(cfg, prob);
    PathEnsemble e = simulate_paths(prob.drift_at_level(level), prob.sigma, c, prob.grid, prob.x0,
                                    M, man.seed);
    {
        auto f = w.open("ensemble.csv");
        ensemble_to_csv(e, f);
    }
    ensemble_write_binary(e, (w.dir / "ensemble.bin").string());
    w.files.push_back("ensemble.bin");
    NoiseSanity ns = noise_sanity_check(e);
    auto f = w.open("summary.txt");
    f << "paths " << M << "\nnoise_mean_abs " << num(ns.worst_mean_abs) << " (tol "
      << num(ns.mean_tol) << ")\nnoise_var_rel_err " << num(ns.worst_var_rel_err)
      << "\nnoise_pass " << (ns.pass ? 1 : 0) << "\n";
    return ns.pass ? 0 : 2;
}

int run_localtime(const Config& cfg, const ControlProblem& prob, ArtifactWriter& w,
                  RunManifest& man) {
    const int M = static_cast<int>(cfg.get_int("mc", "paths", 1000));
    ControlSpec c = control_from_config(cfg, prob);
    PathEnsemble e =
        simulate_paths(prob.drift, prob.sigma, c, prob.grid, prob.x0, M, man.seed);
    const double a = cfg.get_double("localtime", "level", 0.0);
    LocalTimeCurve curve = tanaka_local_time(e, a);
    {
        auto f = w.open("localtime.csv");
        f << "path,k,value\n";
        for (int p = 0; p < M; ++p)
            for (int k = 0; k <= prob.grid.num_steps; ++k)
                f << p << "," << k << "," << num(curve.at(p, k)) << "\n";
    }
    {
        auto f = w.open("occupation.csv");
        f << "path,ratio\n";
        auto ratios = occupation_identity_ratio(e, prob.grid.num_steps);
        for (int p = 0; p < M; ++p) f << p << "," << num(ratios[p]) << "\n";
    }
    return 0;
}

int run_flow(const Config& cfg, const ControlProblem& prob, ArtifactWriter& w, RunManifest& man) {
    const int M = static_cast<int>(cfg.get_int("mc", "paths", 2000));
    const int level = static_cast<int>(cfg.get_int("drift", "mollify_n", 0));
    const double t = cfg.get_double("flow", "window_t", 0.0);
    const double s = cfg.get_double("flow", "window_s", prob.grid.horizon_T);
    const double h = cfg.get_double("flow", "h", 1e-4);
    ControlSpec c = control_from_config(cfg, prob);
    const DriftSpec d = prob.drift_at_level(level);
    PathEnsemble e = simulate_paths(d, prob.sigma, c, prob.grid, prob.x0, M, man.seed);

    std::vector<FlowEstimate> ests;
    if (d.has_b1_derivative()) ests.push_back(flow_smooth_exp(d, e, t, s));
    ests.push_back(flow_finite_difference(d, c, e, h, t, s, true));
    man.calibration = default_calibration(
        static_cast<int>(cfg.get_int("calibration", "paths", 2000)),
        static_cast<int>(cfg.get_int("calibration", "steps", 2048)), man.seed + 1);
    man.has_calibration = true;
    ests.push_back(flow_localtime_rep(d, e, man.calibration, t, s));

    {
        auto f = w.open("flow.csv");
        f << "path,estimator,t,s,value\n";
        for (const auto& est : ests)
            for (int p = 0; p < M; ++p)
                f << p << "," << flow_estimator_name(est.estimator) << "," << num(t) << ","
                  << num(s) << "," << num(est.phi[p]) << "\n";
    }
    auto f = w.open("summary.txt");
    for (std::size_t i = 0; i < ests.size(); ++i)
        for (std::size_t j = i + 1; j < ests.size(); ++j) {
            std::vector<double> diff(M);
            for (int p = 0; p < M; ++p) diff[p] = ests[i].phi[p] - ests[j].phi[p];
            const double mag = rms(ests[i].phi);
            f << flow_estimator_name(ests[i].estimator) << " vs "
              << flow_estimator_name(ests[j].estimator) << " rel_rms "
              << num(rms(diff) / std::max(mag, 1e-300)) << "\n";
        }
    return 0;
}

int run_adjoint(const Config& cfg, const ControlProblem& prob, ArtifactWriter& w,
                RunManifest& man) {
    const int M = static_cast<int>(cfg.get_int("mc", "paths", 4000));
    const int level = static_cast<int>(cfg.get_int("drift", "mollify_n", 0));
    ControlSpec c = control_from_config(cfg, prob);
    AdjointConfig acfg;
    acfg.basis = basis_from_config(cfg, prob);
    acfg.num_paths = M;
    acfg.seed = man.seed;
    if (level == 0 && prob.drift.b1 && !prob.drift.db1_dx) {
        man.calibration = default_calibration();
        man.has_calibration = true;
        acfg.signs = man.calibration;
    }
    AdjointPipeline pipe = run_adjoint_pipeline(prob, c, level, acfg);
    {
        auto f = w.open("adjoint.csv");
        f << "path,k,Y\n";
        for (int p = 0; p < M; ++p)
            for (int k = 0; k <= prob.grid.num_steps; ++k)
                f << p << "," << k << "," << num(pipe.adjoint.at(p, k)) << "\n";
    }
    if (pipe.drift_used.has_b1_derivative()) {
        BsdeResidualReport rep = bsde_residual_check(pipe.adjoint, pipe.ensemble,
                                                     pipe.drift_used, prob.cost);
        auto f = w.open("residuals.txt");
        f << "k mean_residual se\n";
        for (std::size_t k = 0; k < rep.mean.size(); ++k)
            f << k << " " << num(rep.mean[k]) << " " << num(rep.se[k]) << "\n";
    }
    return 0;
}

int run_optimize(const Config& cfg, const ControlProblem& prob, ArtifactWriter& w,
                 RunManifest& man) {
    const int M = static_cast<int>(cfg.get_int("mc", "paths", 10000));
    OptimizeOptions opt;
    opt.iterations = static_cast<int>(cfg.get_int("optimize", "iterations", 200));
    opt.rho0 = cfg.get_double("optimize", "rho0", 0.5);
    opt.level = static_cast<int>(cfg.get_int("drift", "mollify_n", 0));
    opt.adjoint.basis = basis_from_config(cfg, prob);
    opt.adjoint.num_paths = M;
    opt.adjoint.seed = man.seed;
    if (opt.level == 0 && prob.drift.b1 && !prob.drift.db1_dx) {
        man.calibration = default_calibration();
        man.has_calibration = true;
        opt.adjoint.signs = man.calibration;
    }
    ControlSpec init = control_from_config(cfg, prob);
    OptimizeResult res = optimize_control(prob, init, opt);

    {
        auto f = w.open("trace.csv");
        f << "iter,J,se,sup_move\n";
        for (std::size_t i = 0; i < res.trace.j.size(); ++i)
            f << i << "," << num(res.trace.j[i]) << "," << num(res.trace.j_se[i]) << ","
              << num(res.trace.sup_move[i]) << "\n";
    }
    write_control_csv(w, prob, res.control);

    AdjointPipeline pipe = run_adjoint_pipeline(prob, res.control, opt.level, opt.adjoint);
    SMPReport rep = verify_necessary(prob, res.control, pipe, prob.box.corners_and_center(),
                                     cfg.get_double("verify", "tol_floor", 1e-3));
    write_smp_report_csv(w, "smp_report.csv", rep, prob.grid);
    auto f = w.open("summary.txt");
    f << "iterations " << res.trace.j.size() << "\nfinal_J "
      << num(res.trace.j.empty() ? 0.0 : res.trace.j.back()) << "\nnecessary_pass "
      << (rep.pass ? 1 : 0) << "\nworst_violation " << num(rep.worst_violation) << "\n";
    if (res.trace.aborted) f << "aborted " << res.trace.message << "\n";
    return rep.pass && !res.trace.aborted ? 0 : 2;
}

int run_verify(const Config& cfg, const ControlProblem& prob, ArtifactWriter& w,
               RunManifest& man) {
    const int M = static_cast<int>(cfg.get_int("mc", "paths", 10000));
    const int level = static_cast<int>(cfg.get_int("drift", "mollify_n", 0));
    ControlSpec c = control_from_config(cfg, prob);
    AdjointConfig acfg;
    acfg.basis = basis_from_config(cfg, prob);
    acfg.num_paths = M;
    acfg.seed = man.seed;
    if (level == 0 && prob.drift.b1 && !prob.drift.db1_dx) {
        man.calibration = default_calibration();
        man.has_calibration = true;
        acfg.signs = man.calibration;
    }
    AdjointPipeline pipe = run_adjoint_pipeline(prob, c, level, acfg);
    const double floor = cfg.get_double("verify", "tol_floor", 1e-3);
    const std::string which = cfg.get_str("verify", "which", "necessary");

    bool ok = true;
    auto f = w.open("summary.txt");
    if (which == "necessary" || which == "both") {
        SMPReport rep =
            verify_necessary(prob, c, pipe, prob.box.corners_and_center(), floor);
        write_smp_report_csv(w, "smp_necessary.csv", rep, prob.grid);
        f << "necessary_pass " << (rep.pass ? 1 : 0) << " worst " << num(rep.worst_violation)
          << " tol " << num(rep.tolerance) << "\n";
        ok = ok && rep.pass;
    }
    if (which == "sufficient" || which == "both") {
        SMPReport rep = verify_sufficient(prob, c, pipe, ConcavityProbeConfig{}, floor);
        write_smp_report_csv(w, "smp_sufficient.csv", rep, prob.grid);
        f << "sufficient_pass " << (rep.pass ? 1 : 0) << " hypothesis_ok "
          << (rep.hypothesis_ok ? 1 : 0) << " " << rep.message << "\n";
        ok = ok && rep.pass;
    }
    return ok ? 0 : 2;
}

int run_study(const Config& cfg, const ControlProblem& prob, ArtifactWriter& w,
              RunManifest& man) {
    const int M = static_cast<int>(cfg.get_int("mc", "paths", 4000));
    const std::vector<int> levels = cfg.get_ints("study", "levels", {4, 16, 64});
    const std::string kind = cfg.get_str("study", "kind", "cost");
    ControlSpec c = control_from_config(cfg, prob);

    if (kind == "mollified") {
        ConvergenceStudy st = mollified_convergence_study(prob, c, c, levels, M, man.seed);
        auto f = w.open("study.csv");
        f << "n,path_gap,bound_term,delta\n";
        for (std::size_t i = 0; i < st.levels.size(); ++i)
            f << st.levels[i] << "," << num(st.path_gap[i]) << "," << num(st.bound_term[i]) << ","
              << num(st.delta) << "\n";
        return 0;
    }
    if (kind == "cost") {
        ConvergenceStudy st = cost_convergence_study(prob, c, levels, M, man.seed);
        auto f = w.open("study.csv");
        f << "n,cost_gap,cost_gap_abs,se\n";
        for (std::size_t i = 0; i < st.levels.size(); ++i)
            f << st.levels[i] << "," << num(st.cost_gap[i]) << "," << num(st.cost_gap_abs[i])
              << "," << num(st.cost_gap_se[i]) << "\n";
        return 0;
    }
    if (kind == "flow") {
        man.calibration = default_calibration();
        man.has_calibration = true;
        std::vector<ControlSpec> per_level(levels.size(), c);
        FlowConvergenceTable t = flow_convergence_study(
            prob.drift, levels, per_level, c, prob.sigma, prob.grid, prob.x0, M, man.seed,
            man.calibration, 0.0, prob.grid.horizon_T);
        auto f = w.open("study.csv");
        f << "n,mse\n";
        for (std::size_t i = 0; i < t.levels.size(); ++i)
            f << t.levels[i] << "," << num(t.mse[i]) << "\n";
        return 0;
    }
    if (kind == "adjoint") {
        AdjointConfig acfg;
        acfg.basis = basis_from_config(cfg, prob);
        acfg.num_paths = M;
        acfg.seed = man.seed;
        man.calibration = default_calibration();
        man.has_calibration = true;
        acfg.signs = man.calibration;
        AdjointStabilityStudy st = adjoint_stability_study(prob, c, levels, acfg);
        auto f = w.open("study.csv");
        f << "n,y_gap\n";
        for (std::size_t i = 0; i < st.levels.size(); ++i)
            f << st.levels[i] << "," << num(st.y_gap[i]) << "\n";
        return 0;
    }
    throw config_error("unknown study kind: " + kind);
}

} // namespace

int run_experiment(const Config& cfg, const std::string& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    const std::string kind = cfg.get_str("experiment", "kind");
    ControlProblem prob = problem_from_config(cfg);

    ArtifactWriter w{fs::path(out_dir), {}};
    RunManifest man;
    man.config_hash = cfg.hash();
    man.seed = static_cast<std::uint64_t>(cfg.get_int("mc", "seed", 1));

    int code = 0;
    if (kind == "simulate") code = run_simulate(cfg, prob, w, man);
    else if (kind == "localtime") code = run_localtime(cfg, prob, w, man);
    else if (kind == "flow") code = run_flow(cfg, prob, w, man);
    else if (kind == "adjoint") code = run_adjoint(cfg, prob, w, man);
    else if (kind == "optimize") code = run_optimize(cfg, prob, w, man);
    else if (kind == "verify") code = run_verify(cfg, prob, w, man);
    else if (kind == "study") code = run_study(cfg, prob, w, man);
    else throw config_error("unknown experiment kind: " + kind);

    man.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    man.produced_files = w.files;
    man.write_json((fs::path(out_dir) / "manifest.json").string());
    return code;
}

int emit_plot_data(const std::string& run_dir, std::ostream& diag) {
    const fs::path dir(run_dir);
    bool any = false;

    if (fs::exists(dir / "trace.csv")) {
        std::ifstream in(dir / "trace.csv");
        std::ofstream out(dir / "plot_trace.csv");
        out << "series,x,y,se\n";
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            std::istringstream is(line);
            std::string iter, j, se, rest;
            std::getline(is, iter, ',');
            std::getline(is, j, ',');
            std::getline(is, se, ',');
            std::getline(is, rest);
            out << "J," << iter << "," << j << "," << se << "\n";
        }
        any = true;
    }
    if (fs::exists(dir / "study.csv")) {
        std::ifstream in(dir / "study.csv");
        std::ofstream out(dir / "plot_study.csv");
        out << "series,x,y,se\n";
        std::string header, line;
        std::getline(in, header);
        std::istringstream hs(header);
        std::vector<std::string> cols;
        std::string col;
        while (std::getline(hs, col, ',')) cols.push_back(col);
        while (std::getline(in, line)) {
            std::istringstream is(line);
            std::vector<std::string> vals;
            while (std::getline(is, col, ',')) vals.push_back(col);
            if (vals.size() < 2) continue;
            const bool has_se = cols.size() > 2 && cols.back() == "se";
            for (std::size_t i = 1; i < vals.size(); ++i) {
                if (has_se && i + 1 == vals.size()) break;
                out << cols[i] << "," << vals[0] << "," << vals[i] << ","
                    << (has_se ? vals.back() : "") << "\n";
            }
        }
        any = true;
    }
    if (fs::exists(dir / "flow.csv")) {
        std::ifstream in(dir / "flow.csv");
        std::map<std::string, std::vector<double>> series;
        std::map<std::string, std::pair<std::string, std::string>> windows;
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::istringstream is(line);
            std::string path, est, t, s, value;
            std::getline(is, path, ',');
            std::getline(is, est, ',');
            std::getline(is, t, ',');
            std::getline(is, s, ',');
            std::getline(is, value, ',');
            series[est].push_back(std::stod(value));
            windows[est] = {t, s};
        }
        std::ofstream out(dir / "plot_flow.csv");
        out << "estimator,t,s,mean,rms\n";
        for (auto& [est, vals] : series) {
            const MeanSE ms = mean_se(vals);
            out << est << "," << windows[est].first << "," << windows[est].second << ","
                << num(ms.mean) << "," << num(rms(vals)) << "\n";
        }
        any = true;
    }
    if (!any) {
        diag << "emit-plot-data: no known artifacts in " << run_dir << "\n";
        return 1;
    }
    return 0;
}

void list_benchmarks(std::ostream& os, bool machine) {
    if (machine) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& b : benchmark_registry()) {
            j.push_back({{"name", b.name},
                         {"description", b.description},
                         {"oracle", b.oracle},
                         {"backs", b.backs},
                         {"T", b.problem.grid.horizon_T},
                         {"N", b.problem.grid.num_steps},
                         {"box_lo", b.problem.box.lo[0]},
                         {"box_hi", b.problem.box.hi[0]},
                         {"has_closed_form", b.has_closed_form}});
        }
        os << j.dump(2) << "\n";
        return;
    }
    for (const auto& b : benchmark_registry()) {
        os << b.name << ": " << b.description << "\n"
           << "  oracle: " << b.oracle << "\n"
           << "  backs: " << b.backs << "\n"
           << "  defaults: T=" << b.problem.grid.horizon_T << " N=" << b.problem.grid.num_steps
           << " box=[" << b.problem.box.lo[0] << "," << b.problem.box.hi[0] << "]\n";
        if (b.has_closed_form) os << "  optimal value: " << b.optimal_value << "\n";
    }
}

} // namespace ismp
