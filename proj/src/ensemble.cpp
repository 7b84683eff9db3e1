#include "ismp/ensemble.hpp"

#include "ismp/rng.hpp"
#include "ismp/stats.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ismp {

PathEnsemble::PathEnsemble(TimeGrid g, SigmaVector s, double x0_, int num_paths_, int control_dim)
    : grid(g), sigma(std::move(s)), x0(x0_), num_paths(num_paths_), m(control_dim) {
    if (num_paths < 1) throw std::invalid_argument("PathEnsemble: need at least one path");
    const std::size_t N = grid.num_steps;
    X.assign(static_cast<std::size_t>(num_paths) * (N + 1), 0.0);
    dB.assign(static_cast<std::size_t>(num_paths) * N * sigma.sigma.size(), 0.0);
}

PathEnsemble simulate_paths(const DriftSpec& drift, const SigmaVector& sigma,
                            const ControlSpec& control, const TimeGrid& grid, double x0,
                            int num_paths, std::uint64_t seed) {
    control.validate();
    if (control.mode == ControlMode::open_loop && control.num_steps != grid.num_steps)
        throw std::invalid_argument("simulate_paths: control lattice does not match grid");

    PathEnsemble e(grid, sigma, x0, num_paths, control.m);
    e.driftless = !drift.b1 && !drift.b2;
    e.seeds = {seed, 0};
    e.control_per_path = control.mode == ControlMode::feedback;
    const int N = grid.num_steps;
    const int d = sigma.dim();
    const double dt = grid.dt;
    const double sqrt_dt = std::sqrt(dt);

    if (e.control_per_path)
        e.control.assign(static_cast<std::size_t>(num_paths) * N * control.m, 0.0);
    else
        e.control = control.lattice;

    // One counter stream per path: bitwise identical output for any number
    // of threads.
    std::string deferred_error;
#pragma omp parallel for schedule(static)
    for (int p = 0; p < num_paths; ++p) {
        try {
            CounterRng rng(seed, static_cast<std::uint64_t>(p));
            std::vector<double> a(control.m);
            double xk = x0;
            e.x(p, 0) = xk;
            for (int k = 0; k < N; ++k) {
                const double t = grid.t(k);
                control.value(k, t, xk, a);
                if (e.control_per_path) {
                    double* dst =
                        e.control.data() + (static_cast<std::size_t>(p) * N + k) * control.m;
                    for (int j = 0; j < control.m; ++j) dst[j] = a[j];
                }
                auto db = e.db_mut(p, k);
                double noise = 0.0;
                for (int i = 0; i < d; ++i) {
                    db[i] = sqrt_dt * rng.normal();
                    noise += sigma.sigma[i] * db[i];
                }
                const double b = e.driftless ? 0.0 : drift.eval(t, xk, a);
                xk += b * dt + noise;
                if (!std::isfinite(xk)) {
                    std::ostringstream os;
                    os << "simulate_paths: non-finite state at (t=" << t << ", x=" << e.x(p, k)
                       << ", path=" << p << ")";
                    throw std::runtime_error(os.str());
                }
                e.x(p, k + 1) = xk;
            }
        } catch (const std::exception& ex) {
#pragma omp critical
            if (deferred_error.empty()) deferred_error = ex.what();
        }
    }
    if (!deferred_error.empty()) throw drift_contract_error(deferred_error);
    return e;
}

NoiseSanity noise_sanity_check(const PathEnsemble& e) {
    NoiseSanity r;
    const int d = e.sigma.dim();
    const int N = e.grid.num_steps;
    const double dt = e.grid.dt;
    const std::size_t n_per_comp = static_cast<std::size_t>(e.num_paths) * N;
    r.mean_tol = 5.0 * std::sqrt(dt) / std::sqrt(static_cast<double>(n_per_comp));
    for (int i = 0; i < d; ++i) {
        double s = 0.0, ss = 0.0;
        for (int p = 0; p < e.num_paths; ++p)
            for (int k = 0; k < N; ++k) {
                const double v = e.db(p, k)[i];
                s += v;
                ss += v * v;
            }
        const double mean = s / static_cast<double>(n_per_comp);
        const double var = ss / static_cast<double>(n_per_comp) - mean * mean;
        r.worst_mean_abs = std::max(r.worst_mean_abs, std::abs(mean));
        r.worst_var_rel_err = std::max(r.worst_var_rel_err, std::abs(var - dt) / dt);
    }
    r.pass = r.worst_mean_abs <= r.mean_tol && r.worst_var_rel_err <= 0.10;
    return r;
}

void ensemble_to_csv(const PathEnsemble& e, std::ostream& os) {
    os << "path,k,t,x";
    for (int j = 0; j < e.m; ++j) os << ",a" << j;
    for (int i = 0; i < e.sigma.dim(); ++i) os << ",dB" << i;
    os << "\n";
    os.precision(17);
    for (int p = 0; p < e.num_paths; ++p)
        for (int k = 0; k <= e.grid.num_steps; ++k) {
            os << p << "," << k << "," << e.grid.t(k) << "," << e.x(p, k);
            if (k < e.grid.num_steps) {
                auto a = e.applied(p, k);
                for (double v : a) os << "," << v;
                for (double v : e.db(p, k)) os << "," << v;
            } else {
                for (int j = 0; j < e.m + e.sigma.dim(); ++j) os << ",";
            }
            os << "\n";
        }
}

namespace {
constexpr char kMagic[5] = {'I', 'S', 'M', 'P', '1'};

template <class T>
void put(std::ofstream& f, const T& v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
void get(std::ifstream& f, T& v) {
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
}
} // namespace

void ensemble_write_binary(const PathEnsemble& e, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("ensemble_write_binary: cannot open " + path);
    f.write(kMagic, 5);
    const std::uint32_t dims[5] = {static_cast<std::uint32_t>(e.num_paths),
                                   static_cast<std::uint32_t>(e.grid.num_steps),
                                   static_cast<std::uint32_t>(e.sigma.dim()),
                                   static_cast<std::uint32_t>(e.m),
                                   e.control_per_path ? 1u : 0u};
    f.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    put(f, e.grid.horizon_T);
    put(f, e.x0);
    f.write(reinterpret_cast<const char*>(e.sigma.sigma.data()),
            static_cast<std::streamsize>(sizeof(double) * e.sigma.sigma.size()));
    auto dump = [&f](const std::vector<double>& v) {
        f.write(reinterpret_cast<const char*>(v.data()),
                static_cast<std::streamsize>(sizeof(double) * v.size()));
    };
    dump(e.X);
    dump(e.dB);
    dump(e.control);
    if (!f) throw std::runtime_error("ensemble_write_binary: write failed for " + path);
}

PathEnsemble ensemble_read_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("ensemble_read_binary: cannot open " + path);
    char magic[5];
    f.read(magic, 5);
    if (!f || std::memcmp(magic, kMagic, 5) != 0)
        throw std::runtime_error("ensemble_read_binary: bad magic in " + path);
    std::uint32_t dims[5];
    f.read(reinterpret_cast<char*>(dims), sizeof(dims));
    double T, x0;
    get(f, T);
    get(f, x0);
    std::vector<double> sig(dims[2]);
    f.read(reinterpret_cast<char*>(sig.data()),
           static_cast<std::streamsize>(sizeof(double) * sig.size()));
    PathEnsemble e(TimeGrid(T, static_cast<int>(dims[1])), SigmaVector(sig), x0,
                   static_cast<int>(dims[0]), static_cast<int>(dims[3]));
    e.control_per_path = dims[4] != 0;
    auto load = [&f](std::vector<double>& v) {
        f.read(reinterpret_cast<char*>(v.data()),
               static_cast<std::streamsize>(sizeof(double) * v.size()));
    };
    load(e.X);
    load(e.dB);
    const std::size_t crows = e.control_per_path
                                  ? static_cast<std::size_t>(e.num_paths) * e.grid.num_steps
                                  : static_cast<std::size_t>(e.grid.num_steps);
    e.control.assign(crows * e.m, 0.0);
    load(e.control);
    if (!f) throw std::runtime_error("ensemble_read_binary: truncated file " + path);
    return e;
}

} // namespace ismp
