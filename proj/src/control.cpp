#include "ismp/control.hpp"

#include "ismp/ensemble.hpp"
#include "ismp/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace ismp {

std::vector<std::vector<double>> Box::corners_and_center() const {
    const int n = dim();
    std::vector<std::vector<double>> out;
    out.reserve((1u << n) + 1);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<double> c(n);
        for (int i = 0; i < n; ++i) c[i] = (mask >> i) & 1 ? hi[i] : lo[i];
        out.push_back(std::move(c));
    }
    std::vector<double> center(n);
    for (int i = 0; i < n; ++i) center[i] = 0.5 * (lo[i] + hi[i]);
    out.push_back(std::move(center));
    return out;
}

ControlSpec ControlSpec::constant(double value, int num_steps, Box box) {
    ControlSpec c;
    c.mode = ControlMode::open_loop;
    c.m = box.dim();
    c.box = std::move(box);
    c.num_steps = num_steps;
    c.lattice.assign(static_cast<std::size_t>(num_steps) * c.m, value);
    double sup = 0.0;
    for (int i = 0; i < c.m; ++i)
        sup += std::max(c.box.lo[i] * c.box.lo[i], c.box.hi[i] * c.box.hi[i]);
    c.admissibility_M = 2.0 * sup + 1.0;
    c.validate();
    return c;
}

ControlSpec ControlSpec::open_loop_lattice(std::vector<double> lattice, int m, int num_steps,
                                           Box box) {
    ControlSpec c;
    c.mode = ControlMode::open_loop;
    c.m = m;
    c.box = std::move(box);
    c.num_steps = num_steps;
    c.lattice = std::move(lattice);
    double sup = 0.0;
    for (int i = 0; i < m; ++i)
        sup += std::max(c.box.lo[i] * c.box.lo[i], c.box.hi[i] * c.box.hi[i]);
    c.admissibility_M = 2.0 * sup + 1.0;
    c.validate();
    return c;
}

ControlSpec ControlSpec::feedback(FeedbackRule rule, int m, Box box) {
    ControlSpec c;
    c.mode = ControlMode::feedback;
    c.m = m;
    c.box = std::move(box);
    c.rule = std::move(rule);
    double sup = 0.0;
    for (int i = 0; i < m; ++i)
        sup += std::max(c.box.lo[i] * c.box.lo[i], c.box.hi[i] * c.box.hi[i]);
    c.admissibility_M = 2.0 * sup + 1.0;
    return c;
}

void ControlSpec::value(int k, double t, double x, std::span<double> out) const {
    if (mode == ControlMode::open_loop) {
        auto row = lattice_row(k);
        for (int i = 0; i < m; ++i) out[i] = row[i];
    } else {
        rule(t, x, out);
    }
    if (!box.contains(out))
        throw std::runtime_error("ControlSpec: emitted value outside the admissible box");
}

void ControlSpec::validate() const {
    if (box.dim() != m) throw std::invalid_argument("ControlSpec: box/m dimension mismatch");
    if (mode == ControlMode::open_loop) {
        if (lattice.size() != static_cast<std::size_t>(num_steps) * m)
            throw std::invalid_argument("ControlSpec: lattice size mismatch");
        double sup_sq = 0.0;
        for (int k = 0; k < num_steps; ++k) {
            auto row = lattice_row(k);
            if (!box.contains(row))
                throw std::invalid_argument("ControlSpec: lattice value outside the box");
            double nrm = 0.0;
            for (double v : row) nrm += v * v;
            sup_sq = std::max(sup_sq, nrm);
        }
        if (admissibility_M > 0.0 && !(sup_sq < admissibility_M))
            throw std::invalid_argument("ControlSpec: sup-norm bound >= admissibility constant M");
    } else if (!rule) {
        throw std::invalid_argument("ControlSpec: feedback mode requires a rule");
    }
}

double control_distance(const ControlSpec& a1, const ControlSpec& a2,
                        const PathEnsemble& ensemble) {
    const int N = ensemble.grid.num_steps;
    if (a1.m != a2.m) throw std::invalid_argument("control_distance: dimension mismatch");
    if ((a1.mode == ControlMode::open_loop && a1.num_steps != N) ||
        (a2.mode == ControlMode::open_loop && a2.num_steps != N))
        throw std::invalid_argument("control_distance: grid mismatch");

    const bool deterministic =
        a1.mode == ControlMode::open_loop && a2.mode == ControlMode::open_loop;
    const int paths = deterministic ? 1 : ensemble.num_paths;

    std::vector<double> sup_sq(paths, 0.0);
#pragma omp parallel for schedule(static)
    for (int p = 0; p < paths; ++p) {
        std::vector<double> v1(a1.m), v2(a2.m);
        double worst = 0.0;
        for (int k = 0; k < N; ++k) {
            const double t = ensemble.grid.t(k);
            const double x = ensemble.x(p, k);
            a1.value(k, t, x, v1);
            a2.value(k, t, x, v2);
            double nrm = 0.0;
            for (int i = 0; i < a1.m; ++i) nrm += (v1[i] - v2[i]) * (v1[i] - v2[i]);
            worst = std::max(worst, nrm);
        }
        sup_sq[p] = worst;
    }
    return std::sqrt(ordered_sum(sup_sq) / paths);
}

} // namespace ismp
