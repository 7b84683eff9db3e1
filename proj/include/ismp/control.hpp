#pragma once

#include "ismp/grid.hpp"

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace ismp {

// Closed box [lo, hi]^m; the admissible set A restricted to coordinate
// intervals so projection is closed-form.
struct Box {
    std::vector<double> lo, hi;

    Box() = default;
    Box(std::vector<double> l, std::vector<double> h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo.size() != hi.size())
            throw std::invalid_argument("Box: lo/hi dimension mismatch");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] <= hi[i])) throw std::invalid_argument("Box: lo > hi");
    }
    static Box interval(double l, double h) { return Box({l}, {h}); }

    int dim() const { return static_cast<int>(lo.size()); }

    void project(std::span<double> a) const {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] < lo[i]) a[i] = lo[i];
            if (a[i] > hi[i]) a[i] = hi[i];
        }
    }
    bool contains(std::span<const double> a, double tol = 1e-12) const {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] < lo[i] - tol || a[i] > hi[i] + tol) return false;
        return true;
    }
    // Corner points (2^m of them) plus the center; the probe set used by the
    // necessary-condition verifier.
    std::vector<std::vector<double>> corners_and_center() const;
};

enum class ControlMode { open_loop, feedback };

using FeedbackRule = std::function<void(double t, double x, std::span<double> out)>;

// Open-loop controls are deterministic lattices alpha(t_k) (the optimizer's
// search space); feedback rules are supported for verification only.
struct ControlSpec {
    ControlMode mode = ControlMode::open_loop;
    Box box;
    int m = 1;
    int num_steps = 0;            // lattice rows (open loop)
    std::vector<double> lattice;  // num_steps x m, row-major
    FeedbackRule rule;
    double admissibility_M = 0.0; // bound on E[sup_t |alpha(t)|^2]

    static ControlSpec constant(double value, int num_steps, Box box);
    static ControlSpec open_loop_lattice(std::vector<double> lattice, int m, int num_steps,
                                         Box box);
    static ControlSpec feedback(FeedbackRule rule, int m, Box box);

    void value(int k, double t, double x, std::span<double> out) const;
    std::span<const double> lattice_row(int k) const {
        return {lattice.data() + static_cast<std::size_t>(k) * m, static_cast<std::size_t>(m)};
    }

    void validate() const;
};

class PathEnsemble; // fwd

// delta(a1, a2) = sqrt(E[sup_k |a1(t_k) - a2(t_k)|^2]); exact for open-loop
// pairs, Monte Carlo along the supplied ensemble when a feedback rule is
// involved.
double control_distance(const ControlSpec& a1, const ControlSpec& a2,
                        const PathEnsemble& ensemble);

} // namespace ismp
