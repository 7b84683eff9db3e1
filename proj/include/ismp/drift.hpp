#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace ismp {

using ScalarField = std::function<double(double t, double x)>;                 // b1, db1_dx
using ControlField = std::function<double(double t, double x, std::span<const double> a)>;
using ControlGradField =
    std::function<void(double t, double x, std::span<const double> a, std::span<double> out)>;

// Drift b(t,x,a) = b1(t,x) + b2(t,x,a). b1 is merely bounded measurable;
// b2 is smooth in (x,a) with bounded derivatives supplied as callbacks.
// db1_dx is null for irregular b1 and set for analytic or mollified drifts.
struct DriftSpec {
    ScalarField b1;        // may be null (== 0)
    ScalarField db1_dx;    // null when b1 is not differentiable
    ControlField b2;       // may be null (== 0)
    ControlField db2_dx;
    ControlGradField db2_da;

    double bound_b1 = 0.0;
    double bound_b2 = 0.0;
    double bound_db2 = 0.0;

    int mollify_level = 0; // 0 = exact drift, n > 0 = mollified b1 at level n

    bool check_bounds = true;

    double eval_b1(double t, double x) const;
    double eval_b2(double t, double x, std::span<const double> a) const;
    double eval(double t, double x, std::span<const double> a) const;

    // dx-derivative of the full drift; throws if db1_dx is missing while b1 is set.
    double eval_db_dx(double t, double x, std::span<const double> a) const;
    double eval_db2_dx(double t, double x, std::span<const double> a) const;
    void eval_db2_da(double t, double x, std::span<const double> a,
                     std::span<double> out) const;

    bool has_b1_derivative() const { return !b1 || static_cast<bool>(db1_dx); }
};

// Smooth approximation of an irregular b1: convolution with a symmetric
// C-infinity bump kernel of width 1/n, evaluated by a fixed 129-point rule.
struct MollifiedDrift {
    int level = 1;
    double kernel_scale = 1.0; // 1/n
    ScalarField b1n;
    ScalarField db1n_dx;
    double bound_b1 = 0.0;

    // Combined spec: base's b2 family with b1 replaced by b1n.
    DriftSpec apply(const DriftSpec& base) const;
};

MollifiedDrift mollify_drift(ScalarField b1, double bound_b1, int n);

// Thrown when a drift callback violates its declared bound or returns a
// non-finite value; carries the offending (t, x, a).
struct drift_contract_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ismp
