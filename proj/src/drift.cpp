#include "ismp/drift.hpp"

#include "ismp/quadrature.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace ismp {

namespace {

std::string point_str(double t, double x) {
    std::ostringstream os;
    os << "(t=" << t << ", x=" << x << ")";
    return os.str();
}

std::string point_str(double t, double x, std::span<const double> a) {
    std::ostringstream os;
    os << "(t=" << t << ", x=" << x << ", a=[";
    for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
    os << "])";
    return os.str();
}

void require_finite_bounded(double v, double bound, bool check, const char* name,
                            const std::string& where) {
    if (!std::isfinite(v))
        throw drift_contract_error(std::string(name) + " returned non-finite value at " + where);
    // Small slack absorbs quadrature round-off in mollified drifts.
    if (check && std::abs(v) > bound * (1.0 + 1e-9) + 1e-12)
        throw drift_contract_error(std::string(name) + " bound violated at " + where);
}

} // namespace

double DriftSpec::eval_b1(double t, double x) const {
    if (!b1) return 0.0;
    const double v = b1(t, x);
    require_finite_bounded(v, bound_b1, check_bounds, "b1", point_str(t, x));
    return v;
}

double DriftSpec::eval_b2(double t, double x, std::span<const double> a) const {
    if (!b2) return 0.0;
    const double v = b2(t, x, a);
    require_finite_bounded(v, bound_b2, check_bounds, "b2", point_str(t, x, a));
    return v;
}

double DriftSpec::eval(double t, double x, std::span<const double> a) const {
    return eval_b1(t, x) + eval_b2(t, x, a);
}

double DriftSpec::eval_db2_dx(double t, double x, std::span<const double> a) const {
    if (!db2_dx) return 0.0;
    const double v = db2_dx(t, x, a);
    if (!std::isfinite(v))
        throw drift_contract_error("db2_dx returned non-finite value at " + point_str(t, x, a));
    return v;
}

double DriftSpec::eval_db_dx(double t, double x, std::span<const double> a) const {
    double v = eval_db2_dx(t, x, a);
    if (b1) {
        if (!db1_dx)
            throw drift_contract_error(
                "drift has no x-derivative for its irregular part; mollify first");
        v += db1_dx(t, x);
    }
    return v;
}

void DriftSpec::eval_db2_da(double t, double x, std::span<const double> a,
                            std::span<double> out) const {
    if (!db2_da) {
        for (auto& o : out) o = 0.0;
        return;
    }
    db2_da(t, x, a, out);
}

namespace {

// Bump kernel on (-1,1), psi(u) ~ exp(-1/(1-u^2)), with its derivative.
double bump(double u) {
    const double w = 1.0 - u * u;
    return w > 1e-12 ? std::exp(-1.0 / w) : 0.0;
}

double bump_deriv(double u) {
    const double w = 1.0 - u * u;
    if (w <= 1e-12) return 0.0;
    return bump(u) * (-2.0 * u / (w * w));
}

struct MollifierTable {
    // Fixed 129-point Simpson rule on [-1, 1]; weights normalized so the
    // kernel integrates to one exactly in quadrature, which preserves
    // constants and the sup bound.
    std::vector<double> nodes, wpsi, wdpsi;
    MollifierTable() {
        QuadratureRule q = simpson(129, -1.0, 1.0);
        nodes = q.nodes;
        double norm = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            norm += q.weights[i] * bump(nodes[i]);
        wpsi.resize(nodes.size());
        wdpsi.resize(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            wpsi[i] = q.weights[i] * bump(nodes[i]) / norm;
            wdpsi[i] = q.weights[i] * bump_deriv(nodes[i]) / norm;
        }
    }
};

const MollifierTable& mollifier_table() {
    static const MollifierTable table;
    return table;
}

} // namespace

MollifiedDrift mollify_drift(ScalarField b1, double bound_b1, int n) {
    if (n < 1) throw std::invalid_argument("mollify_drift: level n >= 1 required");
    if (!b1) throw std::invalid_argument("mollify_drift: b1 must be set");

    MollifiedDrift m;
    m.level = n;
    m.kernel_scale = 1.0 / n;
    m.bound_b1 = bound_b1;

    auto base = std::make_shared<ScalarField>(std::move(b1));
    const double inv_n = 1.0 / n;

    m.b1n = [base, inv_n](double t, double x) {
        const auto& tab = mollifier_table();
        double s = 0.0;
        for (std::size_t i = 0; i < tab.nodes.size(); ++i)
            s += tab.wpsi[i] * (*base)(t, x - tab.nodes[i] * inv_n);
        if (!std::isfinite(s))
            throw drift_contract_error("mollified b1 quadrature non-finite at " + point_str(t, x));
        return s;
    };
    m.db1n_dx = [base, inv_n, n](double t, double x) {
        const auto& tab = mollifier_table();
        double s = 0.0;
        for (std::size_t i = 0; i < tab.nodes.size(); ++i)
            s += tab.wdpsi[i] * (*base)(t, x - tab.nodes[i] * inv_n);
        s *= n;
        if (!std::isfinite(s))
            throw drift_contract_error("mollified db1_dx quadrature non-finite at " +
                                       point_str(t, x));
        return s;
    };
    return m;
}

DriftSpec MollifiedDrift::apply(const DriftSpec& base) const {
    DriftSpec d = base;
    d.b1 = b1n;
    d.db1_dx = db1n_dx;
    d.bound_b1 = bound_b1;
    d.mollify_level = level;
    return d;
}

} // namespace ismp
