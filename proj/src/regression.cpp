#include "ismp/regression.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ismp {

void RegressionBasis::features(double x, double shift, double scale,
                               std::span<double> out) const {
    const double xs = (x - shift) / scale;
    double pw = 1.0;
    int idx = 0;
    for (int d = 0; d <= degree; ++d) {
        out[idx++] = pw;
        pw *= xs;
    }
    if (augment_abs) out[idx++] = std::abs(x - abs_center) / scale;
    if (augment_indicator) out[idx++] = x > indicator_threshold ? 1.0 : 0.0;
}

double RidgeFit::predict(const RegressionBasis& basis, double x) const {
    if (intercept_only) return intercept;
    std::vector<double> phi(basis.num_features());
    basis.features(x, shift, scale, phi);
    double s = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) s += coeff[i] * phi[i];
    return s;
}

RidgeFit ridge_regress(const RegressionBasis& basis, std::span<const double> x,
                       std::span<const double> y) {
    const int n = static_cast<int>(x.size());
    const int q = basis.num_features();
    if (n != static_cast<int>(y.size()) || n == 0)
        throw std::invalid_argument("ridge_regress: size mismatch");

    RidgeFit fit;
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double vx = 0.0;
    for (int i = 0; i < n; ++i) vx += (x[i] - mx) * (x[i] - mx);
    vx = n > 1 ? vx / (n - 1) : 0.0;
    fit.shift = mx;
    fit.scale = std::sqrt(vx);

    // A deterministic-x design (e.g. the initial time slice) carries no
    // information beyond the mean; the conditional expectation is the mean.
    if (!(fit.scale > 1e-12 * (1.0 + std::abs(mx)))) {
        fit.intercept_only = true;
        fit.intercept = my;
        fit.scale = 1.0;
        return fit;
    }

    // Intercept stays unpenalized: fit y = ybar + phi_centered . c so that
    // constant payloads are recovered exactly for any ridge strength.
    const int qc = q - 1;
    Eigen::VectorXd fmean = Eigen::VectorXd::Zero(qc);
    std::vector<double> phi(q);
    // Serial accumulation in path order keeps results independent of the
    // thread count; callers parallelize across time slices instead.
    for (int i = 0; i < n; ++i) {
        basis.features(x[i], fit.shift, fit.scale, phi);
        for (int r = 0; r < qc; ++r) fmean(r) += phi[r + 1];
    }
    fmean /= n;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(qc, qc);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(qc);
    for (int i = 0; i < n; ++i) {
        basis.features(x[i], fit.shift, fit.scale, phi);
        const double yc = y[i] - my;
        for (int r = 0; r < qc; ++r) {
            const double fr = phi[r + 1] - fmean(r);
            b(r) += fr * yc;
            for (int c = r; c < qc; ++c) A(r, c) += fr * (phi[c + 1] - fmean(c));
        }
    }
    for (int r = 0; r < qc; ++r)
        for (int c = 0; c < r; ++c) A(r, c) = A(c, r);

    const double lambda = basis.ridge * A.trace() / std::max(qc, 1);
    A.diagonal().array() += lambda;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    const double emin = es.eigenvalues().minCoeff();
    const double emax = es.eigenvalues().maxCoeff();
    fit.condition = emax / std::max(emin, 1e-300);
    if (!(emin > 0.0) || fit.condition > 1e14) {
        std::ostringstream os;
        os << "ridge_regress: design is rank deficient after ridge (condition "
           << fit.condition << ", lambda " << lambda << ")";
        throw std::runtime_error(os.str());
    }
    // Smallest-norm tie-breaking comes through the eigendecomposition solve.
    Eigen::VectorXd c = es.eigenvectors() *
                        (es.eigenvectors().transpose() * b).cwiseQuotient(es.eigenvalues());
    fit.coeff.assign(q, 0.0);
    double c0 = my;
    for (int r = 0; r < qc; ++r) {
        fit.coeff[r + 1] = c(r);
        c0 -= c(r) * fmean(r);
    }
    fit.coeff[0] = c0;
    return fit;
}

} // namespace ismp
