#include "ismp/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace ismp {

namespace {

// Nodes/weights from the symmetric tridiagonal Jacobi matrix of the
// orthogonal-polynomial recurrence (Golub-Welsch).
QuadratureRule golub_welsch(const std::vector<double>& offdiag, double mu0,
                            const std::vector<double>& diag = {}) {
    const int n = static_cast<int>(offdiag.size()) + 1;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        J(i, i + 1) = offdiag[i];
        J(i + 1, i) = offdiag[i];
    }
    for (std::size_t i = 0; i < diag.size(); ++i) J(i, i) = diag[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        r.weights[i] = mu0 * v0 * v0;
    }
    return r;
}

} // namespace

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
    std::vector<double> beta(n - 1);
    for (int k = 1; k < n; ++k)
        beta[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    return golub_welsch(beta, 2.0);
}

QuadratureRule gauss_legendre(int n, double a, double b) {
    QuadratureRule r = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = mid + half * r.nodes[i];
        r.weights[i] *= half;
    }
    return r;
}

QuadratureRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n >= 1 required");
    std::vector<double> beta(n - 1);
    for (int k = 1; k < n; ++k)
        beta[k - 1] = std::sqrt(0.5 * k);
    return golub_welsch(beta, std::sqrt(M_PI));
}

QuadratureRule gauss_laguerre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_laguerre: n >= 1 required");
    std::vector<double> alpha(n), beta(n - 1);
    for (int k = 0; k < n; ++k) alpha[k] = 2.0 * k + 1.0;
    for (int k = 1; k < n; ++k) beta[k - 1] = k;
    return golub_welsch(beta, 1.0, alpha);
}

QuadratureRule simpson(int npoints, double a, double b) {
    if (npoints < 3 || npoints % 2 == 0)
        throw std::invalid_argument("simpson: need an odd npoints >= 3");
    QuadratureRule r;
    r.nodes.resize(npoints);
    r.weights.resize(npoints);
    const double h = (b - a) / (npoints - 1);
    for (int i = 0; i < npoints; ++i) {
        r.nodes[i] = a + h * i;
        double w;
        if (i == 0 || i == npoints - 1) w = 1.0;
        else if (i % 2 == 1) w = 4.0;
        else w = 2.0;
        r.weights[i] = w * h / 3.0;
    }
    return r;
}

} // namespace ismp
