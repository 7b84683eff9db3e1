#pragma once

#include <span>
#include <vector>

namespace ismp {

// Polynomial basis in x (degree p, default 4), optionally augmented with
// |x - x0| and an indicator 1_{x > kink} for irregular-drift problems.
struct RegressionBasis {
    int degree = 4;
    bool augment_abs = false;
    bool augment_indicator = false;
    double abs_center = 0.0;
    double indicator_threshold = 0.0;
    double ridge = 1e-8; // scaled by trace(Phi'Phi)/n_features at solve time

    int num_features() const {
        return degree + 1 + (augment_abs ? 1 : 0) + (augment_indicator ? 1 : 0);
    }
    // Features of a standardized coordinate; xstd = (x - shift) / scale.
    void features(double x, double shift, double scale, std::span<double> out) const;
};

struct RidgeFit {
    std::vector<double> coeff;
    double shift = 0.0, scale = 1.0;
    double condition = 1.0;
    bool intercept_only = false; // degenerate design (x essentially constant)
    double intercept = 0.0;

    double predict(const RegressionBasis& basis, double x) const;
};

// Least-squares fit of y onto basis functions of x with trace-scaled ridge.
// Throws if the ridge-regularized normal matrix is still numerically rank
// deficient (condition number reported in the message).
RidgeFit ridge_regress(const RegressionBasis& basis, std::span<const double> x,
                       std::span<const double> y);

} // namespace ismp
