#include "ismp/stats.hpp"

namespace ismp {

double ordered_sum(std::span<const double> xs) {
    // Kahan compensated summation, fixed order.
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

MeanSE mean_se(std::span<const double> xs) {
    MeanSE r;
    r.n = xs.size();
    if (r.n == 0) return r;
    r.mean = ordered_sum(xs) / static_cast<double>(r.n);
    if (r.n == 1) return r;
    double ss = 0.0, c = 0.0;
    for (double x : xs) {
        double d = (x - r.mean) * (x - r.mean) - c;
        double t = ss + d;
        c = (t - ss) - d;
        ss = t;
    }
    r.sd = std::sqrt(ss / static_cast<double>(r.n - 1));
    r.se = r.sd / std::sqrt(static_cast<double>(r.n));
    return r;
}

double rms(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += x * x;
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

} // namespace ismp
