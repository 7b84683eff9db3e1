#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace ismp {

// Serial in-order summation. All cross-path reductions in this library go
// through here so results do not depend on the number of OpenMP threads.
double ordered_sum(std::span<const double> xs);

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;   // standard error of the mean
    double sd = 0.0;   // sample standard deviation
    std::size_t n = 0;
};

MeanSE mean_se(std::span<const double> xs);

double rms(std::span<const double> xs);

} // namespace ismp
