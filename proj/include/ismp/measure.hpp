#pragma once

#include "ismp/ensemble.hpp"

#include <functional>
#include <span>
#include <vector>

namespace ismp {

// Per-step d-vector integrand q(t_k, X_k) of the stochastic exponential.
using QProcess = std::function<void(int k, double t, double x, std::span<double> q_out)>;

// Doleans-Dade exponential E(int q dB) per path, up to time index `up_to`:
// exp(sum q_k . dB_k - 1/2 sum |q_k|^2 dt).
std::vector<double> doleans_exponential(const QProcess& q, const PathEnsemble& e, int up_to);

// Girsanov density dQ/dP = E(int sigma^T/|sigma|^2 b(t,X,alpha) dB) evaluated
// on a driftless ensemble; reweighted statistics reproduce the controlled law.
std::vector<double> girsanov_weights(const DriftSpec& drift, const ControlSpec& control,
                                     const PathEnsemble& driftless);

} // namespace ismp
