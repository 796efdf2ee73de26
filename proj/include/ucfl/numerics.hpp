#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ucfl/types.hpp"

namespace ucfl {

/// Elementwise sum_j coeffs[j] * params[j]. All parameter vectors must share
/// one dimension; coefficients must be finite. Exact-zero coefficients are
/// skipped so that a one-hot coefficient row returns its operand bit-for-bit.
inline Params weighted_combine(const Vec& coeffs, const std::vector<Params>& params) {
  if (static_cast<std::size_t>(coeffs.size()) != params.size())
    throw dimension_error("weighted_combine: " + std::to_string(coeffs.size()) +
                          " coefficients for " + std::to_string(params.size()) + " parameter vectors");
  if (params.empty()) throw dimension_error("weighted_combine: empty parameter list");
  const Eigen::Index dim = params.front().size();
  for (const auto& p : params)
    if (p.size() != dim) throw dimension_error("weighted_combine: parameter dimension mismatch");
  if (!coeffs.allFinite()) throw validation_error("weighted_combine: non-finite coefficient");

  Params out;
  bool started = false;
  for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
    const Scalar c = coeffs[j];
    if (c == 0.0) continue;
    if (!started) {
      out = c * params[static_cast<std::size_t>(j)];
      started = true;
    } else {
      out += c * params[static_cast<std::size_t>(j)];
    }
  }
  if (!started) out = Params::Zero(dim);
  return out;
}

/// Squared Euclidean distance ||a - b||^2.
template <class DerivedA, class DerivedB>
Scalar l2_distance_sq(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size())
    throw dimension_error("l2_distance_sq: size " + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()));
  return (a.derived() - b.derived()).squaredNorm();
}

/// Central finite differences (loss(x + h e_k) - loss(x - h e_k)) / (2h).
/// Test oracle for analytic gradients; h must be positive.
inline Params finite_diff_gradient(const std::function<Scalar(const Params&)>& loss_fn,
                                   const Params& x, Scalar h) {
  if (!(h > 0.0)) throw validation_error("finite_diff_gradient: step must be positive");
  Params grad(x.size());
  Params probe = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const Scalar xk = probe[k];
    probe[k] = xk + h;
    const Scalar up = loss_fn(probe);
    probe[k] = xk - h;
    const Scalar down = loss_fn(probe);
    probe[k] = xk;
    if (!std::isfinite(up) || !std::isfinite(down))
      throw numeric_error("finite_diff_gradient: non-finite loss near coordinate " + std::to_string(k));
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace ucfl
