#include "ucfl/bounds.hpp"

#include <cmath>
#include <numbers>

namespace ucfl {

void DiscreteDist::validate() const {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0)) throw validation_error("distribution: negative probability");
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw validation_error("distribution: probabilities sum to " + std::to_string(sum));
}

double js_divergence(const DiscreteDist& p, const DiscreteDist& q) {
  p.validate();
  q.validate();
  if (p.p.size() != q.p.size())
    throw validation_error("js_divergence: support sizes " + std::to_string(p.p.size()) +
                           " vs " + std::to_string(q.p.size()));
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.p.size(); ++i) {
    const double mid = 0.5 * (p.p[i] + q.p[i]);
    if (p.p[i] > 0.0) total += p.p[i] * std::log(p.p[i] / mid);
    if (q.p[i] > 0.0) total += q.p[i] * std::log(q.p[i] / mid);
  }
  return total;
}

void BoundInputs::validate() const {
  const auto m = weights.size();
  if (m < 1) throw validation_error("bound inputs: no sources");
  if (static_cast<Eigen::Index>(sizes.size()) != m || divergences.size() != m)
    throw validation_error("bound inputs: weights, sizes and divergences must share length");
  double wsum = 0.0;
  std::int64_t total = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!(weights[j] >= 0.0)) throw validation_error("bound inputs: negative weight");
    if (!(divergences[j] >= 0.0)) throw validation_error("bound inputs: negative divergence");
    if (sizes[static_cast<std::size_t>(j)] < 1)
      throw validation_error("bound inputs: dataset sizes must be >= 1");
    wsum += weights[j];
    total += sizes[static_cast<std::size_t>(j)];
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw validation_error("bound inputs: weights sum to " + std::to_string(wsum));
  if (!(loss_range > 0.0)) throw validation_error("bound inputs: loss range must be positive");
  if (!(vc_dim >= 1.0)) throw validation_error("bound inputs: VC surrogate must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw validation_error("bound inputs: delta must lie in (0, 1)");
  if (!(gamma >= 0.0)) throw validation_error("bound inputs: gamma must be nonnegative");
  if (vc_dim >= static_cast<double>(total))
    throw validation_error("bound inputs: VC surrogate must stay below the total sample count");
}

double estimation_term(const BoundInputs& in) {
  in.validate();
  double var = 0.0;
  double total = 0.0;
  for (Eigen::Index j = 0; j < in.weights.size(); ++j) {
    var += in.weights[j] * in.weights[j] / static_cast<double>(in.sizes[static_cast<std::size_t>(j)]);
    total += static_cast<double>(in.sizes[static_cast<std::size_t>(j)]);
  }
  const double complexity = std::sqrt(2.0 * in.vc_dim / total *
                                      std::log(std::numbers::e * total / in.vc_dim));
  const double confidence = std::sqrt(std::log(2.0 / in.delta));
  return in.loss_range * std::sqrt(var) * (complexity + confidence);
}

double bound_th1(const BoundInputs& in) {
  double bias = 0.0;
  for (Eigen::Index j = 0; j < in.weights.size(); ++j) bias += in.weights[j] * in.divergences[j];
  return estimation_term(in) + 2.0 * bias + 2.0 * in.gamma;
}

double bound_th2(const BoundInputs& in) {
  double mixture_div = 0.0;
  for (Eigen::Index j = 0; j < in.weights.size(); ++j)
    mixture_div += in.weights[j] * in.divergences[j];
  return estimation_term(in) + in.loss_range * std::sqrt(2.0 * mixture_div);
}

}  // namespace ucfl
