#include "ucfl/client.hpp"

#include <algorithm>
#include <numeric>

namespace ucfl {

void LocalTrainConfig::validate() const {
  if (epochs < 1) throw validation_error("train config: epochs must be >= 1");
  if (batch_size < 1) throw validation_error("train config: batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw validation_error("train config: learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw validation_error("train config: momentum must lie in [0, 1)");
}

Params client_update(const ModelSpec& spec, const Params& start, const LabeledDataset& data,
                     const LocalTrainConfig& cfg, RngStream rng) {
  cfg.validate();
  if (data.size() < 1) throw validation_error("client_update: empty dataset");

  const int n = static_cast<int>(data.size());
  Params theta = start;
  Params velocity = Params::Zero(start.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (int at = 0; at < n; at += cfg.batch_size) {
      const int take = std::min(cfg.batch_size, n - at);
      // Batch membership is what matters; sorted indices keep the gradient
      // sum order canonical (a full batch reproduces full_gradient exactly).
      std::vector<int> idx(order.begin() + at, order.begin() + at + take);
      std::sort(idx.begin(), idx.end());
      const Params g = gradient(spec, theta, data.select(idx));
      velocity = cfg.momentum * velocity + g;
      theta -= cfg.learning_rate * velocity;
    }
    if (!theta.allFinite())
      throw numeric_error("client_update: parameters diverged at epoch " + std::to_string(epoch));
  }
  return theta;
}

Params full_gradient(const ModelSpec& spec, const Params& theta0, const LabeledDataset& data) {
  if (data.size() < 1) throw validation_error("full_gradient: empty dataset");
  return gradient(spec, theta0, data);
}

double gradient_variance(const ModelSpec& spec, const Params& theta0, const LabeledDataset& data,
                         int batch, RngStream rng) {
  const int n = static_cast<int>(data.size());
  if (batch < 1) throw validation_error("gradient_variance: batch size must be >= 1");
  const int k = n / batch;
  if (k == 0)
    throw validation_error("gradient_variance: batch size " + std::to_string(batch) +
                           " exceeds dataset size " + std::to_string(n));

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  const Params g_full = full_gradient(spec, theta0, data);
  double acc = 0.0;
  for (int b = 0; b < k; ++b) {
    std::vector<int> idx(order.begin() + static_cast<long>(b) * batch,
                         order.begin() + static_cast<long>(b + 1) * batch);
    std::sort(idx.begin(), idx.end());
    const Params g_b = gradient(spec, theta0, data.select(idx));
    acc += (g_b - g_full).squaredNorm();
  }
  return acc / static_cast<double>(k);
}

CoefficientReport coefficient_report(const ModelSpec& spec, const Params& theta0,
                                     const LabeledDataset& data, int batch, RngStream rng) {
  CoefficientReport report;
  report.full_gradient = full_gradient(spec, theta0, data);
  report.sigma_sq = gradient_variance(spec, theta0, data, batch, rng);
  report.n = data.size();
  return report;
}

}  // namespace ucfl
