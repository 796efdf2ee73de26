#pragma once

#include <cstdint>

#include "ucfl/model.hpp"
#include "ucfl/rng.hpp"

namespace ucfl {

struct LocalTrainConfig {
  int epochs = 1;
  int batch_size = 32;
  double learning_rate = 0.1;
  double momentum = 0.9;

  void validate() const;
};

// What a client uploads during the coefficient round: its full local gradient
// at the shared starting point plus the mini-batch variance estimate.
struct CoefficientReport {
  Params full_gradient;
  double sigma_sq = 0.0;
  std::int64_t n = 0;
};

/// Mini-batch SGD with momentum: a fresh random batch split per epoch, last
/// short batch kept, momentum buffer starting at zero. Returns the updated
/// parameters; the start vector is untouched.
Params client_update(const ModelSpec& spec, const Params& start, const LabeledDataset& data,
                     const LocalTrainConfig& cfg, RngStream rng);

/// Gradient of the mean loss over the client's entire dataset.
Params full_gradient(const ModelSpec& spec, const Params& theta0, const LabeledDataset& data);

/// Gradient noise estimate: the data is randomly partitioned into
/// K = floor(n / batch) disjoint batches of that exact size (remainder samples
/// dropped) and the mean squared deviation of batch gradients from the
/// full-dataset gradient is returned.
double gradient_variance(const ModelSpec& spec, const Params& theta0, const LabeledDataset& data,
                         int batch, RngStream rng);

/// Full report for the coefficient round at the broadcast starting point.
CoefficientReport coefficient_report(const ModelSpec& spec, const Params& theta0,
                                     const LabeledDataset& data, int batch, RngStream rng);

}  // namespace ucfl
