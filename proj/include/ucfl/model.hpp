#pragma once

#include <string>

#include "ucfl/dataset.hpp"
#include "ucfl/rng.hpp"
#include "ucfl/types.hpp"

namespace ucfl {

enum class ModelKind { SoftmaxLinear, Mlp1 };
enum class Activation { Relu, Tanh };

// Differentiable classifier description. Parameters are flattened layer by
// layer: weight matrix row-major, then biases. softmax-linear holds
// [W (C x p), b (C)]; the one-hidden-layer MLP holds
// [W1 (H x p), b1 (H), W2 (C x H), b2 (C)].
struct ModelSpec {
  ModelKind kind = ModelKind::SoftmaxLinear;
  int input_dim = 0;
  int classes = 0;
  int hidden = 0;  // MLP only
  Activation activation = Activation::Relu;

  Eigen::Index param_dim() const;
  void validate() const;
};

/// Glorot-uniform weights (a = sqrt(6 / (fan_in + fan_out)) per layer),
/// zero biases.
Params init_params(const ModelSpec& spec, RngStream rng);

/// Mean cross-entropy over the batch (max-shifted log-sum-exp; always finite).
Scalar loss(const ModelSpec& spec, const Params& params, const LabeledDataset& batch);

/// Analytic gradient of the mean cross-entropy.
Params gradient(const ModelSpec& spec, const Params& params, const LabeledDataset& batch);

/// Fraction of argmax-correct predictions; ties go to the smallest class index.
Scalar accuracy(const ModelSpec& spec, const Params& params, const LabeledDataset& data);

}  // namespace ucfl
