#pragma once

#include <cstdint>
#include <vector>

#include "ucfl/client.hpp"
#include "ucfl/types.hpp"

namespace ucfl {

// Row-stochastic matrix of per-user mixing coefficients: row i weights every
// client's update inside user i's personalized aggregate.
struct CollabMatrix {
  Mat w;

  int client_count() const { return static_cast<int>(w.rows()); }
  void validate() const;  // nonnegative, finite, rows sum to 1 within 1e-9
};

/// Pairwise squared distances between the clients' full gradients:
/// delta(i, j) = ||g_i - g_j||^2. Symmetric with a zero diagonal.
Mat pairwise_delta(const std::vector<CoefficientReport>& reports);

/// Normalized Gaussian-kernel mixing coefficients,
///   w_ij  proportional to  (n_j / n_i) * exp(-delta_ij / (2 sigma_i sigma_j)),
/// row-normalized. Degenerate kernels resolve deterministically: a vanishing
/// sigma product gives kernel 1 when delta is zero and 0 otherwise, so the
/// diagonal is always exp(-0) = 1 and no row can normalize to 0/0. With all
/// distances zero the rows reduce exactly to the n_j / sum(n) FedAvg weights;
/// with vanishing variances and positive distances the matrix is the identity.
CollabMatrix mixing_matrix(const Mat& delta, const std::vector<double>& sigma_sq,
                           const std::vector<std::int64_t>& n);

/// Size-proportional aggregation weights n_j / sum(n).
Vec fedavg_weights(const std::vector<std::int64_t>& n);

}  // namespace ucfl
