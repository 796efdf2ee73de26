#pragma once

#include <cstdint>
#include <vector>

#include "ucfl/types.hpp"

namespace ucfl {

// Probability vector over a finite support.
struct DiscreteDist {
  Vec p;

  void validate() const;  // nonnegative, sums to 1 within 1e-12
};

/// Jensen-Shannon divergence KL(P || M) + KL(Q || M) with M = (P + Q) / 2,
/// natural logarithm, 0 log 0 = 0. Symmetric, zero iff the inputs match,
/// and at most 2 ln 2.
double js_divergence(const DiscreteDist& p, const DiscreteDist& q);

// Everything needed to evaluate the excess-risk bounds for one target user:
// its collaboration weights, the source dataset sizes, the loss range, a
// VC-dimension surrogate, the confidence level, and per-source divergences
// (discrepancy distances or Jensen-Shannon values, supplied by the caller).
struct BoundInputs {
  Vec weights;                      // length m, nonnegative, sums to 1
  std::vector<std::int64_t> sizes;  // n_j >= 1
  double loss_range = 1.0;          // B
  double vc_dim = 1.0;              // d (must stay below sum of sizes)
  double delta = 0.05;              // confidence, in (0, 1)
  Vec divergences;                  // per-source dissimilarity to the target
  double gamma = 0.0;               // joint-optimum offset (first bound only)

  void validate() const;
};

/// Shared estimation term
///   B sqrt(sum_j w_j^2 / n_j) (sqrt((2d / N) ln(e N / d)) + sqrt(ln(2 / delta)))
/// with N the total sample count.
double estimation_term(const BoundInputs& in);

/// Discrepancy-distance bound: estimation term + 2 sum_j w_j d_F[j] + 2 gamma.
double bound_th1(const BoundInputs& in);

/// Jensen-Shannon bound: estimation term + B sqrt(2 sum_j w_j D_JS[j]).
double bound_th2(const BoundInputs& in);

}  // namespace ucfl
