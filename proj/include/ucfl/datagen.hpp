#pragma once

#include <vector>

#include "ucfl/dataset.hpp"
#include "ucfl/rng.hpp"

namespace ucfl {

/// Isotropic Gaussian blobs, one fixed center per class on the unit circle
/// (first two coordinates), labels balanced within one sample.
LabeledDataset make_gaussian_blobs(int classes, int dim, int samples, double spread, RngStream rng);

/// Label-shift partition: per-client class proportions drawn from a symmetric
/// Dirichlet(alpha), samples assigned without replacement by largest-remainder
/// rounding so the client datasets are exhaustive and disjoint. Retries with a
/// fresh sub-stream (up to 10 times) if a client ends up empty.
FederationData dirichlet_label_partition(const LabeledDataset& data, int clients, double alpha,
                                         RngStream rng);

/// IID split into equal-size clients (sizes differ by at most one).
FederationData split_uniform(const LabeledDataset& data, int clients, RngStream rng);

/// Covariate shift: clients fall into contiguous equal-size groups and group
/// g's features are rotated by angles_deg[g]. Planar rotation for p = 2;
/// square-grid data (p a perfect square) supports multiples of 90 degrees only.
FederationData rotate_covariates(FederationData fed, int groups, const std::vector<double>& angles_deg);

/// Concept shift: each group's labels go through an independent uniformly
/// random permutation; group 0 keeps the identity permutation.
FederationData permute_labels(FederationData fed, int groups, RngStream rng);

/// Contiguous, balanced group assignment: client i -> i * groups / clients.
std::vector<int> contiguous_groups(int clients, int groups);

}  // namespace ucfl
