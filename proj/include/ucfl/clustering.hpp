#pragma once

#include <functional>
#include <vector>

#include "ucfl/collaboration.hpp"
#include "ucfl/rng.hpp"
#include "ucfl/types.hpp"

namespace ucfl {

struct ClusterPlan {
  int k = 0;
  Mat centroids;            // k x d
  std::vector<int> assign;  // one cluster index per point, every cluster non-empty
  double inertia = 0.0;     // total unsquared point-to-centroid distance
  double silhouette = 0.0;  // in [-1, 1]; 0 by convention for k = 1 and k = m
};

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` runs. Runs on
/// squared distances; the reported inertia is the unsquared total used for
/// scoring. Deterministic: per-restart forked streams, ties between restarts
/// go to the earlier one, empty clusters are reseeded at the point farthest
/// from its assigned centroid.
ClusterPlan kmeans(const Mat& points, int k, int restarts, RngStream rng);

/// Mean silhouette (b - a) / max(a, b) over all points, with a = 0 for
/// singleton clusters and 0/0 treated as 0.
double silhouette_score(const Mat& points, const ClusterPlan& plan);

struct StreamScoreRow {
  int k = 0;
  double silhouette = 0.0;
  double score = 0.0;
};

struct StreamSelection {
  int stream_count = 0;
  ClusterPlan plan;
  std::vector<StreamScoreRow> table;
};

/// Sweeps k = 1..m over the collaboration vectors, scoring each clustering
/// with the trade-off function c(k, silhouette). Returns the argmax (ties
/// toward smaller k) along with the full score table.
StreamSelection select_streams(const CollabMatrix& weights,
                               const std::function<double(int, double)>& tradeoff,
                               int restarts, RngStream rng);

/// Default trade-off c(k, s) = s - lambda * (k - 1) / (m - 1).
double default_tradeoff(int k, double silhouette, double lambda, int m);

/// Replaces every client's row by its cluster centroid, re-normalized to sum
/// one: clients in one cluster share a single aggregation rule.
CollabMatrix centroid_rows(const CollabMatrix& weights, const ClusterPlan& plan);

namespace detail {
// One seeded Lloyd run; exposed so tests can watch the squared objective
// decrease across iterations.
struct LloydRun {
  std::vector<int> assign;
  Mat centroids;
  double sq_inertia = 0.0;
};
LloydRun lloyd_once(const Mat& points, int k, RngStream rng,
                    std::vector<double>* sq_trace = nullptr);
double unsquared_inertia(const Mat& points, const std::vector<int>& assign, const Mat& centroids);
}  // namespace detail

}  // namespace ucfl
