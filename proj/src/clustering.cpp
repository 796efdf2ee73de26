#include "ucfl/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ucfl {

namespace detail {

namespace {

int nearest_centroid(const Mat& points, const Mat& centroids, Eigen::Index i) {
  int best = 0;
  double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
  for (int c = 1; c < centroids.rows(); ++c) {
    const double d = (points.row(i) - centroids.row(c)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

Mat seed_plus_plus(const Mat& points, int k, RngStream& rng) {
  const auto m = points.rows();
  Mat centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(m))));
  Vec d2(m);
  for (Eigen::Index i = 0; i < m; ++i)
    d2[i] = (points.row(i) - centroids.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) total += d2[i];
    Eigen::Index pick;
    if (total > 0.0) {
      const double u = rng.next_double() * total;
      double cum = 0.0;
      pick = m - 1;
      for (Eigen::Index i = 0; i < m; ++i) {
        cum += d2[i];
        if (u < cum) {
          pick = i;
          break;
        }
      }
    } else {
      // All remaining mass on already-chosen points (duplicates); any pick
      // works, the empty-cluster repair sorts the rest out.
      pick = static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(m)));
    }
    centroids.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < m; ++i)
      d2[i] = std::min(d2[i], (points.row(i) - centroids.row(c)).squaredNorm());
  }
  return centroids;
}

double squared_inertia(const Mat& points, const std::vector<int>& assign, const Mat& centroids) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    total += (points.row(i) - centroids.row(assign[static_cast<std::size_t>(i)])).squaredNorm();
  return total;
}

}  // namespace

double unsquared_inertia(const Mat& points, const std::vector<int>& assign, const Mat& centroids) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    total += (points.row(i) - centroids.row(assign[static_cast<std::size_t>(i)])).norm();
  return total;
}

LloydRun lloyd_once(const Mat& points, int k, RngStream rng, std::vector<double>* sq_trace) {
  const auto m = points.rows();
  constexpr int kMaxIterations = 300;

  Mat centroids = seed_plus_plus(points, k, rng);
  std::vector<int> assign(static_cast<std::size_t>(m), -1);
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    std::vector<int> next(static_cast<std::size_t>(m));
    std::fill(sizes.begin(), sizes.end(), 0);
    for (Eigen::Index i = 0; i < m; ++i) {
      next[static_cast<std::size_t>(i)] = nearest_centroid(points, centroids, i);
      ++sizes[static_cast<std::size_t>(next[static_cast<std::size_t>(i)])];
    }

    // Reseed each empty cluster at the point farthest from its current
    // centroid (among clusters that can spare a point) and claim that point.
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const int owner = next[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(owner)] < 2) continue;
        const double d = (points.row(i) - centroids.row(owner)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centroids.row(c) = points.row(far);
      --sizes[static_cast<std::size_t>(next[static_cast<std::size_t>(far)])];
      next[static_cast<std::size_t>(far)] = c;
      ++sizes[static_cast<std::size_t>(c)];
    }

    if (next == assign) break;
    assign = std::move(next);

    for (int c = 0; c < k; ++c) centroids.row(c).setZero();
    for (Eigen::Index i = 0; i < m; ++i)
      centroids.row(assign[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c) centroids.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);

    if (sq_trace) sq_trace->push_back(squared_inertia(points, assign, centroids));
  }

  LloydRun run;
  run.assign = std::move(assign);
  run.centroids = std::move(centroids);
  run.sq_inertia = squared_inertia(points, run.assign, run.centroids);
  return run;
}

}  // namespace detail

ClusterPlan kmeans(const Mat& points, int k, int restarts, RngStream rng) {
  const auto m = points.rows();
  if (m < 1) throw validation_error("kmeans: no points");
  if (k < 1 || k > m)
    throw validation_error("kmeans: k = " + std::to_string(k) + " outside [1, " +
                           std::to_string(m) + "]");
  if (restarts < 1) throw validation_error("kmeans: restarts must be >= 1");

  detail::LloydRun best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    auto run = detail::lloyd_once(points, k, rng.fork(static_cast<std::uint64_t>(r)));
    const double inertia = detail::unsquared_inertia(points, run.assign, run.centroids);
    if (inertia < best_inertia) {  // ties keep the earlier restart
      best_inertia = inertia;
      best = std::move(run);
    }
  }

  ClusterPlan plan;
  plan.k = k;
  plan.centroids = std::move(best.centroids);
  plan.assign = std::move(best.assign);
  plan.inertia = best_inertia;
  plan.silhouette = silhouette_score(points, plan);
  return plan;
}

double silhouette_score(const Mat& points, const ClusterPlan& plan) {
  const auto m = points.rows();
  if (static_cast<Eigen::Index>(plan.assign.size()) != m)
    throw dimension_error("silhouette: plan does not match point count");
  if (plan.k == 1 || plan.k == static_cast<int>(m)) return 0.0;

  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(plan.k));
  for (Eigen::Index i = 0; i < m; ++i)
    members[static_cast<std::size_t>(plan.assign[static_cast<std::size_t>(i)])].push_back(i);

  double total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const int own = plan.assign[static_cast<std::size_t>(i)];
    const auto& mine = members[static_cast<std::size_t>(own)];

    double a = 0.0;
    if (mine.size() > 1) {
      for (Eigen::Index j : mine)
        if (j != i) a += (points.row(i) - points.row(j)).norm();
      a /= static_cast<double>(mine.size() - 1);
    }

    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < plan.k; ++c) {
      if (c == own) continue;
      const auto& other = members[static_cast<std::size_t>(c)];
      double mean = 0.0;
      for (Eigen::Index j : other) mean += (points.row(i) - points.row(j)).norm();
      mean /= static_cast<double>(other.size());
      b = std::min(b, mean);
    }

    const double denom = std::max(a, b);
    total += (denom > 0.0) ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(m);
}

double default_tradeoff(int k, double silhouette, double lambda, int m) {
  if (m <= 1) return silhouette;
  return silhouette - lambda * static_cast<double>(k - 1) / static_cast<double>(m - 1);
}

StreamSelection select_streams(const CollabMatrix& weights,
                               const std::function<double(int, double)>& tradeoff,
                               int restarts, RngStream rng) {
  weights.validate();
  const int m = weights.client_count();

  StreamSelection sel;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= m; ++k) {
    ClusterPlan plan = kmeans(weights.w, k, restarts, rng.fork(static_cast<std::uint64_t>(k)));
    const double score = tradeoff(k, plan.silhouette);
    sel.table.push_back({k, plan.silhouette, score});
    if (score > best_score) {  // ties keep the smaller k
      best_score = score;
      sel.stream_count = k;
      sel.plan = std::move(plan);
    }
  }
  return sel;
}

CollabMatrix centroid_rows(const CollabMatrix& weights, const ClusterPlan& plan) {
  const auto m = weights.w.rows();
  if (static_cast<Eigen::Index>(plan.assign.size()) != m)
    throw dimension_error("centroid_rows: plan does not match matrix size");

  CollabMatrix out;
  out.w.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.w.row(i) = plan.centroids.row(plan.assign[static_cast<std::size_t>(i)]);
    double sum = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) sum += out.w(i, j);
    for (Eigen::Index j = 0; j < m; ++j) out.w(i, j) /= sum;
  }
  out.validate();
  return out;
}

}  // namespace ucfl
