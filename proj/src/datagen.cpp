#include "ucfl/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>

namespace ucfl {

namespace {

// Integer counts proportional to weights, summing exactly to total
// (largest-remainder rounding; ties broken toward the smaller index).
std::vector<int> apportion(const std::vector<double>& weights, int total) {
  const std::size_t m = weights.size();
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  std::vector<int> counts(m, 0);
  if (wsum <= 0.0) {
    for (int i = 0; i < total; ++i) ++counts[static_cast<std::size_t>(i) % m];
    return counts;
  }
  std::vector<double> frac(m);
  int assigned = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double target = weights[i] / wsum * total;
    counts[i] = static_cast<int>(std::floor(target));
    frac[i] = target - counts[i];
    assigned += counts[i];
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (int r = 0; r < total - assigned; ++r) ++counts[order[static_cast<std::size_t>(r)]];
  return counts;
}

// 90-degree counterclockwise rotations of a row-major side x side grid.
Vec rotate_grid(const Vec& row, int side, int quarter_turns) {
  Vec cur = row;
  for (int t = 0; t < quarter_turns; ++t) {
    Vec next(row.size());
    for (int r = 0; r < side; ++r)
      for (int c = 0; c < side; ++c)
        next[r * side + c] = cur[c * side + (side - 1 - r)];
    cur = next;
  }
  return cur;
}

}  // namespace

std::vector<int> contiguous_groups(int clients, int groups) {
  std::vector<int> g(static_cast<std::size_t>(clients));
  for (int i = 0; i < clients; ++i)
    g[static_cast<std::size_t>(i)] = static_cast<int>((static_cast<long long>(i) * groups) / clients);
  return g;
}

LabeledDataset make_gaussian_blobs(int classes, int dim, int samples, double spread, RngStream rng) {
  if (classes < 2) throw validation_error("blobs: need at least 2 classes");
  if (dim < 2) throw validation_error("blobs: need dimension >= 2");
  if (samples < classes) throw validation_error("blobs: need at least one sample per class");
  if (!(spread > 0.0)) throw validation_error("blobs: spread must be positive");

  // Class centers equally spaced on the unit circle in the first two coords.
  Mat centers = Mat::Zero(classes, dim);
  for (int c = 0; c < classes; ++c) {
    const double phi = 2.0 * std::numbers::pi * c / classes;
    centers(c, 0) = std::cos(phi);
    centers(c, 1) = std::sin(phi);
  }

  LabeledDataset out;
  out.classes = classes;
  out.features.resize(samples, dim);
  out.labels.resize(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const int y = i % classes;
    out.labels[static_cast<std::size_t>(i)] = y;
    for (int d = 0; d < dim; ++d)
      out.features(i, d) = centers(y, d) + spread * rng.next_normal();
  }
  return out;
}

FederationData dirichlet_label_partition(const LabeledDataset& data, int clients, double alpha,
                                         RngStream rng) {
  data.validate();
  if (clients < 1) throw validation_error("dirichlet partition: client count must be positive");
  if (!(alpha > 0.0)) throw validation_error("dirichlet partition: alpha must be positive");
  if (data.size() < clients)
    throw validation_error("dirichlet partition: fewer samples than clients");

  const int C = data.classes;
  std::vector<std::vector<int>> pools(static_cast<std::size_t>(C));
  for (int i = 0; i < data.size(); ++i)
    pools[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)])].push_back(i);

  constexpr int kMaxAttempts = 10;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    RngStream sub = rng.fork(static_cast<std::uint64_t>(attempt));

    // Per-client class proportions.
    std::vector<std::vector<double>> prop(static_cast<std::size_t>(clients));
    for (auto& row : prop) row = sub.next_dirichlet(alpha, C);

    std::vector<std::vector<int>> assigned(static_cast<std::size_t>(clients));
    for (int c = 0; c < C; ++c) {
      auto pool = pools[static_cast<std::size_t>(c)];
      sub.shuffle(pool);
      std::vector<double> col(static_cast<std::size_t>(clients));
      for (int i = 0; i < clients; ++i) col[static_cast<std::size_t>(i)] = prop[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
      const auto counts = apportion(col, static_cast<int>(pool.size()));
      std::size_t cursor = 0;
      for (int i = 0; i < clients; ++i) {
        auto& dst = assigned[static_cast<std::size_t>(i)];
        dst.insert(dst.end(), pool.begin() + static_cast<long>(cursor),
                   pool.begin() + static_cast<long>(cursor) + counts[static_cast<std::size_t>(i)]);
        cursor += static_cast<std::size_t>(counts[static_cast<std::size_t>(i)]);
      }
    }

    const bool all_nonempty = std::all_of(assigned.begin(), assigned.end(),
                                          [](const auto& v) { return !v.empty(); });
    if (!all_nonempty) continue;

    FederationData fed;
    fed.scenario = Scenario::LabelShift;
    fed.group_of.assign(static_cast<std::size_t>(clients), 0);
    fed.clients.reserve(static_cast<std::size_t>(clients));
    for (auto& idx : assigned) {
      std::sort(idx.begin(), idx.end());  // canonical sample order per client
      fed.clients.push_back(data.select(idx));
    }
    return fed;
  }
  throw validation_error("dirichlet partition: a client stayed empty after " +
                         std::to_string(kMaxAttempts) + " attempts");
}

FederationData split_uniform(const LabeledDataset& data, int clients, RngStream rng) {
  data.validate();
  if (clients < 1) throw validation_error("uniform split: client count must be positive");
  if (data.size() < clients) throw validation_error("uniform split: fewer samples than clients");

  const int n = static_cast<int>(data.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  FederationData fed;
  fed.scenario = Scenario::Custom;
  fed.group_of.assign(static_cast<std::size_t>(clients), 0);
  int cursor = 0;
  for (int i = 0; i < clients; ++i) {
    const int take = n / clients + (i < n % clients ? 1 : 0);
    std::vector<int> idx(order.begin() + cursor, order.begin() + cursor + take);
    std::sort(idx.begin(), idx.end());
    fed.clients.push_back(data.select(idx));
    cursor += take;
  }
  return fed;
}

FederationData rotate_covariates(FederationData fed, int groups, const std::vector<double>& angles_deg) {
  fed.validate();
  if (groups < 1) throw validation_error("rotate: group count must be positive");
  if (static_cast<int>(angles_deg.size()) != groups)
    throw validation_error("rotate: expected " + std::to_string(groups) + " angles, got " +
                           std::to_string(angles_deg.size()));

  const Eigen::Index p = fed.clients.front().dim();
  const bool planar = (p == 2);
  int side = 0;
  if (!planar) {
    side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(p))));
    if (static_cast<Eigen::Index>(side) * side != p)
      throw validation_error("rotate: features must be planar (p=2) or a square grid");
  }

  fed.group_of = contiguous_groups(fed.client_count(), groups);
  for (int i = 0; i < fed.client_count(); ++i) {
    const double angle = angles_deg[static_cast<std::size_t>(fed.group_of[static_cast<std::size_t>(i)])];
    auto& feats = fed.clients[static_cast<std::size_t>(i)].features;
    if (angle == 0.0) continue;
    if (planar) {
      const double rad = angle * std::numbers::pi / 180.0;
      double c = std::cos(rad), s = std::sin(rad);
      // Exact entries at quarter turns keep right-angle scenarios clean.
      const double q = std::fmod(std::fmod(angle, 360.0) + 360.0, 360.0);
      if (q == 90.0) { c = 0.0; s = 1.0; }
      else if (q == 180.0) { c = -1.0; s = 0.0; }
      else if (q == 270.0) { c = 0.0; s = -1.0; }
      Mat rot(2, 2);
      rot << c, -s, s, c;
      feats = (rot * feats.transpose()).transpose();
    } else {
      const double ratio = angle / 90.0;
      if (std::abs(ratio - std::lround(ratio)) > 1e-9)
        throw validation_error("rotate: grid data supports multiples of 90 degrees, got " +
                               std::to_string(angle));
      const int quarter_turns = static_cast<int>(((std::lround(ratio) % 4) + 4) % 4);
      if (quarter_turns == 0) continue;
      for (Eigen::Index r = 0; r < feats.rows(); ++r)
        feats.row(r) = rotate_grid(feats.row(r).transpose(), side, quarter_turns).transpose();
    }
  }
  fed.scenario = Scenario::LabelCovariateShift;
  return fed;
}

FederationData permute_labels(FederationData fed, int groups, RngStream rng) {
  fed.validate();
  if (groups < 1) throw validation_error("permute: group count must be positive");
  const int C = fed.clients.front().classes;
  if (C < 2) throw validation_error("permute: need at least 2 classes");

  std::vector<std::vector<int>> perm(static_cast<std::size_t>(groups));
  for (int g = 0; g < groups; ++g) {
    if (g == 0) {
      // Group 0 keeps the identity permutation as the reference frame.
      perm[0].resize(static_cast<std::size_t>(C));
      std::iota(perm[0].begin(), perm[0].end(), 0);
    } else {
      perm[static_cast<std::size_t>(g)] = rng.fork(static_cast<std::uint64_t>(g)).next_permutation_of(C);
    }
  }

  fed.group_of = contiguous_groups(fed.client_count(), groups);
  for (int i = 0; i < fed.client_count(); ++i) {
    const auto& pi = perm[static_cast<std::size_t>(fed.group_of[static_cast<std::size_t>(i)])];
    for (auto& y : fed.clients[static_cast<std::size_t>(i)].labels)
      y = pi[static_cast<std::size_t>(y)];
  }
  fed.scenario = Scenario::ConceptShift;
  return fed;
}

}  // namespace ucfl
