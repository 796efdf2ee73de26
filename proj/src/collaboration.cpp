#include "ucfl/collaboration.hpp"

#include <cmath>

namespace ucfl {

void CollabMatrix::validate() const {
  if (w.rows() != w.cols()) throw dimension_error("collab matrix: must be square");
  if (!w.allFinite()) throw numeric_error("collab matrix: non-finite entry");
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (w(i, j) < 0.0) throw validation_error("collab matrix: negative weight");
      sum += w(i, j);
    }
    if (std::abs(sum - 1.0) >= 1e-9)
      throw validation_error("collab matrix: row " + std::to_string(i) + " sums to " +
                             std::to_string(sum));
  }
}

Mat pairwise_delta(const std::vector<CoefficientReport>& reports) {
  const auto m = static_cast<Eigen::Index>(reports.size());
  if (m < 1) throw validation_error("pairwise_delta: no reports");
  const Eigen::Index dim = reports.front().full_gradient.size();
  for (const auto& r : reports)
    if (r.full_gradient.size() != dim)
      throw dimension_error("pairwise_delta: gradient dimension mismatch");

  Mat delta = Mat::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double d = (reports[static_cast<std::size_t>(i)].full_gradient -
                        reports[static_cast<std::size_t>(j)].full_gradient)
                           .squaredNorm();
      delta(i, j) = d;
      delta(j, i) = d;
    }
  return delta;
}

CollabMatrix mixing_matrix(const Mat& delta, const std::vector<double>& sigma_sq,
                           const std::vector<std::int64_t>& n) {
  const auto m = delta.rows();
  if (delta.cols() != m) throw dimension_error("mixing_matrix: delta must be square");
  if (static_cast<Eigen::Index>(sigma_sq.size()) != m ||
      static_cast<Eigen::Index>(n.size()) != m)
    throw dimension_error("mixing_matrix: sigma/size vectors must match delta");
  for (double s : sigma_sq)
    if (!(s >= 0.0)) throw validation_error("mixing_matrix: variance must be nonnegative");
  for (auto ni : n)
    if (ni < 1) throw validation_error("mixing_matrix: dataset sizes must be >= 1");

  std::vector<double> sigma(sigma_sq.size());
  for (std::size_t i = 0; i < sigma_sq.size(); ++i) sigma[i] = std::sqrt(sigma_sq[i]);

  CollabMatrix out;
  out.w.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double denom = 2.0 * sigma[static_cast<std::size_t>(i)] * sigma[static_cast<std::size_t>(j)];
      double kernel;
      if (denom == 0.0) {
        kernel = (delta(i, j) == 0.0) ? 1.0 : 0.0;  // continuous limit
      } else {
        kernel = std::exp(-delta(i, j) / denom);
      }
      const double u = static_cast<double>(n[static_cast<std::size_t>(j)]) * kernel;
      out.w(i, j) = u;
      sum += u;
    }
    for (Eigen::Index j = 0; j < m; ++j) out.w(i, j) /= sum;
  }
  out.validate();
  return out;
}

Vec fedavg_weights(const std::vector<std::int64_t>& n) {
  if (n.empty()) throw validation_error("fedavg_weights: no clients");
  Vec w(static_cast<Eigen::Index>(n.size()));
  double sum = 0.0;
  for (std::size_t j = 0; j < n.size(); ++j) {
    if (n[j] < 1) throw validation_error("fedavg_weights: dataset sizes must be >= 1");
    // Mirrors the unnormalized kernel row with kernel = 1 so the homogeneous
    // mixing matrix reproduces these weights bit-for-bit.
    const double u = static_cast<double>(n[j]) * 1.0;
    w[static_cast<Eigen::Index>(j)] = u;
    sum += u;
  }
  for (Eigen::Index j = 0; j < w.size(); ++j) w[j] /= sum;
  return w;
}

}  // namespace ucfl
