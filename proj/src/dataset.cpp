#include "ucfl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ucfl {

void LabeledDataset::validate() const {
  if (features.rows() != static_cast<Eigen::Index>(labels.size()))
    throw validation_error("dataset: " + std::to_string(features.rows()) + " feature rows vs " +
                           std::to_string(labels.size()) + " labels");
  if (classes < 1) throw validation_error("dataset: class count must be positive");
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] < 0 || labels[i] >= classes)
      throw validation_error("dataset: label " + std::to_string(labels[i]) + " at row " +
                             std::to_string(i) + " outside [0, " + std::to_string(classes) + ")");
  if (!features.allFinite()) throw validation_error("dataset: non-finite feature value");
}

LabeledDataset LabeledDataset::select(std::span<const int> rows) const {
  LabeledDataset out;
  out.classes = classes;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
    out.labels[i] = labels[static_cast<std::size_t>(rows[i])];
  }
  return out;
}

std::vector<int> LabeledDataset::label_histogram() const {
  std::vector<int> hist(static_cast<std::size_t>(classes), 0);
  for (int y : labels) ++hist[static_cast<std::size_t>(y)];
  return hist;
}

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::LabelShift: return "label-shift";
    case Scenario::LabelCovariateShift: return "label-covariate-shift";
    case Scenario::ConceptShift: return "concept-shift";
    case Scenario::Custom: return "custom";
  }
  return "custom";
}

int FederationData::group_count() const {
  int g = 0;
  for (int v : group_of) g = std::max(g, v + 1);
  return g;
}

void FederationData::validate() const {
  if (clients.empty()) throw validation_error("federation: needs at least one client");
  if (group_of.size() != clients.size())
    throw validation_error("federation: group tag count does not match client count");
  for (std::size_t i = 0; i < clients.size(); ++i) {
    if (clients[i].size() < 1)
      throw validation_error("federation: client " + std::to_string(i) + " is empty");
    clients[i].validate();
  }
}

TrainHoldout split_holdout(const LabeledDataset& data, double holdout_fraction, RngStream rng) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
    throw validation_error("split_holdout: fraction must lie in (0, 1)");
  const int n = static_cast<int>(data.size());
  if (n < 2) throw validation_error("split_holdout: need at least two samples");

  int held = static_cast<int>(std::lround(holdout_fraction * n));
  held = std::clamp(held, 1, n - 1);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  std::vector<int> hold_idx(order.begin(), order.begin() + held);
  std::vector<int> train_idx(order.begin() + held, order.end());
  std::sort(hold_idx.begin(), hold_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  TrainHoldout out;
  out.train = data.select(train_idx);
  out.holdout = data.select(hold_idx);
  return out;
}

}  // namespace ucfl
