#pragma once

#include <span>
#include <string>
#include <vector>

#include "ucfl/rng.hpp"
#include "ucfl/types.hpp"

namespace ucfl {

// One client's labeled examples: n x p feature matrix plus class indices.
struct LabeledDataset {
  Mat features;             // n x p
  std::vector<int> labels;  // values in [0, classes)
  int classes = 0;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  void validate() const;

  // New dataset holding the given rows, in the given order.
  LabeledDataset select(std::span<const int> rows) const;

  std::vector<int> label_histogram() const;
};

enum class Scenario { LabelShift, LabelCovariateShift, ConceptShift, Custom };

const char* to_string(Scenario s);

// A federation: per-client datasets plus ground-truth group tags.
struct FederationData {
  std::vector<LabeledDataset> clients;
  std::vector<int> group_of;  // one entry per client; all zero for one group
  Scenario scenario = Scenario::Custom;

  int client_count() const { return static_cast<int>(clients.size()); }
  int group_count() const;

  void validate() const;
};

struct TrainHoldout {
  LabeledDataset train;
  LabeledDataset holdout;
};

// Seeded split into disjoint train/holdout parts. The holdout takes
// round(fraction * n) samples (at least 1); training keeps the rest.
TrainHoldout split_holdout(const LabeledDataset& data, double holdout_fraction, RngStream rng);

}  // namespace ucfl
