#pragma once

#include <string>

#include "ucfl/dataset.hpp"

namespace ucfl {

/// IDX image/label pair (EMNIST/MNIST tooling layout: big-endian dimensions,
/// unsigned bytes). Features come back scaled to [0, 1].
LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path);

/// CSV with a header row; the column named "label" holds class indices and
/// every other column is a numeric feature.
LabeledDataset load_csv(const std::string& path);

}  // namespace ucfl
