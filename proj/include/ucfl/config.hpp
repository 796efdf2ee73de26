#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucfl/client.hpp"
#include "ucfl/comms.hpp"
#include "ucfl/model.hpp"
#include "ucfl/orchestrator.hpp"

namespace ucfl {

// Mini-batch size given either absolutely ("100") or relative to the smallest
// client training set ("n/3", "2n/3", "n").
struct BatchSizeSpec {
  bool relative = false;
  int absolute = 1;
  int scale_num = 1;
  int scale_den = 1;

  int resolve(int smallest_train_size) const;
  nlohmann::json echo() const;
};

struct BlobConfig {
  int classes = 4;
  int dim = 2;
  int samples = 400;
  double spread = 0.5;
};

struct DataConfig {
  std::string source = "blobs";  // blobs | idx | csv
  BlobConfig blobs;
  std::string idx_images;
  std::string idx_labels;
  std::string csv_path;
  int clients = 4;
  std::string partition = "dirichlet";  // dirichlet | uniform
  double alpha = 0.4;
  std::string shift = "none";  // none | rotate | permute
  int groups = 1;
  std::vector<double> angles_deg;
  double holdout_fraction = 0.2;
};

struct StreamConfig {
  std::string mode = "all";  // all | auto | fixed
  int k = 0;
  double tradeoff_lambda = 0.1;
  int restarts = 32;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int rounds = 10;
  ModelSpec model;
  LocalTrainConfig train;
  BatchSizeSpec variance_batch;
  StreamConfig streams;
  std::vector<std::string> algorithms{"user-centric", "fedavg", "local"};
  CommSystem comms;
  DataConfig data;
};

/// Parses and validates a config document. Every schema violation found is
/// collected; a single config_error lists them all.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Parses a standalone batch-size value (number or "n/3"-style token).
BatchSizeSpec parse_batch_size(const nlohmann::json& value);

ExperimentConfig load_config_file(const std::string& path);

/// The fully resolved config (all defaults materialized). Feeding the echo
/// back through parse_config reproduces the identical document.
nlohmann::json config_echo(const ExperimentConfig& cfg);

/// FNV-1a content hash of the canonical serialized echo.
std::string config_hash(const nlohmann::json& echo);

}  // namespace ucfl
