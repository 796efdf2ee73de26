#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucfl/config.hpp"
#include "ucfl/orchestrator.hpp"

namespace ucfl {

/// Builds the configured federation (source dataset, partition, shift).
FederationData build_federation(const DataConfig& data, int model_input_dim, int model_classes,
                                std::uint64_t seed);

/// Translates the experiment config into the orchestrator's run config;
/// resolves the relative variance batch size against the smallest client
/// training set.
RunConfig make_run_config(const ExperimentConfig& cfg, const FederationData& fed, int threads);

// 17-significant-digit CSV matrix I/O (m rows, m columns).
void write_matrix_csv(const std::filesystem::path& path, const Mat& matrix);
Mat read_matrix_csv(const std::filesystem::path& path);

struct RunArtifacts {
  std::map<std::string, RunResult> by_algorithm;
  nlohmann::json echo;
  std::string hash;
};

/// Runs every configured algorithm. Pure with respect to the filesystem.
RunArtifacts run_experiment(const ExperimentConfig& cfg, int threads);

/// Runs the experiment and writes all declared outputs under out_dir:
/// per-algorithm runlog.json / metrics.csv / summary.csv / timeline.csv,
/// shared collab_matrix.csv and score_table.csv (when a coefficient round
/// ran), and manifest.json.
void run_to_directory(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                      int threads, const std::string& config_path_note = "");

/// One sub-run per value of the swept parameter plus an aggregate sweep.csv.
/// Supported parameters: variance_batch_size, streams, tradeoff_lambda, rho.
void sweep_to_directory(const ExperimentConfig& cfg, const std::string& param,
                        const std::vector<std::string>& values,
                        const std::filesystem::path& out_dir, int threads);

/// Bound sweep: the target's own weight w varies over a uniform grid in
/// [0, 1] with the remainder split evenly among the other sources; emits
/// bounds_sweep.csv with the weight vector and both bound values per row.
void bounds_sweep_to_csv(const nlohmann::json& doc, const std::filesystem::path& out_dir);

/// Stream selection on a saved collaboration matrix: writes score_table.csv
/// and assignments.csv, returns the chosen stream count.
int select_streams_from_csv(const std::filesystem::path& matrix_csv, double tradeoff_lambda,
                            int restarts, std::uint64_t seed,
                            const std::filesystem::path& out_dir);

}  // namespace ucfl
