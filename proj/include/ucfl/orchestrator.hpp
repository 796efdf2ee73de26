#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ucfl/client.hpp"
#include "ucfl/clustering.hpp"
#include "ucfl/collaboration.hpp"
#include "ucfl/comms.hpp"
#include "ucfl/dataset.hpp"
#include "ucfl/model.hpp"

namespace ucfl {

enum class StreamsMode { All, Auto, Fixed };

// One experiment run: model, local training, round count, coefficient-round
// variance batch, stream reduction policy and seeding.
struct RunConfig {
  ModelSpec model;
  LocalTrainConfig train;
  int rounds = 0;
  int variance_batch = 1;  // mini-batch size n_k for the variance estimate
  StreamsMode streams = StreamsMode::All;
  int stream_count = 0;  // used by StreamsMode::Fixed
  double tradeoff_lambda = 0.1;
  int kmeans_restarts = 32;
  double holdout_fraction = 0.2;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

struct RoundMetrics {
  std::vector<double> train_loss;    // one entry per client
  std::vector<double> val_accuracy;  // one entry per client
  double mean_acc = 0.0;
  double worst_acc = 0.0;
};

// Coefficient-round byproducts kept for inspection and serialization.
struct CoefficientArtifacts {
  Mat delta;
  std::vector<double> sigma_sq;
  CollabMatrix mixing;     // full per-user matrix
  CollabMatrix effective;  // after stream reduction (equals mixing when m_t = m)
  std::optional<ClusterPlan> plan;
  std::vector<StreamScoreRow> score_table;  // filled in Auto mode
  int stream_count = 0;
};

struct RunLog {
  std::string algorithm;
  std::uint64_t seed = 0;
  int clients = 0;
  std::vector<RoundMetrics> rounds;  // rounds.size() == T + 1; index 0 is pre-training
  std::optional<CoefficientArtifacts> coeff;
  int stream_count = 1;
  double uplink_multiplier = 1.0;

  std::vector<double> mean_acc_curve() const;
};

struct RunResult {
  RunLog log;
  std::vector<Params> final_models;  // one per client
};

// Thrown when training diverges; carries whatever rounds completed.
struct run_aborted_error : numeric_error {
  RunLog partial;
  run_aborted_error(const std::string& msg, RunLog log)
      : numeric_error(msg), partial(std::move(log)) {}
};

/// One-shot round before training: every client reports its full gradient and
/// variance estimate at the shared starting point, and the server assembles
/// the pairwise distances and the mixing matrix.
std::pair<CollabMatrix, std::vector<CoefficientReport>> coefficient_round(
    const RunConfig& cfg, const FederationData& fed, const Params& theta0);

/// Personalized training: mixing matrix from the coefficient round, optional
/// stream reduction, then T synchronous rounds of local updates and per-user
/// aggregation.
RunResult run_user_centric(const RunConfig& cfg, const FederationData& fed);

/// Single global model, size-proportional aggregation.
RunResult run_fedavg(const RunConfig& cfg, const FederationData& fed);

/// No aggregation: every client trains alone.
RunResult run_local(const RunConfig& cfg, const FederationData& fed);

/// One independent FedAvg instance per ground-truth group.
RunResult run_oracle(const RunConfig& cfg, const FederationData& fed);

/// Parallel variant: every client locally updates all m_t stream models each
/// round and the server aggregates each stream from its own updates. Uplink
/// cost grows by the stream count, which is logged.
RunResult run_parallel_user_centric(const RunConfig& cfg, const FederationData& fed);

/// Round-synchronous loop with an arbitrary per-client aggregation matrix
/// (row i mixes the clients' updates into client i's next model). Building
/// block for the algorithms above and for degeneration checks.
RunResult run_with_mixing(const RunConfig& cfg, const FederationData& fed, const Mat& mixing,
                          const std::string& label,
                          std::optional<CoefficientArtifacts> coeff = std::nullopt);

/// Same loop for stream-level mixing: `stream_mixing` has one row per stream,
/// `stream_of` maps each client to the stream it receives.
RunResult run_parallel_with_mixing(const RunConfig& cfg, const FederationData& fed,
                                   const Mat& stream_mixing, const std::vector<int>& stream_of,
                                   const std::string& label,
                                   std::optional<CoefficientArtifacts> coeff = std::nullopt);

/// Accuracy-versus-modeled-time curve for a finished run.
std::vector<TimelinePoint> rescale_timeline(const RunLog& log, const CommSystem& sys,
                                            int stream_count);

}  // namespace ucfl
