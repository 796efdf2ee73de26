#include "ucfl/orchestrator.hpp"

#include <algorithm>
#include <cmath>

#include "ucfl/numerics.hpp"
#include "ucfl/parallel.hpp"

namespace ucfl {

namespace {

std::vector<TrainHoldout> split_federation(const RunConfig& cfg, const FederationData& fed) {
  const RngStream root(cfg.seed);
  std::vector<TrainHoldout> splits;
  splits.reserve(fed.clients.size());
  for (int i = 0; i < fed.client_count(); ++i)
    splits.push_back(split_holdout(fed.clients[static_cast<std::size_t>(i)], cfg.holdout_fraction,
                                   root.fork(rng_purpose::holdout).fork(static_cast<std::uint64_t>(i))));
  return splits;
}

RngStream update_stream(std::uint64_t seed, int client, int round) {
  return RngStream(seed)
      .fork(rng_purpose::client_update)
      .fork(static_cast<std::uint64_t>(client))
      .fork(static_cast<std::uint64_t>(round));
}

Params shared_init(const RunConfig& cfg) {
  return init_params(cfg.model, RngStream(cfg.seed).fork(rng_purpose::model_init));
}

template <class ModelOf>
RoundMetrics evaluate_round(const RunConfig& cfg, const std::vector<TrainHoldout>& splits,
                            ModelOf&& model_of) {
  const int m = static_cast<int>(splits.size());
  RoundMetrics metrics;
  metrics.train_loss.resize(static_cast<std::size_t>(m));
  metrics.val_accuracy.resize(static_cast<std::size_t>(m));
  double sum = 0.0;
  double worst = 1.0;
  for (int i = 0; i < m; ++i) {
    const Params& theta = model_of(i);
    metrics.train_loss[static_cast<std::size_t>(i)] =
        loss(cfg.model, theta, splits[static_cast<std::size_t>(i)].train);
    const double acc = accuracy(cfg.model, theta, splits[static_cast<std::size_t>(i)].holdout);
    metrics.val_accuracy[static_cast<std::size_t>(i)] = acc;
    sum += acc;
    worst = std::min(worst, acc);
  }
  metrics.mean_acc = sum / static_cast<double>(m);
  metrics.worst_acc = worst;
  return metrics;
}

// Stream reduction shared by the sequential and parallel personalized runs.
struct Reduction {
  CollabMatrix effective;
  std::optional<ClusterPlan> plan;
  std::vector<StreamScoreRow> table;
  int stream_count = 0;
};

Reduction reduce_streams(const RunConfig& cfg, const CollabMatrix& mixing) {
  const int m = mixing.client_count();
  Reduction red;
  red.stream_count = m;
  red.effective = mixing;

  if (cfg.streams == StreamsMode::Fixed) {
    if (cfg.stream_count < 1 || cfg.stream_count > m)
      throw validation_error("streams: fixed count " + std::to_string(cfg.stream_count) +
                             " outside [1, " + std::to_string(m) + "]");
    red.stream_count = cfg.stream_count;
    if (cfg.stream_count < m) {
      red.plan = kmeans(mixing.w, cfg.stream_count, cfg.kmeans_restarts,
                        RngStream(cfg.seed).fork(rng_purpose::kmeans));
    }
  } else if (cfg.streams == StreamsMode::Auto) {
    auto sel = select_streams(
        mixing,
        [&](int k, double s) { return default_tradeoff(k, s, cfg.tradeoff_lambda, m); },
        cfg.kmeans_restarts, RngStream(cfg.seed).fork(rng_purpose::kmeans));
    red.stream_count = sel.stream_count;
    red.table = std::move(sel.table);
    if (sel.stream_count < m) red.plan = std::move(sel.plan);
  }

  if (red.plan) red.effective = centroid_rows(mixing, *red.plan);
  return red;
}

CoefficientArtifacts make_artifacts(const CollabMatrix& mixing,
                                    const std::vector<CoefficientReport>& reports,
                                    Reduction red) {
  CoefficientArtifacts art;
  art.delta = pairwise_delta(reports);
  art.sigma_sq.reserve(reports.size());
  for (const auto& r : reports) art.sigma_sq.push_back(r.sigma_sq);
  art.mixing = mixing;
  art.effective = std::move(red.effective);
  art.plan = std::move(red.plan);
  art.score_table = std::move(red.table);
  art.stream_count = red.stream_count;
  return art;
}

Mat oracle_rows(const FederationData& fed, const std::vector<TrainHoldout>& splits) {
  const int m = fed.client_count();
  Mat rows = Mat::Zero(m, m);
  const int groups = fed.group_count();
  for (int g = 0; g < groups; ++g) {
    double sum = 0.0;
    for (int j = 0; j < m; ++j)
      if (fed.group_of[static_cast<std::size_t>(j)] == g)
        sum += static_cast<double>(splits[static_cast<std::size_t>(j)].train.size()) * 1.0;
    for (int i = 0; i < m; ++i) {
      if (fed.group_of[static_cast<std::size_t>(i)] != g) continue;
      for (int j = 0; j < m; ++j)
        if (fed.group_of[static_cast<std::size_t>(j)] == g)
          rows(i, j) = static_cast<double>(splits[static_cast<std::size_t>(j)].train.size()) * 1.0 / sum;
    }
  }
  return rows;
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  train.validate();
  if (rounds < 0) throw validation_error("run config: rounds must be nonnegative");
  if (variance_batch < 1) throw validation_error("run config: variance batch must be >= 1");
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
    throw validation_error("run config: holdout fraction must lie in (0, 1)");
  if (streams == StreamsMode::Fixed && stream_count < 1)
    throw validation_error("run config: fixed stream count must be >= 1");
  if (streams == StreamsMode::Auto && !(tradeoff_lambda >= 0.0))
    throw validation_error("run config: trade-off lambda must be nonnegative");
  if (kmeans_restarts < 1) throw validation_error("run config: restarts must be >= 1");
  if (threads < 1) throw validation_error("run config: thread count must be >= 1");
}

std::vector<double> RunLog::mean_acc_curve() const {
  std::vector<double> curve;
  curve.reserve(rounds.size());
  for (const auto& r : rounds) curve.push_back(r.mean_acc);
  return curve;
}

std::pair<CollabMatrix, std::vector<CoefficientReport>> coefficient_round(
    const RunConfig& cfg, const FederationData& fed, const Params& theta0) {
  cfg.validate();
  fed.validate();
  const int m = fed.client_count();
  const auto splits = split_federation(cfg, fed);
  const RngStream root(cfg.seed);

  std::vector<CoefficientReport> reports(static_cast<std::size_t>(m));
  parallel_for(cfg.threads, m, [&](int i) {
    try {
      reports[static_cast<std::size_t>(i)] = coefficient_report(
          cfg.model, theta0, splits[static_cast<std::size_t>(i)].train, cfg.variance_batch,
          root.fork(rng_purpose::variance).fork(static_cast<std::uint64_t>(i)));
    } catch (const numeric_error& e) {
      throw numeric_error("client " + std::to_string(i) + ": " + e.what());
    } catch (const validation_error& e) {
      throw validation_error("client " + std::to_string(i) + ": " + e.what());
    }
  });

  const Mat delta = pairwise_delta(reports);
  std::vector<double> sigma_sq;
  std::vector<std::int64_t> sizes;
  sigma_sq.reserve(reports.size());
  sizes.reserve(reports.size());
  for (const auto& r : reports) {
    sigma_sq.push_back(r.sigma_sq);
    sizes.push_back(r.n);
  }
  return {mixing_matrix(delta, sigma_sq, sizes), std::move(reports)};
}

RunResult run_with_mixing(const RunConfig& cfg, const FederationData& fed, const Mat& mixing,
                          const std::string& label, std::optional<CoefficientArtifacts> coeff) {
  cfg.validate();
  fed.validate();
  const int m = fed.client_count();
  if (mixing.rows() != m || mixing.cols() != m)
    throw dimension_error("run: mixing matrix must be m x m");

  const auto splits = split_federation(cfg, fed);
  const Params theta0 = shared_init(cfg);
  std::vector<Params> models(static_cast<std::size_t>(m), theta0);

  RunResult result;
  RunLog& log = result.log;
  log.algorithm = label;
  log.seed = cfg.seed;
  log.clients = m;
  log.stream_count = coeff ? coeff->stream_count : m;
  log.coeff = std::move(coeff);
  log.rounds.push_back(
      evaluate_round(cfg, splits, [&](int i) -> const Params& { return models[static_cast<std::size_t>(i)]; }));

  for (int round = 1; round <= cfg.rounds; ++round) {
    std::vector<Params> updates(static_cast<std::size_t>(m));
    try {
      parallel_for(cfg.threads, m, [&](int i) {
        try {
          updates[static_cast<std::size_t>(i)] =
              client_update(cfg.model, models[static_cast<std::size_t>(i)],
                            splits[static_cast<std::size_t>(i)].train, cfg.train,
                            update_stream(cfg.seed, i, round));
        } catch (const numeric_error& e) {
          throw numeric_error("round " + std::to_string(round) + ", client " + std::to_string(i) +
                              ": " + e.what());
        }
      });
      for (int i = 0; i < m; ++i)
        models[static_cast<std::size_t>(i)] = weighted_combine(mixing.row(i).transpose(), updates);
    } catch (const numeric_error& e) {
      throw run_aborted_error(e.what(), std::move(log));
    }
    log.rounds.push_back(
        evaluate_round(cfg, splits, [&](int i) -> const Params& { return models[static_cast<std::size_t>(i)]; }));
  }

  result.final_models = std::move(models);
  return result;
}

RunResult run_user_centric(const RunConfig& cfg, const FederationData& fed) {
  cfg.validate();
  fed.validate();
  const Params theta0 = shared_init(cfg);
  auto [mixing, reports] = coefficient_round(cfg, fed, theta0);
  Reduction red = reduce_streams(cfg, mixing);
  const Mat effective = red.effective.w;
  const int m_t = red.stream_count;
  auto result = run_with_mixing(cfg, fed, effective, "user-centric",
                                make_artifacts(mixing, reports, std::move(red)));
  result.log.stream_count = m_t;
  return result;
}

RunResult run_fedavg(const RunConfig& cfg, const FederationData& fed) {
  cfg.validate();
  fed.validate();
  const int m = fed.client_count();
  const auto splits = split_federation(cfg, fed);

  std::vector<std::int64_t> sizes;
  sizes.reserve(static_cast<std::size_t>(m));
  for (const auto& s : splits) sizes.push_back(s.train.size());
  const Vec weights = fedavg_weights(sizes);

  Params global = shared_init(cfg);

  RunResult result;
  RunLog& log = result.log;
  log.algorithm = "fedavg";
  log.seed = cfg.seed;
  log.clients = m;
  log.stream_count = 1;
  log.rounds.push_back(evaluate_round(cfg, splits, [&](int) -> const Params& { return global; }));

  for (int round = 1; round <= cfg.rounds; ++round) {
    std::vector<Params> updates(static_cast<std::size_t>(m));
    try {
      parallel_for(cfg.threads, m, [&](int i) {
        try {
          updates[static_cast<std::size_t>(i)] =
              client_update(cfg.model, global, splits[static_cast<std::size_t>(i)].train, cfg.train,
                            update_stream(cfg.seed, i, round));
        } catch (const numeric_error& e) {
          throw numeric_error("round " + std::to_string(round) + ", client " + std::to_string(i) +
                              ": " + e.what());
        }
      });
      global = weighted_combine(weights, updates);
    } catch (const numeric_error& e) {
      throw run_aborted_error(e.what(), std::move(log));
    }
    log.rounds.push_back(evaluate_round(cfg, splits, [&](int) -> const Params& { return global; }));
  }

  result.final_models.assign(static_cast<std::size_t>(m), global);
  return result;
}

RunResult run_local(const RunConfig& cfg, const FederationData& fed) {
  cfg.validate();
  fed.validate();
  const int m = fed.client_count();
  const auto splits = split_federation(cfg, fed);
  std::vector<Params> models(static_cast<std::size_t>(m), shared_init(cfg));

  RunResult result;
  RunLog& log = result.log;
  log.algorithm = "local";
  log.seed = cfg.seed;
  log.clients = m;
  log.stream_count = m;
  log.rounds.push_back(
      evaluate_round(cfg, splits, [&](int i) -> const Params& { return models[static_cast<std::size_t>(i)]; }));

  for (int round = 1; round <= cfg.rounds; ++round) {
    try {
      parallel_for(cfg.threads, m, [&](int i) {
        try {
          models[static_cast<std::size_t>(i)] =
              client_update(cfg.model, models[static_cast<std::size_t>(i)],
                            splits[static_cast<std::size_t>(i)].train, cfg.train,
                            update_stream(cfg.seed, i, round));
        } catch (const numeric_error& e) {
          throw numeric_error("round " + std::to_string(round) + ", client " + std::to_string(i) +
                              ": " + e.what());
        }
      });
    } catch (const numeric_error& e) {
      throw run_aborted_error(e.what(), std::move(log));
    }
    log.rounds.push_back(
        evaluate_round(cfg, splits, [&](int i) -> const Params& { return models[static_cast<std::size_t>(i)]; }));
  }

  result.final_models = std::move(models);
  return result;
}

RunResult run_oracle(const RunConfig& cfg, const FederationData& fed) {
  cfg.validate();
  fed.validate();
  const auto splits = split_federation(cfg, fed);
  auto result = run_with_mixing(cfg, fed, oracle_rows(fed, splits), "oracle");
  result.log.stream_count = fed.group_count();
  return result;
}

RunResult run_parallel_with_mixing(const RunConfig& cfg, const FederationData& fed,
                                   const Mat& stream_mixing, const std::vector<int>& stream_of,
                                   const std::string& label,
                                   std::optional<CoefficientArtifacts> coeff) {
  cfg.validate();
  fed.validate();
  const int m = fed.client_count();
  const int m_t = static_cast<int>(stream_mixing.rows());
  if (stream_mixing.cols() != m)
    throw dimension_error("parallel run: stream mixing needs one column per client");
  if (static_cast<int>(stream_of.size()) != m)
    throw dimension_error("parallel run: stream map needs one entry per client");
  for (int s : stream_of)
    if (s < 0 || s >= m_t) throw validation_error("parallel run: stream index out of range");

  const auto splits = split_federation(cfg, fed);
  const Params theta0 = shared_init(cfg);
  std::vector<Params> streams(static_cast<std::size_t>(m_t), theta0);

  RunResult result;
  RunLog& log = result.log;
  log.algorithm = label;
  log.seed = cfg.seed;
  log.clients = m;
  log.stream_count = m_t;
  log.uplink_multiplier = static_cast<double>(m_t);
  log.coeff = std::move(coeff);

  const auto eval = [&] {
    return evaluate_round(cfg, splits, [&](int i) -> const Params& {
      return streams[static_cast<std::size_t>(stream_of[static_cast<std::size_t>(i)])];
    });
  };
  log.rounds.push_back(eval());

  for (int round = 1; round <= cfg.rounds; ++round) {
    // updates[s][j]: client j's local optimization of stream s's model. One
    // batch schedule per (client, round), replayed for every stream.
    std::vector<std::vector<Params>> updates(static_cast<std::size_t>(m_t),
                                             std::vector<Params>(static_cast<std::size_t>(m)));
    try {
      parallel_for(cfg.threads, m, [&](int j) {
        try {
          for (int s = 0; s < m_t; ++s)
            updates[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] =
                client_update(cfg.model, streams[static_cast<std::size_t>(s)],
                              splits[static_cast<std::size_t>(j)].train, cfg.train,
                              update_stream(cfg.seed, j, round));
        } catch (const numeric_error& e) {
          throw numeric_error("round " + std::to_string(round) + ", client " + std::to_string(j) +
                              ": " + e.what());
        }
      });
      for (int s = 0; s < m_t; ++s)
        streams[static_cast<std::size_t>(s)] = weighted_combine(
            stream_mixing.row(s).transpose(), updates[static_cast<std::size_t>(s)]);
    } catch (const numeric_error& e) {
      throw run_aborted_error(e.what(), std::move(log));
    }
    log.rounds.push_back(eval());
  }

  result.final_models.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    result.final_models.push_back(streams[static_cast<std::size_t>(stream_of[static_cast<std::size_t>(i)])]);
  return result;
}

RunResult run_parallel_user_centric(const RunConfig& cfg, const FederationData& fed) {
  cfg.validate();
  fed.validate();
  const int m = fed.client_count();
  const Params theta0 = shared_init(cfg);
  auto [mixing, reports] = coefficient_round(cfg, fed, theta0);
  Reduction red = reduce_streams(cfg, mixing);

  Mat stream_mixing;
  std::vector<int> stream_of(static_cast<std::size_t>(m));
  if (red.plan) {
    const int m_t = red.stream_count;
    stream_mixing.resize(m_t, m);
    for (int s = 0; s < m_t; ++s) {
      stream_mixing.row(s) = red.plan->centroids.row(s);
      double sum = 0.0;
      for (int j = 0; j < m; ++j) sum += stream_mixing(s, j);
      for (int j = 0; j < m; ++j) stream_mixing(s, j) /= sum;
    }
    stream_of = red.plan->assign;
  } else {
    stream_mixing = mixing.w;
    for (int i = 0; i < m; ++i) stream_of[static_cast<std::size_t>(i)] = i;
  }

  return run_parallel_with_mixing(cfg, fed, stream_mixing, stream_of, "parallel-user-centric",
                                  make_artifacts(mixing, reports, std::move(red)));
}

std::vector<TimelinePoint> rescale_timeline(const RunLog& log, const CommSystem& sys,
                                            int stream_count) {
  return rescale_timeline(log.mean_acc_curve(), sys, stream_count, log.uplink_multiplier);
}

}  // namespace ucfl
