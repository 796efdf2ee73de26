#include "ucfl/runio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ucfl/datagen.hpp"
#include "ucfl/loaders.hpp"

namespace ucfl {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw io_error(path.string() + ": cannot open for writing");
  return out;
}

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

int train_size_after_holdout(int n, double fraction) {
  int held = static_cast<int>(std::lround(fraction * n));
  held = std::clamp(held, 1, n - 1);
  return n - held;
}

RunResult dispatch(const std::string& algorithm, const RunConfig& run_cfg,
                   const FederationData& fed) {
  if (algorithm == "user-centric") return run_user_centric(run_cfg, fed);
  if (algorithm == "fedavg") return run_fedavg(run_cfg, fed);
  if (algorithm == "local") return run_local(run_cfg, fed);
  if (algorithm == "oracle") return run_oracle(run_cfg, fed);
  if (algorithm == "parallel") return run_parallel_user_centric(run_cfg, fed);
  throw validation_error("unknown algorithm \"" + algorithm + "\"");
}

void write_metrics_csv(const fs::path& path, const RunLog& log) {
  auto out = open_out(path);
  out << "round,client_id,train_loss,val_accuracy\n";
  for (std::size_t r = 0; r < log.rounds.size(); ++r)
    for (int i = 0; i < log.clients; ++i)
      out << r << ',' << i << ',' << fmt17(log.rounds[r].train_loss[static_cast<std::size_t>(i)])
          << ',' << fmt17(log.rounds[r].val_accuracy[static_cast<std::size_t>(i)]) << '\n';
}

void write_summary_csv(const fs::path& path, const RunLog& log) {
  auto out = open_out(path);
  out << "round,mean_acc,worst_acc\n";
  for (std::size_t r = 0; r < log.rounds.size(); ++r)
    out << r << ',' << fmt17(log.rounds[r].mean_acc) << ',' << fmt17(log.rounds[r].worst_acc)
        << '\n';
}

void write_score_table_csv(const fs::path& path, const std::vector<StreamScoreRow>& table) {
  auto out = open_out(path);
  out << "k,silhouette,tradeoff_score\n";
  for (const auto& row : table)
    out << row.k << ',' << fmt17(row.silhouette) << ',' << fmt17(row.score) << '\n';
}

// Local training has no model transfers; it advances by compute time alone.
double modeled_round_time(const RunLog& log, CommSystem sys) {
  sys.clients = log.clients;
  if (log.algorithm == "local") return expected_compute_time(sys);
  sys.ul_multiplier *= log.uplink_multiplier;
  return round_wall_time(sys, log.stream_count);
}

void write_timeline_csv(const fs::path& path, const RunLog& log, const CommSystem& comms) {
  const double round_time = modeled_round_time(log, comms);
  auto out = open_out(path);
  out << "t_over_Tdl,mean_acc,algorithm,m_t\n";
  const auto curve = log.mean_acc_curve();
  const int m_t = (log.algorithm == "local") ? 0 : log.stream_count;
  for (std::size_t r = 0; r < curve.size(); ++r)
    out << fmt17(static_cast<double>(r) * round_time / comms.t_downlink) << ',' << fmt17(curve[r])
        << ',' << log.algorithm << ',' << m_t << '\n';
}

json runlog_json(const RunLog& log, const json& echo, const std::string& hash,
                 const CommSystem& comms) {
  json doc;
  doc["algorithm"] = log.algorithm;
  doc["seed"] = log.seed;
  doc["clients"] = log.clients;
  doc["config"] = echo;
  doc["config_hash"] = hash;
  doc["stream_count"] = log.stream_count;
  doc["uplink_multiplier"] = log.uplink_multiplier;
  doc["round_time_model"] = modeled_round_time(log, comms);

  json rounds = json::array();
  for (std::size_t r = 0; r < log.rounds.size(); ++r) {
    const auto& m = log.rounds[r];
    rounds.push_back({{"round", r},
                      {"train_loss", m.train_loss},
                      {"val_accuracy", m.val_accuracy},
                      {"mean_acc", m.mean_acc},
                      {"worst_acc", m.worst_acc}});
  }
  doc["rounds"] = std::move(rounds);

  if (log.coeff) {
    const auto& c = *log.coeff;
    json coeff;
    coeff["delta"] = matrix_json(c.delta);
    coeff["sigma_sq"] = c.sigma_sq;
    coeff["mixing"] = matrix_json(c.mixing.w);
    coeff["effective"] = matrix_json(c.effective.w);
    coeff["stream_count"] = c.stream_count;
    if (c.plan) {
      coeff["cluster"] = {{"k", c.plan->k},
                          {"assign", c.plan->assign},
                          {"inertia", c.plan->inertia},
                          {"silhouette", c.plan->silhouette},
                          {"centroids", matrix_json(c.plan->centroids)}};
    }
    if (!c.score_table.empty()) {
      json table = json::array();
      for (const auto& row : c.score_table)
        table.push_back({{"k", row.k}, {"silhouette", row.silhouette}, {"score", row.score}});
      coeff["score_table"] = std::move(table);
    }
    doc["coefficient"] = std::move(coeff);
  }
  return doc;
}

// Silhouette at the chosen stream count, when a clustering happened.
double chosen_silhouette(const RunLog& log) {
  if (!log.coeff) return 0.0;
  if (log.coeff->plan) return log.coeff->plan->silhouette;
  for (const auto& row : log.coeff->score_table)
    if (row.k == log.coeff->stream_count) return row.silhouette;
  return 0.0;
}

std::string sanitize(const std::string& value) {
  std::string out = value;
  for (auto& ch : out)
    if (ch == '/' || ch == ' ' || ch == '\\') ch = '_';
  return out;
}

}  // namespace

FederationData build_federation(const DataConfig& data, int model_input_dim, int model_classes,
                                std::uint64_t seed) {
  const RngStream root(seed);

  LabeledDataset base;
  if (data.source == "blobs") {
    base = make_gaussian_blobs(data.blobs.classes, data.blobs.dim, data.blobs.samples,
                               data.blobs.spread, root.fork(rng_purpose::blobs));
  } else if (data.source == "idx") {
    base = load_idx(data.idx_images, data.idx_labels);
  } else if (data.source == "csv") {
    base = load_csv(data.csv_path);
  } else {
    throw validation_error("unknown data source \"" + data.source + "\"");
  }

  if (base.dim() != model_input_dim)
    throw validation_error("data: feature dim " + std::to_string(base.dim()) +
                           " does not match model input_dim " + std::to_string(model_input_dim));
  if (base.classes > model_classes)
    throw validation_error("data: " + std::to_string(base.classes) +
                           " classes exceed model classes " + std::to_string(model_classes));
  base.classes = model_classes;

  FederationData fed;
  if (data.partition == "dirichlet")
    fed = dirichlet_label_partition(base, data.clients, data.alpha, root.fork(rng_purpose::partition));
  else
    fed = split_uniform(base, data.clients, root.fork(rng_purpose::partition));

  if (data.shift == "rotate")
    fed = rotate_covariates(std::move(fed), data.groups, data.angles_deg);
  else if (data.shift == "permute")
    fed = permute_labels(std::move(fed), data.groups, root.fork(rng_purpose::label_permutation));
  return fed;
}

RunConfig make_run_config(const ExperimentConfig& cfg, const FederationData& fed, int threads) {
  int smallest_train = std::numeric_limits<int>::max();
  for (const auto& client : fed.clients)
    smallest_train = std::min(smallest_train, train_size_after_holdout(
                                                  static_cast<int>(client.size()),
                                                  cfg.data.holdout_fraction));

  RunConfig run;
  run.model = cfg.model;
  run.train = cfg.train;
  run.rounds = cfg.rounds;
  run.variance_batch = cfg.variance_batch.resolve(smallest_train);
  run.streams = cfg.streams.mode == "auto"    ? StreamsMode::Auto
                : cfg.streams.mode == "fixed" ? StreamsMode::Fixed
                                              : StreamsMode::All;
  run.stream_count = cfg.streams.k;
  run.tradeoff_lambda = cfg.streams.tradeoff_lambda;
  run.kmeans_restarts = cfg.streams.restarts;
  run.holdout_fraction = cfg.data.holdout_fraction;
  run.seed = cfg.seed;
  run.threads = threads;
  run.validate();
  return run;
}

void write_matrix_csv(const fs::path& path, const Mat& matrix) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out << ',';
      out << fmt17(matrix(i, j));
    }
    out << '\n';
  }
}

Mat read_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path.string() + ": cannot open");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw format_error(path.string() + ": line " + std::to_string(line_no) +
                           ": cannot parse \"" + cell + "\"");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw format_error(path.string() + ": line " + std::to_string(line_no) + " has " +
                         std::to_string(row.size()) + " cells, expected " +
                         std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw format_error(path.string() + ": empty matrix");
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

RunArtifacts run_experiment(const ExperimentConfig& cfg, int threads) {
  RunArtifacts artifacts;
  artifacts.echo = config_echo(cfg);
  artifacts.hash = config_hash(artifacts.echo);

  const FederationData fed =
      build_federation(cfg.data, cfg.model.input_dim, cfg.model.classes, cfg.seed);
  const RunConfig run_cfg = make_run_config(cfg, fed, threads);

  for (const auto& name : cfg.algorithms)
    artifacts.by_algorithm.emplace(name, dispatch(name, run_cfg, fed));
  return artifacts;
}

void run_to_directory(const ExperimentConfig& cfg, const fs::path& out_dir, int threads,
                      const std::string& config_path_note) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error(out_dir.string() + ": cannot create output directory");

  const RunArtifacts artifacts = run_experiment(cfg, threads);
  std::vector<std::string> outputs;

  CommSystem comms = cfg.comms;
  comms.clients = cfg.data.clients;

  bool wrote_shared = false;
  for (const auto& name : cfg.algorithms) {
    const auto& result = artifacts.by_algorithm.at(name);
    const fs::path dir = out_dir / name;
    fs::create_directories(dir, ec);
    if (ec) throw io_error(dir.string() + ": cannot create output directory");

    {
      auto out = open_out(dir / "runlog.json");
      out << runlog_json(result.log, artifacts.echo, artifacts.hash, comms).dump(2) << '\n';
    }
    write_metrics_csv(dir / "metrics.csv", result.log);
    write_summary_csv(dir / "summary.csv", result.log);
    write_timeline_csv(dir / "timeline.csv", result.log, comms);
    outputs.push_back(name + "/runlog.json");
    outputs.push_back(name + "/metrics.csv");
    outputs.push_back(name + "/summary.csv");
    outputs.push_back(name + "/timeline.csv");

    if (!wrote_shared && result.log.coeff) {
      write_matrix_csv(out_dir / "collab_matrix.csv", result.log.coeff->mixing.w);
      outputs.push_back("collab_matrix.csv");
      if (!result.log.coeff->score_table.empty()) {
        write_score_table_csv(out_dir / "score_table.csv", result.log.coeff->score_table);
        outputs.push_back("score_table.csv");
      }
      wrote_shared = true;
    }
  }

  json manifest;
  manifest["config_path"] = config_path_note;
  manifest["config"] = artifacts.echo;
  manifest["config_hash"] = artifacts.hash;
  std::sort(outputs.begin(), outputs.end());
  outputs.push_back("manifest.json");
  manifest["outputs"] = outputs;
  auto out = open_out(out_dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

void sweep_to_directory(const ExperimentConfig& cfg, const std::string& param,
                        const std::vector<std::string>& values, const fs::path& out_dir,
                        int threads) {
  static const std::vector<std::string> kParams = {"variance_batch_size", "streams",
                                                   "tradeoff_lambda", "rho"};
  if (std::find(kParams.begin(), kParams.end(), param) == kParams.end())
    throw config_error("sweep: unknown parameter \"" + param +
                       "\" (expected variance_batch_size, streams, tradeoff_lambda or rho)");
  if (values.empty()) throw config_error("sweep: empty value list");

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error(out_dir.string() + ": cannot create output directory");

  struct Row {
    std::string value;
    double mean_acc, worst_acc, silhouette, wall_time;
  };
  std::vector<Row> rows;

  for (const auto& value : values) {
    ExperimentConfig sub = cfg;
    if (param == "variance_batch_size") {
      json token;
      try {
        token = json::parse(value);
      } catch (const json::parse_error&) {
        token = value;  // bare token like n/3
      }
      sub.variance_batch = parse_batch_size(token);
    } else if (param == "streams") {
      if (value == "m" || value == "all") {
        sub.streams.mode = "fixed";
        sub.streams.k = sub.data.clients;
      } else {
        sub.streams.mode = "fixed";
        try {
          sub.streams.k = std::stoi(value);
        } catch (const std::exception&) {
          throw config_error("sweep: cannot parse stream count \"" + value + "\"");
        }
        if (sub.streams.k < 1 || sub.streams.k > sub.data.clients)
          throw config_error("sweep: stream count " + value + " outside [1, clients]");
      }
    } else if (param == "tradeoff_lambda") {
      try {
        sub.streams.tradeoff_lambda = std::stod(value);
      } catch (const std::exception&) {
        throw config_error("sweep: cannot parse lambda \"" + value + "\"");
      }
      sub.streams.mode = "auto";
    } else {  // rho
      try {
        sub.comms.uplink_ratio = std::stod(value);
      } catch (const std::exception&) {
        throw config_error("sweep: cannot parse rho \"" + value + "\"");
      }
      if (!(sub.comms.uplink_ratio > 0.0)) throw config_error("sweep: rho must be positive");
    }

    const fs::path sub_dir = out_dir / (param + "_" + sanitize(value));
    run_to_directory(sub, sub_dir, threads);

    // Aggregate from the personalized run when present, else the first one.
    const RunArtifacts artifacts = [&] {
      RunArtifacts a;
      a.echo = config_echo(sub);
      a.hash = config_hash(a.echo);
      return a;
    }();
    (void)artifacts;
    const std::string source =
        std::find(sub.algorithms.begin(), sub.algorithms.end(), "user-centric") !=
                sub.algorithms.end()
            ? "user-centric"
            : sub.algorithms.front();
    // Re-read the summary written by the sub-run to avoid recomputing.
    const fs::path summary = sub_dir / source / "summary.csv";
    std::ifstream in(summary);
    if (!in) throw io_error(summary.string() + ": missing sub-run summary");
    std::string line, last;
    std::getline(in, line);  // header
    while (std::getline(in, line))
      if (!line.empty()) last = line;
    std::stringstream ss(last);
    std::string cell;
    std::getline(ss, cell, ',');
    double mean_acc = 0.0, worst_acc = 0.0;
    std::getline(ss, cell, ',');
    mean_acc = std::stod(cell);
    std::getline(ss, cell, ',');
    worst_acc = std::stod(cell);

    // Stream count and silhouette from the sub-run's runlog.
    double silhouette = 0.0;
    double wall_time = 0.0;
    {
      std::ifstream login(sub_dir / source / "runlog.json");
      if (login) {
        json logdoc = json::parse(login);
        if (logdoc.contains("coefficient")) {
          const auto& c = logdoc.at("coefficient");
          if (c.contains("cluster")) silhouette = c.at("cluster").at("silhouette").get<double>();
        }
        wall_time = logdoc.at("round_time_model").get<double>() * sub.rounds /
                    sub.comms.t_downlink;
      }
    }
    rows.push_back({value, mean_acc, worst_acc, silhouette, wall_time});
  }

  auto out = open_out(out_dir / "sweep.csv");
  out << "value,final_mean_acc,final_worst_acc,silhouette,wall_time_over_tdl\n";
  for (const auto& r : rows)
    out << r.value << ',' << fmt17(r.mean_acc) << ',' << fmt17(r.worst_acc) << ','
        << fmt17(r.silhouette) << ',' << fmt17(r.wall_time) << '\n';
}

void bounds_sweep_to_csv(const json& doc, const fs::path& out_dir) {
  if (!doc.is_object()) throw config_error("bounds: document must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    static const std::set<std::string> allowed = {"loss_range", "vc_dim",  "delta",
                                                  "gamma",      "sizes",   "divergences_df",
                                                  "divergences_js", "target", "grid_points"};
    if (!allowed.count(key)) throw config_error("bounds: unknown key \"" + key + "\"");
  }
  if (!doc.contains("sizes") || !doc.at("sizes").is_array() || doc.at("sizes").empty())
    throw config_error("bounds: needs a non-empty \"sizes\" array");

  BoundInputs base;
  base.sizes = doc.at("sizes").get<std::vector<std::int64_t>>();
  const auto m = static_cast<Eigen::Index>(base.sizes.size());
  base.loss_range = doc.value("loss_range", 1.0);
  base.vc_dim = doc.value("vc_dim", 1.0);
  base.delta = doc.value("delta", 0.05);
  base.gamma = doc.value("gamma", 0.0);
  const int target = doc.value("target", 0);
  if (target < 0 || target >= m) throw config_error("bounds: target index out of range");
  const int grid = doc.value("grid_points", 101);
  if (grid < 2) throw config_error("bounds: need at least 2 grid points");

  std::optional<Vec> df, js;
  const auto load_div = [&](const char* key) -> std::optional<Vec> {
    if (!doc.contains(key)) return std::nullopt;
    const auto vals = doc.at(key).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(vals.size()) != m)
      throw config_error(std::string("bounds: \"") + key + "\" must match sizes length");
    Vec v(m);
    for (Eigen::Index j = 0; j < m; ++j) v[j] = vals[static_cast<std::size_t>(j)];
    return v;
  };
  df = load_div("divergences_df");
  js = load_div("divergences_js");
  if (!df && !js)
    throw config_error("bounds: needs divergences_df and/or divergences_js");

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error(out_dir.string() + ": cannot create output directory");
  auto out = open_out(out_dir / "bounds_sweep.csv");
  out << "w_self";
  for (Eigen::Index j = 0; j < m; ++j) out << ",w_" << j;
  if (df) out << ",bound_th1";
  if (js) out << ",bound_th2";
  out << '\n';

  for (int g = 0; g < grid; ++g) {
    const double w_self = static_cast<double>(g) / static_cast<double>(grid - 1);
    Vec w(m);
    if (m == 1) {
      w[0] = 1.0;
    } else {
      for (Eigen::Index j = 0; j < m; ++j)
        w[j] = (j == target) ? w_self : (1.0 - w_self) / static_cast<double>(m - 1);
    }
    out << fmt17(w_self);
    for (Eigen::Index j = 0; j < m; ++j) out << ',' << fmt17(w[j]);
    BoundInputs in = base;
    in.weights = w;
    if (df) {
      in.divergences = *df;
      out << ',' << fmt17(bound_th1(in));
    }
    if (js) {
      in.divergences = *js;
      out << ',' << fmt17(bound_th2(in));
    }
    out << '\n';
  }
}

int select_streams_from_csv(const fs::path& matrix_csv, double tradeoff_lambda, int restarts,
                            std::uint64_t seed, const fs::path& out_dir) {
  CollabMatrix weights;
  weights.w = read_matrix_csv(matrix_csv);
  weights.validate();
  const int m = weights.client_count();

  const auto selection = select_streams(
      weights, [&](int k, double s) { return default_tradeoff(k, s, tradeoff_lambda, m); },
      restarts, RngStream(seed).fork(rng_purpose::kmeans));

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error(out_dir.string() + ": cannot create output directory");
  write_score_table_csv(out_dir / "score_table.csv", selection.table);
  auto out = open_out(out_dir / "assignments.csv");
  out << "client_id,cluster\n";
  for (int i = 0; i < m; ++i)
    out << i << ',' << selection.plan.assign[static_cast<std::size_t>(i)] << '\n';
  return selection.stream_count;
}

}  // namespace ucfl
