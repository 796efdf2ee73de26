#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ucfl/config.hpp"
#include "ucfl/runio.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

int effective_threads(int flag_value) {
  // UCFL_THREADS takes precedence over --threads when set.
  if (const char* env = std::getenv("UCFL_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
    std::cerr << "ucfl: ignoring invalid UCFL_THREADS=\"" << env << "\"\n";
  }
  return flag_value;
}

void write_error_json(const std::string& out_dir, const std::string& kind,
                      const std::string& message) {
  if (out_dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) return;
  std::ofstream out(std::filesystem::path(out_dir) / "error.json");
  if (!out) return;
  nlohmann::json doc;
  doc["error"] = {{"kind", kind}, {"message", message}};
  out << doc.dump(2) << '\n';
}

int report(const std::string& out_dir, const std::string& kind, int code,
           const std::string& message) {
  std::cerr << "ucfl: " << kind << " error: " << message << '\n';
  write_error_json(out_dir, kind, message);
  return code;
}

template <class Fn>
int guarded(const std::string& out_dir, Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const ucfl::config_error& e) {
    return report(out_dir, "config", kExitConfig, e.what());
  } catch (const ucfl::validation_error& e) {
    return report(out_dir, "config", kExitConfig, e.what());
  } catch (const ucfl::run_aborted_error& e) {
    return report(out_dir, "numeric", kExitNumeric, e.what());
  } catch (const ucfl::numeric_error& e) {
    return report(out_dir, "numeric", kExitNumeric, e.what());
  } catch (const ucfl::format_error& e) {
    return report(out_dir, "io", kExitIo, e.what());
  } catch (const ucfl::io_error& e) {
    return report(out_dir, "io", kExitIo, e.what());
  } catch (const std::exception& e) {
    return report(out_dir, "internal", 1, e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale personalized federated learning simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;
  int threads = 1;

  const auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* copt = cmd->add_option("--config", config_path, "Path to the JSON config");
    if (needs_config) copt->required();
    cmd->add_option("--out", out_dir, "Output directory")->required();
    cmd->add_option("--seed", seed_override, "Override the config seed")
        ->each([&](const std::string&) { has_seed_override = true; });
    cmd->add_option("--threads", threads, "Worker threads for client updates")
        ->check(CLI::PositiveNumber);
  };

  auto* run_cmd = app.add_subcommand("run", "Run the configured experiment");
  add_common(run_cmd, true);

  auto* sweep_cmd = app.add_subcommand("sweep", "Run one experiment per parameter value");
  add_common(sweep_cmd, true);
  std::string sweep_param;
  std::vector<std::string> sweep_values;
  sweep_cmd->add_option("--param", sweep_param,
                        "variance_batch_size | streams | tradeoff_lambda | rho")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")
      ->required()
      ->delimiter(',');

  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate the excess-risk bound sweep");
  add_common(bounds_cmd, true);

  auto* select_cmd =
      app.add_subcommand("select-streams", "Pick the stream count for a saved mixing matrix");
  add_common(select_cmd, false);
  std::string matrix_path;
  double lambda = 0.1;
  int restarts = 32;
  std::uint64_t select_seed = 1;
  select_cmd->add_option("--matrix", matrix_path, "Collaboration matrix CSV")->required();
  select_cmd->add_option("--lambda", lambda, "Trade-off weight on the stream count");
  select_cmd->add_option("--restarts", restarts, "k-means restarts")->check(CLI::PositiveNumber);
  select_cmd->add_option("--select-seed", select_seed, "Seed for the clustering");

  CLI11_PARSE(app, argc, argv);

  const int workers = effective_threads(threads);

  if (run_cmd->parsed()) {
    return guarded(out_dir, [&] {
      ucfl::ExperimentConfig cfg = ucfl::load_config_file(config_path);
      if (has_seed_override) cfg.seed = seed_override;
      const auto started = std::chrono::steady_clock::now();
      ucfl::run_to_directory(cfg, out_dir, workers, config_path);
      const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
      std::cerr << "ucfl: run finished in " << elapsed.count() << " s, outputs in " << out_dir
                << '\n';
    });
  }
  if (sweep_cmd->parsed()) {
    return guarded(out_dir, [&] {
      ucfl::ExperimentConfig cfg = ucfl::load_config_file(config_path);
      if (has_seed_override) cfg.seed = seed_override;
      ucfl::sweep_to_directory(cfg, sweep_param, sweep_values, out_dir, workers);
      std::cerr << "ucfl: sweep finished, outputs in " << out_dir << '\n';
    });
  }
  if (bounds_cmd->parsed()) {
    return guarded(out_dir, [&] {
      std::ifstream in(config_path);
      if (!in) throw ucfl::io_error(config_path + ": cannot open config");
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ucfl::config_error(config_path + ": " + e.what());
      }
      ucfl::bounds_sweep_to_csv(doc, out_dir);
      std::cerr << "ucfl: bound sweep written to " << out_dir << '\n';
    });
  }
  // select-streams
  return guarded(out_dir, [&] {
    const int streams = ucfl::select_streams_from_csv(matrix_path, lambda, restarts,
                                                      select_seed, out_dir);
    std::cout << streams << '\n';
  });
}
