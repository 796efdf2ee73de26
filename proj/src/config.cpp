#include "ucfl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace ucfl {

namespace {

using nlohmann::json;

struct Checker {
  std::vector<std::string> errors;

  void fail(const std::string& where, const std::string& what) {
    errors.push_back(where + ": " + what);
  }

  void known_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
    if (!j.is_object()) return;
    for (const auto& [key, value] : j.items())
      if (!allowed.count(key)) fail(where, "unknown key \"" + key + "\"");
  }

  template <class T>
  T number(const json& j, const std::string& where, const std::string& key, T fallback,
           double lo, double hi) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) {
      fail(where, "\"" + key + "\" must be a number");
      return fallback;
    }
    const double d = v.get<double>();
    if (!(d >= lo && d <= hi)) {
      fail(where, "\"" + key + "\" = " + std::to_string(d) + " outside [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]");
      return fallback;
    }
    if constexpr (std::is_integral_v<T>) {
      if (std::floor(d) != d) {
        fail(where, "\"" + key + "\" must be an integer");
        return fallback;
      }
    }
    return v.get<T>();
  }

  std::string one_of(const json& j, const std::string& where, const std::string& key,
                     std::string fallback, const std::set<std::string>& allowed) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_string()) {
      fail(where, "\"" + key + "\" must be a string");
      return fallback;
    }
    const auto s = v.get<std::string>();
    if (!allowed.count(s)) {
      std::string opts;
      for (const auto& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
      fail(where, "\"" + key + "\" = \"" + s + "\" (expected one of: " + opts + ")");
      return fallback;
    }
    return s;
  }

  std::string text(const json& j, const std::string& where, const std::string& key,
                   std::string fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) {
      fail(where, "\"" + key + "\" must be a string");
      return fallback;
    }
    return j.at(key).get<std::string>();
  }

  bool flag(const json& j, const std::string& where, const std::string& key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) {
      fail(where, "\"" + key + "\" must be a boolean");
      return fallback;
    }
    return j.at(key).get<bool>();
  }
};

BatchSizeSpec parse_batch_spec(const json& v, const std::string& where, Checker& check) {
  BatchSizeSpec spec;
  if (v.is_number()) {
    const double d = v.get<double>();
    if (std::floor(d) != d || d < 1) {
      check.fail(where, "batch size must be a positive integer");
      return spec;
    }
    spec.relative = false;
    spec.absolute = v.get<int>();
    return spec;
  }
  if (v.is_string()) {
    // Accepts "n", "n/3", "2n/3".
    const std::string s = v.get<std::string>();
    const auto npos = s.find('n');
    if (npos == std::string::npos) {
      check.fail(where, "relative batch size must mention n, e.g. \"n/3\"");
      return spec;
    }
    spec.relative = true;
    try {
      spec.scale_num = (npos == 0) ? 1 : std::stoi(s.substr(0, npos));
      const auto rest = s.substr(npos + 1);
      if (rest.empty()) {
        spec.scale_den = 1;
      } else if (rest[0] == '/' && rest.size() > 1) {
        spec.scale_den = std::stoi(rest.substr(1));
      } else {
        throw std::invalid_argument(s);
      }
    } catch (const std::exception&) {
      check.fail(where, "cannot parse batch size \"" + s + "\" (expected forms: 100, n, n/3, 2n/3)");
      return spec;
    }
    if (spec.scale_num < 1 || spec.scale_den < 1)
      check.fail(where, "batch size scale must be positive");
    return spec;
  }
  check.fail(where, "batch size must be a number or a string like \"n/3\"");
  return spec;
}

const std::set<std::string> kAlgorithms = {"user-centric", "fedavg", "local", "oracle", "parallel"};

}  // namespace

BatchSizeSpec parse_batch_size(const nlohmann::json& value) {
  Checker check;
  const auto spec = parse_batch_spec(value, "batch size", check);
  if (!check.errors.empty()) throw config_error(check.errors.front());
  return spec;
}

int BatchSizeSpec::resolve(int smallest_train_size) const {
  if (!relative) return absolute;
  const long long v = static_cast<long long>(smallest_train_size) * scale_num / scale_den;
  return static_cast<int>(std::max(1LL, v));
}

nlohmann::json BatchSizeSpec::echo() const {
  if (!relative) return absolute;
  std::string s = (scale_num == 1) ? "n" : std::to_string(scale_num) + "n";
  if (scale_den != 1) s += "/" + std::to_string(scale_den);
  return s;
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
  Checker check;
  ExperimentConfig cfg;

  if (!doc.is_object()) throw config_error("config: document must be a JSON object");
  check.known_keys(doc, "config",
                   {"seed", "rounds", "model", "train", "data", "coefficient", "streams",
                    "algorithms", "comms"});

  cfg.seed = check.number<std::uint64_t>(doc, "config", "seed", 1, 0, 1.8e19);
  cfg.rounds = check.number<int>(doc, "config", "rounds", 10, 0, 1e9);

  if (doc.contains("model")) {
    const auto& m = doc.at("model");
    check.known_keys(m, "model", {"kind", "input_dim", "classes", "hidden", "activation"});
    const auto kind = check.one_of(m, "model", "kind", "softmax-linear", {"softmax-linear", "mlp-1"});
    cfg.model.kind = (kind == "mlp-1") ? ModelKind::Mlp1 : ModelKind::SoftmaxLinear;
    cfg.model.input_dim = check.number<int>(m, "model", "input_dim", 2, 1, 1e7);
    cfg.model.classes = check.number<int>(m, "model", "classes", 4, 2, 1e6);
    cfg.model.hidden = check.number<int>(m, "model", "hidden", 16, 1, 1e6);
    const auto act = check.one_of(m, "model", "activation", "relu", {"relu", "tanh"});
    cfg.model.activation = (act == "tanh") ? Activation::Tanh : Activation::Relu;
  } else {
    cfg.model.input_dim = 2;
    cfg.model.classes = 4;
    cfg.model.hidden = 16;
  }

  if (doc.contains("train")) {
    const auto& t = doc.at("train");
    check.known_keys(t, "train", {"epochs", "batch_size", "learning_rate", "momentum"});
    cfg.train.epochs = check.number<int>(t, "train", "epochs", 1, 1, 1e6);
    cfg.train.batch_size = check.number<int>(t, "train", "batch_size", 32, 1, 1e9);
    cfg.train.learning_rate = check.number<double>(t, "train", "learning_rate", 0.1, 1e-15, 1e6);
    cfg.train.momentum = check.number<double>(t, "train", "momentum", 0.9, 0.0, 0.999999);
  }

  if (doc.contains("coefficient")) {
    const auto& c = doc.at("coefficient");
    check.known_keys(c, "coefficient", {"variance_batch_size"});
    if (c.contains("variance_batch_size"))
      cfg.variance_batch = parse_batch_spec(c.at("variance_batch_size"), "coefficient", check);
    else
      cfg.variance_batch = parse_batch_spec(json("n/3"), "coefficient", check);
  } else {
    cfg.variance_batch = parse_batch_spec(json("n/3"), "coefficient", check);
  }

  if (doc.contains("streams")) {
    const auto& s = doc.at("streams");
    check.known_keys(s, "streams", {"mode", "k", "tradeoff_lambda", "restarts"});
    cfg.streams.mode = check.one_of(s, "streams", "mode", "all", {"all", "auto", "fixed"});
    cfg.streams.k = check.number<int>(s, "streams", "k", 0, 0, 1e9);
    cfg.streams.tradeoff_lambda = check.number<double>(s, "streams", "tradeoff_lambda", 0.1, 0.0, 1e6);
    cfg.streams.restarts = check.number<int>(s, "streams", "restarts", 32, 1, 1e6);
    if (cfg.streams.mode == "fixed" && cfg.streams.k < 1)
      check.fail("streams", "fixed mode needs k >= 1");
  }

  if (doc.contains("algorithms")) {
    const auto& a = doc.at("algorithms");
    if (!a.is_array() || a.empty()) {
      check.fail("algorithms", "must be a non-empty array");
    } else {
      cfg.algorithms.clear();
      for (const auto& v : a) {
        if (!v.is_string() || !kAlgorithms.count(v.get<std::string>())) {
          check.fail("algorithms", "unknown algorithm " + v.dump());
          continue;
        }
        const auto name = v.get<std::string>();
        if (std::find(cfg.algorithms.begin(), cfg.algorithms.end(), name) != cfg.algorithms.end())
          check.fail("algorithms", "duplicate algorithm \"" + name + "\"");
        else
          cfg.algorithms.push_back(name);
      }
      if (cfg.algorithms.empty()) check.fail("algorithms", "no valid algorithms selected");
    }
  }

  if (doc.contains("comms")) {
    const auto& c = doc.at("comms");
    check.known_keys(c, "comms",
                     {"rho", "t_dl", "t_min", "mu_inv", "dl_serialized", "ul_multiplier"});
    cfg.comms.uplink_ratio = check.number<double>(c, "comms", "rho", 4.0, 1e-9, 1e9);
    cfg.comms.t_downlink = check.number<double>(c, "comms", "t_dl", 1.0, 1e-9, 1e9);
    cfg.comms.t_min = check.number<double>(c, "comms", "t_min", 1.0, 0.0, 1e9);
    cfg.comms.mean_extra_delay = check.number<double>(c, "comms", "mu_inv", 1.0, 0.0, 1e9);
    cfg.comms.dl_serialized = check.flag(c, "comms", "dl_serialized", true);
    cfg.comms.ul_multiplier = check.number<double>(c, "comms", "ul_multiplier", 1.0, 1e-9, 1e9);
  }

  if (doc.contains("data")) {
    const auto& d = doc.at("data");
    check.known_keys(d, "data",
                     {"source", "blobs", "idx", "csv", "clients", "partition", "alpha", "shift",
                      "groups", "angles_deg", "holdout_fraction"});
    cfg.data.source = check.one_of(d, "data", "source", "blobs", {"blobs", "idx", "csv"});
    if (d.contains("blobs")) {
      const auto& b = d.at("blobs");
      check.known_keys(b, "data.blobs", {"classes", "dim", "samples", "spread"});
      cfg.data.blobs.classes = check.number<int>(b, "data.blobs", "classes", 4, 2, 1e6);
      cfg.data.blobs.dim = check.number<int>(b, "data.blobs", "dim", 2, 2, 1e7);
      cfg.data.blobs.samples = check.number<int>(b, "data.blobs", "samples", 400, 2, 1e9);
      cfg.data.blobs.spread = check.number<double>(b, "data.blobs", "spread", 0.5, 1e-12, 1e9);
    }
    if (d.contains("idx")) {
      const auto& x = d.at("idx");
      check.known_keys(x, "data.idx", {"images", "labels"});
      cfg.data.idx_images = check.text(x, "data.idx", "images", "");
      cfg.data.idx_labels = check.text(x, "data.idx", "labels", "");
    }
    if (d.contains("csv")) {
      const auto& x = d.at("csv");
      check.known_keys(x, "data.csv", {"path"});
      cfg.data.csv_path = check.text(x, "data.csv", "path", "");
    }
    cfg.data.clients = check.number<int>(d, "data", "clients", 4, 1, 1e7);
    cfg.data.partition = check.one_of(d, "data", "partition", "dirichlet", {"dirichlet", "uniform"});
    cfg.data.alpha = check.number<double>(d, "data", "alpha", 0.4, 1e-9, 1e9);
    cfg.data.shift = check.one_of(d, "data", "shift", "none", {"none", "rotate", "permute"});
    cfg.data.groups = check.number<int>(d, "data", "groups", 1, 1, 1e7);
    cfg.data.holdout_fraction = check.number<double>(d, "data", "holdout_fraction", 0.2, 1e-9, 0.999999999);
    if (d.contains("angles_deg")) {
      const auto& ang = d.at("angles_deg");
      if (!ang.is_array()) {
        check.fail("data", "\"angles_deg\" must be an array of numbers");
      } else {
        for (const auto& v : ang) {
          if (!v.is_number())
            check.fail("data", "\"angles_deg\" entries must be numbers");
          else
            cfg.data.angles_deg.push_back(v.get<double>());
        }
      }
    }
  }

  // Cross-field consistency.
  if (cfg.data.source == "blobs") {
    if (cfg.model.input_dim != cfg.data.blobs.dim)
      check.fail("config", "model input_dim " + std::to_string(cfg.model.input_dim) +
                               " does not match blob dim " + std::to_string(cfg.data.blobs.dim));
    if (cfg.model.classes != cfg.data.blobs.classes)
      check.fail("config", "model classes " + std::to_string(cfg.model.classes) +
                               " does not match blob classes " + std::to_string(cfg.data.blobs.classes));
    if (cfg.data.blobs.samples < cfg.data.clients)
      check.fail("config", "fewer blob samples than clients");
  }
  if (cfg.data.source == "idx" && (cfg.data.idx_images.empty() || cfg.data.idx_labels.empty()))
    check.fail("config", "idx source needs data.idx.images and data.idx.labels");
  if (cfg.data.source == "csv" && cfg.data.csv_path.empty())
    check.fail("config", "csv source needs data.csv.path");
  if (cfg.data.shift == "rotate" &&
      static_cast<int>(cfg.data.angles_deg.size()) != cfg.data.groups)
    check.fail("config", "rotate shift needs exactly \"groups\" angles, got " +
                             std::to_string(cfg.data.angles_deg.size()));
  if (cfg.streams.mode == "fixed" && cfg.streams.k > cfg.data.clients)
    check.fail("config", "fixed stream count exceeds client count");

  if (!check.errors.empty()) {
    std::string msg = "config: " + std::to_string(check.errors.size()) + " violation(s)";
    for (const auto& e : check.errors) msg += "\n  - " + e;
    throw config_error(msg);
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path + ": cannot open config");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error(path + ": " + e.what());
  }
  return parse_config(doc);
}

nlohmann::json config_echo(const ExperimentConfig& cfg) {
  json doc;
  doc["seed"] = cfg.seed;
  doc["rounds"] = cfg.rounds;
  doc["model"] = {
      {"kind", cfg.model.kind == ModelKind::Mlp1 ? "mlp-1" : "softmax-linear"},
      {"input_dim", cfg.model.input_dim},
      {"classes", cfg.model.classes},
      {"hidden", cfg.model.hidden},
      {"activation", cfg.model.activation == Activation::Tanh ? "tanh" : "relu"},
  };
  doc["train"] = {
      {"epochs", cfg.train.epochs},
      {"batch_size", cfg.train.batch_size},
      {"learning_rate", cfg.train.learning_rate},
      {"momentum", cfg.train.momentum},
  };
  doc["coefficient"] = {{"variance_batch_size", cfg.variance_batch.echo()}};
  doc["streams"] = {
      {"mode", cfg.streams.mode},
      {"k", cfg.streams.k},
      {"tradeoff_lambda", cfg.streams.tradeoff_lambda},
      {"restarts", cfg.streams.restarts},
  };
  doc["algorithms"] = cfg.algorithms;
  doc["comms"] = {
      {"rho", cfg.comms.uplink_ratio},
      {"t_dl", cfg.comms.t_downlink},
      {"t_min", cfg.comms.t_min},
      {"mu_inv", cfg.comms.mean_extra_delay},
      {"dl_serialized", cfg.comms.dl_serialized},
      {"ul_multiplier", cfg.comms.ul_multiplier},
  };
  doc["data"] = {
      {"source", cfg.data.source},
      {"blobs",
       {{"classes", cfg.data.blobs.classes},
        {"dim", cfg.data.blobs.dim},
        {"samples", cfg.data.blobs.samples},
        {"spread", cfg.data.blobs.spread}}},
      {"idx", {{"images", cfg.data.idx_images}, {"labels", cfg.data.idx_labels}}},
      {"csv", {{"path", cfg.data.csv_path}}},
      {"clients", cfg.data.clients},
      {"partition", cfg.data.partition},
      {"alpha", cfg.data.alpha},
      {"shift", cfg.data.shift},
      {"groups", cfg.data.groups},
      {"angles_deg", cfg.data.angles_deg},
      {"holdout_fraction", cfg.data.holdout_fraction},
  };
  return doc;
}

std::string config_hash(const nlohmann::json& echo) {
  const std::string dump = echo.dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

}  // namespace ucfl
