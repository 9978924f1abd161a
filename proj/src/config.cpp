#include "hetsgd/config.hpp"

#include "hetsgd/errors.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hetsgd {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Strategy, std::string_view>, 8> kStrategyNames{{
    {Strategy::kOptimal, "Optimal"},
    {Strategy::kCleanOnly, "CleanOnly"},
    {Strategy::kSameClean, "SameClean"},
    {Strategy::kSameNoisy, "SameNoisy"},
    {Strategy::kAlgorithm2, "Algorithm2"},
    {Strategy::kCleanFirst, "CF"},
    {Strategy::kNoisyFirst, "NF"},
    {Strategy::kArbitraryOrder, "AO"},
}};

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  const std::set<std::string_view> keys(allowed);
  for (const auto& item : j.items()) {
    if (!keys.count(item.key())) {
      throw ConfigError("unknown key '" + item.key() + "' in " + std::string(where));
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

double read_radius(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kUnboundedRadius;
    throw ConfigError("radius must be a number or \"inf\"");
  }
  if (!j.is_number()) throw ConfigError("radius must be a number or \"inf\"");
  return j.get<double>();
}

json data_to_json(const DataSource& d) {
  json j;
  switch (d.kind) {
    case DataSourceKind::kSynthetic:
      j = {{"source", "synthetic"},
           {"dim", d.synthetic.dim},
           {"size", d.synthetic.size},
           {"flip_rate", d.synthetic.flip_rate}};
      break;
    case DataSourceKind::kCsv:
      j = {{"source", "csv"}, {"path", d.path}};
      break;
    case DataSourceKind::kLibsvm:
      j = {{"source", "libsvm"}, {"path", d.path}};
      break;
  }
  if (d.project_to) j["project_to"] = *d.project_to;
  return j;
}

DataSource data_from_json(const json& j) {
  reject_unknown(j, {"source", "dim", "size", "flip_rate", "path", "project_to"}, "data");
  DataSource d;
  std::string source = "synthetic";
  read(j, "source", source);
  if (source == "synthetic") {
    d.kind = DataSourceKind::kSynthetic;
    if (j.contains("path")) throw ConfigError("synthetic data takes no 'path'");
    read(j, "dim", d.synthetic.dim);
    read(j, "size", d.synthetic.size);
    read(j, "flip_rate", d.synthetic.flip_rate);
  } else if (source == "csv" || source == "libsvm") {
    d.kind = source == "csv" ? DataSourceKind::kCsv : DataSourceKind::kLibsvm;
    for (const char* k : {"dim", "size", "flip_rate"}) {
      if (j.contains(k)) throw ConfigError(std::string("file data takes no '") + k + "'");
    }
    read(j, "path", d.path);
    if (d.path.empty()) throw ConfigError("file data needs a 'path'");
  } else {
    throw ConfigError("data.source must be synthetic, csv or libsvm");
  }
  if (j.contains("project_to")) {
    Eigen::Index p = 0;
    read(j, "project_to", p);
    d.project_to = p;
  }
  return d;
}

}  // namespace

std::string_view to_string(Strategy s) {
  for (const auto& [k, name] : kStrategyNames) {
    if (k == s) return name;
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  for (const auto& [k, n] : kStrategyNames) {
    if (n == name) return k;
  }
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (!(lambda > 0) || !std::isfinite(lambda)) throw ConfigError("lambda must be positive");
  if (!(radius >= 0)) throw ConfigError("radius must be nonnegative");
  if (!(beta_clean > 0 && beta_clean < 1)) throw ConfigError("beta_clean must lie in (0, 1)");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (c2_grid_points < 1) throw ConfigError("c2_grid_points must be at least 1");
  if (c2_order != "both" && c2_order != "algorithm2" && c2_order != "clean_first" &&
      c2_order != "noisy_first") {
    throw ConfigError("c2_order must be both, algorithm2, clean_first or noisy_first");
  }
  for (double c : c_grid) {
    if (!(c > 0)) throw ConfigError("c_grid entries must be positive");
  }
  for (double c : c2_grid) {
    if (!(c > 0)) throw ConfigError("c2_grid entries must be positive");
  }
  if (data.kind == DataSourceKind::kSynthetic) {
    if (data.synthetic.dim < 1 || data.synthetic.size < 1) {
      throw ConfigError("synthetic data needs dim >= 1 and size >= 1");
    }
    if (!(data.synthetic.flip_rate >= 0 && data.synthetic.flip_rate <= 1)) {
      throw ConfigError("flip_rate must lie in [0, 1]");
    }
  }
  if (data.project_to && *data.project_to < 1) throw ConfigError("project_to must be positive");
  if (std::holds_alternative<CleanNoise>(noisy_noise) && !sweep.empty()) {
    throw ConfigError("a sweep needs a parameterized noisy mechanism");
  }
}

json noise_to_json(const NoiseMechanism& noise) {
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CleanNoise>) {
          return {{"kind", "clean"}};
        } else if constexpr (std::is_same_v<T, LocalDpNoise>) {
          return {{"kind", "dp"}, {"epsilon", n.epsilon}};
        } else if constexpr (std::is_same_v<T, LabelFlipNoise>) {
          return {{"kind", "rcn"}, {"sigma", n.sigma}};
        } else {
          return {{"kind", "gaussian"}, {"variance", n.variance}};
        }
      },
      noise);
}

NoiseMechanism noise_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("oracle needs a 'kind'");
  std::string kind;
  read(j, "kind", kind);
  if (kind == "clean") {
    reject_unknown(j, {"kind"}, "clean oracle");
    return CleanNoise{};
  }
  if (kind == "dp") {
    reject_unknown(j, {"kind", "epsilon"}, "dp oracle");
    LocalDpNoise n;
    read(j, "epsilon", n.epsilon);
    if (!(n.epsilon > 0)) throw ConfigError("epsilon must be positive");
    return n;
  }
  if (kind == "rcn") {
    reject_unknown(j, {"kind", "sigma"}, "rcn oracle");
    LabelFlipNoise n;
    read(j, "sigma", n.sigma);
    if (!(n.sigma >= 0 && n.sigma < 0.5)) throw ConfigError("sigma must lie in [0, 0.5)");
    return n;
  }
  if (kind == "gaussian") {
    reject_unknown(j, {"kind", "variance"}, "gaussian oracle");
    GaussianNoise n;
    read(j, "variance", n.variance);
    if (!(n.variance >= 0)) throw ConfigError("variance must be nonnegative");
    return n;
  }
  throw ConfigError("unknown oracle kind '" + kind + "'");
}

json to_json(const ExperimentConfig& c) {
  json strategies = json::array();
  for (auto s : c.strategies) strategies.push_back(std::string(to_string(s)));
  json j = {
      {"lambda", c.lambda},
      {"loss", std::string(to_string(c.loss))},
      {"data", data_to_json(c.data)},
      {"beta_clean", c.beta_clean},
      {"batch_size", c.batch_size},
      {"clean_oracle", noise_to_json(c.clean_noise)},
      {"noisy_oracle", noise_to_json(c.noisy_noise)},
      {"sweep", c.sweep},
      {"c_grid", c.c_grid},
      {"c2_grid", c.c2_grid},
      {"c2_grid_points", c.c2_grid_points},
      {"c2_order", c.c2_order},
      {"line_search", c.line_search},
      {"strategies", strategies},
      {"trials", c.trials},
      {"seed", c.seed},
      {"threads", c.threads},
      {"record_timing", c.record_timing},
      {"output_dir", c.output_dir},
  };
  if (std::isinf(c.radius)) {
    j["radius"] = "inf";
  } else {
    j["radius"] = c.radius;
  }
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  reject_unknown(j,
                 {"lambda", "loss", "radius", "data", "beta_clean", "batch_size", "clean_oracle",
                  "noisy_oracle", "sweep", "c_grid", "c2_grid", "c2_grid_points", "c2_order",
                  "line_search", "strategies", "trials", "seed", "threads", "record_timing",
                  "output_dir"},
                 "config");
  ExperimentConfig c;
  read(j, "lambda", c.lambda);
  if (j.contains("loss")) {
    std::string loss;
    read(j, "loss", loss);
    try {
      c.loss = parse_loss(loss);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("radius")) c.radius = read_radius(j.at("radius"));
  if (j.contains("data")) c.data = data_from_json(j.at("data"));
  read(j, "beta_clean", c.beta_clean);
  read(j, "batch_size", c.batch_size);
  if (j.contains("clean_oracle")) c.clean_noise = noise_from_json(j.at("clean_oracle"));
  if (j.contains("noisy_oracle")) c.noisy_noise = noise_from_json(j.at("noisy_oracle"));
  read(j, "sweep", c.sweep);
  read(j, "c_grid", c.c_grid);
  read(j, "c2_grid", c.c2_grid);
  read(j, "c2_grid_points", c.c2_grid_points);
  read(j, "c2_order", c.c2_order);
  read(j, "line_search", c.line_search);
  if (j.contains("strategies")) {
    std::vector<std::string> names;
    read(j, "strategies", names);
    for (const auto& n : names) c.strategies.push_back(parse_strategy(n));
  }
  read(j, "trials", c.trials);
  read(j, "seed", c.seed);
  read(j, "threads", c.threads);
  read(j, "record_timing", c.record_timing);
  read(j, "output_dir", c.output_dir);
  c.validate();
  return c;
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace hetsgd
