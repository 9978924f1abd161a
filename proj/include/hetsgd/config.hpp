#ifndef HETSGD_CONFIG_HPP
#define HETSGD_CONFIG_HPP

#include "hetsgd/core.hpp"
#include "hetsgd/oracles.hpp"
#include "hetsgd/synthetic.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hetsgd {

enum class Strategy {
  kOptimal,
  kCleanOnly,
  kSameClean,
  kSameNoisy,
  kAlgorithm2,
  kCleanFirst,
  kNoisyFirst,
  kArbitraryOrder,
};

/// "Optimal", "CleanOnly", "SameClean", "SameNoisy", "Algorithm2", "CF",
/// "NF", "AO".
std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

enum class DataSourceKind { kSynthetic, kCsv, kLibsvm };

struct DataSource {
  DataSourceKind kind = DataSourceKind::kSynthetic;
  SyntheticSpec synthetic;
  std::string path;
  std::optional<Eigen::Index> project_to;
};

/// Everything an experiment needs. The JSON form mirrors these fields; see
/// README.md for the schema. Unknown keys are rejected.
struct ExperimentConfig {
  double lambda = 1e-3;
  Loss loss = Loss::kLogistic;
  double radius = 0.0;  ///< 0 selects 1/lambda
  DataSource data;
  double beta_clean = 0.1;
  std::size_t batch_size = 50;
  NoiseMechanism clean_noise = LocalDpNoise{10.0};
  NoiseMechanism noisy_noise = LocalDpNoise{2.0};
  /// strategy-cmp: values substituted into the noisy mechanism's parameter.
  std::vector<double> sweep;
  /// order-exp: rate constants c; empty selects {1/4, 1/2, 1, 2, 4} / lambda.
  std::vector<double> c_grid;
  /// c2-sweep: explicit grid, or empty to derive c2_grid_points log-spaced
  /// values around each order's [c2(L), c2(U)].
  std::vector<double> c2_grid;
  std::size_t c2_grid_points = 15;
  /// c2-sweep: "both", "algorithm2" (the selector's order), "clean_first"
  /// or "noisy_first".
  std::string c2_order = "both";
  bool line_search = true;
  /// Empty selects the experiment's default set.
  std::vector<Strategy> strategies;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  ///< 0 uses the hardware concurrency
  bool record_timing = false;
  std::string output_dir = "results";

  ObjectiveSpec objective() const { return ObjectiveSpec::make(lambda, loss, radius); }
  /// Throws ConfigError on any violated field constraint.
  void validate() const;
};

nlohmann::json noise_to_json(const NoiseMechanism& noise);
NoiseMechanism noise_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults. Throws ConfigError on unknown keys,
/// wrong types or invalid values.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace hetsgd

#endif  // HETSGD_CONFIG_HPP
