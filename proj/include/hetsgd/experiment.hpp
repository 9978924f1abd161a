#ifndef HETSGD_EXPERIMENT_HPP
#define HETSGD_EXPERIMENT_HPP

#include "hetsgd/config.hpp"
#include "hetsgd/core.hpp"
#include "hetsgd/oracles.hpp"
#include "hetsgd/rate_selection.hpp"
#include "hetsgd/result_io.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hetsgd {

/// The objective, the full training set and its clean/noisy split.
struct Problem {
  ObjectiveSpec objective;
  std::shared_ptr<const Dataset> full;
  std::shared_ptr<const Dataset> clean;
  std::shared_ptr<const Dataset> noisy;

  /// Realized |D_C| / |D|, which may differ from the configured value by
  /// rounding.
  double beta_clean() const;
};

/// Loads or generates the data, projects it if requested, and splits it
/// along a seeded permutation with |D_C| = round(beta_clean * n).
Problem build_problem(const ExperimentConfig& config);

/// Copy of `noise` with its scalar parameter (epsilon, sigma or variance)
/// replaced. Throws InvalidArgument for CleanNoise.
NoiseMechanism with_parameter(const NoiseMechanism& noise, double value);

/// Seed of oracle `role` in trial `trial`; shared across strategies and sweep
/// points so that they see common random numbers.
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial, std::uint64_t role);

/// Runs trial(i) for i in [0, trials) on up to `threads` workers (0 means
/// hardware concurrency). Results are indexed by trial, independent of the
/// schedule.
std::vector<double> run_trials(std::size_t trials, std::size_t threads,
                               const std::function<double(std::size_t)>& trial);

/// Mean and standard error (sample stdev / sqrt(n)) summed in index order.
ResultRow summarize(std::string strategy, double sweep_param, std::span<const double> values,
                    double seconds = 0.0);

enum class RunKind {
  kFullClean,    ///< noiseless oracle over the whole training set
  kCleanOnly,    ///< clean oracle alone
  kTwoPhase,     ///< drain one oracle with c1, then the other with c2
  kInterleaved,  ///< uniformly random interleaving with the single rate c1
};

struct RunSpec {
  RunKind kind = RunKind::kTwoPhase;
  DataOrder order = DataOrder::kCleanFirst;
  double c1 = 1.0;
  double c2 = 1.0;
};

struct TrialOutcome {
  double objective = 0.0;  ///< regularized objective of the final iterate on the full data
  double deviation = 0.0;  ///< |f(w) - f(v)| against the noiseless twin run
  std::size_t examples_consumed = 0;
};

/// Noise levels and rate choices of a fixed clean/noisy mechanism pair.
struct StrategyRates {
  NoiseLevel clean;
  NoiseLevel noisy;
  double beta_clean = 0.0;
  double lambda = 0.0;
  RateSelection algorithm2;
  double same_clean_c = 0.0;
  double same_noisy_c = 0.0;
};

StrategyRates compute_strategy_rates(const Problem& problem, const NoiseMechanism& clean,
                                     const NoiseMechanism& noisy, std::size_t batch_size);

/// How `strategy` runs under `rates`. CF, NF and AO use the single rate
/// `order_c`, which defaults to 1/lambda when zero.
RunSpec run_spec_for(Strategy strategy, const StrategyRates& rates, double order_c = 0.0);

/// One trial of `spec`. With `paired` set, the noiseless twin is run too and
/// `deviation` is filled in.
TrialOutcome run_trial(const Problem& problem, const NoiseMechanism& clean, const NoiseMechanism& noisy,
                       std::size_t batch_size, const RunSpec& spec, std::uint64_t master_seed,
                       std::size_t trial, bool paired = false);

/// Paired CF/NF/AO runs over config.c_grid; the mean is |f(w) - f(v)|.
std::vector<ResultRow> run_order_experiment(const ExperimentConfig& config);

/// Final objective of each strategy at every value of config.sweep (the
/// noisy mechanism's own parameter when the sweep is empty).
std::vector<ResultRow> run_strategy_comparison(const ExperimentConfig& config);

/// minimize_c2 for a fixed data order, evaluated with the lower and with the
/// upper noise levels.
struct C2Bracket {
  double lower = 0.0;  ///< c2(L)
  double upper = 0.0;  ///< c2(U)
  double lo() const { return std::min(lower, upper); }
  double hi() const { return std::max(lower, upper); }
};

C2Bracket c2_bracket(const StrategyRates& rates, DataOrder order);

/// Orders swept by run_c2_sweep under config.c2_order.
std::vector<DataOrder> c2_sweep_orders(const ExperimentConfig& config, const StrategyRates& rates);

/// The c2 values swept for one order: config.c2_grid, or c2_grid_points
/// log-spaced values spanning [lo / 4, 4 hi] of the bracket.
std::vector<double> c2_sweep_grid(const ExperimentConfig& config, const C2Bracket& bracket);

/// Final objective of two-rate SGD with c1 = 1/lambda over a c2 grid, for
/// each swept order. Row names carry the order suffix "-CF" or "-NF":
/// "TwoRate-CF" per grid point, plus measured "c2(L)-CF" and "c2(U)-CF".
/// Also emits "CleanOnly", "Algorithm2" and, with config.line_search,
/// "LineSearch" (c2_interval_search in Algorithm2's order).
std::vector<ResultRow> run_c2_sweep(const ExperimentConfig& config);

std::string_view git_hash();

/// Writes results.csv, plot_<strategy>.csv and meta.json into `dir`
/// (created if missing).
void write_experiment_outputs(const std::filesystem::path& dir, std::string_view experiment,
                              std::span<const ResultRow> rows, const ExperimentConfig& config,
                              double runtime_seconds);

}  // namespace hetsgd

#endif  // HETSGD_EXPERIMENT_HPP
