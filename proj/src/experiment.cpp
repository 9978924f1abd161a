#include "hetsgd/experiment.hpp"

#include "hetsgd/dataset_io.hpp"
#include "hetsgd/errors.hpp"
#include "hetsgd/random.hpp"
#include "hetsgd/sgd.hpp"
#include "hetsgd/synthetic.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#ifndef HETSGD_GIT_HASH
#define HETSGD_GIT_HASH "unknown"
#endif

namespace hetsgd {

namespace {

constexpr std::uint64_t kDataStream = 11;
constexpr std::uint64_t kProjectionStream = 12;
constexpr std::uint64_t kSplitStream = 13;
constexpr std::uint64_t kTrialStream = 14;

constexpr std::uint64_t kCleanRole = 0;
constexpr std::uint64_t kNoisyRole = 1;
constexpr std::uint64_t kFullRole = 2;
constexpr std::uint64_t kPatternRole = 3;

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Times `fn` when timing is recorded; 0 otherwise keeps CSVs reproducible.
template <typename F>
ResultRow timed_row(bool record_timing, std::string name, double sweep, F&& fn) {
  const auto start = Clock::now();
  const std::vector<double> values = fn();
  return summarize(std::move(name), sweep, values, record_timing ? elapsed_seconds(start) : 0.0);
}

std::vector<Strategy> strategies_or(const ExperimentConfig& config, std::vector<Strategy> fallback) {
  return config.strategies.empty() ? fallback : config.strategies;
}

double mechanism_parameter(const NoiseMechanism& noise) {
  if (const auto* dp = std::get_if<LocalDpNoise>(&noise)) return dp->epsilon;
  if (const auto* rcn = std::get_if<LabelFlipNoise>(&noise)) return rcn->sigma;
  if (const auto* g = std::get_if<GaussianNoise>(&noise)) return g->variance;
  return 0.0;
}

}  // namespace

double Problem::beta_clean() const {
  return static_cast<double>(clean->size()) / static_cast<double>(full->size());
}

Problem build_problem(const ExperimentConfig& config) {
  config.validate();
  Dataset data;
  switch (config.data.kind) {
    case DataSourceKind::kSynthetic:
      data = generate_synthetic(config.data.synthetic, derive_seed(config.seed, {kDataStream})).data;
      break;
    case DataSourceKind::kCsv:
      data = ingest_csv(config.data.path);
      break;
    case DataSourceKind::kLibsvm:
      data = ingest_libsvm(config.data.path);
      break;
  }
  if (config.data.project_to) {
    data = random_projection(data, *config.data.project_to, derive_seed(config.seed, {kProjectionStream}));
  }

  const std::size_t n = data.size();
  const auto n_clean = static_cast<std::size_t>(std::llround(config.beta_clean * static_cast<double>(n)));
  if (n_clean < 1 || n_clean >= n) {
    throw ConfigError("beta_clean * n must leave both datasets nonempty (n = " + std::to_string(n) + ")");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(derive_seed(config.seed, {kSplitStream}));
  std::shuffle(perm.begin(), perm.end(), rng);

  Dataset shuffled(data.dim());
  for (auto i : perm) shuffled.push_back(data[i]);

  Problem p;
  p.objective = config.objective();
  p.clean = std::make_shared<const Dataset>(shuffled.slice(0, n_clean));
  p.noisy = std::make_shared<const Dataset>(shuffled.slice(n_clean, n - n_clean));
  p.full = std::make_shared<const Dataset>(std::move(shuffled));
  return p;
}

NoiseMechanism with_parameter(const NoiseMechanism& noise, double value) {
  return std::visit(
      [value](const auto& n) -> NoiseMechanism {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LocalDpNoise>) {
          return LocalDpNoise{value};
        } else if constexpr (std::is_same_v<T, LabelFlipNoise>) {
          return LabelFlipNoise{value};
        } else if constexpr (std::is_same_v<T, GaussianNoise>) {
          return GaussianNoise{value};
        } else {
          throw InvalidArgument("a clean oracle has no parameter to sweep");
        }
      },
      noise);
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial, std::uint64_t role) {
  return derive_seed(master, {kTrialStream, trial, role});
}

std::vector<double> run_trials(std::size_t trials, std::size_t threads,
                               const std::function<double(std::size_t)>& trial) {
  std::vector<double> out(trials);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, trials);
  if (threads <= 1) {
    for (std::size_t i = 0; i < trials; ++i) out[i] = trial(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < trials; i = next++) {
      try {
        out[i] = trial(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = trials;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

ResultRow summarize(std::string strategy, double sweep_param, std::span<const double> values,
                    double seconds) {
  if (values.empty()) throw InvalidArgument("summarize needs at least one value");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double se = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
  return {std::move(strategy), sweep_param, mean, se, values.size(), seconds};
}

StrategyRates compute_strategy_rates(const Problem& problem, const NoiseMechanism& clean,
                                     const NoiseMechanism& noisy, std::size_t batch_size) {
  StrategyRates r;
  const Eigen::Index d = problem.full->dim();
  r.clean = noise_level(clean, d, batch_size);
  r.noisy = noise_level(noisy, d, batch_size);
  r.beta_clean = problem.beta_clean();
  r.lambda = problem.objective.lambda;
  r.algorithm2 = algorithm2_select(r.clean.gamma_sq, r.noisy.gamma_sq, r.beta_clean, r.lambda);
  r.same_clean_c =
      minimize_single_rate({r.clean.gamma_sq, r.noisy.gamma_sq, r.beta_clean, r.lambda, 1.0}).c;
  r.same_noisy_c =
      minimize_single_rate({r.noisy.gamma_sq, r.clean.gamma_sq, 1.0 - r.beta_clean, r.lambda, 1.0}).c;
  return r;
}

RunSpec run_spec_for(Strategy strategy, const StrategyRates& rates, double order_c) {
  const double c_hom = 1.0 / rates.lambda;
  const double c = order_c > 0 ? order_c : c_hom;
  switch (strategy) {
    case Strategy::kOptimal:
      return {RunKind::kFullClean, DataOrder::kCleanFirst, c_hom, c_hom};
    case Strategy::kCleanOnly:
      return {RunKind::kCleanOnly, DataOrder::kCleanFirst, c_hom, c_hom};
    case Strategy::kSameClean:
      return {RunKind::kTwoPhase, DataOrder::kCleanFirst, rates.same_clean_c, rates.same_clean_c};
    case Strategy::kSameNoisy:
      return {RunKind::kTwoPhase, DataOrder::kNoisyFirst, rates.same_noisy_c, rates.same_noisy_c};
    case Strategy::kAlgorithm2:
      return {RunKind::kTwoPhase, rates.algorithm2.order, rates.algorithm2.c1, rates.algorithm2.c2};
    case Strategy::kCleanFirst:
      return {RunKind::kTwoPhase, DataOrder::kCleanFirst, c, c};
    case Strategy::kNoisyFirst:
      return {RunKind::kTwoPhase, DataOrder::kNoisyFirst, c, c};
    case Strategy::kArbitraryOrder:
      return {RunKind::kInterleaved, DataOrder::kCleanFirst, c, c};
  }
  throw InvalidArgument("unknown strategy");
}

TrialOutcome run_trial(const Problem& problem, const NoiseMechanism& clean, const NoiseMechanism& noisy,
                       std::size_t batch_size, const RunSpec& spec, std::uint64_t master_seed,
                       std::size_t trial, bool paired) {
  const ObjectiveSpec& obj = problem.objective;
  const Vector w0 = Vector::Zero(problem.full->dim());
  TrajectoryOptions opts;
  opts.keep_iterates = false;

  std::vector<GradientOracle> oracles;
  PhasePlan plan;
  plan.lambda = obj.lambda;
  plan.radius = obj.radius;

  auto clean_oracle = [&] {
    return GradientOracle({clean, 0, batch_size, trial_seed(master_seed, trial, kCleanRole)}, obj,
                          problem.clean);
  };
  auto noisy_oracle = [&] {
    return GradientOracle({noisy, 0, batch_size, trial_seed(master_seed, trial, kNoisyRole)}, obj,
                          problem.noisy);
  };

  switch (spec.kind) {
    case RunKind::kFullClean:
      oracles.emplace_back(OracleSpec{CleanNoise{}, 0, batch_size, trial_seed(master_seed, trial, kFullRole)},
                           obj, problem.full);
      plan.phases = {{0, spec.c1}};
      break;
    case RunKind::kCleanOnly:
      oracles.push_back(clean_oracle());
      plan.phases = {{0, spec.c1}};
      break;
    case RunKind::kTwoPhase:
    case RunKind::kInterleaved:
      oracles.push_back(clean_oracle());
      oracles.push_back(noisy_oracle());
      if (spec.order == DataOrder::kCleanFirst) {
        plan.phases = {{0, spec.c1}, {1, spec.c2}};
      } else {
        plan.phases = {{1, spec.c1}, {0, spec.c2}};
      }
      break;
  }

  TrialOutcome out;
  std::span<GradientOracle> span(oracles);
  Vector w_final;
  if (spec.kind == RunKind::kInterleaved) {
    const std::vector<std::size_t> steps{oracles[0].total_steps(), oracles[1].total_steps()};
    Rng rng(trial_seed(master_seed, trial, kPatternRole));
    const auto pattern = InterleavePattern::random(steps, rng);
    if (paired) {
      auto pr = run_paired(pattern, spec.c1, obj.lambda, obj.radius, span, w0, opts);
      w_final = pr.noisy.final_w;
      out.deviation = std::abs(full_objective(obj, pr.noisy.final_w, *problem.full) -
                               full_objective(obj, pr.noiseless.final_w, *problem.full));
    } else {
      w_final = run_sgd_interleaved(pattern, spec.c1, obj.lambda, obj.radius, span, w0, opts).final_w;
    }
  } else if (paired) {
    auto pr = run_paired(plan, span, w0, opts);
    w_final = pr.noisy.final_w;
    out.deviation = std::abs(full_objective(obj, pr.noisy.final_w, *problem.full) -
                             full_objective(obj, pr.noiseless.final_w, *problem.full));
  } else {
    w_final = run_sgd(plan, span, w0, opts).final_w;
  }
  out.objective = full_objective(obj, w_final, *problem.full);
  for (const auto& o : oracles) out.examples_consumed += o.calls_consumed();
  return out;
}

std::vector<ResultRow> run_order_experiment(const ExperimentConfig& config) {
  const Problem problem = build_problem(config);
  const double lambda = config.lambda;
  std::vector<double> grid = config.c_grid;
  if (grid.empty()) {
    for (double m : {0.25, 0.5, 1.0, 2.0, 4.0}) grid.push_back(m / lambda);
  }
  const auto strategies =
      strategies_or(config, {Strategy::kCleanFirst, Strategy::kNoisyFirst, Strategy::kArbitraryOrder});
  for (auto s : strategies) {
    if (s != Strategy::kCleanFirst && s != Strategy::kNoisyFirst && s != Strategy::kArbitraryOrder) {
      throw ConfigError("order-exp supports only CF, NF and AO, got " + std::string(to_string(s)));
    }
  }
  const StrategyRates rates{{}, {}, problem.beta_clean(), lambda, {}, 0.0, 0.0};

  std::vector<ResultRow> rows;
  for (double c : grid) {
    for (auto s : strategies) {
      const RunSpec spec = run_spec_for(s, rates, c);
      rows.push_back(timed_row(config.record_timing, std::string(to_string(s)), c, [&] {
        return run_trials(config.trials, config.threads, [&](std::size_t i) {
          return run_trial(problem, config.clean_noise, config.noisy_noise, config.batch_size, spec,
                           config.seed, i, true)
              .deviation;
        });
      }));
    }
  }
  return rows;
}

std::vector<ResultRow> run_strategy_comparison(const ExperimentConfig& config) {
  const Problem problem = build_problem(config);
  std::vector<double> sweep = config.sweep;
  if (sweep.empty()) sweep.push_back(mechanism_parameter(config.noisy_noise));
  const auto strategies =
      strategies_or(config, {Strategy::kOptimal, Strategy::kCleanOnly, Strategy::kSameClean,
                             Strategy::kSameNoisy, Strategy::kAlgorithm2});

  std::vector<ResultRow> rows;
  for (double s : sweep) {
    const NoiseMechanism noisy = config.sweep.empty() ? config.noisy_noise : with_parameter(config.noisy_noise, s);
    const StrategyRates rates = compute_strategy_rates(problem, config.clean_noise, noisy, config.batch_size);
    for (auto strategy : strategies) {
      const RunSpec spec = run_spec_for(strategy, rates);
      rows.push_back(timed_row(config.record_timing, std::string(to_string(strategy)), s, [&] {
        return run_trials(config.trials, config.threads, [&](std::size_t i) {
          return run_trial(problem, config.clean_noise, noisy, config.batch_size, spec, config.seed, i).objective;
        });
      }));
    }
  }
  return rows;
}

C2Bracket c2_bracket(const StrategyRates& rates, DataOrder order) {
  auto solve = [&](double g_clean, double g_noisy) {
    if (order == DataOrder::kCleanFirst) {
      return minimize_c2({g_clean, g_noisy, rates.beta_clean, rates.lambda, 1.0}).c;
    }
    return minimize_c2({g_noisy, g_clean, 1.0 - rates.beta_clean, rates.lambda, 1.0}).c;
  };
  return {solve(rates.clean.gamma_sq_lower, rates.noisy.gamma_sq_lower),
          solve(rates.clean.gamma_sq, rates.noisy.gamma_sq)};
}

std::vector<DataOrder> c2_sweep_orders(const ExperimentConfig& config, const StrategyRates& rates) {
  if (config.c2_order == "clean_first") return {DataOrder::kCleanFirst};
  if (config.c2_order == "noisy_first") return {DataOrder::kNoisyFirst};
  if (config.c2_order == "algorithm2") return {rates.algorithm2.order};
  return {DataOrder::kCleanFirst, DataOrder::kNoisyFirst};
}

std::vector<double> c2_sweep_grid(const ExperimentConfig& config, const C2Bracket& bracket) {
  if (!config.c2_grid.empty()) return config.c2_grid;
  const double lo = bracket.lo() / 4.0;
  const double hi = bracket.hi() * 4.0;
  const std::size_t k = config.c2_grid_points;
  if (k == 1) return {std::sqrt(lo * hi)};
  std::vector<double> grid(k);
  for (std::size_t i = 0; i < k; ++i) {
    grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(k - 1));
  }
  return grid;
}

std::vector<ResultRow> run_c2_sweep(const ExperimentConfig& config) {
  const Problem problem = build_problem(config);
  const StrategyRates rates =
      compute_strategy_rates(problem, config.clean_noise, config.noisy_noise, config.batch_size);

  auto trials_at = [&](const RunSpec& spec) {
    return run_trials(config.trials, config.threads, [&](std::size_t i) {
      return run_trial(problem, config.clean_noise, config.noisy_noise, config.batch_size, spec, config.seed, i)
          .objective;
    });
  };
  auto two_rate = [&](DataOrder order, double c2) {
    return RunSpec{RunKind::kTwoPhase, order, 1.0 / config.lambda, c2};
  };

  std::vector<ResultRow> rows;
  for (DataOrder order : c2_sweep_orders(config, rates)) {
    const std::string suffix = order == DataOrder::kCleanFirst ? "-CF" : "-NF";
    const C2Bracket bracket = c2_bracket(rates, order);
    for (double c2 : c2_sweep_grid(config, bracket)) {
      rows.push_back(timed_row(config.record_timing, "TwoRate" + suffix, c2,
                               [&] { return trials_at(two_rate(order, c2)); }));
    }
    rows.push_back(timed_row(config.record_timing, "c2(L)" + suffix, bracket.lower,
                             [&] { return trials_at(two_rate(order, bracket.lower)); }));
    rows.push_back(timed_row(config.record_timing, "c2(U)" + suffix, bracket.upper,
                             [&] { return trials_at(two_rate(order, bracket.upper)); }));
  }
  rows.push_back(timed_row(config.record_timing, "CleanOnly", 1.0 / config.lambda,
                           [&] { return trials_at(run_spec_for(Strategy::kCleanOnly, rates)); }));
  rows.push_back(timed_row(config.record_timing, "Algorithm2", rates.algorithm2.c2,
                           [&] { return trials_at(run_spec_for(Strategy::kAlgorithm2, rates)); }));

  if (config.line_search) {
    const auto start = Clock::now();
    const DataOrder order = rates.algorithm2.order;
    std::map<double, std::vector<double>> evaluated;
    auto evaluate = [&](double c2) {
      auto values = trials_at(two_rate(order, c2));
      const double mean = summarize("", c2, values).mean;
      evaluated[c2] = std::move(values);
      return mean;
    };
    const C2SearchResult found =
        c2_interval_search(rates.clean, rates.noisy, rates.beta_clean, config.lambda, evaluate);
    if (!evaluated.count(found.c2_best)) evaluate(found.c2_best);
    rows.push_back(summarize("LineSearch", found.c2_best, evaluated.at(found.c2_best),
                             config.record_timing ? elapsed_seconds(start) : 0.0));
  }
  return rows;
}

std::string_view git_hash() { return HETSGD_GIT_HASH; }

void write_experiment_outputs(const std::filesystem::path& dir, std::string_view experiment,
                              std::span<const ResultRow> rows, const ExperimentConfig& config,
                              double runtime_seconds) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  emit_csv(rows, dir / "results.csv");
  emit_plotdata(rows, dir);
  const nlohmann::json meta = {
      {"experiment", std::string(experiment)},
      {"git_hash", std::string(git_hash())},
      {"runtime_seconds", runtime_seconds},
      {"rows", rows.size()},
      {"config", to_json(config)},
  };
  const auto path = dir / "meta.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << meta.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace hetsgd
