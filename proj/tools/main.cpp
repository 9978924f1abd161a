#include "hetsgd/config.hpp"
#include "hetsgd/errors.hpp"
#include "hetsgd/experiment.hpp"
#include "hetsgd/oracles.hpp"
#include "hetsgd/rate_selection.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <iostream>
#include <optional>

namespace {

using nlohmann::json;

struct RunFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> threads;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
  cmd->add_option("--out-dir", f.out_dir, "output directory (overrides the config)");
  cmd->add_option("--trials", f.trials, "trials per point (overrides the config)")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", f.threads, "worker threads, 0 = all cores");
}

hetsgd::ExperimentConfig resolve(const RunFlags& f) {
  hetsgd::ExperimentConfig c = f.config_path.empty() ? hetsgd::ExperimentConfig{} : hetsgd::load_config(f.config_path);
  if (f.seed) c.seed = *f.seed;
  if (f.out_dir) c.output_dir = *f.out_dir;
  if (f.trials) c.trials = *f.trials;
  if (f.threads) c.threads = *f.threads;
  c.validate();
  return c;
}

template <typename Runner>
void run_experiment(std::string_view name, const RunFlags& flags, Runner runner) {
  const auto config = resolve(flags);
  const auto start = std::chrono::steady_clock::now();
  const auto rows = runner(config);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  hetsgd::write_experiment_outputs(config.output_dir, name, rows, config, seconds);
  std::cout << hetsgd::format_csv(rows);
  std::cerr << name << ": " << rows.size() << " rows written to " << config.output_dir << " in " << seconds
            << " s\n";
}

json rate_minimum_json(const hetsgd::RateMinimum& m) {
  return {{"c", m.c}, {"value", m.value}, {"at_boundary", m.at_boundary}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SGD with heterogeneous gradient noise: experiments and rate selection"};
  app.require_subcommand(1);

  RunFlags order_flags, cmp_flags, sweep_flags;
  auto* order_cmd = app.add_subcommand("order-exp", "paired CF/NF/AO runs over a grid of rate constants");
  add_run_flags(order_cmd, order_flags);
  auto* cmp_cmd = app.add_subcommand("strategy-cmp", "compare rate strategies over a noise sweep");
  add_run_flags(cmp_cmd, cmp_flags);
  auto* sweep_cmd = app.add_subcommand("c2-sweep", "final objective against the second-phase rate");
  add_run_flags(sweep_cmd, sweep_flags);

  double g_clean = 0, g_noisy = 0, beta_clean = 0.1, lambda = 1e-3;
  auto* select_cmd = app.add_subcommand("select-rates", "pick the data order and both rate constants");
  select_cmd->add_option("--gamma-clean-sq", g_clean, "noise level of the clean oracle")->required();
  select_cmd->add_option("--gamma-noisy-sq", g_noisy, "noise level of the noisy oracle")->required();
  select_cmd->add_option("--beta-clean", beta_clean, "fraction of clean examples")->capture_default_str();
  select_cmd->add_option("--lambda", lambda, "regularization strength")->capture_default_str();

  std::optional<double> epsilon, sigma;
  long dim = 10;
  std::size_t batch = 1;
  auto* level_cmd = app.add_subcommand("noise-level", "noise level of a DP or label-flip oracle");
  auto* eps_opt = level_cmd->add_option("--epsilon", epsilon, "local DP privacy parameter");
  auto* sigma_opt = level_cmd->add_option("--sigma", sigma, "label flip probability");
  eps_opt->excludes(sigma_opt);
  level_cmd->add_option("--dim", dim, "feature dimension")->capture_default_str();
  level_cmd->add_option("--batch", batch, "mini-batch size")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*order_cmd) {
      run_experiment("order-exp", order_flags, hetsgd::run_order_experiment);
    } else if (*cmp_cmd) {
      run_experiment("strategy-cmp", cmp_flags, hetsgd::run_strategy_comparison);
    } else if (*sweep_cmd) {
      run_experiment("c2-sweep", sweep_flags, hetsgd::run_c2_sweep);
    } else if (*select_cmd) {
      const auto sel = hetsgd::algorithm2_select(g_clean, g_noisy, beta_clean, lambda);
      const json out = {{"order", std::string(hetsgd::to_string(sel.order))},
                        {"c1", sel.c1},
                        {"c2", sel.c2},
                        {"bound_value", sel.bound_value},
                        {"clean_first", rate_minimum_json(sel.clean_first)},
                        {"noisy_first", rate_minimum_json(sel.noisy_first)}};
      std::cout << out.dump(2) << '\n';
    } else if (*level_cmd) {
      hetsgd::NoiseLevel level;
      if (epsilon) {
        level = hetsgd::dp_noise_level(*epsilon, dim, batch);
      } else if (sigma) {
        level = hetsgd::rcn_noise_level(*sigma);
      } else {
        level = hetsgd::clean_noise_level();
      }
      std::cout << json{{"gamma_sq", level.gamma_sq}, {"gamma_sq_lower", level.gamma_sq_lower}}.dump(2) << '\n';
    }
  } catch (const hetsgd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
