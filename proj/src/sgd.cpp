#include "hetsgd/sgd.hpp"

#include "hetsgd/errors.hpp"

#include <algorithm>
#include <cassert>
#include <string>

namespace hetsgd {

namespace {

void check_start(const Vector& w0, double radius, std::span<GradientOracle> oracles) {
  if (!(radius > 0)) throw InvalidArgument("radius must be positive");
  if (w0.norm() > radius) throw InvalidArgument("starting point lies outside the feasible ball");
  for (const auto& o : oracles) {
    if (o.data().dim() != w0.size()) {
      throw DimensionMismatch("starting point has dimension " + std::to_string(w0.size()) +
                              " but an oracle has dimension " + std::to_string(o.data().dim()));
    }
  }
}

void check_lambda(double lambda, std::span<GradientOracle> oracles) {
  if (!(lambda > 0)) throw InvalidArgument("lambda must be positive");
  for (const auto& o : oracles) {
    if (o.objective().lambda != lambda) {
      throw InvalidArgument("oracle objective lambda differs from the run's lambda");
    }
  }
}

// Executes T steps, asking pick(t) for the (oracle, rate constant) of step t.
template <typename Pick>
Trajectory run_schedule(std::size_t total_steps, double radius, const Vector& w0,
                        const TrajectoryOptions& options, Pick&& pick) {
  Trajectory traj;
  traj.steps = total_steps;
  const std::size_t stride =
      options.snapshot_stride > 0 ? options.snapshot_stride : std::max<std::size_t>(1, total_steps / 1000);

  auto keep = [&](std::size_t t, const Vector& w) {
    if (!options.keep_iterates) return;
    traj.iterates.push_back({t, w});
    if (options.objective) traj.objective_curve.push_back({t, options.objective(w)});
  };

  Vector w = w0;
  keep(1, w);
  for (std::size_t t = 1; t <= total_steps; ++t) {
    auto [oracle, c] = pick(t);
    const Vector g = oracle->call(w).gradient;
    w = project(w - (c / static_cast<double>(t)) * g, radius);
    assert(w.norm() <= radius);
    const std::size_t next = t + 1;
    if (next == total_steps + 1 || (next - 1) % stride == 0) keep(next, w);
  }
  traj.final_w = std::move(w);
  return traj;
}

}  // namespace

void PhasePlan::validate(std::size_t num_oracles) const {
  if (phases.empty()) throw InvalidArgument("phase plan has no phases");
  std::vector<bool> seen(num_oracles, false);
  for (const auto& p : phases) {
    if (p.oracle >= num_oracles) {
      throw InvalidArgument("phase references oracle " + std::to_string(p.oracle) + " but only " +
                            std::to_string(num_oracles) + " are supplied");
    }
    if (seen[p.oracle]) throw InvalidArgument("oracle used by more than one phase");
    seen[p.oracle] = true;
    if (!(p.c > 0)) throw NonpositiveRate("rate constant must be positive");
  }
}

InterleavePattern InterleavePattern::blocks(std::span<const std::size_t> order,
                                            std::span<const std::size_t> steps_per_oracle) {
  InterleavePattern p;
  for (std::size_t id : order) {
    if (id >= steps_per_oracle.size()) throw InvalidArgument("oracle id out of range");
    p.sequence.insert(p.sequence.end(), steps_per_oracle[id], id);
  }
  return p;
}

InterleavePattern InterleavePattern::random(std::span<const std::size_t> steps_per_oracle, Rng& rng) {
  InterleavePattern p;
  for (std::size_t id = 0; id < steps_per_oracle.size(); ++id) {
    p.sequence.insert(p.sequence.end(), steps_per_oracle[id], id);
  }
  std::shuffle(p.sequence.begin(), p.sequence.end(), rng);
  return p;
}

std::vector<std::size_t> InterleavePattern::counts(std::size_t num_oracles) const {
  std::vector<std::size_t> c(num_oracles, 0);
  for (std::size_t id : sequence) {
    if (id >= num_oracles) throw PatternMismatch("pattern references oracle " + std::to_string(id));
    ++c[id];
  }
  return c;
}

Trajectory run_sgd(const PhasePlan& plan, std::span<GradientOracle> oracles, const Vector& w0,
                   const TrajectoryOptions& options) {
  plan.validate(oracles.size());
  check_lambda(plan.lambda, oracles);
  check_start(w0, plan.radius, oracles);

  // Phase boundaries in global step units.
  std::vector<std::size_t> ends;
  std::size_t total = 0;
  for (const auto& p : plan.phases) {
    total += oracles[p.oracle].steps_remaining();
    ends.push_back(total);
  }

  std::size_t phase = 0;
  return run_schedule(total, plan.radius, w0, options, [&](std::size_t t) {
    while (t > ends[phase]) ++phase;
    const Phase& p = plan.phases[phase];
    return std::pair{&oracles[p.oracle], p.c};
  });
}

Trajectory run_sgd_interleaved(const InterleavePattern& pattern, double c, double lambda,
                               double radius, std::span<GradientOracle> oracles, const Vector& w0,
                               const TrajectoryOptions& options) {
  if (!(c > 0)) throw NonpositiveRate("rate constant must be positive");
  check_lambda(lambda, oracles);
  check_start(w0, radius, oracles);
  const auto counts = pattern.counts(oracles.size());
  for (std::size_t i = 0; i < oracles.size(); ++i) {
    if (counts[i] != oracles[i].steps_remaining()) {
      throw PatternMismatch("pattern uses oracle " + std::to_string(i) + " for " +
                            std::to_string(counts[i]) + " steps but it supports " +
                            std::to_string(oracles[i].steps_remaining()));
    }
  }
  return run_schedule(pattern.sequence.size(), radius, w0, options, [&](std::size_t t) {
    return std::pair{&oracles[pattern.sequence[t - 1]], c};
  });
}

namespace {

std::vector<GradientOracle> make_twins(std::span<GradientOracle> oracles) {
  std::vector<GradientOracle> twins;
  twins.reserve(oracles.size());
  for (const auto& o : oracles) {
    if (o.calls_consumed() != 0) throw InvalidArgument("paired runs need unused oracles");
    twins.push_back(o.noiseless_twin());
  }
  return twins;
}

}  // namespace

PairedTrajectories run_paired(const PhasePlan& plan, std::span<GradientOracle> oracles,
                              const Vector& w0, const TrajectoryOptions& options) {
  auto twins = make_twins(oracles);
  PairedTrajectories out;
  out.noisy = run_sgd(plan, oracles, w0, options);
  out.noiseless = run_sgd(plan, twins, w0, options);
  return out;
}

PairedTrajectories run_paired(const InterleavePattern& pattern, double c, double lambda,
                              double radius, std::span<GradientOracle> oracles, const Vector& w0,
                              const TrajectoryOptions& options) {
  auto twins = make_twins(oracles);
  PairedTrajectories out;
  out.noisy = run_sgd_interleaved(pattern, c, lambda, radius, oracles, w0, options);
  out.noiseless = run_sgd_interleaved(pattern, c, lambda, radius, twins, w0, options);
  return out;
}

}  // namespace hetsgd
