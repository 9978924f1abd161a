#ifndef HETSGD_SGD_HPP
#define HETSGD_SGD_HPP

#include "hetsgd/core.hpp"
#include "hetsgd/oracles.hpp"
#include "hetsgd/random.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hetsgd {

/// One phase of a multi-rate run: drain oracle `oracle` with rate c / t.
struct Phase {
  std::size_t oracle = 0;
  double c = 1.0;
};

/// Ordered oracle phases with per-phase rate constants. The step index t is
/// global: it starts at 1 and keeps counting across phase boundaries.
struct PhasePlan {
  std::vector<Phase> phases;
  double lambda = 1.0;
  double radius = kUnboundedRadius;

  /// Throws InvalidArgument on an empty plan, an out-of-range or repeated
  /// oracle, and NonpositiveRate when some c <= 0.
  void validate(std::size_t num_oracles) const;
};

/// Per-step oracle choice for arbitrary interleavings of the data sources.
struct InterleavePattern {
  std::vector<std::size_t> sequence;

  /// All steps of order[0], then all of order[1], ... with step counts
  /// taken from steps_per_oracle (indexed by oracle id).
  static InterleavePattern blocks(std::span<const std::size_t> order,
                                  std::span<const std::size_t> steps_per_oracle);

  /// A uniformly random interleaving with the given per-oracle step counts.
  static InterleavePattern random(std::span<const std::size_t> steps_per_oracle, Rng& rng);

  std::vector<std::size_t> counts(std::size_t num_oracles) const;
};

struct Snapshot {
  std::size_t t = 0;  ///< w_t, with t = 1 the starting point
  Vector w;
};

struct ObjectivePoint {
  std::size_t t = 0;
  double value = 0.0;
};

struct TrajectoryOptions {
  /// Keep every stride-th iterate; 0 selects max(1, T / 1000).
  std::size_t snapshot_stride = 0;
  bool keep_iterates = true;
  /// When set, evaluated on the kept iterates to build objective_curve.
  std::function<double(const Vector&)> objective;
};

struct Trajectory {
  std::vector<Snapshot> iterates;
  Vector final_w;
  std::size_t steps = 0;
  std::vector<ObjectivePoint> objective_curve;
};

/// Projected SGD over the phases of `plan`:
///   w_{t+1} = project(w_t - (c_phase / t) G_phase(w_t), radius).
/// Each phase runs until its oracle has no full batch left.
Trajectory run_sgd(const PhasePlan& plan, std::span<GradientOracle> oracles, const Vector& w0,
                   const TrajectoryOptions& options = {});

/// Same update with a single rate constant and the oracle picked per step by
/// `pattern`. The pattern must use every oracle's remaining steps exactly.
Trajectory run_sgd_interleaved(const InterleavePattern& pattern, double c, double lambda,
                               double radius, std::span<GradientOracle> oracles, const Vector& w0,
                               const TrajectoryOptions& options = {});

struct PairedTrajectories {
  Trajectory noisy;
  Trajectory noiseless;
};

/// Runs the plan on `oracles` and on their noiseless twins. The oracles must
/// be unused; the twins replay the same traversal with Z = 0.
PairedTrajectories run_paired(const PhasePlan& plan, std::span<GradientOracle> oracles,
                              const Vector& w0, const TrajectoryOptions& options = {});

PairedTrajectories run_paired(const InterleavePattern& pattern, double c, double lambda,
                              double radius, std::span<GradientOracle> oracles, const Vector& w0,
                              const TrajectoryOptions& options = {});

}  // namespace hetsgd

#endif  // HETSGD_SGD_HPP
