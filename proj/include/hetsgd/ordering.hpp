#ifndef HETSGD_ORDERING_HPP
#define HETSGD_ORDERING_HPP

#include "hetsgd/random.hpp"
#include "hetsgd/sgd.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace hetsgd {

/// Coefficients of the step-t noise in the unrolled final iterate of
/// unprojected SGD with rate c / t:
///   delta[t-1] = (c / t) * prod_{s=t+1}^{T} (1 - c * lambda / s).
struct DeltaWeights {
  std::vector<double> deltas;
  double c = 0.0;
  double lambda = 0.0;
  std::size_t steps = 0;
};

/// Products are accumulated in log space with explicit sign tracking, since
/// factors turn negative when c * lambda > s.
DeltaWeights delta_weights(double c, double lambda, std::size_t steps);

/// Per-step noise second moments E||Z_t||^2.
struct NoiseVarianceSchedule {
  std::vector<double> variances;

  /// variances[t] = variance_per_oracle[pattern.sequence[t]].
  static NoiseVarianceSchedule from_pattern(const InterleavePattern& pattern,
                                            std::span<const double> variance_per_oracle);
};

/// Expected squared deviation between noisy and noiseless final iterates:
/// sum_t delta_t^2 * E||Z_t||^2. Throws DimensionMismatch on length mismatch.
double closed_form_deviation(const DeltaWeights& deltas, const NoiseVarianceSchedule& schedule);

enum class OrderVerdict { kCleanFirstBest, kNoisyFirstBest, kTie };

struct OrderComparison {
  OrderVerdict verdict = OrderVerdict::kTie;
  double clean_first = 0.0;
  double noisy_first = 0.0;
  /// One entry per arbitrary-order pattern evaluated.
  std::vector<double> arbitrary;
};

/// Oracle ids used by the two-source helpers: 0 is clean, 1 is noisy.
inline constexpr std::size_t kCleanOracle = 0;
inline constexpr std::size_t kNoisyOracle = 1;

/// Evaluates the deviation under clean-first, noisy-first and each supplied
/// arbitrary interleaving. Clean-first and noisy-first tie when their
/// values agree to a relative 1e-12.
OrderComparison compare_orders(double c, double lambda, std::size_t clean_steps,
                               std::size_t noisy_steps, double clean_variance,
                               double noisy_variance, std::span<const InterleavePattern> arbitrary);

/// As above with `num_random` uniformly random interleavings drawn from rng.
OrderComparison compare_orders(double c, double lambda, std::size_t clean_steps,
                               std::size_t noisy_steps, double clean_variance,
                               double noisy_variance, std::size_t num_random, Rng& rng);

}  // namespace hetsgd

#endif  // HETSGD_ORDERING_HPP
