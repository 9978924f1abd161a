#include "hetsgd/ordering.hpp"

#include "hetsgd/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace hetsgd {

DeltaWeights delta_weights(double c, double lambda, std::size_t steps) {
  if (!(c > 0)) throw NonpositiveRate("delta weights need c > 0");
  if (!(lambda > 0)) throw InvalidArgument("delta weights need lambda > 0");
  if (steps < 1) throw InvalidArgument("delta weights need at least one step");
  DeltaWeights out{std::vector<double>(steps), c, lambda, steps};

  // Suffix product prod_{s=t+1}^{T} (1 - c*lambda/s) as sign * exp(log_abs).
  double log_abs = 0.0;
  double sign = 1.0;
  bool zero = false;
  for (std::size_t t = steps; t >= 1; --t) {
    const double eta = c / static_cast<double>(t);
    out.deltas[t - 1] = zero ? 0.0 : sign * eta * std::exp(log_abs);
    const double factor = 1.0 - c * lambda / static_cast<double>(t);
    if (factor == 0.0) {
      zero = true;
    } else {
      log_abs += std::log(std::abs(factor));
      if (factor < 0) sign = -sign;
    }
  }
  return out;
}

NoiseVarianceSchedule NoiseVarianceSchedule::from_pattern(const InterleavePattern& pattern,
                                                          std::span<const double> variance_per_oracle) {
  NoiseVarianceSchedule s;
  s.variances.reserve(pattern.sequence.size());
  for (std::size_t id : pattern.sequence) {
    if (id >= variance_per_oracle.size()) throw PatternMismatch("pattern references unknown oracle");
    s.variances.push_back(variance_per_oracle[id]);
  }
  return s;
}

double closed_form_deviation(const DeltaWeights& deltas, const NoiseVarianceSchedule& schedule) {
  if (deltas.deltas.size() != schedule.variances.size()) {
    throw DimensionMismatch("delta weights have " + std::to_string(deltas.deltas.size()) +
                            " steps but the variance schedule has " +
                            std::to_string(schedule.variances.size()));
  }
  double total = 0.0;
  for (std::size_t t = 0; t < deltas.deltas.size(); ++t) {
    total += deltas.deltas[t] * deltas.deltas[t] * schedule.variances[t];
  }
  return total;
}

OrderComparison compare_orders(double c, double lambda, std::size_t clean_steps,
                               std::size_t noisy_steps, double clean_variance,
                               double noisy_variance, std::span<const InterleavePattern> arbitrary) {
  if (!(clean_variance >= 0) || !(noisy_variance >= 0)) {
    throw InvalidArgument("noise variances must be nonnegative");
  }
  const auto deltas = delta_weights(c, lambda, clean_steps + noisy_steps);
  const std::array<std::size_t, 2> steps{clean_steps, noisy_steps};
  const std::array<double, 2> variances{clean_variance, noisy_variance};
  const std::array<std::size_t, 2> cf_order{kCleanOracle, kNoisyOracle};
  const std::array<std::size_t, 2> nf_order{kNoisyOracle, kCleanOracle};

  auto deviation = [&](const InterleavePattern& p) {
    if (p.counts(2) != std::vector<std::size_t>(steps.begin(), steps.end())) {
      throw PatternMismatch("arbitrary pattern does not match the step budgets");
    }
    return closed_form_deviation(deltas, NoiseVarianceSchedule::from_pattern(p, variances));
  };

  OrderComparison out;
  out.clean_first = deviation(InterleavePattern::blocks(cf_order, steps));
  out.noisy_first = deviation(InterleavePattern::blocks(nf_order, steps));
  for (const auto& p : arbitrary) out.arbitrary.push_back(deviation(p));

  const double scale = std::max(std::abs(out.clean_first), std::abs(out.noisy_first));
  if (std::abs(out.clean_first - out.noisy_first) <= 1e-12 * scale) {
    out.verdict = OrderVerdict::kTie;
  } else if (out.clean_first < out.noisy_first) {
    out.verdict = OrderVerdict::kCleanFirstBest;
  } else {
    out.verdict = OrderVerdict::kNoisyFirstBest;
  }
  return out;
}

OrderComparison compare_orders(double c, double lambda, std::size_t clean_steps,
                               std::size_t noisy_steps, double clean_variance,
                               double noisy_variance, std::size_t num_random, Rng& rng) {
  const std::array<std::size_t, 2> steps{clean_steps, noisy_steps};
  std::vector<InterleavePattern> patterns;
  patterns.reserve(num_random);
  for (std::size_t i = 0; i < num_random; ++i) patterns.push_back(InterleavePattern::random(steps, rng));
  return compare_orders(c, lambda, clean_steps, noisy_steps, clean_variance, noisy_variance, patterns);
}

}  // namespace hetsgd
