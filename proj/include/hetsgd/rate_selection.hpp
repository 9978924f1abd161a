#ifndef HETSGD_RATE_SELECTION_HPP
#define HETSGD_RATE_SELECTION_HPP

#include "hetsgd/oracles.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>

namespace hetsgd {

/// Inputs of the leading-order error bound for a run that drains oracle 1
/// (noise level gamma1_sq, fraction beta1 of the data) and then oracle 2.
struct BoundInputs {
  double gamma1_sq = 1.0;
  double gamma2_sq = 1.0;
  double beta1 = 0.5;
  double lambda = 1.0;
  double steps = 1.0;  ///< T; use 1 for the T-free constant

  void validate() const;
};

/// Width of the band around 2*lambda*c2 == 1 evaluated with the log limit.
inline constexpr double kLimitBand = 1e-9;

/// Leading terms of the two-phase error bound,
///   4 G1 b1^x c1^2 / (T (2 l c1 - 1)) + 4 G2 (1 - b1^x) c2^2 / (T x),
/// with x = 2 l c2 - 1, switching to the continuous limit
///   4 G1 c1^2 / (T (2 l c1 - 1)) + 4 G2 c2^2 log(1/b1) / T
/// when |x| <= kLimitBand. Throws PreconditionViolated if 2 l c1 <= 1.
double bound_B(const BoundInputs& inputs, double c1, double c2);

/// T-free bound constant with c1 = 1/lambda for clean data first.
double h_clean_noisy(double c, double gamma_clean_sq, double gamma_noisy_sq, double beta_clean,
                     double lambda);

/// T-free bound constant with c1 = 1/lambda for noisy data first.
double h_noisy_clean(double c, double gamma_clean_sq, double gamma_noisy_sq, double beta_clean,
                     double lambda);

/// Search range for rate constants, in units of 1/lambda.
inline constexpr double kRateRangeLow = 1e-6;
inline constexpr double kRateRangeHigh = 1e3;

struct RateMinimum {
  double c = 0.0;
  double value = 0.0;
  /// The best grid point sat on an end of the search range.
  bool at_boundary = false;
};

/// argmin over c2 of bound_B(1/lambda, c2) on [1e-6/lambda, 1e3/lambda]:
/// 400-point log grid, then golden-section refinement to relative 1e-8.
RateMinimum minimize_c2(const BoundInputs& inputs);

/// argmin over c of bound_B(c, c), restricted to 2*lambda*c > 1.
RateMinimum minimize_single_rate(const BoundInputs& inputs);

enum class DataOrder { kCleanFirst, kNoisyFirst };

std::string_view to_string(DataOrder order);

struct RateSelection {
  DataOrder order = DataOrder::kCleanFirst;
  double c1 = 0.0;
  double c2 = 0.0;
  double bound_value = 0.0;
  RateMinimum clean_first;  ///< minimum of h_clean_noisy
  RateMinimum noisy_first;  ///< minimum of h_noisy_clean
};

/// Picks the data order and the two rate constants with the smaller bound.
/// Ties go to clean-first.
RateSelection algorithm2_select(double gamma_clean_sq, double gamma_noisy_sq, double beta_clean,
                                double lambda);

enum class LemmaRegime { kNoisyFirst, kCleanFirst };

/// Bracket for 2*lambda*c2* in the large-noise-ratio regime.
struct LemmaInterval {
  double lo = 0.0;
  double hi = 0.0;
  LemmaRegime regime = LemmaRegime::kNoisyFirst;
  /// False when the bracket's asymptotic assumptions visibly fail (see the
  /// individual functions).
  bool valid = false;

  bool contains(double c2, double lambda) const {
    const double u = 2.0 * lambda * c2;
    return lo <= u && u <= hi;
  }
};

/// Noisy-first bracket
///   [1 + (2 log r + log log(1/bN)) / log(1/bN), 1 + (2 log 4r + log log(1/bN)) / log(1/bN)]
/// with r = gamma_noisy / gamma_clean and natural logs. Throws DomainError
/// unless 0 < beta_noisy < 1. `valid` requires r > 1 and log log(1/bN) >= 0.
LemmaInterval lemma2_interval(double gamma_clean_sq, double gamma_noisy_sq, double beta_noisy,
                              double lambda);

/// Clean-first bracket [s, 8 s / bC] with s = (gamma_noisy / gamma_clean)^-2.
/// `valid` requires r > 1.
LemmaInterval lemma3_interval(double gamma_clean_sq, double gamma_noisy_sq, double beta_clean);

struct C2SearchResult {
  double c2_best = 0.0;
  std::optional<double> best_value;  ///< empty when the interval was degenerate
  double c2_lower = 0.0;  ///< from the lower noise bounds
  double c2_upper = 0.0;  ///< from the upper noise bounds
  std::size_t evaluations = 0;
};

inline constexpr std::size_t kDefaultC2SearchBudget = 12;

/// Runs algorithm2_select with the upper and with the lower noise bounds and
/// golden-section searches `evaluate` between the two c2 values with a fixed
/// number of evaluations. A degenerate interval is returned without search.
C2SearchResult c2_interval_search(const NoiseLevel& clean, const NoiseLevel& noisy, double beta_clean,
                                  double lambda, const std::function<double(double)>& evaluate,
                                  std::size_t budget = kDefaultC2SearchBudget);

}  // namespace hetsgd

#endif  // HETSGD_RATE_SELECTION_HPP
