#include "hetsgd/rate_selection.hpp"

#include "hetsgd/errors.hpp"
#include "hetsgd/golden_section.hpp"

#include <algorithm>
#include <cmath>

namespace hetsgd {

namespace {

constexpr std::size_t kGridPoints = 400;
constexpr double kGoldenRelTol = 1e-8;

// (1 - beta^x) / x, with its x -> 0 limit log(1/beta) inside the band.
double decay_ratio(double beta, double x) {
  const double log_beta = std::log(beta);
  if (std::abs(x) <= kLimitBand) return -log_beta;
  return -std::expm1(x * log_beta) / x;
}

// beta^x, pinned to 1 inside the limit band.
double beta_power(double beta, double x) {
  if (std::abs(x) <= kLimitBand) return 1.0;
  return std::pow(beta, x);
}

void check_gamma_beta(double gamma_a, double gamma_b, double beta) {
  if (!(gamma_a >= 0) || !(gamma_b >= 0)) throw InvalidArgument("noise levels must be nonnegative");
  if (!(beta > 0 && beta < 1)) throw InvalidArgument("data fraction must lie in (0, 1)");
}

// T-free bound with c1 = 1/lambda; shared by both orders.
double h_first_then_second(double c, double gamma_first_sq, double gamma_second_sq,
                           double beta_first, double lambda) {
  const double x = 2.0 * lambda * c - 1.0;
  return 4.0 * gamma_first_sq * beta_power(beta_first, x) / (lambda * lambda) +
         4.0 * gamma_second_sq * decay_ratio(beta_first, x) * c * c;
}

RateMinimum to_rate_minimum(const ScalarMinimum& m) { return {m.x, m.value, m.at_boundary}; }

}  // namespace

void BoundInputs::validate() const {
  check_gamma_beta(gamma1_sq, gamma2_sq, beta1);
  if (!(lambda > 0)) throw InvalidArgument("lambda must be positive");
  if (!(steps > 0)) throw InvalidArgument("T must be positive");
}

double bound_B(const BoundInputs& in, double c1, double c2) {
  in.validate();
  if (!(2.0 * in.lambda * c1 > 1.0)) {
    throw PreconditionViolated("bound requires 2 * lambda * c1 > 1");
  }
  if (!(c2 > 0)) throw NonpositiveRate("c2 must be positive");
  const double x = 2.0 * in.lambda * c2 - 1.0;
  const double first =
      4.0 * in.gamma1_sq * beta_power(in.beta1, x) * c1 * c1 / (in.steps * (2.0 * in.lambda * c1 - 1.0));
  const double second = 4.0 * in.gamma2_sq * decay_ratio(in.beta1, x) * c2 * c2 / in.steps;
  return first + second;
}

double h_clean_noisy(double c, double gamma_clean_sq, double gamma_noisy_sq, double beta_clean,
                     double lambda) {
  check_gamma_beta(gamma_clean_sq, gamma_noisy_sq, beta_clean);
  return h_first_then_second(c, gamma_clean_sq, gamma_noisy_sq, beta_clean, lambda);
}

double h_noisy_clean(double c, double gamma_clean_sq, double gamma_noisy_sq, double beta_clean,
                     double lambda) {
  check_gamma_beta(gamma_clean_sq, gamma_noisy_sq, beta_clean);
  return h_first_then_second(c, gamma_noisy_sq, gamma_clean_sq, 1.0 - beta_clean, lambda);
}

RateMinimum minimize_c2(const BoundInputs& inputs) {
  inputs.validate();
  const double c1 = 1.0 / inputs.lambda;
  auto f = [&](double c2) { return bound_B(inputs, c1, c2); };
  return to_rate_minimum(log_grid_golden_minimize(f, kRateRangeLow / inputs.lambda,
                                                  kRateRangeHigh / inputs.lambda, kGridPoints,
                                                  kGoldenRelTol));
}

RateMinimum minimize_single_rate(const BoundInputs& inputs) {
  inputs.validate();
  auto f = [&](double c) { return bound_B(inputs, c, c); };
  // The bound blows up as 2*lambda*c -> 1 from above.
  const double lo = 0.5 / inputs.lambda * (1.0 + 1e-6);
  auto m = log_grid_golden_minimize(f, lo, kRateRangeHigh / inputs.lambda, kGridPoints, kGoldenRelTol);
  return to_rate_minimum(m);
}

std::string_view to_string(DataOrder order) {
  return order == DataOrder::kCleanFirst ? "CleanFirst" : "NoisyFirst";
}

RateSelection algorithm2_select(double gamma_clean_sq, double gamma_noisy_sq, double beta_clean,
                                double lambda) {
  const BoundInputs cn{gamma_clean_sq, gamma_noisy_sq, beta_clean, lambda, 1.0};
  const BoundInputs nc{gamma_noisy_sq, gamma_clean_sq, 1.0 - beta_clean, lambda, 1.0};
  RateSelection sel;
  sel.clean_first = minimize_c2(cn);
  sel.noisy_first = minimize_c2(nc);
  sel.c1 = 1.0 / lambda;
  if (sel.clean_first.value <= sel.noisy_first.value) {
    sel.order = DataOrder::kCleanFirst;
    sel.c2 = sel.clean_first.c;
    sel.bound_value = sel.clean_first.value;
  } else {
    sel.order = DataOrder::kNoisyFirst;
    sel.c2 = sel.noisy_first.c;
    sel.bound_value = sel.noisy_first.value;
  }
  return sel;
}

LemmaInterval lemma2_interval(double gamma_clean_sq, double gamma_noisy_sq, double beta_noisy,
                              double lambda) {
  if (!(beta_noisy > 0 && beta_noisy < 1)) {
    throw DomainError("log log(1/beta_N) is undefined unless 0 < beta_N < 1");
  }
  if (!(gamma_clean_sq > 0) || !(gamma_noisy_sq > 0) || !(lambda > 0)) {
    throw InvalidArgument("lemma2_interval needs positive noise levels and lambda");
  }
  const double ratio = std::sqrt(gamma_noisy_sq / gamma_clean_sq);
  const double log_inv_beta = std::log(1.0 / beta_noisy);
  const double loglog = std::log(log_inv_beta);
  LemmaInterval out;
  out.regime = LemmaRegime::kNoisyFirst;
  out.lo = 1.0 + (2.0 * std::log(ratio) + loglog) / log_inv_beta;
  out.hi = 1.0 + (2.0 * std::log(4.0 * ratio) + loglog) / log_inv_beta;
  out.valid = ratio > 1.0 && loglog >= 0.0;
  return out;
}

LemmaInterval lemma3_interval(double gamma_clean_sq, double gamma_noisy_sq, double beta_clean) {
  if (!(beta_clean > 0 && beta_clean < 1)) throw InvalidArgument("beta_C must lie in (0, 1)");
  if (!(gamma_clean_sq > 0) || !(gamma_noisy_sq > 0)) {
    throw InvalidArgument("lemma3_interval needs positive noise levels");
  }
  const double s = gamma_clean_sq / gamma_noisy_sq;
  LemmaInterval out;
  out.regime = LemmaRegime::kCleanFirst;
  out.lo = s;
  out.hi = 8.0 * s / beta_clean;
  out.valid = gamma_noisy_sq > gamma_clean_sq;
  return out;
}

C2SearchResult c2_interval_search(const NoiseLevel& clean, const NoiseLevel& noisy, double beta_clean,
                                  double lambda, const std::function<double(double)>& evaluate,
                                  std::size_t budget) {
  if (clean.gamma_sq_lower > clean.gamma_sq || noisy.gamma_sq_lower > noisy.gamma_sq) {
    throw InvalidArgument("lower noise bound exceeds the upper bound");
  }
  C2SearchResult out;
  out.c2_upper = algorithm2_select(clean.gamma_sq, noisy.gamma_sq, beta_clean, lambda).c2;
  out.c2_lower = algorithm2_select(clean.gamma_sq_lower, noisy.gamma_sq_lower, beta_clean, lambda).c2;
  const double lo = std::min(out.c2_lower, out.c2_upper);
  const double hi = std::max(out.c2_lower, out.c2_upper);
  if (hi - lo <= 1e-12 * hi) {
    out.c2_best = out.c2_upper;
    return out;
  }
  const ScalarMinimum m = golden_section_minimize(evaluate, lo, hi, 0.0, budget);
  out.c2_best = m.x;
  out.best_value = m.value;
  out.evaluations = m.evaluations;
  return out;
}

}  // namespace hetsgd
