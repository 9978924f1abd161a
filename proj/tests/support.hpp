// Shared generators and statistics for the unit tests.
#ifndef HETSGD_TESTS_SUPPORT_HPP
#define HETSGD_TESTS_SUPPORT_HPP

#include "hetsgd/core.hpp"
#include "hetsgd/random.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace testing {

using hetsgd::Rng;
using hetsgd::Vector;

inline Vector gaussian_vector(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> n;
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

/// Uniform in the ball of the given radius.
inline Vector vector_in_ball(Eigen::Index d, double radius, Rng& rng) {
  Vector v = gaussian_vector(d, rng);
  v.normalize();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return v * radius * std::pow(u(rng), 1.0 / static_cast<double>(d));
}

inline int random_label(Rng& rng) { return std::bernoulli_distribution(0.5)(rng) ? 1 : -1; }

inline hetsgd::LabeledExample random_example(Eigen::Index d, Rng& rng) {
  return {vector_in_ball(d, 1.0, rng), random_label(rng)};
}

inline hetsgd::Dataset random_dataset(Eigen::Index d, std::size_t n, Rng& rng) {
  hetsgd::Dataset data(d);
  for (std::size_t i = 0; i < n; ++i) data.push_back(random_example(d, rng));
  return data;
}

inline double uniform(double lo, double hi, Rng& rng) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// exp of a uniform draw on [log lo, log hi].
inline double log_uniform(double lo, double hi, Rng& rng) {
  return std::exp(uniform(std::log(lo), std::log(hi), rng));
}

/// Runs `body(rng)` for `cases` independently seeded generators.
template <typename F>
void for_each_case(std::uint64_t seed, int cases, F&& body) {
  for (int k = 0; k < cases; ++k) {
    Rng rng(hetsgd::derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    body(rng);
  }
}

struct MeanStat {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanStat mean_stat(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  const double n = static_cast<double>(v.size());
  const double m = s / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

inline double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace testing

#endif  // HETSGD_TESTS_SUPPORT_HPP
