#ifndef HETSGD_SYNTHETIC_HPP
#define HETSGD_SYNTHETIC_HPP

#include "hetsgd/core.hpp"

#include <cstddef>
#include <cstdint>

namespace hetsgd {

/// Planted-hyperplane classification data: x ~ N(0, I_d), y = sign(w_true.x)
/// flipped with probability flip_rate.
struct SyntheticSpec {
  Eigen::Index dim = 10;
  std::size_t size = 5000;
  double flip_rate = 0.0;
};

struct SyntheticData {
  Dataset data;
  Vector w_true;  ///< unit norm
  std::size_t flipped = 0;
};

/// Deterministic given the seed; the dataset is normalized to the unit ball.
SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

/// d_out x d_in matrix with i.i.d. entries +-1/sqrt(d_out).
Eigen::MatrixXd sign_projection_matrix(Eigen::Index d_out, Eigen::Index d_in, std::uint64_t seed);

/// Maps every x to M x with M = sign_projection_matrix(d_out, d_in, seed) and
/// renormalizes to the unit ball. With `identity` set (requires
/// d_out == d_in) the features are only renormalized.
Dataset random_projection(const Dataset& data, Eigen::Index d_out, std::uint64_t seed,
                          bool identity = false);

}  // namespace hetsgd

#endif  // HETSGD_SYNTHETIC_HPP
