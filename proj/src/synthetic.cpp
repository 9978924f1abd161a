#include "hetsgd/synthetic.hpp"

#include "hetsgd/errors.hpp"
#include "hetsgd/random.hpp"

#include <cmath>
#include <random>

namespace hetsgd {

SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.dim < 1 || spec.size < 1) throw InvalidArgument("synthetic data needs dim >= 1 and size >= 1");
  if (!(spec.flip_rate >= 0 && spec.flip_rate <= 1)) {
    throw InvalidArgument("flip rate must lie in [0, 1]");
  }
  Rng rng(derive_seed(seed, {0x5117}));
  std::normal_distribution<double> normal;
  std::bernoulli_distribution flip(spec.flip_rate);

  SyntheticData out;
  out.w_true.resize(spec.dim);
  do {
    for (Eigen::Index i = 0; i < spec.dim; ++i) out.w_true[i] = normal(rng);
  } while (out.w_true.norm() == 0.0);
  out.w_true.normalize();

  out.data = Dataset(spec.dim);
  for (std::size_t n = 0; n < spec.size; ++n) {
    LabeledExample ex{Vector(spec.dim), 1};
    for (Eigen::Index i = 0; i < spec.dim; ++i) ex.x[i] = normal(rng);
    ex.y = out.w_true.dot(ex.x) >= 0 ? 1 : -1;
    if (flip(rng)) {
      ex.y = -ex.y;
      ++out.flipped;
    }
    out.data.push_back(std::move(ex));
  }
  out.data.normalize_to_unit_ball();
  return out;
}

Eigen::MatrixXd sign_projection_matrix(Eigen::Index d_out, Eigen::Index d_in, std::uint64_t seed) {
  if (d_out < 1 || d_in < 1) throw InvalidArgument("projection dimensions must be positive");
  Rng rng(derive_seed(seed, {0x9801}));
  std::bernoulli_distribution coin(0.5);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_out));
  Eigen::MatrixXd m(d_out, d_in);
  for (Eigen::Index j = 0; j < d_in; ++j) {
    for (Eigen::Index i = 0; i < d_out; ++i) m(i, j) = coin(rng) ? scale : -scale;
  }
  return m;
}

Dataset random_projection(const Dataset& data, Eigen::Index d_out, std::uint64_t seed, bool identity) {
  if (d_out < 1 || d_out > data.dim()) {
    throw InvalidArgument("projection target dimension must lie in [1, " + std::to_string(data.dim()) + "]");
  }
  if (identity && d_out != data.dim()) {
    throw InvalidArgument("identity projection requires d_out == d_in");
  }
  Dataset out(d_out);
  if (identity) {
    for (const auto& ex : data.examples()) out.push_back(ex);
  } else {
    const Eigen::MatrixXd m = sign_projection_matrix(d_out, data.dim(), seed);
    for (const auto& ex : data.examples()) out.push_back({m * ex.x, ex.y});
  }
  out.normalize_to_unit_ball();
  return out;
}

}  // namespace hetsgd
