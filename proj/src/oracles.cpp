#include "hetsgd/oracles.hpp"

#include "hetsgd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hetsgd {

namespace {

enum Stream : std::uint64_t { kPermutation = 1, kAdditiveNoise = 2, kLabelFlips = 3 };

void validate_noise(const NoiseMechanism& noise) {
  std::visit(
      [](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LocalDpNoise>) {
          if (!(n.epsilon > 0)) throw InvalidArgument("local DP epsilon must be positive");
        } else if constexpr (std::is_same_v<T, LabelFlipNoise>) {
          if (!(n.sigma >= 0 && n.sigma < 0.5)) {
            throw DomainError("label flip probability must lie in [0, 0.5)");
          }
        } else if constexpr (std::is_same_v<T, GaussianNoise>) {
          if (!(n.variance >= 0)) throw InvalidArgument("Gaussian noise variance must be >= 0");
        }
      },
      noise);
}

}  // namespace

std::string describe(const NoiseMechanism& noise) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CleanNoise>) {
          os << "clean";
        } else if constexpr (std::is_same_v<T, LocalDpNoise>) {
          os << "dp(epsilon=" << n.epsilon << ")";
        } else if constexpr (std::is_same_v<T, LabelFlipNoise>) {
          os << "rcn(sigma=" << n.sigma << ")";
        } else {
          os << "gaussian(variance=" << n.variance << ")";
        }
      },
      noise);
  return os.str();
}

NoiseLevel dp_noise_level(double epsilon, Eigen::Index dim, std::size_t batch_size) {
  if (!(epsilon > 0) || dim < 1 || batch_size < 1) {
    throw InvalidArgument("dp_noise_level needs epsilon > 0, dim >= 1 and batch_size >= 1");
  }
  const double d = static_cast<double>(dim);
  const double noise = 4.0 * (d * d + d) / (epsilon * epsilon * static_cast<double>(batch_size));
  return {4.0 + noise, noise};
}

NoiseLevel rcn_noise_level(double sigma) {
  if (!(sigma >= 0 && sigma < 0.5)) throw DomainError("label flip probability must lie in [0, 0.5)");
  const double k = 1.0 - 2.0 * sigma;
  const double g = 3.0 + 1.0 / (k * k);
  // No separate lower bound is available for label noise.
  return {g, g};
}

NoiseLevel clean_noise_level() { return rcn_noise_level(0.0); }

NoiseLevel gaussian_noise_level(double variance, std::size_t batch_size) {
  if (!(variance >= 0) || batch_size < 1) {
    throw InvalidArgument("gaussian_noise_level needs variance >= 0 and batch_size >= 1");
  }
  const double noise = variance / static_cast<double>(batch_size);
  return {4.0 + noise, noise};
}

NoiseLevel noise_level(const NoiseMechanism& noise, Eigen::Index dim, std::size_t batch_size) {
  return std::visit(
      [&](const auto& n) -> NoiseLevel {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CleanNoise>) {
          return clean_noise_level();
        } else if constexpr (std::is_same_v<T, LocalDpNoise>) {
          return dp_noise_level(n.epsilon, dim, batch_size);
        } else if constexpr (std::is_same_v<T, LabelFlipNoise>) {
          return rcn_noise_level(n.sigma);
        } else {
          return gaussian_noise_level(n.variance, batch_size);
        }
      },
      noise);
}

Vector dp_noise_sample(double epsilon, Eigen::Index dim, Rng& rng) {
  std::gamma_distribution<double> radius(static_cast<double>(dim), 2.0 / epsilon);
  std::normal_distribution<double> normal;
  Vector dir(dim);
  double n = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) dir[i] = normal(rng);
    n = dir.norm();
  } while (n == 0.0);
  return dir * (radius(rng) / n);
}

int rcn_flip_label(int y, double sigma, Rng& rng) {
  std::bernoulli_distribution flip(sigma);
  return flip(rng) ? -y : y;
}

Vector rcn_surrogate_gradient(const ObjectiveSpec& objective, const Vector& w, const Vector& x,
                              int y_tilde, double sigma) {
  if (!(sigma >= 0 && sigma < 0.5)) throw DomainError("label flip probability must lie in [0, 0.5)");
  if (sigma == 0.0) return loss_gradient(objective, w, x, y_tilde);
  return ((1.0 - sigma) * loss_gradient(objective, w, x, y_tilde) -
          sigma * loss_gradient(objective, w, x, -y_tilde)) /
         (1.0 - 2.0 * sigma);
}

GradientOracle::GradientOracle(OracleSpec spec, ObjectiveSpec objective,
                               std::shared_ptr<const Dataset> data, NoiseMode mode,
                               bool record_noise)
    : spec_(std::move(spec)),
      objective_(objective),
      data_(std::move(data)),
      mode_(mode),
      record_noise_(record_noise),
      budget_(spec_.budget),
      noise_rng_(derive_seed(spec_.seed, {kAdditiveNoise})),
      flip_rng_(derive_seed(spec_.seed, {kLabelFlips})) {
  objective_.validate();
  validate_noise(spec_.noise);
  if (!data_ || data_->empty()) throw EmptyDataset("oracle needs a nonempty dataset");
  if (spec_.batch_size < 1) throw InvalidArgument("batch size must be positive");
  if (budget_ == 0) budget_ = data_->size();
  if (budget_ > data_->size()) {
    throw InvalidArgument("oracle budget " + std::to_string(budget_) + " exceeds dataset size " +
                          std::to_string(data_->size()));
  }
  order_.resize(data_->size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  Rng perm_rng(derive_seed(spec_.seed, {kPermutation}));
  std::shuffle(order_.begin(), order_.end(), perm_rng);
}

NoiseLevel GradientOracle::noise_level() const {
  return hetsgd::noise_level(spec_.noise, data_->dim(), spec_.batch_size);
}

Vector GradientOracle::per_example_noise(const Vector& w, const LabeledExample& ex) {
  return std::visit(
      [&](const auto& n) -> Vector {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CleanNoise>) {
          return Vector::Zero(w.size());
        } else if constexpr (std::is_same_v<T, LocalDpNoise>) {
          return dp_noise_sample(n.epsilon, w.size(), noise_rng_);
        } else if constexpr (std::is_same_v<T, LabelFlipNoise>) {
          const int y_tilde = rcn_flip_label(ex.y, n.sigma, flip_rng_);
          return rcn_surrogate_gradient(objective_, w, ex.x, y_tilde, n.sigma) -
                 loss_gradient(objective_, w, ex);
        } else {
          std::normal_distribution<double> normal(
              0.0, std::sqrt(n.variance / static_cast<double>(w.size())));
          Vector z(w.size());
          for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(noise_rng_);
          return z;
        }
      },
      spec_.noise);
}

OracleCallRecord GradientOracle::call(const Vector& w) {
  const std::size_t b = spec_.batch_size;
  if (budget_ - cursor_ < b) {
    throw BudgetExhausted("oracle budget exhausted: " + std::to_string(budget_ - cursor_) +
                          " calls left, batch needs " + std::to_string(b));
  }
  if (w.size() != data_->dim()) {
    throw DimensionMismatch("model has dimension " + std::to_string(w.size()) +
                            " but oracle data has dimension " + std::to_string(data_->dim()));
  }
  Vector grad_sum = Vector::Zero(w.size());
  Vector noise_sum = Vector::Zero(w.size());
  for (std::size_t i = 0; i < b; ++i) {
    const LabeledExample& ex = (*data_)[order_[cursor_ + i]];
    Vector g = objective_.lambda * w + loss_gradient(objective_, w, ex);
    if (mode_ == NoiseMode::kInject) {
      const Vector z = per_example_noise(w, ex);
      g += z;
      noise_sum += z;
    }
    grad_sum += g;
  }
  cursor_ += b;
  const double inv_b = 1.0 / static_cast<double>(b);
  OracleCallRecord rec{grad_sum * inv_b, cursor_, std::nullopt};
  if (record_noise_) rec.injected_noise = noise_sum * inv_b;
  return rec;
}

GradientOracle GradientOracle::fresh(NoiseMode mode, bool record_noise) const {
  OracleSpec spec = spec_;
  spec.budget = budget_;
  return GradientOracle(spec, objective_, data_, mode, record_noise);
}

GradientOracle GradientOracle::noiseless_twin() const { return fresh(NoiseMode::kSuppress); }

}  // namespace hetsgd
