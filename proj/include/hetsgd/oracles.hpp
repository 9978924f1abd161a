#ifndef HETSGD_ORACLES_HPP
#define HETSGD_ORACLES_HPP

#include "hetsgd/core.hpp"
#include "hetsgd/random.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hetsgd {

/// No additive noise: the oracle returns lambda*w + grad loss.
struct CleanNoise {};

/// epsilon-local differential privacy: Z with density proportional to
/// exp(-(epsilon/2) ||z||) is added to every per-example gradient.
struct LocalDpNoise {
  double epsilon = 1.0;
};

/// Random classification noise: the label is flipped with probability sigma
/// and the gradient of the unbiased surrogate loss is returned.
struct LabelFlipNoise {
  double sigma = 0.0;
};

/// Spherical Gaussian Z with E||Z||^2 == variance. Used to check the
/// data-order analysis, which only constrains the first two moments of Z.
struct GaussianNoise {
  double variance = 0.0;
};

using NoiseMechanism = std::variant<CleanNoise, LocalDpNoise, LabelFlipNoise, GaussianNoise>;

std::string describe(const NoiseMechanism& noise);

struct OracleSpec {
  NoiseMechanism noise = CleanNoise{};
  /// Maximum number of examples the oracle may consume; 0 means |D|.
  std::size_t budget = 0;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
};

/// Second-moment bound Gamma^2 of an oracle and the lower-bound variant used
/// by the c2 interval heuristic.
struct NoiseLevel {
  double gamma_sq = 0.0;
  double gamma_sq_lower = 0.0;
};

NoiseLevel dp_noise_level(double epsilon, Eigen::Index dim, std::size_t batch_size);

/// Throws DomainError unless 0 <= sigma < 0.5.
NoiseLevel rcn_noise_level(double sigma);

/// Same bound as a label-flip oracle at sigma = 0.
NoiseLevel clean_noise_level();

NoiseLevel gaussian_noise_level(double variance, std::size_t batch_size);

NoiseLevel noise_level(const NoiseMechanism& noise, Eigen::Index dim, std::size_t batch_size);

/// Draws Z with density proportional to exp(-(epsilon/2)||z||) in `dim`
/// dimensions: a Gamma(dim, 2/epsilon) radius times a uniform direction.
Vector dp_noise_sample(double epsilon, Eigen::Index dim, Rng& rng);

/// Returns -y with probability sigma, else y.
int rcn_flip_label(int y, double sigma, Rng& rng);

/// Gradient of [(1-sigma) l(w,x,y) - sigma l(w,x,-y)] / (1 - 2 sigma).
Vector rcn_surrogate_gradient(const ObjectiveSpec& objective, const Vector& w, const Vector& x,
                              int y_tilde, double sigma);

struct OracleCallRecord {
  Vector gradient;
  std::size_t calls_consumed = 0;
  /// Batch-averaged Z; present only when noise recording is enabled.
  std::optional<Vector> injected_noise;
};

enum class NoiseMode {
  kInject,
  kSuppress,  ///< Z forced to zero; same traversal order as kInject.
};

/// Stateful noisy gradient source backed by a finite dataset.
///
/// The dataset is traversed along a single seeded Fisher-Yates permutation.
/// Each call consumes the next batch_size examples and returns the batch
/// average of lambda*w + grad loss + Z. Label-flip oracles report
/// Z = grad surrogate(flipped) - grad loss(true), so that suppressing noise
/// yields the plain loss gradient on the true label.
///
/// Permutation, additive noise and label flips draw from three independent
/// streams derived from the seed, so two oracles built from the same spec
/// visit the same examples in the same order whether or not noise is
/// suppressed.
class GradientOracle {
 public:
  GradientOracle(OracleSpec spec, ObjectiveSpec objective, std::shared_ptr<const Dataset> data,
                 NoiseMode mode = NoiseMode::kInject, bool record_noise = false);

  /// Throws BudgetExhausted when fewer than batch_size calls remain.
  OracleCallRecord call(const Vector& w);

  /// A fresh oracle with the same seed and data whose noise is suppressed.
  GradientOracle noiseless_twin() const;

  /// A fresh copy of this oracle (cursor reset) with the given mode.
  GradientOracle fresh(NoiseMode mode, bool record_noise = false) const;

  std::size_t budget() const { return budget_; }
  std::size_t batch_size() const { return spec_.batch_size; }
  std::size_t calls_consumed() const { return cursor_; }
  /// Number of full-batch steps this oracle supports in total.
  std::size_t total_steps() const { return budget_ / spec_.batch_size; }
  std::size_t steps_remaining() const { return (budget_ - cursor_) / spec_.batch_size; }

  const OracleSpec& spec() const { return spec_; }
  const ObjectiveSpec& objective() const { return objective_; }
  const Dataset& data() const { return *data_; }
  NoiseMode mode() const { return mode_; }
  NoiseLevel noise_level() const;

 private:
  Vector per_example_noise(const Vector& w, const LabeledExample& ex);

  OracleSpec spec_;
  ObjectiveSpec objective_;
  std::shared_ptr<const Dataset> data_;
  NoiseMode mode_;
  bool record_noise_;
  std::size_t budget_;
  std::size_t cursor_ = 0;
  std::vector<std::size_t> order_;
  Rng noise_rng_;
  Rng flip_rng_;
};

}  // namespace hetsgd

#endif  // HETSGD_ORACLES_HPP
