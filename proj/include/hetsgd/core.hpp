#ifndef HETSGD_CORE_HPP
#define HETSGD_CORE_HPP

#include <Eigen/Core>

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace hetsgd {

using Vector = Eigen::VectorXd;

/// One feature vector with a label in {-1, +1}.
struct LabeledExample {
  Vector x;
  int y = 1;
};

/// An in-memory dataset of fixed dimension.
///
/// Every ingestion path (file readers, synthetic generation, random
/// projection) finishes with normalize_to_unit_ball(), so oracles may
/// assume ||x|| <= 1.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Eigen::Index dim) : dim_(dim) {}
  Dataset(Eigen::Index dim, std::vector<LabeledExample> examples);

  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }

  const LabeledExample& operator[](std::size_t i) const { return examples_[i]; }
  std::span<const LabeledExample> examples() const { return examples_; }

  /// Appends an example; throws DimensionMismatch or InvalidArgument on a
  /// bad dimension or a label outside {-1, +1}.
  void push_back(LabeledExample ex);

  /// Rescales every x by the largest norm in the set so that max ||x|| == 1.
  /// A dataset of all-zero features is left unchanged.
  void normalize_to_unit_ball();

  double max_norm() const;

  /// Examples [first, first + count) as a new dataset.
  Dataset slice(std::size_t first, std::size_t count) const;

 private:
  Eigen::Index dim_ = 0;
  std::vector<LabeledExample> examples_;
};

enum class Loss { kLogistic, kHinge, kLinear };

std::string_view to_string(Loss loss);
/// Accepts "logistic", "hinge" or "linear"; throws InvalidArgument otherwise.
Loss parse_loss(std::string_view name);

/// The regularized objective lambda/2 ||w||^2 + mean loss over a feasible
/// ball of the given radius.
struct ObjectiveSpec {
  double lambda = 1.0;
  Loss loss = Loss::kLogistic;
  double radius = 1.0;

  /// Builds a validated spec. A radius of zero selects the default 1/lambda;
  /// pass infinity to disable projection.
  static ObjectiveSpec make(double lambda, Loss loss, double radius = 0.0);

  void validate() const;
};

constexpr double kUnboundedRadius = std::numeric_limits<double>::infinity();

double loss_value(const ObjectiveSpec& spec, const Vector& w, const LabeledExample& ex);

/// Gradient of the per-example loss term only (no lambda * w).
///
/// Hinge returns the active branch -y x at the kink y w.x == 1.
Vector loss_gradient(const ObjectiveSpec& spec, const Vector& w, const LabeledExample& ex);

/// Same as loss_gradient with the label overridden; used by the label-noise
/// surrogate, which evaluates both y and -y on the same features.
Vector loss_gradient(const ObjectiveSpec& spec, const Vector& w, const Vector& x, int y);

double full_objective(const ObjectiveSpec& spec, const Vector& w, const Dataset& data);

/// Euclidean projection onto the ball of the given radius.
Vector project(const Vector& w, double radius);

/// Numerically stable logistic sigmoid.
double sigmoid(double z);

}  // namespace hetsgd

#endif  // HETSGD_CORE_HPP
