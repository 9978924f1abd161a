#include "hetsgd/core.hpp"

#include "hetsgd/errors.hpp"

#include <cmath>
#include <string>

namespace hetsgd {

namespace {

void check_dims(const Vector& w, const Vector& x) {
  if (w.size() != x.size()) {
    throw DimensionMismatch("model has dimension " + std::to_string(w.size()) +
                            " but example has dimension " + std::to_string(x.size()));
  }
}

// log(1 + exp(-m)) without overflow.
double softplus_neg(double m) {
  if (m > 0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

}  // namespace

Dataset::Dataset(Eigen::Index dim, std::vector<LabeledExample> examples) : dim_(dim) {
  examples_.reserve(examples.size());
  for (auto& ex : examples) push_back(std::move(ex));
}

void Dataset::push_back(LabeledExample ex) {
  if (ex.x.size() != dim_) {
    throw DimensionMismatch("dataset has dimension " + std::to_string(dim_) +
                            " but example has dimension " + std::to_string(ex.x.size()));
  }
  if (ex.y != 1 && ex.y != -1) {
    throw InvalidArgument("label must be -1 or +1, got " + std::to_string(ex.y));
  }
  examples_.push_back(std::move(ex));
}

double Dataset::max_norm() const {
  double m = 0.0;
  for (const auto& ex : examples_) m = std::max(m, ex.x.norm());
  return m;
}

void Dataset::normalize_to_unit_ball() {
  const double m = max_norm();
  if (m == 0.0) return;
  for (auto& ex : examples_) ex.x /= m;
}

Dataset Dataset::slice(std::size_t first, std::size_t count) const {
  if (first + count > examples_.size()) {
    throw InvalidArgument("slice [" + std::to_string(first) + ", " +
                          std::to_string(first + count) + ") exceeds dataset size " +
                          std::to_string(examples_.size()));
  }
  Dataset out(dim_);
  out.examples_.assign(examples_.begin() + static_cast<std::ptrdiff_t>(first),
                       examples_.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

std::string_view to_string(Loss loss) {
  switch (loss) {
    case Loss::kLogistic: return "logistic";
    case Loss::kHinge: return "hinge";
    case Loss::kLinear: return "linear";
  }
  return "unknown";
}

Loss parse_loss(std::string_view name) {
  if (name == "logistic") return Loss::kLogistic;
  if (name == "hinge") return Loss::kHinge;
  if (name == "linear") return Loss::kLinear;
  throw InvalidArgument("unknown loss '" + std::string(name) + "'");
}

ObjectiveSpec ObjectiveSpec::make(double lambda, Loss loss, double radius) {
  ObjectiveSpec spec{lambda, loss, radius};
  if (lambda > 0 && radius == 0.0) spec.radius = 1.0 / lambda;
  spec.validate();
  return spec;
}

void ObjectiveSpec::validate() const {
  if (!(lambda > 0)) throw InvalidArgument("lambda must be positive");
  if (!(radius > 0)) throw InvalidArgument("radius must be positive");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double loss_value(const ObjectiveSpec& spec, const Vector& w, const LabeledExample& ex) {
  check_dims(w, ex.x);
  const double margin = ex.y * w.dot(ex.x);
  switch (spec.loss) {
    case Loss::kLogistic: return softplus_neg(margin);
    case Loss::kHinge: return std::max(0.0, 1.0 - margin);
    case Loss::kLinear: return -margin;
  }
  return 0.0;
}

Vector loss_gradient(const ObjectiveSpec& spec, const Vector& w, const Vector& x, int y) {
  check_dims(w, x);
  const double margin = y * w.dot(x);
  switch (spec.loss) {
    case Loss::kLogistic: return (-y * sigmoid(-margin)) * x;
    case Loss::kHinge:
      if (margin <= 1.0) return -y * x;
      return Vector::Zero(x.size());
    case Loss::kLinear: return -y * x;
  }
  return Vector::Zero(x.size());
}

Vector loss_gradient(const ObjectiveSpec& spec, const Vector& w, const LabeledExample& ex) {
  return loss_gradient(spec, w, ex.x, ex.y);
}

double full_objective(const ObjectiveSpec& spec, const Vector& w, const Dataset& data) {
  if (data.empty()) throw EmptyDataset("objective of an empty dataset");
  double total = 0.0;
  for (const auto& ex : data.examples()) total += loss_value(spec, w, ex);
  return 0.5 * spec.lambda * w.squaredNorm() + total / static_cast<double>(data.size());
}

Vector project(const Vector& w, double radius) {
  const double n = w.norm();
  if (n <= radius) return w;
  double scale = radius / n;
  Vector out = w * scale;
  // Rounding can leave the scaled norm an ulp above the radius.
  while (out.norm() > radius) {
    scale = std::nextafter(scale, 0.0);
    out = w * scale;
  }
  return out;
}

}  // namespace hetsgd
