#ifndef HETSGD_GOLDEN_SECTION_HPP
#define HETSGD_GOLDEN_SECTION_HPP

#include <cstddef>
#include <functional>

namespace hetsgd {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  std::size_t evaluations = 0;
  /// Set by grid searches when the best grid point is an endpoint.
  bool at_boundary = false;
};

/// Golden-section search for a minimum of f on [lo, hi].
///
/// Stops once the bracket is narrower than rel_tol * max(|lo|, |hi|) or
/// after max_evaluations calls of f, whichever comes first. Returns the best
/// point evaluated, not the bracket midpoint.
ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                      double rel_tol, std::size_t max_evaluations);

/// Log-spaced grid over [lo, hi] (lo > 0) to locate the basin, then
/// golden-section refinement between the neighbours of the best grid point.
/// Handles objectives that are not unimodal on the whole range.
ScalarMinimum log_grid_golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                                       std::size_t grid_points, double rel_tol);

}  // namespace hetsgd

#endif  // HETSGD_GOLDEN_SECTION_HPP
