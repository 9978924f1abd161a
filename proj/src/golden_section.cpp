#include "hetsgd/golden_section.hpp"

#include "hetsgd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hetsgd {

namespace {

constexpr double kInvPhi = 0.6180339887498948482;  // 1 / golden ratio

}  // namespace

ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                      double rel_tol, std::size_t max_evaluations) {
  if (!(lo <= hi)) throw InvalidArgument("golden-section search needs lo <= hi");
  ScalarMinimum best{lo, 0.0, 0, false};
  bool have_best = false;
  auto eval = [&](double x) {
    const double v = f(x);
    ++best.evaluations;
    if (!have_best || v < best.value) {
      best.x = x;
      best.value = v;
      have_best = true;
    }
    return v;
  };

  if (max_evaluations == 0) return best;
  if (lo == hi || max_evaluations == 1) {
    eval(0.5 * (lo + hi));
    return best;
  }

  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (best.evaluations < max_evaluations &&
         (b - a) > rel_tol * std::max(std::abs(a), std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = eval(d);
    }
  }
  return best;
}

ScalarMinimum log_grid_golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                                       std::size_t grid_points, double rel_tol) {
  if (!(lo > 0) || !(lo < hi)) throw InvalidArgument("log grid needs 0 < lo < hi");
  if (grid_points < 3) throw InvalidArgument("log grid needs at least 3 points");

  std::vector<double> grid(grid_points);
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / static_cast<double>(grid_points - 1);
  for (std::size_t i = 0; i < grid_points; ++i) grid[i] = std::exp(log_lo + step * static_cast<double>(i));
  grid.front() = lo;
  grid.back() = hi;

  std::size_t arg = 0;
  double best_value = f(grid[0]);
  for (std::size_t i = 1; i < grid_points; ++i) {
    const double v = f(grid[i]);
    if (v < best_value) {
      best_value = v;
      arg = i;
    }
  }

  const double a = grid[arg == 0 ? 0 : arg - 1];
  const double b = grid[std::min(arg + 1, grid_points - 1)];
  ScalarMinimum refined = golden_section_minimize(f, a, b, rel_tol, 10'000);
  refined.evaluations += grid_points;
  if (best_value < refined.value) {
    refined.x = grid[arg];
    refined.value = best_value;
  }
  refined.at_boundary = (arg == 0 || arg == grid_points - 1);
  return refined;
}

}  // namespace hetsgd
