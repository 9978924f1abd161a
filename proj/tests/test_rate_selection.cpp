#include "hetsgd/errors.hpp"
#include "hetsgd/golden_section.hpp"
#include "hetsgd/oracles.hpp"
#include "hetsgd/rate_selection.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

using namespace hetsgd;
using testing::Rng;

namespace {

struct GridMin {
  double c;
  double value;
};

// Exhaustive log grid over [lo, hi].
template <typename F>
GridMin grid_argmin(F&& f, double lo, double hi, std::size_t points) {
  GridMin best{lo, std::numeric_limits<double>::infinity()};
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double c = lo * std::exp(step * static_cast<double>(i));
    const double v = f(c);
    if (v < best.value) best = {c, v};
  }
  return best;
}

BoundInputs random_inputs(Rng& rng) {
  return {testing::log_uniform(0.5, 1e3, rng), testing::log_uniform(0.5, 1e3, rng),
          testing::uniform(0.05, 0.95, rng), testing::log_uniform(1e-3, 1.0, rng),
          testing::log_uniform(1.0, 1e5, rng)};
}

}  // namespace

TEST_CASE("golden section on smooth functions") {
  const auto quad = golden_section_minimize([](double x) { return (x - 2) * (x - 2) + 1; }, 0.0, 5.0, 1e-10, 200);
  CHECK(quad.x == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(quad.value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(quad.evaluations <= 200);

  const auto capped = golden_section_minimize([](double x) { return std::cosh(x - 1); }, -3.0, 4.0, 0.0, 12);
  CHECK(capped.evaluations == 12);
  CHECK(std::abs(capped.x - 1.0) < 0.1);

  const auto edge = golden_section_minimize([](double x) { return x; }, 1.0, 2.0, 1e-9, 100);
  CHECK(edge.x == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("log grid search finds the deeper of two basins") {
  // Wells at x = 0.01 (depth 1) and x = 100 (depth 2) in log coordinates.
  auto f = [](double x) {
    const double u = std::log10(x);
    return -std::exp(-(u + 2) * (u + 2) * 20) - 2 * std::exp(-(u - 2) * (u - 2) * 20);
  };
  const auto m = log_grid_golden_minimize(f, 1e-6, 1e6, 400, 1e-10);
  CHECK(m.x == doctest::Approx(100.0).epsilon(1e-6));
  CHECK_FALSE(m.at_boundary);

  const auto edge = log_grid_golden_minimize([](double x) { return x; }, 1e-3, 1e3, 50, 1e-10);
  CHECK(edge.at_boundary);
  CHECK(edge.x == doctest::Approx(1e-3));
}

TEST_CASE("bound examples") {
  // Equal noise with c1 = c2 = 1/lambda collapses to 4 G^2 / (lambda^2 T).
  testing::for_each_case(501, 50, [](Rng& rng) {
    BoundInputs in = random_inputs(rng);
    in.gamma2_sq = in.gamma1_sq;
    const double c = 1.0 / in.lambda;
    const double expected = 4 * in.gamma1_sq / (in.lambda * in.lambda * in.steps);
    CHECK(bound_B(in, c, c) == doctest::Approx(expected).epsilon(1e-12));
  });

  // Independent evaluation: first = 4*17*0.1*1e6/1e4 = 680, second = 4*2604*0.9*1e6/1e4 = 937440.
  const BoundInputs pinned{17.0, 2604.0, 0.1, 0.001, 1e4};
  CHECK(bound_B(pinned, 1000.0, 1000.0) == doctest::Approx(938120.0).epsilon(1e-10));
}

TEST_CASE("bound is continuous through 2 lambda c2 = 1") {
  testing::for_each_case(502, 50, [](Rng& rng) {
    const BoundInputs in = random_inputs(rng);
    const double c1 = 1.0 / in.lambda;
    const double mid = 0.5 / in.lambda;
    const double limit = bound_B(in, c1, mid);
    // Inside the band the limit branch is used verbatim.
    CHECK(bound_B(in, c1, mid * (1 + 1e-10)) == doctest::Approx(limit).epsilon(1e-9));
    // Outside it the one-sided gap shrinks linearly and the two-sided mean quadratically.
    double previous_gap = 0.0;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
      const double up = bound_B(in, c1, mid * (1 + delta));
      const double down = bound_B(in, c1, mid * (1 - delta));
      const double gap = std::abs(up - limit) / limit;
      CHECK(gap < 10 * delta);
      if (previous_gap > 0) CHECK(gap < previous_gap);
      previous_gap = gap;
      CHECK(std::abs(0.5 * (up + down) - limit) / limit < 50 * delta * delta);
    }
  });
}

TEST_CASE("T-free forms equal T times the bound") {
  testing::for_each_case(503, 50, [](Rng& rng) {
    const BoundInputs in = random_inputs(rng);
    const double c = testing::log_uniform(1e-4, 1e2, rng) / in.lambda;
    const double gc = in.gamma1_sq, gn = in.gamma2_sq, bc = in.beta1;
    const double cn = h_clean_noisy(c, gc, gn, bc, in.lambda);
    CHECK(std::abs(cn - in.steps * bound_B(in, 1.0 / in.lambda, c)) <= 1e-12 * cn);
    const BoundInputs swapped{gn, gc, 1.0 - bc, in.lambda, in.steps};
    const double nc = h_noisy_clean(c, gc, gn, bc, in.lambda);
    CHECK(std::abs(nc - in.steps * bound_B(swapped, 1.0 / in.lambda, c)) <= 1e-12 * nc);
    CHECK(nc == h_clean_noisy(c, gn, gc, 1.0 - bc, in.lambda));
  });
  CHECK(h_clean_noisy(10.0, 3.0, 3.0, 0.3, 0.1) == doctest::Approx(4 * 3.0 / 0.01).epsilon(1e-14));
}

TEST_CASE("bound input validation") {
  const BoundInputs in{1.0, 2.0, 0.5, 1.0, 10.0};
  CHECK_THROWS_AS(bound_B(in, 0.5, 1.0), PreconditionViolated);
  CHECK_THROWS_AS(bound_B(in, 0.4, 1.0), PreconditionViolated);
  CHECK_THROWS_AS(bound_B(in, 1.0, 0.0), NonpositiveRate);
  CHECK_THROWS_AS(bound_B({1.0, 2.0, 1.0, 1.0, 10.0}, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(bound_B({1.0, 2.0, 0.5, 0.0, 10.0}, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(bound_B({-1.0, 2.0, 0.5, 1.0, 10.0}, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(bound_B({1.0, 2.0, 0.5, 1.0, 0.0}, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("equal noise is minimized at c2 = 1/lambda") {
  testing::for_each_case(504, 20, [](Rng& rng) {
    BoundInputs in = random_inputs(rng);
    in.gamma2_sq = in.gamma1_sq;
    const auto m = minimize_c2(in);
    CHECK(m.c == doctest::Approx(1.0 / in.lambda).epsilon(1e-6));
    CHECK_FALSE(m.at_boundary);
  });
}

TEST_CASE("minimizer matches an exhaustive grid") {
  testing::for_each_case(505, 20, [](Rng& rng) {
    const BoundInputs in = random_inputs(rng);
    const auto m = minimize_c2(in);
    const auto g = grid_argmin([&](double c) { return bound_B(in, 1.0 / in.lambda, c); },
                               kRateRangeLow / in.lambda, kRateRangeHigh / in.lambda, 1000000);
    CHECK(m.value <= g.value * (1 + 1e-12));
    CHECK(m.value >= g.value * (1 - 1e-6));
    CHECK(std::abs(m.c - g.c) <= 1e-3 * g.c);
  });
}

TEST_CASE("minimizers fall inside the noisy-first bracket") {
  // Ratios are of standard deviations; the bound takes squares.
  for (double beta_noisy : {0.5, 0.9}) {
    for (double ratio : {100.0, 300.0, 1000.0}) {
      const double gc = 1.0, gn = ratio * ratio, lambda = 1.0;
      const auto iv = lemma2_interval(gc, gn, beta_noisy, lambda);
      CHECK(iv.lo < iv.hi);
      CHECK(iv.hi - iv.lo == doctest::Approx(2 * std::log(4.0) / std::log(1 / beta_noisy)).epsilon(1e-12));
      const auto m = minimize_c2({gn, gc, beta_noisy, lambda, 1.0});
      CHECK(iv.contains(m.c, lambda));
    }
  }
  const auto iv = lemma2_interval(1.0, 1e4, 0.9, 1.0);
  CHECK(iv.lo == doctest::Approx(67.0586463649).epsilon(1e-9));
  CHECK(iv.hi == doctest::Approx(93.3739002807).epsilon(1e-9));
  // Values from an independent 200001-point grid evaluation.
  CHECK(2 * minimize_c2({1e4, 1.0, 0.9, 1.0, 1.0}).c == doctest::Approx(80.2019625538).epsilon(1e-4));
  CHECK(2 * minimize_c2({1e4, 1.0, 0.5, 1.0, 1.0}).c == doctest::Approx(15.7646740481).epsilon(1e-4));

  CHECK_THROWS_AS(lemma2_interval(1.0, 4.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(lemma2_interval(1.0, 4.0, 0.0, 1.0), DomainError);
  CHECK_FALSE(lemma2_interval(4.0, 1.0, 0.2, 1.0).valid);
}

TEST_CASE("minimizers fall inside the clean-first bracket") {
  const auto example = lemma3_interval(1.0, 100.0, 0.1);
  CHECK(example.lo == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(example.hi == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(example.valid);
  double previous_hi = INFINITY;
  for (double ratio : {10.0, 30.0, 100.0}) {
    const double gc = 1.0, gn = ratio * ratio;
    CHECK(lemma3_interval(gc, gn, 0.1).hi < previous_hi);
    previous_hi = lemma3_interval(gc, gn, 0.1).hi;
    for (double beta_clean : {0.1, 0.3, 0.5}) {
      for (double lambda : {1.0, 0.01}) {
        const auto iv = lemma3_interval(gc, gn, beta_clean);
        const auto m = minimize_c2({gc, gn, beta_clean, lambda, 1.0});
        CHECK(iv.contains(m.c, lambda));
      }
    }
  }
  CHECK(2 * minimize_c2({1.0, 100.0, 0.1, 1.0, 1.0}).c == doctest::Approx(0.0512536732).epsilon(1e-4));
  CHECK_THROWS_AS(lemma3_interval(1.0, 2.0, 1.5), InvalidArgument);
}

TEST_CASE("selection ties go to clean first") {
  for (double g : {0.5, 4.0, 100.0}) {
    const auto sel = algorithm2_select(g, g, 0.5, 0.01);
    CHECK(sel.order == DataOrder::kCleanFirst);
    CHECK(sel.clean_first.value == sel.noisy_first.value);
    CHECK(sel.c1 == doctest::Approx(100.0));
  }
}

TEST_CASE("selection dominates single rates and the clean-only limit") {
  testing::for_each_case(506, 50, [](Rng& rng) {
    const double gc = testing::log_uniform(0.5, 50.0, rng);
    const double gn = gc * testing::log_uniform(1.0, 1e4, rng);
    const double bc = testing::uniform(0.05, 0.95, rng);
    const double lambda = testing::log_uniform(1e-4, 1.0, rng);
    const auto sel = algorithm2_select(gc, gn, bc, lambda);
    const double single_cf = minimize_single_rate({gc, gn, bc, lambda, 1.0}).value;
    const double single_nf = minimize_single_rate({gn, gc, 1 - bc, lambda, 1.0}).value;
    CHECK(sel.bound_value <= std::min(single_cf, single_nf) * (1 + 1e-12));
    CHECK(sel.bound_value == std::min(sel.clean_first.value, sel.noisy_first.value));
    // c2 -> 0 leaves only the first phase: 4 G1^2 / (lambda^2 beta1).
    const bool cf = sel.order == DataOrder::kCleanFirst;
    const double g1 = cf ? gc : gn, b1 = cf ? bc : 1 - bc;
    CHECK(sel.bound_value <= 4 * g1 / (lambda * lambda * b1));
    CHECK(sel.c2 == (cf ? sel.clean_first.c : sel.noisy_first.c));
  });
}

TEST_CASE("selection regression pin") {
  const double gc = dp_noise_level(10.0, 25, 50).gamma_sq;
  const double gn = dp_noise_level(2.0, 25, 50).gamma_sq;
  CHECK(gc == doctest::Approx(4.52).epsilon(1e-14));
  CHECK(gn == doctest::Approx(17.0).epsilon(1e-14));
  const auto sel = algorithm2_select(gc, gn, 0.1, 0.001);
  CHECK(sel.order == DataOrder::kNoisyFirst);
  CHECK(sel.c2 == doctest::Approx(3278.169038753842).epsilon(1e-6));
  CHECK(sel.bound_value == doctest::Approx(53362677.56966843).epsilon(1e-9));
  CHECK(sel.clean_first.c == doctest::Approx(586.03).epsilon(1e-4));
}

TEST_CASE("interval search on a bound callback") {
  testing::for_each_case(507, 20, [](Rng& rng) {
    const double lambda = testing::log_uniform(1e-3, 1e-1, rng);
    const double bc = testing::uniform(0.05, 0.5, rng);
    const NoiseLevel clean{testing::log_uniform(1.0, 5.0, rng), 0.0};
    const NoiseLevel noisy{clean.gamma_sq * testing::log_uniform(2.0, 1e3, rng), 0.0};
    const NoiseLevel clean_b{clean.gamma_sq, clean.gamma_sq * testing::uniform(0.1, 0.9, rng)};
    const NoiseLevel noisy_b{noisy.gamma_sq, noisy.gamma_sq * testing::uniform(0.1, 0.9, rng)};
    const double t_c = testing::uniform(0.0, 1.0, rng), t_n = testing::uniform(0.0, 1.0, rng);
    const double true_c = clean_b.gamma_sq_lower + t_c * (clean_b.gamma_sq - clean_b.gamma_sq_lower);
    const double true_n = noisy_b.gamma_sq_lower + t_n * (noisy_b.gamma_sq - noisy_b.gamma_sq_lower);
    const bool cf = algorithm2_select(true_c, true_n, bc, lambda).order == DataOrder::kCleanFirst;
    auto callback = [&](double c) {
      return cf ? h_clean_noisy(c, true_c, true_n, bc, lambda) : h_noisy_clean(c, true_c, true_n, bc, lambda);
    };
    const auto res = c2_interval_search(clean_b, noisy_b, bc, lambda, callback);
    const double lo = std::min(res.c2_lower, res.c2_upper), hi = std::max(res.c2_lower, res.c2_upper);
    CHECK(res.c2_best >= lo);
    CHECK(res.c2_best <= hi);
    CHECK(res.evaluations <= 12);
    REQUIRE(res.best_value.has_value());
    CHECK(*res.best_value == callback(res.c2_best));
    const auto g = grid_argmin(callback, lo, hi, 100000);
    CHECK(*res.best_value <= 1.01 * g.value);
  });
}

TEST_CASE("interval search degenerate and invalid inputs") {
  int calls = 0;
  auto counting = [&](double c) {
    ++calls;
    return c;
  };
  const auto rcn_c = rcn_noise_level(0.0), rcn_n = rcn_noise_level(0.3);
  const auto res = c2_interval_search(rcn_c, rcn_n, 0.2, 0.01, counting);
  CHECK(calls == 0);
  CHECK(res.evaluations == 0);
  CHECK_FALSE(res.best_value.has_value());
  CHECK(res.c2_best == res.c2_upper);
  CHECK(res.c2_best == algorithm2_select(rcn_c.gamma_sq, rcn_n.gamma_sq, 0.2, 0.01).c2);

  CHECK_THROWS_AS(c2_interval_search({1.0, 2.0}, {3.0, 1.0}, 0.2, 0.01, counting), InvalidArgument);
}

TEST_CASE("interval search is deterministic with a seeded noisy callback") {
  auto noisy_callback = [](double c) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &c, sizeof bits);
    Rng rng(derive_seed(99, {bits}));
    std::normal_distribution<double> n;
    return h_clean_noisy(c, 4.1, 30.0, 0.1, 0.01) * (1 + 0.01 * n(rng));
  };
  const auto clean = dp_noise_level(10.0, 10, 50), noisy = dp_noise_level(1.0, 10, 50);
  const auto a = c2_interval_search(clean, noisy, 0.1, 0.01, noisy_callback);
  const auto b = c2_interval_search(clean, noisy, 0.1, 0.01, noisy_callback);
  CHECK(a.c2_best == b.c2_best);
  CHECK(a.best_value == b.best_value);
  CHECK(a.evaluations == 12);
}
