#include <doctest.h>

#include <cmath>

#include "dampsim/errors.hpp"
#include "dampsim/inequality_lab.hpp"
#include "test_support.hpp"

using namespace dampsim;
using dampsim::testing::make_grid;

TEST_CASE("interpolation exponent") {
  CHECK(interpolation_exponent(2, 1.0, 4.0, 0.0) == doctest::Approx(0.5));
  CHECK(interpolation_exponent(1, 1.0, 2.0, 0.5) == doctest::Approx(0.5));
  CHECK(interpolation_exponent(3, 2.0, 2.0, 0.0) == 0.0);
}

TEST_CASE("degenerate case q = 2, s = 0 has ratio one") {
  const auto grid = make_grid(1, 256, 10.0);
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    CHECK(std::abs(fgn_ratio(random_bump_field(grid, 1, trial), 2.0, 0.0) - 1.0) <= 1e-10);
  }
  const auto check = fgn_check(make_grid(2, 32, 8.0), 2.0, 0.0, 50, 3);
  CHECK(std::abs(check.worst_ratio - 1.0) <= 1e-10);
  CHECK(check.parameters.at("theta") == 0.0);
}

TEST_CASE("q = 2, s = sigma / 2 never exceeds one") {
  for (double sigma : {1.0, 2.0, 0.6}) {
    const auto check = fgn_check(make_grid(1, 256, 10.0, sigma), 2.0, sigma / 2.0, 200, 11);
    CAPTURE(sigma);
    CHECK(check.worst_ratio <= 1.0 + 1e-10);
    CHECK(check.worst_ratio > 0.5);
    CHECK(check.trials == 200);
  }
}

TEST_CASE("ratio is invariant under scaling") {
  const auto grid = make_grid(2, 32, 6.0);
  const auto f = random_bump_field(grid, 5, 0);
  const double base = fgn_ratio(f, 4.0, 0.3);
  for (double lambda : {-3.0, 1e-4, 250.0}) {
    auto g = f;
    for (auto& v : g.values()) v *= lambda;
    CHECK(fgn_ratio(g, 4.0, 0.3) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("worst ratio is stable under grid refinement") {
  const auto coarse = fgn_check(make_grid(2, 64, 10.0), 4.0, 0.0, 200, 42);
  const auto fine = fgn_check(make_grid(2, 128, 10.0), 4.0, 0.0, 200, 42);
  CHECK(coarse.parameters.at("theta") == doctest::Approx(0.5));
  CHECK(std::abs(fine.worst_ratio / coarse.worst_ratio - 1.0) < 0.05);
}

TEST_CASE("trial fields and results depend only on the seed") {
  const auto grid = make_grid(1, 128, 10.0);
  const auto a = random_bump_field(grid, 9, 17), b = random_bump_field(grid, 9, 17);
  const auto c = random_bump_field(grid, 10, 17);
  CHECK(dampsim::testing::max_abs_diff(a, b) == 0.0);
  CHECK(dampsim::testing::max_abs_diff(a, c) > 0.0);
  const auto r1 = fgn_check(grid, 3.0, 0.2, 64, 9), r2 = fgn_check(grid, 3.0, 0.2, 64, 9);
  CHECK(r1.worst_ratio == r2.worst_ratio);
  CHECK(r1.witness == r2.witness);
}

TEST_CASE("hypotheses of the interpolation check are enforced") {
  const auto grid = make_grid(1, 64, 5.0);
  CHECK_THROWS_AS(fgn_check(grid, 1.0, 0.0, 10), ValidationError);
  CHECK_THROWS_AS(fgn_check(grid, 2.0, 1.0, 10), ValidationError);
  CHECK_THROWS_AS(fgn_check(grid, 2.0, 0.0, 0), ValidationError);
  // n = 3, sigma = 0.5, q = 6: theta = 6 (1/2 - 1/6) = 2 > 1.
  CHECK_THROWS_WITH_AS(fgn_check(make_grid(3, 8, 5.0, 0.5), 6.0, 0.0, 10), doctest::Contains("theta"),
                       ValidationError);
}

TEST_CASE("integrals against closed forms") {
  for (double t : {0.0, 0.5, 7.0, 150.0}) {
    CHECK(integral_2(1.0, 0.0, t) == doctest::Approx(-std::expm1(-t)).epsilon(1e-12));
    CHECK(integral_2(3.0, 0.0, t) == doctest::Approx(-std::expm1(-3.0 * t) / 3.0).epsilon(1e-12));
    // int_0^t (1 + t - s)^-2 ds = 1 - 1/(1+t)
    CHECK(integral_1(2.0, 0.0, t) == doctest::Approx(t / (1.0 + t)).epsilon(1e-12));
    // int_0^t (1+s)^-1 (1+t-s)^-1 ds = 2 log(1+t) / (2+t)
    CHECK(integral_1(1.0, 1.0, t) == doctest::Approx(2.0 * std::log1p(t) / (2.0 + t)).epsilon(1e-12));
  }
  CHECK(integral_1(2.0, 2.0, 0.0) == 0.0);
}

TEST_CASE("convolution of powers") {
  const auto r = integral_ineq_1(2.0, 0.5, 100.0);
  CHECK(r.bounded);
  CHECK(std::isfinite(r.worst_ratio));
  CHECK(r.worst_ratio > 0.0);
  CHECK_THROWS_AS(integral_ineq_1(0.5, 0.5, 100.0), ValidationError);
  CHECK_THROWS_AS(integral_ineq_1(1.0, 1.0, 100.0), ValidationError);
}

TEST_CASE("exponential against a power") {
  const auto flat = integral_ineq_2(1.0, 0.0, 100.0);
  CHECK(flat.worst_ratio <= 1.0 + 1e-12);
  CHECK(flat.worst_ratio == doctest::Approx(1.0).epsilon(1e-12));
  const auto r = integral_ineq_2(1.0, 2.5, 100.0);
  CHECK(r.bounded);
  CHECK_THROWS_AS(integral_ineq_2(0.0, 1.0, 10.0), ValidationError);
  CHECK_THROWS_AS(integral_ineq_2(-1.0, 1.0, 10.0), ValidationError);
}

TEST_CASE("sup ratios settle as the horizon doubles") {
  const auto a = integral_ineq_1(2.0, 0.5, 100.0), b = integral_ineq_1(2.0, 0.5, 200.0);
  CHECK(std::abs(b.worst_ratio / a.worst_ratio - 1.0) < 0.01);
  const auto c = integral_ineq_2(1.0, 2.5, 100.0), d = integral_ineq_2(1.0, 2.5, 200.0);
  CHECK(std::abs(d.worst_ratio / c.worst_ratio - 1.0) < 0.01);
}

TEST_CASE("log time grid") {
  const auto g = log_time_grid(100.0);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 100.0);
  CHECK(g[1] == 1e-3);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  const auto h = log_time_grid(200.0);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) CHECK(h[i] == g[i]);
  CHECK_THROWS_AS(log_time_grid(0.0), ValidationError);
}
