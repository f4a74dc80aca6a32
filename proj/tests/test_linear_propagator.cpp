#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "dampsim/errors.hpp"
#include "dampsim/linear_propagator.hpp"
#include "dampsim/phi_functions.hpp"
#include "test_support.hpp"

using namespace dampsim;
using dampsim::testing::gaussian;
using dampsim::testing::make_grid;
using dampsim::testing::random_field;
using dampsim::testing::rel_l2;

namespace {

using big = boost::multiprecision::cpp_bin_float_50;

// (e^(-mu t) - e^(-t)) / (1 - mu) in 50 digits, the quotient form that loses
// everything to cancellation in double precision near mu = 1.
double quotient_oracle(const big& mu, const big& t) {
  using boost::multiprecision::exp;
  return static_cast<double>((exp(-mu * t) - exp(-t)) / (big(1) - mu));
}

double entry(const ModeCoeffs& m, int i) {
  const double v[] = {m.a00, m.a01, m.a10, m.a11};
  return v[i];
}

}  // namespace

TEST_CASE("phi functions against series and closed forms") {
  CHECK(phi1(0.0) == 1.0);
  CHECK(phi2(0.0) == 0.5);
  CHECK(phi1_moment(0.0) == 0.5);
  for (double z : {-1e-6, -3e-5, -0.5, -1.0, -7.0, -40.0, 0.3}) {
    CHECK(phi1(z) == doctest::Approx(std::expm1(z) / z).epsilon(1e-14));
  }
  for (double z : {-0.5, -1.0, -7.0, -40.0}) {
    CHECK(phi2(z) == doctest::Approx((std::expm1(z) - z) / (z * z)).epsilon(1e-12));
    CHECK(phi1_moment(z) == doctest::Approx(phi1(z) - phi2(z)).epsilon(1e-12));
  }
  // Small arguments: compare against the Taylor series 1/2 + z/6 + z^2/24.
  const double z = -2e-5;
  CHECK(phi2(z) == doctest::Approx(0.5 + z / 6.0 + z * z / 24.0).epsilon(1e-15));
}

TEST_CASE("mode coefficients at t = 0 are the identity") {
  for (double mu : {0.0, 0.5, 1.0, 3.0, 1e6}) {
    const auto m = mode_coeffs(mu, 0.0);
    CHECK(m.a00 == 1.0);
    CHECK(m.a01 == 0.0);
    CHECK(m.a10 == 0.0);
    CHECK(m.a11 == 1.0);
    CHECK(duhamel_kernel(mu, 0.0) == 0.0);
  }
}

TEST_CASE("mode coefficients in closed-form cases") {
  SUBCASE("mu = 1, t = 2") {
    const auto m = mode_coeffs(1.0, 2.0);
    CHECK(std::abs(m.a01 - 2.0 * std::exp(-2.0)) <= 1e-14);
    CHECK(std::abs(m.a00 - 3.0 * std::exp(-2.0)) <= 1e-14);
  }
  SUBCASE("mu = 0 decouples") {
    for (double t : {0.3, 1.0, 7.5}) {
      const auto m = mode_coeffs(0.0, t);
      CHECK(m.a00 == 1.0);
      CHECK(m.a01 == doctest::Approx(-std::expm1(-t)).epsilon(1e-15));
      CHECK(m.a10 == 0.0);
      CHECK(m.a11 == doctest::Approx(std::exp(-t)).epsilon(1e-15));
    }
    CHECK(duhamel_kernel(0.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
  }
  SUBCASE("mu = 2, t = 1") {
    CHECK(mode_coeffs(2.0, 1.0).a01 == doctest::Approx(std::exp(-1.0) - std::exp(-2.0)).epsilon(1e-14));
  }
  SUBCASE("D(t, 1) = t e^-t") {
    for (double t : {0.01, 1.0, 10.0, 300.0}) {
      CHECK(duhamel_kernel(1.0, t) == doctest::Approx(t * std::exp(-t)).epsilon(1e-14));
    }
  }
}

TEST_CASE("extended-precision quotient confirms the value at mu = 1") {
  const big t = 2;
  const big delta("1e-7");
  const double below = quotient_oracle(big(1) - delta, t);
  const double above = quotient_oracle(big(1) + delta, t);
  const double limit = 2.0 * std::exp(-2.0);
  // D is smooth in mu with dD/dmu = -t^2 e^-t / 2 at mu = 1.
  CHECK(std::abs(below - limit) < 1e-7);
  CHECK(std::abs(above - limit) < 1e-7);
  CHECK(std::abs(0.5 * (below + above) - limit) < 1e-13);
  CHECK(duhamel_kernel(1.0 - 1e-7, 2.0) == doctest::Approx(below).epsilon(1e-14));
  CHECK(duhamel_kernel(1.0 + 1e-7, 2.0) == doctest::Approx(above).epsilon(1e-14));
}

TEST_CASE("stable kernel agrees with the 50-digit quotient across mu and t") {
  for (double mu : {0.0, 0.2, 0.9, 0.99999, 1.00001, 1.5, 4.0, 100.0}) {
    for (double t : {0.05, 1.0, 5.0, 30.0}) {
      CAPTURE(mu);
      CAPTURE(t);
      CHECK(duhamel_kernel(mu, t) == doctest::Approx(quotient_oracle(big(mu), big(t))).epsilon(1e-13));
    }
  }
}

TEST_CASE("negative or non-finite inputs are rejected") {
  CHECK_THROWS_AS(mode_coeffs(-1e-3, 1.0), ValidationError);
  CHECK_THROWS_AS(mode_coeffs(1.0, -1.0), ValidationError);
  CHECK_THROWS_AS(duhamel_kernel(std::nan(""), 1.0), ValidationError);
}

TEST_CASE("large mu t underflows to exact limits") {
  const auto m = mode_coeffs(1e4, 1.0);
  CHECK(std::isfinite(m.a00));
  CHECK(duhamel_kernel(1e4, 1.0) == doctest::Approx(std::exp(-1.0) / (1e4 - 1.0)).epsilon(1e-14));
  CHECK(duhamel_kernel(1e4, 800.0) == 0.0);
}

TEST_CASE("columns solve the mode ODE") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> mu_dist(0.0, 5.0), t_dist(0.01, 10.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const double mu = mu_dist(gen), t = t_dist(gen);
    const auto lo = mode_coeffs(mu, t - h), mid = mode_coeffs(mu, t), hi = mode_coeffs(mu, t + h);
    for (int col = 0; col < 2; ++col) {
      const double v = entry(mid, col), dv = entry(mid, 2 + col);
      const double dv_fd = (entry(hi, col) - entry(lo, col)) / (2.0 * h);
      const double d2v_fd = (entry(hi, 2 + col) - entry(lo, 2 + col)) / (2.0 * h);
      const double d2v = -(1.0 + mu) * dv - mu * v;
      const double scale = std::max({std::abs(v), std::abs(dv), std::abs(d2v)});
      CAPTURE(mu);
      CAPTURE(t);
      CHECK(std::abs(dv_fd - dv) <= 1e-6 * scale);
      CHECK(std::abs(d2v_fd - d2v) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("mode coefficients are continuous through mu = 1") {
  for (int i = 0; i <= 500; ++i) {
    const double t = 0.1 * i;
    const auto c = mode_coeffs(1.0, t);
    for (double mu : {1.0 - 1e-8, 1.0 + 1e-8}) {
      const auto m = mode_coeffs(mu, t);
      for (int e = 0; e < 4; ++e) CHECK(std::abs(entry(m, e) - entry(c, e)) <= 1e-7);
    }
  }
}

TEST_CASE("kernel time derivative") {
  for (double mu : {0.0, 0.7, 1.0, 3.0}) {
    for (double t : {0.5, 2.0, 9.0}) {
      const double h = 1e-5;
      const double fd = (duhamel_kernel(mu, t + h) - duhamel_kernel(mu, t - h)) / (2.0 * h);
      CHECK(duhamel_kernel_dt(mu, t) == doctest::Approx(fd).epsilon(1e-8));
    }
  }
}

TEST_CASE("linear evolution of the zero state stays zero") {
  const auto grid = make_grid(2, 16, 4.0);
  StatePair s{RealField(grid), RealField(grid), 0.0};
  const auto out = evolve_linear(s, 1.7);
  CHECK(out.time == 1.7);
  CHECK(lq_norm(out.u, Norm::Linf) == 0.0);
  CHECK(lq_norm(out.ut, Norm::Linf) == 0.0);
}

TEST_CASE("semigroup property on random states") {
  std::mt19937_64 gen(99);
  const GridSpec grids[] = {make_grid(1, 128, 10.0), make_grid(2, 32, 6.0, 0.75)};
  for (const auto& grid : grids) {
    for (int trial = 0; trial < 5; ++trial) {
      StatePair s{random_field(grid, gen), random_field(grid, gen), 0.0};
      const auto two = evolve_linear(evolve_linear(s, 0.3), 0.7);
      const auto one = evolve_linear(s, 1.0);
      CHECK(rel_l2(two.u, one.u) <= 1e-12);
      CHECK(rel_l2(two.ut, one.ut) <= 1e-12);
      CHECK(two.time == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("u_t + u follows the diffusion multiplier mode by mode") {
  std::mt19937_64 gen(5);
  const auto grid = make_grid(1, 64, 8.0, 1.3);
  StatePair s{random_field(grid, gen), random_field(grid, gen), 0.0};
  const double t = 0.8;
  const auto out = evolve_linear(s, t);
  const auto a = forward_transform(out.u), b = forward_transform(out.ut);
  const auto u0 = forward_transform(s.u), u1 = forward_transform(s.ut);
  const auto mu = symbol(grid, grid.sigma);
  double scale = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) scale = std::max(scale, std::abs(u0.coeffs()[k] + u1.coeffs()[k]));
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const cplx expect = std::exp(-mu[k] * t) * (u0.coeffs()[k] + u1.coeffs()[k]);
    CHECK(std::abs(a.coeffs()[k] + b.coeffs()[k] - expect) <= 1e-12 * scale);
  }
}

TEST_CASE("w = e^-t u1 for data u0 = 0") {
  const auto grid = make_grid(1, 256, 20.0);
  const auto u1 = gaussian(grid, 1.0, 1.0);
  StatePair s{RealField(grid), u1, 0.0};
  for (double t : {1.0, 5.0, 10.0}) {
    const auto out = evolve_linear(s, t);
    const auto lap = inverse_transform(frac_laplacian(forward_transform(out.u), grid.sigma));
    RealField w(grid);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = out.ut[i] + lap[i];
    const double q = lq_norm(w, Norm::L2);
    CHECK(std::abs(q - std::exp(-t) * lq_norm(u1, Norm::L2)) <= 1e-10 * std::exp(-t) * lq_norm(u1, Norm::L2));
    const auto oracle = closed_form_w(u1, t);
    RealField gap(grid);
    for (std::size_t i = 0; i < w.size(); ++i) gap[i] = w[i] - oracle[i];
    CHECK(lq_norm(gap, Norm::L2) <= 1e-10 * lq_norm(u1, Norm::L2));
  }
}

TEST_CASE("closed-form w") {
  const auto grid = make_grid(1, 64, 5.0);
  const auto u1 = gaussian(grid, 2.0, 1.0);
  CHECK(dampsim::testing::max_abs_diff(closed_form_w(u1, 0.0), u1) == 0.0);
  const auto half = closed_form_w(u1, std::log(2.0));
  for (std::size_t i = 0; i < u1.size(); ++i) CHECK(half[i] == doctest::Approx(u1[i] / 2.0).epsilon(1e-15));
  CHECK(lq_norm(closed_form_w(u1, 3.0), Norm::L2) ==
        doctest::Approx(std::exp(-3.0) * lq_norm(u1, Norm::L2)).epsilon(1e-14));
  CHECK_THROWS_AS(closed_form_w(u1, -1.0), ValidationError);
}
