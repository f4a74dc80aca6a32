#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "dampsim/errors.hpp"
#include "dampsim/linear_propagator.hpp"
#include "dampsim/observables.hpp"
#include "dampsim/rate_analysis.hpp"
#include "test_support.hpp"

using namespace dampsim;
using dampsim::testing::gaussian;
using dampsim::testing::make_grid;

namespace {

ObservableSeries sampled(const std::string& name, double t0, double t1, int count, double (*f)(double)) {
  ObservableSeries s{name, {}, {}};
  for (int i = 0; i < count; ++i) {
    const double t = t0 + (t1 - t0) * i / (count - 1);
    s.times.push_back(t);
    s.values.push_back(f(t));
  }
  return s;
}

std::vector<double> log_times(double lo, double hi, int count) {
  std::vector<double> ts;
  for (int i = 0; i < count; ++i) ts.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  return ts;
}

std::map<std::string, RateTarget> by_name(const std::vector<RateTarget>& table) {
  std::map<std::string, RateTarget> out;
  for (const auto& t : table) out[t.observable] = t;
  return out;
}

}  // namespace

TEST_CASE("exact power law and exponential fits") {
  const auto power = sampled("u_l2", 10.0, 500.0, 200, [](double t) { return std::pow(1.0 + t, -0.25); });
  const auto fit = fit_rate(power, RateModel::Polynomial, {10.0, 500.0});
  CHECK(std::abs(fit.slope + 0.25) <= 1e-12);
  CHECK(std::abs(fit.rate - 0.25) <= 1e-12);
  CHECK(fit.samples == 200);

  const auto expo = sampled("q_l2", 0.0, 20.0, 201, [](double t) { return 3.0 * std::exp(-t); });
  const auto e = fit_rate(expo, RateModel::Exponential, {0.0, 20.0});
  CHECK(std::abs(e.rate - 1.0) <= 1e-12);
  CHECK(e.residual <= 1e-8);
  CHECK(e.t_lo == 0.0);
  CHECK(e.t_hi == 20.0);
}

TEST_CASE("fit window selects samples") {
  const auto s = sampled("u_l2", 0.0, 100.0, 101, [](double t) { return std::pow(1.0 + t, -0.5); });
  const auto fit = fit_rate(s, RateModel::Polynomial, {20.0, 60.0});
  CHECK(fit.samples == 41);
  CHECK(fit.rate == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fit errors name the problem") {
  auto s = sampled("u_l2", 0.0, 10.0, 11, [](double t) { return 1.0 + t; });
  CHECK_THROWS_WITH_AS(fit_rate(s, RateModel::Polynomial, {0.0, 5.0}), doctest::Contains("only 6 samples"),
                       ValidationError);
  s.values[4] = 0.0;
  s.values[7] = -1.0;
  CHECK_THROWS_WITH_AS(fit_rate(s, RateModel::Polynomial, {0.0, 10.0}), doctest::Contains("at t = 4"),
                       ValidationError);
  CHECK_THROWS_AS(fit_rate(s, RateModel::Polynomial, {5.0, 5.0}), ValidationError);
}

TEST_CASE("verdicts for sharp and one-sided targets") {
  RateFit fit;
  fit.rate = 0.33;
  RateTarget sharp{"u_l2", RateModel::Polynomial, 0.25, "test", BoundKind::Sharp};
  CHECK_FALSE(judge_rate(sharp, fit, 0.05).pass);
  CHECK(judge_rate(sharp, fit, 0.1).pass);
  RateTarget upper{"u_l2", RateModel::Polynomial, 0.25, "test", BoundKind::UpperBound};
  CHECK(judge_rate(upper, fit, 0.0).pass);
  fit.rate = 0.2;
  CHECK_FALSE(judge_rate(upper, fit, 0.04).pass);
  CHECK(judge_rate(upper, fit, 0.05).pass);
  CHECK_THROWS_AS(judge_rate(upper, fit, -1.0), ValidationError);
}

TEST_CASE("predicted rate tables") {
  SUBCASE("linear, n = 1, sigma = 1") {
    auto t = by_name(theorem_rate_table(1, 1.0, 0.0, ModelId::Linear));
    CHECK(t.at("u_l2").exponent == 0.25);
    CHECK(t.at("ut_l2").exponent == 1.25);
    CHECK(t.at("elastic_l2").exponent == 0.75);
    CHECK(t.at("diff_l2").exponent == 1.25);
    CHECK(t.at("ut_plus_u_l2").exponent == 0.25);
    CHECK(t.at("q_l2").model == RateModel::Exponential);
    CHECK(t.at("q_l2").exponent == 1.0);
    CHECK(t.at("utt_combo_l2").model == RateModel::Exponential);
    CHECK(t.at("utt_combo_l2").exponent == 1.0);
    for (const auto& [name, target] : t) CHECK(target.bound == BoundKind::Sharp);
  }
  SUBCASE("|u|^p, n = 2, sigma = 1, p = 3") {
    auto t = by_name(theorem_rate_table(2, 1.0, 3.0, ModelId::SemilinearU));
    CHECK(t.at("u_l2").exponent == 0.5);
    CHECK(t.at("ut_l2").exponent == 1.5);
    CHECK(t.at("elastic_l2").exponent == 1.0);
    CHECK(t.at("q_l2").model == RateModel::Polynomial);
    CHECK(t.at("q_l2").exponent == 2.5);
  }
  SUBCASE("|u_t + (-Delta)^sigma u|^p") {
    for (double p : {1.2, 2.0, 5.0}) {
      auto t = by_name(theorem_rate_table(1, 1.0, p, ModelId::SemilinearQ));
      CHECK(t.at("u_l2").exponent == 0.0);
      CHECK(t.at("ut_l2").exponent == 1.0);
      CHECK(t.at("elastic_l2").exponent == 0.5);
      CHECK(t.at("q_l2").model == RateModel::Exponential);
      CHECK(t.at("q_linf").model == RateModel::Exponential);
      CHECK(t.at("q_linf").exponent == 1.0);
    }
  }
  SUBCASE("admissibility gate for |u|^p") {
    CHECK_THROWS_WITH_AS(theorem_rate_table(2, 1.0, 1.5, ModelId::SemilinearU),
                         doctest::Contains("p > 1 + 2 sigma / n = 2"), ValidationError);
    CHECK_THROWS_WITH_AS(theorem_rate_table(3, 0.5, 3.0, ModelId::SemilinearU),
                         doctest::Contains("n <= 4 sigma"), ValidationError);
    CHECK_THROWS_WITH_AS(theorem_rate_table(3, 1.0, 3.5, ModelId::SemilinearU),
                         doctest::Contains("n/(n - 2 sigma) = 3"), ValidationError);
    CHECK_NOTHROW(theorem_rate_table(3, 1.0, 2.5, ModelId::SemilinearU));
    CHECK_NOTHROW(theorem_rate_table(2, 1.0, 1.5, ModelId::SemilinearUtPlusU));
  }
}

TEST_CASE("model names round trip") {
  for (auto m : {ModelId::Linear, ModelId::SemilinearU, ModelId::SemilinearQ, ModelId::SemilinearUtPlusU}) {
    CHECK(parse_model(model_name(m)) == m);
  }
  CHECK_THROWS_AS(parse_model("semilinear_v"), ValidationError);
}

TEST_CASE("kernel derivatives") {
  for (double mu : {0.0, 0.4, 1.0, 1.0 + 1e-9, 3.0}) {
    for (double t : {0.3, 2.0, 12.0}) {
      CAPTURE(mu);
      CAPTURE(t);
      CHECK(duhamel_kernel_derivative(mu, t, 0) == doctest::Approx(duhamel_kernel(mu, t)).epsilon(1e-14));
      CHECK(duhamel_kernel_derivative(mu, t, 1) == doctest::Approx(duhamel_kernel_dt(mu, t)).epsilon(1e-12));
      // The kernel solves D'' + (1 + mu) D' + mu D = 0.
      const double d0 = duhamel_kernel_derivative(mu, t, 0);
      const double d1 = duhamel_kernel_derivative(mu, t, 1);
      const double d2 = duhamel_kernel_derivative(mu, t, 2);
      const double scale = std::max({std::abs(d0), std::abs(d1), std::abs(d2)});
      CHECK(std::abs(d2 + (1.0 + mu) * d1 + mu * d0) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("combination multipliers agree with their kernel terms") {
  // Only where the direct sums are well conditioned.
  for (double r : {0.3, 0.9, 1.0, 1.7, 4.0}) {
    for (double t : {0.0, 0.5, 2.0, 5.0}) {
      const double mu = r * r;
      const double d = duhamel_kernel(mu, t), dt = duhamel_kernel_dt(mu, t);
      CHECK(Multiplier::q_combo().eval(r, 1.0, t) == doctest::Approx(dt + mu * d).epsilon(1e-12));
      CHECK(Multiplier::ut_plus_u().eval(r, 1.0, t) == doctest::Approx(dt + d).epsilon(1e-12));
      CHECK(Multiplier::diff_combo().eval(r, 1.0, t) == doctest::Approx(dt - mu * d).epsilon(1e-12));
    }
  }
  // Far past the cancellation point the w symbol stays exactly e^-t.
  CHECK(Multiplier::q_combo().eval(0.05, 1.0, 300.0) == std::exp(-300.0));
}

TEST_CASE("continuum norm of the w multiplier is exactly e^-t |u1|") {
  for (int dim = 1; dim <= 3; ++dim) {
    const RadialData data{dim, 1.0, 0.7, 1.3};
    const double u1 = data.amplitude * std::pow(std::numbers::pi * data.width * data.width, dim / 4.0);
    for (double t : {0.0, 1.0, 10.0, 100.0}) {
      CHECK(continuum_l2_norm(data, Multiplier::q_combo(), t) ==
            doctest::Approx(std::exp(-t) * u1).epsilon(1e-10));
    }
  }
}

TEST_CASE("continuum rates approach their targets monotonically") {
  const RadialData data{1, 1.0, 1.0, 1.0};
  double previous = std::numeric_limits<double>::infinity();
  for (double T : {25.0, 50.0, 100.0}) {
    const auto s = continuum_series(data, Multiplier::u(), log_times(T, 4.0 * T, 40), "u_l2");
    const auto fit = fit_rate(s, RateModel::Polynomial, {T, 4.0 * T});
    const double gap = std::abs(fit.rate - 0.25);
    CAPTURE(T);
    CHECK(gap < previous);
    previous = gap;
  }
}

TEST_CASE("continuum and grid norms agree at moderate times") {
  const auto grid = make_grid(1, 512, 40.0);
  const auto u1 = gaussian(grid, 1.0, 1.0);
  const RadialData data{1, 1.0, 1.0, 1.0};
  const std::pair<const char*, Multiplier> pairs[] = {
      {"u_l2", Multiplier::u()},           {"ut_l2", Multiplier::ut()},
      {"elastic_l2", Multiplier::elastic(1.0)}, {"q_l2", Multiplier::q_combo()},
      {"diff_l2", Multiplier::diff_combo()}, {"ut_plus_u_l2", Multiplier::ut_plus_u()},
  };
  for (double t : {1.0, 5.0, 20.0}) {
    const auto obs = observe(evolve_linear(StatePair{RealField(grid), u1, 0.0}, t));
    for (const auto& [name, m] : pairs) {
      CAPTURE(t);
      CAPTURE(name);
      CHECK(*obs.at(name) == doctest::Approx(continuum_l2_norm(data, m, t)).epsilon(1e-6));
    }
  }
}

TEST_CASE("radial data validation") {
  CHECK_THROWS_AS((RadialData{4, 1.0, 1.0, 1.0}.validate()), ValidationError);
  CHECK_THROWS_AS((RadialData{1, 1.0, 1.0, 0.0}.validate()), ValidationError);
  CHECK_THROWS_AS(continuum_l2_norm({1, 1.0, 1.0, 1.0}, Multiplier::u(), -1.0), ValidationError);
}
