#include "dampsim/inequality_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <future>
#include <random>
#include <sstream>
#include <thread>

#include "dampsim/errors.hpp"
#include "quadrature.hpp"

namespace dampsim {

double interpolation_exponent(int n, double sigma, double q, double s) {
  return (n / sigma) * (0.5 - 1.0 / q + s / n);
}

double fgn_ratio(const RealField& f, double q, double s) {
  const auto& grid = f.grid();
  const auto hat = forward_transform(f);
  const double theta = interpolation_exponent(grid.dim, grid.sigma, q, s);
  const double f_l2 = parseval_l2(grid, hat.coeffs());
  const auto top = frac_laplacian(hat, grid.sigma / 2.0);
  const double top_l2 = parseval_l2(grid, top.coeffs());
  const double lhs = s == 0.0 ? lq_norm(f, q) : lq_norm(inverse_transform(frac_laplacian(hat, s / 2.0)), q);
  const double rhs = std::pow(top_l2, theta) * std::pow(f_l2, 1.0 - theta);
  if (!(rhs > 0.0)) throw NumericalError("fgn_ratio: vanishing right-hand side");
  return lhs / rhs;
}

RealField random_bump_field(const GridSpec& grid, std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  std::mt19937_64 gen(seq);
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double L = grid.half_length;

  struct Bump {
    double amplitude, width;
    std::array<double, 3> center;
  };
  std::vector<Bump> bumps(static_cast<std::size_t>(count(gen)));
  for (auto& b : bumps) {
    const double sign = unit(gen) < 0.5 ? -1.0 : 1.0;
    b.amplitude = sign * (0.5 + unit(gen));
    b.width = L / 16.0 + unit(gen) * (L / 8.0 - L / 16.0);
    b.center = {0.0, 0.0, 0.0};
    for (int d = 0; d < grid.dim; ++d) b.center[static_cast<std::size_t>(d)] = (unit(gen) - 0.5) * L;
  }

  RealField f(grid);
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    const auto idx = grid.unflatten(flat);
    double v = 0.0;
    for (const auto& b : bumps) {
      double r2 = 0.0;
      for (int d = 0; d < grid.dim; ++d) {
        const auto dd = static_cast<std::size_t>(d);
        const double x = grid.coordinate(idx[dd]) - b.center[dd];
        r2 += x * x;
      }
      v += b.amplitude * std::exp(-r2 / (2.0 * b.width * b.width));
    }
    f[flat] = v;
  }
  return f;
}

InequalityCheck fgn_check(const GridSpec& grid, double q, double s, int trials, std::uint64_t seed) {
  grid.validate();
  if (!(q > 1.0) || !std::isfinite(q)) throw ValidationError("fgn_check: need 1 < q < infinity");
  if (!(s >= 0.0 && s < grid.sigma)) throw ValidationError("fgn_check: need 0 <= s < sigma");
  if (trials < 1) throw ValidationError("fgn_check: trials must be >= 1");
  const double theta = interpolation_exponent(grid.dim, grid.sigma, q, s);
  const double eps = 1e-12;
  if (theta < s / grid.sigma - eps || theta > 1.0 + eps) {
    std::ostringstream os;
    os << "fgn_check: interpolation exponent theta = (n/sigma)(1/2 - 1/q + s/n) = " << theta
       << " must lie in [s/sigma, 1] = [" << s / grid.sigma << ", 1]";
    throw ValidationError(os.str());
  }

  std::vector<double> ratios(static_cast<std::size_t>(trials));
  const unsigned workers = std::max(1u, std::min(std::thread::hardware_concurrency(),
                                                 static_cast<unsigned>(trials)));
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < ratios.size(); i += workers) {
        ratios[i] = fgn_ratio(random_bump_field(grid, seed, i), q, s);
      }
    }));
  }
  for (auto& j : jobs) j.get();

  InequalityCheck out;
  out.name = "fractional_gagliardo_nirenberg";
  out.trials = ratios.size();
  out.parameters = {{"n", static_cast<double>(grid.dim)}, {"sigma", grid.sigma}, {"q", q},
                    {"s", s}, {"theta", theta}, {"points", static_cast<double>(grid.points)},
                    {"half_length", grid.half_length},
                    {"seed", static_cast<double>(seed)}};
  double half_sup = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] > out.worst_ratio) {
      out.worst_ratio = ratios[i];
      out.witness = static_cast<double>(i);
    }
    if (i < (ratios.size() + 1) / 2) half_sup = out.worst_ratio;
  }
  out.bounded = std::isfinite(out.worst_ratio) && out.worst_ratio <= 1.05 * half_sup;
  return out;
}

std::vector<double> log_time_grid(double t_max) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("t_max must be positive");
  constexpr int per_decade = 50;
  std::vector<double> ts{0.0};
  for (int j = 0;; ++j) {
    const double t = 1e-3 * std::pow(10.0, static_cast<double>(j) / per_decade);
    if (t >= t_max * (1.0 - 1e-12)) break;
    ts.push_back(t);
  }
  ts.push_back(t_max);
  return ts;
}

namespace {

// Integrates over [0, t] with breaks that refine geometrically toward both
// ends, where the algebraic factors vary fastest.
template <class F>
double integrate_to(F f, double t) {
  if (t == 0.0) return 0.0;
  std::vector<double> breaks{0.0, t};
  for (double d = 1.0; d < t / 2.0; d *= 2.0) {
    breaks.push_back(d);
    breaks.push_back(t - d);
  }
  breaks.push_back(t / 2.0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const auto q = detail::adaptive_integrate(f, breaks, 1e-13);
  const double total = q.value;
  if (!std::isfinite(total) || q.error > 1e-12 * std::abs(total)) {
    throw NumericalError("integral quadrature did not converge");
  }
  return total;
}

InequalityCheck sup_over_grid(std::string name, double t_max,
                              const std::function<double(double)>& ratio) {
  const auto ts = log_time_grid(t_max);
  InequalityCheck out;
  out.name = std::move(name);
  out.trials = ts.size();
  double sup_first_half = 0.0;
  for (double t : ts) {
    const double r = ratio(t);
    if (r > out.worst_ratio) {
      out.worst_ratio = r;
      out.witness = t;
    }
    if (t <= t_max / 2.0) sup_first_half = out.worst_ratio;
  }
  out.bounded = std::isfinite(out.worst_ratio) && out.worst_ratio <= 1.01 * sup_first_half;
  return out;
}

}  // namespace

double integral_1(double a, double b, double t) {
  return integrate_to([&](double s) { return std::pow(1.0 + t - s, -a) * std::pow(1.0 + s, -b); }, t);
}

double integral_2(double c, double alpha, double t) {
  return integrate_to([&](double s) { return std::exp(-c * (t - s)) * std::pow(1.0 + s, -alpha); }, t);
}

InequalityCheck integral_ineq_1(double a, double b, double t_max) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw ValidationError("integral_ineq_1: a, b must be finite");
  if (!(std::max(a, b) > 1.0)) throw ValidationError("integral_ineq_1: requires max(a, b) > 1");
  const double m = std::min(a, b);
  auto out = sup_over_grid("convolution_of_powers", t_max,
                           [&](double t) { return integral_1(a, b, t) * std::pow(1.0 + t, m); });
  out.parameters = {{"a", a}, {"b", b}, {"t_max", t_max}};
  return out;
}

InequalityCheck integral_ineq_2(double c, double alpha, double t_max) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("integral_ineq_2: requires c > 0");
  if (!std::isfinite(alpha)) throw ValidationError("integral_ineq_2: alpha must be finite");
  auto out = sup_over_grid("exponential_against_power", t_max, [&](double t) {
    return integral_2(c, alpha, t) * std::pow(1.0 + t, alpha);
  });
  out.parameters = {{"c", c}, {"alpha", alpha}, {"t_max", t_max}};
  return out;
}

}  // namespace dampsim
