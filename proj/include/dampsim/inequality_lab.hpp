#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "dampsim/spectral_core.hpp"

namespace dampsim {

/// Outcome of a numeric boundedness check: the sup of LHS/RHS over trials
/// (or over a time grid) and where it was attained.
struct InequalityCheck {
  std::string name;
  double worst_ratio = 0.0;
  /// Trial index (random-field checks) or time (integral checks) of the sup.
  double witness = 0.0;
  std::size_t trials = 0;
  std::map<std::string, double> parameters;
  /// Running sup stopped growing: by at most 5% over the second half of the
  /// trials, or at most 1% over (t_max / 2, t_max] on the time grid.
  bool bounded = false;
};

/// theta = (n / sigma) (1/2 - 1/q + s/n).
double interpolation_exponent(int n, double sigma, double q, double s);

/// Sup over random smooth fields of
///   |(-Delta)^(s/2) f|_q / (|(-Delta)^(sigma/2) f|_2^theta |f|_2^(1-theta)).
/// Requires 1 < q < inf, 0 <= s < sigma and theta in [s/sigma, 1]. Trials are
/// independent and seeded from (seed, trial index), so the result does not
/// depend on thread scheduling.
InequalityCheck fgn_check(const GridSpec& grid, double q, double s, int trials,
                          std::uint64_t seed = 0);

/// Ratio for one trial field, exposed for tests.
double fgn_ratio(const RealField& f, double q, double s);

/// Random sum of 1 to 5 Gaussian bumps with random signs, amplitudes,
/// centers in the middle half of the box and widths between L/16 and L/8.
RealField random_bump_field(const GridSpec& grid, std::uint64_t seed, std::uint64_t trial);

/// Sup over a log-spaced t grid in (0, t_max] of
///   int_0^t (1+t-s)^-a (1+s)^-b ds / (1+t)^-min(a,b),   requires max(a,b) > 1.
InequalityCheck integral_ineq_1(double a, double b, double t_max);

/// Sup over t in (0, t_max] of int_0^t e^(-c(t-s)) (1+s)^-alpha ds / (1+t)^-alpha,
/// requires c > 0.
InequalityCheck integral_ineq_2(double c, double alpha, double t_max);

/// The integrals themselves (adaptive quadrature, relative tolerance 1e-12).
double integral_1(double a, double b, double t);
double integral_2(double c, double alpha, double t);

/// Shared time grid: 0 plus 50 points per decade from 1e-3, ending at t_max.
/// Grids for different t_max share their common nodes.
std::vector<double> log_time_grid(double t_max);

}  // namespace dampsim
