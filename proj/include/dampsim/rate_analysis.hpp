#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dampsim/observables.hpp"

namespace dampsim {

enum class RateModel { Polynomial, Exponential };

/// How a fitted rate is judged against the predicted exponent.
/// Sharp: |rate - exponent| <= tolerance. UpperBound: the estimate is an
/// upper bound on the observable, so the decay must be at least as fast,
/// rate >= exponent - tolerance.
enum class BoundKind { Sharp, UpperBound };

enum class ModelId { Linear, SemilinearU, SemilinearQ, SemilinearUtPlusU };

struct RateTarget {
  std::string observable;
  RateModel model = RateModel::Polynomial;
  /// Predicted decay rate: the power of (1+t)^-1 or the exponential rate.
  double exponent = 0.0;
  std::string source;
  BoundKind bound = BoundKind::Sharp;

  void validate() const;
};

/// Ordinary least squares of log(value) against log(1+t) (Polynomial) or t
/// (Exponential), uniform weights.
struct RateFit {
  /// Raw fitted slope: -0.25 for (1+t)^-0.25, -1 for e^-t.
  double slope = 0.0;
  /// Decay rate, -slope for both models.
  double rate = 0.0;
  /// RMS of the log-space residuals.
  double residual = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t samples = 0;
};

/// Uses the samples with t_lo <= t <= t_hi. Throws ValidationError for fewer
/// than 10 samples or a non-positive value, naming the first offender.
RateFit fit_rate(const ObservableSeries& series, RateModel model, std::pair<double, double> window);

struct RateReport {
  RateTarget target;
  RateFit fit;
  double tolerance = 0.0;
  bool pass = false;
};

RateReport judge_rate(const RateTarget& target, const RateFit& fit, double tolerance);

/// Predicted rates for a run. Throws ValidationError listing every violated
/// admissibility condition for the |u|^p models.
std::vector<RateTarget> theorem_rate_table(int n, double sigma, double p, ModelId model);

std::string model_name(ModelId model);
ModelId parse_model(const std::string& name);
std::string rate_model_name(RateModel model);
std::string bound_name(BoundKind bound);

/// Whole-space Gaussian data u1(x) = amplitude exp(-|x|^2 / (2 width^2)) in
/// dimension n with operator exponent sigma. Its unitary Fourier transform
/// is radial: amplitude width^n exp(-width^2 r^2 / 2).
struct RadialData {
  int dim = 1;
  double sigma = 1.0;
  double amplitude = 1.0;
  double width = 1.0;

  void validate() const;
  double profile(double r) const;
};

/// Fourier multiplier applied to u1 (with u0 = 0). With D the forcing
/// kernel and mu = r^(2 sigma):
///   U: D                  Ut: dD/dt           Elastic: r^a D
///   DtkFrac: r^a d^k D/dt^k
///   QCombo: dD/dt + mu D (the symbol of u_t + (-Delta)^sigma u, = e^-t)
///   DiffCombo: dD/dt - mu D
///   UtPlusU: dD/dt + D
struct Multiplier {
  enum class Kind { U, Ut, Elastic, DtkFrac, QCombo, DiffCombo, UtPlusU };
  Kind kind = Kind::U;
  double a = 0.0;
  int k = 0;

  static Multiplier u() { return {Kind::U}; }
  static Multiplier ut() { return {Kind::Ut}; }
  static Multiplier elastic(double a) { return {Kind::Elastic, a, 0}; }
  static Multiplier dtk_frac(double a, int k) { return {Kind::DtkFrac, a, k}; }
  static Multiplier q_combo() { return {Kind::QCombo}; }
  static Multiplier diff_combo() { return {Kind::DiffCombo}; }
  static Multiplier ut_plus_u() { return {Kind::UtPlusU}; }

  double eval(double r, double sigma, double t) const;
};

/// d^k/dt^k D(t, mu), k >= 0.
double duhamel_kernel_derivative(double mu, double t, int k);

/// Whole-space L^2 norm of the multiplier applied to the data, by adaptive
/// Gauss-Kronrod quadrature of c_n int_0^inf |K|^2 |u1_hat|^2 r^(n-1) dr
/// (relative tolerance 1e-10). Throws NumericalError if the achieved error
/// estimate is worse than that.
double continuum_l2_norm(const RadialData& data, const Multiplier& which, double t);

/// continuum_l2_norm sampled at the given times.
ObservableSeries continuum_series(const RadialData& data, const Multiplier& which,
                                  const std::vector<double>& times, const std::string& name);

}  // namespace dampsim
