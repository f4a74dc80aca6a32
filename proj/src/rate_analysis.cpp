#include "dampsim/rate_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dampsim/errors.hpp"
#include "dampsim/linear_propagator.hpp"
#include "quadrature.hpp"

namespace dampsim {

void RateTarget::validate() const {
  if (observable.empty()) throw ValidationError("rate target needs an observable name");
  if (!std::isfinite(exponent)) throw ValidationError("rate target exponent must be finite");
  if (source.empty()) throw ValidationError("rate target needs a source tag");
}

RateFit fit_rate(const ObservableSeries& series, RateModel model, std::pair<double, double> window) {
  const auto [lo, hi] = window;
  if (!(lo < hi)) throw ValidationError("fit window must satisfy t_lo < t_hi");
  if (series.times.size() != series.values.size()) {
    throw ValidationError("series '" + series.name + "': times and values differ in length");
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    if (t < lo || t > hi) continue;
    const double v = series.values[i];
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "series '" << series.name << "': value " << v << " at t = " << t
         << " is not positive and finite; cannot fit a rate";
      throw ValidationError(os.str());
    }
    xs.push_back(model == RateModel::Polynomial ? std::log1p(t) : t);
    ys.push_back(std::log(v));
  }
  if (xs.size() < 10) {
    throw ValidationError("series '" + series.name + "': only " + std::to_string(xs.size()) +
                          " samples in the fit window (need >= 10)");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("fit window contains a single distinct time");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.rate = -fit.slope;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + fit.slope * (xs[i] - mx));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.t_lo = lo;
  fit.t_hi = hi;
  fit.samples = xs.size();
  return fit;
}

RateReport judge_rate(const RateTarget& target, const RateFit& fit, double tolerance) {
  target.validate();
  if (!(tolerance >= 0.0)) throw ValidationError("rate tolerance must be >= 0");
  RateReport r{target, fit, tolerance, false};
  if (target.bound == BoundKind::Sharp) {
    r.pass = std::abs(fit.rate - target.exponent) <= tolerance;
  } else {
    r.pass = fit.rate >= target.exponent - tolerance;
  }
  return r;
}

std::string model_name(ModelId model) {
  switch (model) {
    case ModelId::Linear: return "linear";
    case ModelId::SemilinearU: return "semilinear_u";
    case ModelId::SemilinearQ: return "semilinear_q";
    case ModelId::SemilinearUtPlusU: return "semilinear_ut_plus_u";
  }
  return "";
}

ModelId parse_model(const std::string& name) {
  for (auto m : {ModelId::Linear, ModelId::SemilinearU, ModelId::SemilinearQ,
                 ModelId::SemilinearUtPlusU}) {
    if (model_name(m) == name) return m;
  }
  throw ValidationError("unknown model '" + name +
                        "' (expected linear, semilinear_u, semilinear_q or semilinear_ut_plus_u)");
}

std::string rate_model_name(RateModel model) {
  return model == RateModel::Polynomial ? "polynomial" : "exponential";
}

std::string bound_name(BoundKind bound) { return bound == BoundKind::Sharp ? "sharp" : "upper_bound"; }

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

void check_semilinear_u(int n, double sigma, double p) {
  std::vector<std::string> violated;
  const double nd = n;
  if (nd > 4.0 * sigma) {
    violated.push_back("dimension bound n <= 4 sigma (n = " + std::to_string(n) +
                       ", 4 sigma = " + fmt(4.0 * sigma) + ")");
  } else if (nd <= 2.0 * sigma) {
    if (!(p >= 2.0)) violated.push_back("lower bound p >= 2 for n <= 2 sigma (p = " + fmt(p) + ")");
  } else {
    const double upper = nd / (nd - 2.0 * sigma);
    if (!(p >= 2.0 && p <= upper)) {
      violated.push_back("range 2 <= p <= n/(n - 2 sigma) = " + fmt(upper) +
                         " for 2 sigma < n <= 4 sigma (p = " + fmt(p) + ")");
    }
  }
  const double fujita = 1.0 + 2.0 * sigma / nd;
  if (!(p > fujita)) {
    violated.push_back("supercritical exponent p > 1 + 2 sigma / n = " + fmt(fujita) +
                       " (p = " + fmt(p) + ")");
  }
  if (!violated.empty()) {
    std::string msg = "model semilinear_u: parameters violate ";
    for (std::size_t i = 0; i < violated.size(); ++i) {
      if (i) msg += "; ";
      msg += violated[i];
    }
    throw ValidationError(msg);
  }
}

}  // namespace

std::vector<RateTarget> theorem_rate_table(int n, double sigma, double p, ModelId model) {
  if (n < 1 || n > 3) throw ValidationError("dimension must be 1, 2 or 3");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  const double base = n / (4.0 * sigma);
  using RM = RateModel;
  using BK = BoundKind;
  switch (model) {
    case ModelId::Linear: {
      const std::string src = "linear estimate, L1 and L2 data";
      return {
          {"u_l2", RM::Polynomial, base, src, BK::Sharp},
          {"ut_l2", RM::Polynomial, base + 1.0, src, BK::Sharp},
          {"elastic_l2", RM::Polynomial, base + 0.5, src, BK::Sharp},
          {"higher_elastic_l2", RM::Polynomial, base + 1.0, src, BK::Sharp},
          {"diff_l2", RM::Polynomial, base + 1.0, src, BK::Sharp},
          {"ut_plus_u_l2", RM::Polynomial, base, "linear diffusion identity", BK::Sharp},
          {"q_l2", RM::Exponential, 1.0, "linear exact identity for w", BK::Sharp},
          {"utt_combo_l2", RM::Exponential, 1.0, "linear exact identity for w_t", BK::Sharp},
          {"inv_combo_l2", RM::Exponential, 1.0, "linear estimate, mean-zero data", BK::Sharp},
      };
    }
    case ModelId::SemilinearU:
    case ModelId::SemilinearUtPlusU: {
      if (!(p > 1.0)) throw ValidationError("p must be > 1");
      if (model == ModelId::SemilinearU) check_semilinear_u(n, sigma, p);
      const std::string src = model == ModelId::SemilinearU
                                  ? "small-data estimate for |u|^p"
                                  : "conjecture: |u|^p rates carried over to |u_t + u|^p";
      return {
          {"u_l2", RM::Polynomial, base, src, BK::UpperBound},
          {"ut_l2", RM::Polynomial, base + 1.0, src, BK::UpperBound},
          {"elastic_l2", RM::Polynomial, base + 0.5, src, BK::UpperBound},
          {"q_l2", RM::Polynomial, n * p / (2.0 * sigma) - base, src, BK::UpperBound},
      };
    }
    case ModelId::SemilinearQ: {
      if (!(p > 1.0)) throw ValidationError("p must be > 1");
      const std::string src = "small-data estimate for |u_t + (-Delta)^sigma u|^p";
      return {
          {"u_l2", RM::Polynomial, 0.0, src, BK::UpperBound},
          {"ut_l2", RM::Polynomial, 1.0, src, BK::UpperBound},
          {"elastic_l2", RM::Polynomial, 0.5, src, BK::UpperBound},
          {"q_l2", RM::Exponential, 1.0, src, BK::UpperBound},
          {"q_linf", RM::Exponential, 1.0, src, BK::UpperBound},
      };
    }
  }
  return {};
}

void RadialData::validate() const {
  if (dim < 1 || dim > 3) throw ValidationError("radial data: dimension must be 1, 2 or 3");
  if (!(sigma > 0.0)) throw ValidationError("radial data: sigma must be positive");
  if (!std::isfinite(amplitude)) throw ValidationError("radial data: amplitude must be finite");
  if (!(width > 0.0) || !std::isfinite(width)) throw ValidationError("radial data: width must be positive");
}

double RadialData::profile(double r) const {
  return amplitude * std::pow(width, dim) * std::exp(-0.5 * width * width * r * r);
}

double duhamel_kernel_derivative(double mu, double t, int k) {
  if (k < 0) throw ValidationError("derivative order must be >= 0");
  const double d = duhamel_kernel(mu, t);
  if (k == 0) return d;
  const double d1 = std::exp(-t) - mu * d;
  if (k == 1) return d1;
  const double a = std::min(mu, 1.0);
  const double b = std::max(mu, 1.0);
  const double gap = b - a;
  if (gap > 0.5) {
    // D = (e^(-a t) - e^(-b t)) / gap
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * (std::pow(a, k) * std::exp(-a * t) - std::pow(b, k) * std::exp(-b * t)) / gap;
  }
  // v'' = -(1 + mu) v' - mu v, bounded coefficients near mu = 1.
  double prev = d, cur = d1;
  for (int j = 2; j <= k; ++j) {
    const double next = -(1.0 + mu) * cur - mu * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double Multiplier::eval(double r, double sigma, double t) const {
  const double mu = std::pow(r, 2.0 * sigma);
  switch (kind) {
    case Kind::U: return duhamel_kernel(mu, t);
    case Kind::Ut: return duhamel_kernel_dt(mu, t);
    case Kind::Elastic: return std::pow(r, a) * duhamel_kernel(mu, t);
    case Kind::DtkFrac: return std::pow(r, a) * duhamel_kernel_derivative(mu, t, k);
    // D' + mu D = e^-t and D' + D = e^(-mu t) hold identically. Summing the
    // terms instead cancels catastrophically for mu < 1 at large t, where
    // mu D ~ e^(-mu t) swamps e^-t.
    case Kind::QCombo: return std::exp(-t);
    case Kind::DiffCombo: return duhamel_kernel_dt(mu, t) - mu * duhamel_kernel(mu, t);
    case Kind::UtPlusU: return std::exp(-mu * t);
  }
  return 0.0;
}

double continuum_l2_norm(const RadialData& data, const Multiplier& which, double t) {
  data.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("continuum_l2_norm: t must be >= 0");
  if (which.kind == Multiplier::Kind::DtkFrac && which.k < 0) {
    throw ValidationError("continuum_l2_norm: derivative order must be >= 0");
  }
  const double sphere = data.dim == 1 ? 2.0 : (data.dim == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi);
  // Beyond width^2 r^2 = 800 the data factor is below e^-800.
  const double r_max = std::sqrt(800.0) / data.width;

  // Breaks at the diffusive scale (1+t)^(-1/(2 sigma)) times powers of 4, and
  // at mu = 1 where the kernel changes form.
  std::vector<double> breaks{0.0, r_max};
  if (1.0 < r_max) breaks.push_back(1.0);
  const double scale = std::pow(1.0 + t, -1.0 / (2.0 * data.sigma));
  for (double r = scale / 64.0; r < r_max; r *= 4.0) breaks.push_back(r);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto integrand = [&](double r) {
    const double k = which.eval(r, data.sigma, t);
    const double f = data.profile(r);
    return k * k * f * f * std::pow(r, data.dim - 1);
  };

  const auto q = detail::adaptive_integrate(integrand, breaks, 1e-11);
  const double total = q.value;
  if (!std::isfinite(total) || q.error > 1e-10 * std::abs(total)) {
    std::ostringstream os;
    os << "continuum_l2_norm: quadrature did not reach relative tolerance 1e-10 at t = " << t
       << " (achieved " << (total != 0.0 ? q.error / std::abs(total) : q.error) << ")";
    throw NumericalError(os.str());
  }
  return std::sqrt(sphere * total);
}

ObservableSeries continuum_series(const RadialData& data, const Multiplier& which,
                                  const std::vector<double>& times, const std::string& name) {
  ObservableSeries s{name, times, {}};
  s.values.reserve(times.size());
  for (double t : times) s.values.push_back(continuum_l2_norm(data, which, t));
  return s;
}

}  // namespace dampsim
