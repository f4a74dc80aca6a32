#include "dampsim/nonlinear_evolver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include <boost/math/quadrature/gauss.hpp>

#include "dampsim/errors.hpp"
#include "dampsim/fft.hpp"
#include "dampsim/linear_propagator.hpp"
#include "dampsim/phi_functions.hpp"

namespace dampsim {

void Nonlinearity::validate() const {
  if (kind == NonlinearityKind::None) return;
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw ValidationError("nonlinearity exponent p must be finite and > 1 (got " +
                          std::to_string(p) + ")");
  }
}

bool Nonlinearity::dealiased() const {
  return kind != NonlinearityKind::None && (p == 2.0 || p == 3.0);
}

void EvolveConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time.dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ValidationError("time.t_end must be positive");
  if (dt > t_end) throw ValidationError("time.dt must not exceed time.t_end");
  if (!(blowup_threshold > 0.0)) throw ValidationError("blow-up threshold must be positive");
  if (picard_max_iters < 1) throw ValidationError("picard_max_iters must be >= 1");
  if (!(picard_tol > 0.0)) throw ValidationError("picard_tol must be positive");
}

ModeState ModeState::from_state(const StatePair& state) {
  state.validate();
  const auto& grid = state.grid();
  const auto mu = symbol(grid, grid.sigma);
  const auto u_hat = forward_transform(state.u);
  const auto ut_hat = forward_transform(state.ut);
  ModeState out{grid, state.time, {u_hat.coeffs().begin(), u_hat.coeffs().end()}, {}};
  out.w_hat.resize(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) out.w_hat[k] = ut_hat.coeffs()[k] + mu[k] * out.u_hat[k];
  return out;
}

std::vector<cplx> ModeState::ut_hat(const std::vector<double>& mu) const {
  std::vector<cplx> out(u_hat.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = w_hat[k] - mu[k] * u_hat[k];
  return out;
}

StatePair ModeState::to_state() const {
  const auto mu = symbol(grid, grid.sigma);
  return StatePair{inverse_transform(SpectralField(grid, u_hat)),
                   inverse_transform(SpectralField(grid, ut_hat(mu))), time};
}

namespace {

double abs_pow(double x, double p) {
  const double a = std::abs(x);
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  return std::pow(a, p);
}

std::vector<unsigned char> two_thirds_mask(const GridSpec& grid) {
  std::vector<unsigned char> keep(grid.size(), 1);
  const int cutoff = grid.points / 3;
  for (std::size_t flat = 0; flat < keep.size(); ++flat) {
    const auto idx = grid.unflatten(flat);
    for (int d = 0; d < grid.dim; ++d) {
      if (std::abs(grid.signed_index(idx[static_cast<std::size_t>(d)])) > cutoff) {
        keep[flat] = 0;
        break;
      }
    }
  }
  return keep;
}

std::vector<double> to_nodes(const GridSpec& grid, const std::vector<cplx>& coeffs) {
  std::vector<double> out(coeffs.size());
  std::vector<cplx> scratch(coeffs.size());
  fft::inverse_real(grid, coeffs, out, scratch);
  return out;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace

ForcingEvaluator::ForcingEvaluator(const GridSpec& grid, const Nonlinearity& nl)
    : grid_(grid), nl_(nl), mu_(symbol(grid, grid.sigma)) {
  grid_.validate();
  nl_.validate();
  if (nl_.dealiased()) keep_ = two_thirds_mask(grid_);
}

std::vector<double> ForcingEvaluator::argument(const std::vector<cplx>& u_hat,
                                               const std::vector<cplx>& w_hat) const {
  switch (nl_.kind) {
    case NonlinearityKind::None:
      return std::vector<double>(u_hat.size(), 0.0);
    case NonlinearityKind::AbsPowerU:
      return to_nodes(grid_, u_hat);
    case NonlinearityKind::AbsPowerQ:
      return to_nodes(grid_, w_hat);
    case NonlinearityKind::AbsPowerUtPlusU: {
      std::vector<cplx> c(u_hat.size());
      for (std::size_t k = 0; k < c.size(); ++k) c[k] = w_hat[k] - mu_[k] * u_hat[k] + u_hat[k];
      return to_nodes(grid_, c);
    }
  }
  return {};
}

ForcingEvaluator::Result ForcingEvaluator::evaluate(const std::vector<cplx>& u_hat,
                                                    const std::vector<cplx>& w_hat,
                                                    bool want_u_sup) const {
  Result r;
  r.forcing.assign(u_hat.size(), cplx(0.0, 0.0));
  if (nl_.kind == NonlinearityKind::None) return r;

  auto arg = argument(u_hat, w_hat);
  r.arg_sup = sup_abs(arg);
  if (want_u_sup) {
    r.u_sup = nl_.kind == NonlinearityKind::AbsPowerU ? r.arg_sup : sup_abs(to_nodes(grid_, u_hat));
  }
  if (!std::isfinite(r.arg_sup) || !std::isfinite(r.u_sup)) {
    r.finite = false;
    return r;
  }
  for (std::size_t i = 0; i < arg.size(); ++i) {
    const double f = abs_pow(arg[i], nl_.p);
    if (!std::isfinite(f)) {
      r.finite = false;
      return r;
    }
    r.forcing[i] = cplx(f, 0.0);
  }
  fft::forward(grid_, r.forcing);
  if (!keep_.empty()) {
    for (std::size_t k = 0; k < keep_.size(); ++k) {
      if (!keep_[k]) r.forcing[k] = cplx(0.0, 0.0);
    }
  }
  return r;
}

std::optional<RealField> eval_nonlinearity(const Nonlinearity& nl, const StatePair& state) {
  nl.validate();
  state.validate();
  const auto modes = ModeState::from_state(state);
  const ForcingEvaluator eval(state.grid(), nl);
  auto r = eval.evaluate(modes.u_hat, modes.w_hat);
  if (!r.finite) return std::nullopt;
  std::vector<double> values(r.forcing.size());
  std::vector<cplx> scratch(r.forcing.size());
  fft::inverse_real(state.grid(), r.forcing, values, scratch);
  for (double v : values) {
    if (!std::isfinite(v)) return std::nullopt;
  }
  return RealField(state.grid(), std::move(values));
}

EtdWeights etd_mode_weights(double mu, double h) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ValidationError("etd weights: mu must be >= 0");
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("etd weights: step must be positive");
  EtdWeights w;
  w.decay = std::exp(-mu * h);
  w.d = duhamel_kernel(mu, h);
  const double a = std::min(mu, 1.0);
  const double b = std::max(mu, 1.0);
  const double gap = b - a;
  if (gap * h > 0.5) {
    // D = (e^(-a s) - e^(-b s)) / gap; the differences lose at most a small factor here.
    w.i0 = h * (phi1(-a * h) - phi1(-b * h)) / gap;
    w.u_old = h * (phi1_moment(-a * h) - phi1_moment(-b * h)) / gap;
    w.u_new = h * (phi2(-a * h) - phi2(-b * h)) / gap;
    return w;
  }
  // Near mu = 1 the quotient cancels; integrate the stable kernel instead.
  using rule = boost::math::quadrature::gauss<double, 20>;
  const int panels = std::max(1, static_cast<int>(std::ceil(b * h)));
  const double width = h / panels;
  for (int j = 0; j < panels; ++j) {
    const double lo = j * width;
    const double hi = lo + width;
    w.i0 += rule::integrate([&](double s) { return duhamel_kernel(mu, s); }, lo, hi);
    w.u_old += rule::integrate([&](double s) { return duhamel_kernel(mu, s) * (s / h); }, lo, hi);
    w.u_new += rule::integrate([&](double s) { return duhamel_kernel(mu, s) * (1.0 - s / h); }, lo, hi);
  }
  return w;
}

EtdStepper::EtdStepper(const GridSpec& grid, const Nonlinearity& nl, double dt)
    : eval_(grid, nl), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time step must be positive");
  const auto& mu = eval_.mu();
  weights_.resize(mu.size());
  // Many modes share |xi|; compute each distinct weight set once.
  std::unordered_map<double, EtdWeights> cache;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    auto it = cache.find(mu[k]);
    if (it == cache.end()) it = cache.emplace(mu[k], etd_mode_weights(mu[k], dt)).first;
    weights_[k] = it->second;
  }
  w_decay_ = std::exp(-dt);
  e0_ = dt * phi1(-dt);
  w_old_ = dt * phi1_moment(-dt);
  w_new_ = dt * phi2(-dt);
}

bool EtdStepper::step(ModeState& state, ForcingEvaluator::Result& current, bool want_u_sup) const {
  const std::size_t n = state.u_hat.size();
  const auto& f = current.forcing;
  const bool forced = eval_.nonlinearity().kind != NonlinearityKind::None;

  std::vector<cplx> u_lin(n), w_lin(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& c = weights_[k];
    u_lin[k] = c.decay * state.u_hat[k] + c.d * state.w_hat[k];
    w_lin[k] = w_decay_ * state.w_hat[k];
  }
  if (!forced) {
    state.u_hat = std::move(u_lin);
    state.w_hat = std::move(w_lin);
    state.time += dt_;
    return true;
  }

  std::vector<cplx> u_pred(n), w_pred(n);
  for (std::size_t k = 0; k < n; ++k) {
    u_pred[k] = u_lin[k] + weights_[k].i0 * f[k];
    w_pred[k] = w_lin[k] + e0_ * f[k];
  }
  const auto predicted = eval_.evaluate(u_pred, w_pred);
  if (!predicted.finite) return false;
  const auto& fs = predicted.forcing;

  for (std::size_t k = 0; k < n; ++k) {
    const auto& c = weights_[k];
    u_lin[k] += c.u_old * f[k] + c.u_new * fs[k];
    w_lin[k] += w_old_ * f[k] + w_new_ * fs[k];
  }
  auto next = eval_.evaluate(u_lin, w_lin, want_u_sup);
  if (!next.finite) return false;
  state.u_hat = std::move(u_lin);
  state.w_hat = std::move(w_lin);
  state.time += dt_;
  current = std::move(next);
  return true;
}

StatePair step_etd(const StatePair& state, const Nonlinearity& nl, double dt) {
  auto modes = ModeState::from_state(state);
  const EtdStepper stepper(state.grid(), nl, dt);
  auto current = stepper.evaluator().evaluate(modes.u_hat, modes.w_hat);
  if (!current.finite || !stepper.step(modes, current)) {
    throw BlowUpError("step_etd: non-finite values during the step", state.time);
  }
  return modes.to_state();
}

namespace {

struct GrowthSample {
  double t;
  double v;  // sup^(-(p-1)/gamma), which vanishes linearly at the singular time
};

// Smallest root beyond the last sample of the quadratic through three samples.
std::optional<double> extrapolate_zero(const std::array<GrowthSample, 3>& s) {
  const double t0 = s[2].t;
  const double x0 = s[0].t - t0, x1 = s[1].t - t0;
  // Newton form through (x0, v0), (x1, v1), (0, v2).
  const double d01 = (s[1].v - s[0].v) / (x1 - x0);
  const double d12 = (s[2].v - s[1].v) / (0.0 - x1);
  const double c2 = (d12 - d01) / (0.0 - x0);
  // v(x) = v2 + d12 (x - 0) + c2 (x - 0)(x - x1)
  const double A = c2, B = d12 - c2 * x1, C = s[2].v;
  std::vector<double> roots;
  if (std::abs(A) * 1e12 <= std::abs(B)) {
    if (B != 0.0) roots.push_back(-C / B);
  } else {
    const double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0) {
      const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
      if (q != 0.0) roots.push_back(C / q);
      roots.push_back(q / A);
    }
  }
  std::optional<double> best;
  for (double r : roots) {
    if (r > 0.0 && std::isfinite(r) && (!best || r < *best)) best = r;
  }
  if (best) return t0 + *best;
  return std::nullopt;
}

}  // namespace

StepSchedule step_schedule(double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw ValidationError("step_schedule: dt and t_end must be positive");
  const double ratio = t_end / dt;
  StepSchedule s;
  s.full_steps = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(s.full_steps)) > 1e-9 * ratio) {
    s.full_steps = static_cast<long>(std::floor(ratio));
    s.remainder = t_end - static_cast<double>(s.full_steps) * dt;
  }
  return s;
}

EvolveResult evolve(const RealField& u0, const RealField& u1, const Nonlinearity& nl,
                    const EvolveConfig& config, const StepObserver& observer) {
  config.validate();
  nl.validate();
  if (!(u0.grid() == u1.grid())) throw ValidationError("u0 and u1 live on different grids");
  const auto& grid = u0.grid();

  EvolveResult result;
  result.final_state = ModeState::from_state(StatePair{u0, u1, 0.0});
  auto& state = result.final_state;

  const bool forced = nl.kind != NonlinearityKind::None;
  const auto [full_steps, remainder] = step_schedule(config.t_end, config.dt);

  const EtdStepper main_stepper(grid, nl, config.dt);
  auto current = main_stepper.evaluator().evaluate(state.u_hat, state.w_hat, true);
  auto exceeded = [&](const ForcingEvaluator::Result& r) {
    return !r.finite || std::max(r.arg_sup, r.u_sup) > config.blowup_threshold;
  };
  if (forced && exceeded(current)) {
    throw ValidationError("initial data already exceed the blow-up threshold");
  }
  if (observer) observer(state, current.forcing);

  const double gamma = nl.kind == NonlinearityKind::AbsPowerU ? 2.0 : 1.0;
  const double growth_power = forced ? (nl.p - 1.0) / gamma : 1.0;
  std::vector<GrowthSample> resolved;

  auto finish_blowup = [&](double dt) {
    BlowUpReport report;
    report.last_valid_time = state.time;
    report.estimated_time = state.time + dt;
    if (resolved.size() >= 3) {
      const std::array<GrowthSample, 3> last{resolved[resolved.size() - 3],
                                             resolved[resolved.size() - 2], resolved.back()};
      if (auto t = extrapolate_zero(last)) report.estimated_time = *t;
    }
    result.blowup = report;
  };

  auto advance = [&](const EtdStepper& stepper, long index) {
    const ModeState before = state;
    auto evaluation = current;
    if (!stepper.step(state, evaluation, forced) || (forced && exceeded(evaluation))) {
      state = before;
      finish_blowup(stepper.dt());
      return false;
    }
    // Pin the clock to index * dt so long runs do not accumulate drift.
    if (index >= 0) state.time = static_cast<double>(index) * config.dt;
    current = std::move(evaluation);
    ++result.steps;
    if (forced && current.arg_sup > 0.0 &&
        stepper.dt() * std::pow(current.arg_sup, growth_power) <= 0.02) {
      resolved.push_back({state.time, std::pow(current.arg_sup, -growth_power)});
      if (resolved.size() > 3) resolved.erase(resolved.begin());
    }
    if (observer) observer(state, current.forcing);
    return true;
  };

  for (long i = 1; i <= full_steps; ++i) {
    if (!advance(main_stepper, i)) return result;
  }
  if (remainder > 0.0) {
    const EtdStepper tail(grid, nl, remainder);
    if (!advance(tail, -1)) return result;
    state.time = config.t_end;
  }
  return result;
}

BernoulliValue bernoulli_oracle(double w0, double p, double t) {
  if (!(w0 > 0.0) || !std::isfinite(w0)) {
    throw ValidationError("bernoulli_oracle: w0 must be finite and > 0 (signed data are not covered)");
  }
  if (!(p > 1.0) || !std::isfinite(p)) throw ValidationError("bernoulli_oracle: p must be > 1");
  if (!(t >= 0.0)) throw ValidationError("bernoulli_oracle: t must be >= 0");
  BernoulliValue out;
  const double inv = std::pow(w0, 1.0 - p);
  out.blowup_time = w0 > 1.0 ? -std::log1p(-inv) / (p - 1.0) : std::numeric_limits<double>::infinity();
  if (t >= out.blowup_time) {
    out.blown_up = true;
    return out;
  }
  // v = (w0^(1-p) - 1) e^((p-1) t) + 1, written with expm1 to keep v accurate near w0 = 1.
  const double v = inv + (inv - 1.0) * std::expm1((p - 1.0) * t);
  out.value = std::pow(v, -1.0 / (p - 1.0));
  return out;
}

namespace {

using Trajectory = std::vector<std::vector<cplx>>;

struct PicardIterate {
  Trajectory u, ut, w;
};

// Time-weighted sup norm of the difference of two iterates. For the |w|^p
// model the weights follow the exponential decay of w and include its sup
// norm; otherwise they follow the polynomial decay of the |u|^p model.
double picard_distance(const GridSpec& grid, const std::vector<double>& mu, const Nonlinearity& nl,
                       const PicardIterate& a, const PicardIterate& b, double h) {
  const double n = grid.dim;
  const double s = grid.sigma;
  const double base = n / (4.0 * s);
  const bool q_model = nl.kind == NonlinearityKind::AbsPowerQ;
  const std::size_t modes = mu.size();
  double worst = 0.0;
  std::vector<cplx> du(modes), del(modes), dut(modes), dw(modes);
  for (std::size_t m = 0; m < a.u.size(); ++m) {
    const double t = static_cast<double>(m) * h;
    for (std::size_t k = 0; k < modes; ++k) {
      du[k] = a.u[m][k] - b.u[m][k];
      del[k] = std::sqrt(mu[k]) * du[k];
      dut[k] = a.ut[m][k] - b.ut[m][k];
      dw[k] = a.w[m][k] - b.w[m][k];
    }
    const double nu = parseval_l2(grid, du);
    const double nel = parseval_l2(grid, del);
    const double nut = parseval_l2(grid, dut);
    const double nw = parseval_l2(grid, dw);
    double value;
    if (q_model) {
      const double nw_sup = sup_abs(to_nodes(grid, dw));
      value = nu + std::sqrt(1.0 + t) * nel + (1.0 + t) * nut + std::exp(t) * (nw + nw_sup);
    } else {
      const double tp = 1.0 + t;
      value = std::pow(tp, base) * nu + std::pow(tp, base + 0.5) * nel +
              std::pow(tp, base + 1.0) * nut + std::pow(tp, n * nl.p / (2.0 * s) - base) * nw;
    }
    if (!std::isfinite(value)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, value);
  }
  return worst;
}

}  // namespace

PicardResult picard_solve(const RealField& u1, const Nonlinearity& nl, double T, int grid_steps,
                          const EvolveConfig& config) {
  nl.validate();
  if (nl.kind == NonlinearityKind::None) throw ValidationError("picard_solve needs a nonlinearity");
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("picard_solve: T must be positive");
  if (grid_steps < 1) throw ValidationError("picard_solve: grid_steps must be >= 1");
  if (config.picard_max_iters < 1) throw ValidationError("picard_max_iters must be >= 1");
  if (!(config.picard_tol > 0.0)) throw ValidationError("picard_tol must be positive");

  const auto& grid = u1.grid();
  const ForcingEvaluator eval(grid, nl);
  const auto& mu = eval.mu();
  const std::size_t modes = mu.size();
  const std::size_t nodes = static_cast<std::size_t>(grid_steps) + 1;
  const double h = T / grid_steps;

  const auto u1_field = forward_transform(u1);
  const std::vector<cplx> u1_hat(u1_field.coeffs().begin(), u1_field.coeffs().end());

  // Kernel tables indexed by lag l = m - j.
  std::vector<std::vector<double>> kd(nodes, std::vector<double>(modes));
  std::vector<std::vector<double>> kdt(nodes, std::vector<double>(modes));
  std::vector<double> kw(nodes);
  for (std::size_t l = 0; l < nodes; ++l) {
    const double t = static_cast<double>(l) * h;
    kw[l] = std::exp(-t);
    for (std::size_t k = 0; k < modes; ++k) {
      kd[l][k] = duhamel_kernel(mu[k], t);
      kdt[l][k] = kw[l] - mu[k] * kd[l][k];
    }
  }

  auto linear_part = [&]() {
    PicardIterate it;
    it.u.assign(nodes, std::vector<cplx>(modes));
    it.ut.assign(nodes, std::vector<cplx>(modes));
    it.w.assign(nodes, std::vector<cplx>(modes));
    for (std::size_t m = 0; m < nodes; ++m) {
      for (std::size_t k = 0; k < modes; ++k) {
        it.u[m][k] = kd[m][k] * u1_hat[k];
        it.ut[m][k] = kdt[m][k] * u1_hat[k];
        it.w[m][k] = kw[m] * u1_hat[k];
      }
    }
    return it;
  };

  PicardResult result;
  auto& report = result.report;
  PicardIterate current = linear_part();

  for (int iter = 0; iter < config.picard_max_iters; ++iter) {
    Trajectory forcing(nodes);
    bool finite = true;
    for (std::size_t m = 0; m < nodes && finite; ++m) {
      auto r = eval.evaluate(current.u[m], current.w[m]);
      finite = r.finite;
      forcing[m] = std::move(r.forcing);
    }
    if (!finite) break;

    PicardIterate next = linear_part();
    for (std::size_t m = 1; m < nodes; ++m) {
      for (std::size_t j = 0; j <= m; ++j) {
        const double c = (j == 0 || j == m) ? 0.5 * h : h;
        const std::size_t lag = m - j;
        const auto& f = forcing[j];
        const auto& d = kd[lag];
        const auto& dt = kdt[lag];
        const double e = c * kw[lag];
        auto& u = next.u[m];
        auto& ut = next.ut[m];
        auto& w = next.w[m];
        for (std::size_t k = 0; k < modes; ++k) {
          u[k] += (c * d[k]) * f[k];
          ut[k] += (c * dt[k]) * f[k];
          w[k] += e * f[k];
        }
      }
    }

    const double dist = picard_distance(grid, mu, nl, next, current, h);
    report.iterates = iter + 1;
    if (!report.successive_distances.empty() && report.successive_distances.back() > 0.0) {
      report.contraction_factors.push_back(dist / report.successive_distances.back());
    }
    report.successive_distances.push_back(dist);
    if (!std::isfinite(dist)) break;
    current = std::move(next);
    if (dist <= config.picard_tol) {
      report.converged = true;
      break;
    }
  }

  result.trajectory.reserve(nodes);
  for (std::size_t m = 0; m < nodes; ++m) {
    std::vector<double> u(modes), ut(modes);
    std::vector<cplx> scratch(modes);
    fft::inverse_real(grid, current.u[m], u, scratch);
    fft::inverse_real(grid, current.ut[m], ut, scratch);
    bool ok = true;
    for (std::size_t i = 0; i < modes && ok; ++i) ok = std::isfinite(u[i]) && std::isfinite(ut[i]);
    if (!ok) break;
    result.trajectory.push_back(
        StatePair{RealField(grid, std::move(u)), RealField(grid, std::move(ut)), m * h});
  }
  return result;
}

}  // namespace dampsim
