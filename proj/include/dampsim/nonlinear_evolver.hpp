#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dampsim/spectral_core.hpp"

namespace dampsim {

enum class NonlinearityKind { None, AbsPowerU, AbsPowerQ, AbsPowerUtPlusU };

/// Right-hand side F = |arg|^p, where arg is u, w = u_t + (-Delta)^sigma u, or
/// u_t + u depending on `kind`.
struct Nonlinearity {
  NonlinearityKind kind = NonlinearityKind::None;
  double p = 2.0;

  /// Throws ValidationError unless p > 1 (p is ignored for None).
  void validate() const;
  /// Integer p in {2, 3}: the power is a polynomial and gets 2/3-rule
  /// truncation after every evaluation.
  bool dealiased() const;
};

struct EvolveConfig {
  double dt = 1e-2;
  double t_end = 1.0;
  /// Applied to max(|u|, |arg|) on the grid each step.
  double blowup_threshold = 1e8;
  int picard_max_iters = 50;
  double picard_tol = 1e-6;

  void validate() const;
};

/// Spectral state (u_hat, w_hat) with w = u_t + (-Delta)^sigma u. In these
/// variables the mode propagator is triangular: w decouples and decays like
/// e^(-t), and u is driven by w through D.
struct ModeState {
  GridSpec grid;
  double time = 0.0;
  std::vector<cplx> u_hat;
  std::vector<cplx> w_hat;

  static ModeState from_state(const StatePair& state);
  /// u_t is recovered as w - (-Delta)^sigma u.
  StatePair to_state() const;
  std::vector<cplx> ut_hat(const std::vector<double>& mu) const;
};

/// |arg|^p on the grid. Returns nullopt when any value is non-finite, which
/// callers treat as blow-up.
std::optional<RealField> eval_nonlinearity(const Nonlinearity& nl, const StatePair& state);

/// Per-mode ETD-RK2 weights for step h. With D the forcing kernel and the
/// forcing interpolated linearly between f_n and the predicted f*:
///   u_pred = decay u + D(h) w + i0 f_n
///   u_next = decay u + D(h) w + u_old f_n + u_new f*
///   w_pred = e^(-h) w + e0 f_n
///   w_next = e^(-h) w + w_old f_n + w_new f*
struct EtdWeights {
  double decay = 1.0;  // e^(-mu h)
  double d = 0.0;      // D(h, mu)
  double i0 = 0.0;     // integral_0^h D(s) ds
  double u_old = 0.0;  // integral_0^h D(s) s/h ds
  double u_new = 0.0;  // integral_0^h D(s) (1 - s/h) ds
};

EtdWeights etd_mode_weights(double mu, double h);

/// Spectral right-hand side for a mode state, with 2/3-rule truncation when
/// the nonlinearity is dealiased.
class ForcingEvaluator {
 public:
  struct Result {
    std::vector<cplx> forcing;
    /// max |arg| and max |u| on the grid; u_sup only when requested.
    double arg_sup = 0.0;
    double u_sup = 0.0;
    bool finite = true;
  };

  ForcingEvaluator(const GridSpec& grid, const Nonlinearity& nl);

  Result evaluate(const std::vector<cplx>& u_hat, const std::vector<cplx>& w_hat,
                  bool want_u_sup = false) const;
  /// Nodal values of the nonlinearity argument.
  std::vector<double> argument(const std::vector<cplx>& u_hat,
                               const std::vector<cplx>& w_hat) const;

  const GridSpec& grid() const { return grid_; }
  const Nonlinearity& nonlinearity() const { return nl_; }
  const std::vector<double>& mu() const { return mu_; }

 private:
  GridSpec grid_;
  Nonlinearity nl_;
  std::vector<double> mu_;
  std::vector<unsigned char> keep_;
};

/// Second-order exponential time differencing on the exact mode propagator.
class EtdStepper {
 public:
  EtdStepper(const GridSpec& grid, const Nonlinearity& nl, double dt);

  /// Advances `state` by dt. `current` must hold the forcing evaluated on
  /// `state` and is replaced by the forcing on the new state. Returns false,
  /// leaving both arguments untouched, if any forcing value is non-finite.
  bool step(ModeState& state, ForcingEvaluator::Result& current, bool want_u_sup = false) const;

  const ForcingEvaluator& evaluator() const { return eval_; }
  double dt() const { return dt_; }

 private:
  ForcingEvaluator eval_;
  double dt_;
  std::vector<EtdWeights> weights_;
  double w_decay_, e0_, w_old_, w_new_;
};

/// One ETD-RK2 step in (u, u_t) variables. Throws BlowUpError on non-finite
/// values.
StatePair step_etd(const StatePair& state, const Nonlinearity& nl, double dt);

struct BlowUpReport {
  /// Time of the last step whose state passed the finiteness and threshold
  /// checks.
  double last_valid_time = 0.0;
  /// Extrapolated singular time from the growth of the argument's sup norm
  /// over the last well-resolved steps; last_valid_time + dt if no such fit
  /// is possible.
  double estimated_time = 0.0;
};

struct EvolveResult {
  ModeState final_state;
  int steps = 0;
  std::optional<BlowUpReport> blowup;
};

/// Fixed-step schedule for [0, t_end]: full_steps steps of dt, then one
/// shorter step of length `remainder` when t_end is not a multiple of dt
/// (to relative precision 1e-9).
struct StepSchedule {
  long full_steps = 0;
  double remainder = 0.0;
  long total() const { return full_steps + (remainder > 0.0 ? 1 : 0); }
};

StepSchedule step_schedule(double t_end, double dt);

/// Called with the state at t = 0 and after every step; `forcing` is the
/// spectral right-hand side evaluated on that state (zero for None).
using StepObserver = std::function<void(const ModeState& state, const std::vector<cplx>& forcing)>;

/// Runs from (u0, u1) at t = 0 to config.t_end with fixed steps. The last
/// step is shortened so the run ends exactly at t_end.
EvolveResult evolve(const RealField& u0, const RealField& u1, const Nonlinearity& nl,
                    const EvolveConfig& config, const StepObserver& observer = {});

/// Exact solution of w' = -w + w^p for w(0) = w0 > 0, or the blow-up time.
struct BernoulliValue {
  bool blown_up = false;
  double value = 0.0;       // w(t) when !blown_up
  double blowup_time = 0.0;  // finite when w0 > 1, +inf otherwise
};

BernoulliValue bernoulli_oracle(double w0, double p, double t);

struct PicardReport {
  int iterates = 0;
  bool converged = false;
  std::vector<double> successive_distances;
  std::vector<double> contraction_factors;
};

struct PicardResult {
  /// One state per time node t_m = m T / grid_steps, m = 0..grid_steps.
  std::vector<StatePair> trajectory;
  PicardReport report;
};

/// Fixed-point iteration u_{k+1} = u_L + Duhamel(F(u_k)) for data u(0) = 0,
/// u_t(0) = u1, with the Duhamel integrals done by the trapezoidal rule on a
/// uniform grid of grid_steps + 1 nodes. Distances use time-weighted sup
/// norms adapted to the nonlinearity.
PicardResult picard_solve(const RealField& u1, const Nonlinearity& nl, double T, int grid_steps,
                          const EvolveConfig& config);

}  // namespace dampsim
