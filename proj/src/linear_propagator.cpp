#include "dampsim/linear_propagator.hpp"

#include <algorithm>
#include <cmath>

#include "dampsim/errors.hpp"
#include "dampsim/phi_functions.hpp"

namespace dampsim {
namespace {

void check_domain(double mu, double t) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ValidationError("mode parameter mu must be finite and >= 0");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("time must be finite and >= 0");
}

double kernel_unchecked(double mu, double t) {
  const double slow = std::min(mu, 1.0);
  const double gap = std::abs(1.0 - mu);
  return t * std::exp(-slow * t) * phi1(-gap * t);
}

}  // namespace

double duhamel_kernel(double mu, double t) {
  check_domain(mu, t);
  return kernel_unchecked(mu, t);
}

double duhamel_kernel_dt(double mu, double t) {
  check_domain(mu, t);
  return std::exp(-t) - mu * kernel_unchecked(mu, t);
}

ModeCoeffs mode_coeffs(double mu, double t) {
  check_domain(mu, t);
  const double d = kernel_unchecked(mu, t);
  const double md = mu * d;
  return ModeCoeffs{std::exp(-mu * t) + md, d, -md, std::exp(-t) - md};
}

StatePair evolve_linear(const StatePair& state, double dt) {
  state.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("evolve_linear: dt must be positive");
  const auto& grid = state.grid();
  const auto mu = symbol(grid, grid.sigma);

  SpectralField u_hat = forward_transform(state.u);
  SpectralField ut_hat = forward_transform(state.ut);
  auto u = u_hat.coeffs();
  auto ut = ut_hat.coeffs();
  for (std::size_t k = 0; k < u.size(); ++k) {
    const ModeCoeffs m = mode_coeffs(mu[k], dt);
    const cplx u0 = u[k];
    const cplx u1 = ut[k];
    u[k] = m.a00 * u0 + m.a01 * u1;
    ut[k] = m.a10 * u0 + m.a11 * u1;
  }
  return StatePair{inverse_transform(u_hat), inverse_transform(ut_hat), state.time + dt};
}

RealField closed_form_w(const RealField& u1, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("closed_form_w: t must be >= 0");
  RealField out = u1;
  const double factor = std::exp(-t);
  for (auto& v : out.values()) v *= factor;
  return out;
}

}  // namespace dampsim
