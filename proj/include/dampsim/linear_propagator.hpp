#pragma once

#include "dampsim/spectral_core.hpp"

namespace dampsim {

/// Solution matrix of v'' + (1 + mu) v' + mu v = 0 for one Fourier mode with
/// mu = |xi|^(2 sigma): (v(t), v'(t)) = [[a00, a01], [a10, a11]] (v(0), v'(0)).
struct ModeCoeffs {
  double a00 = 1.0;
  double a01 = 0.0;
  double a10 = 0.0;
  double a11 = 1.0;
};

/// Forcing-response kernel D(t, mu) = (e^(-mu t) - e^(-t)) / (1 - mu), the
/// symbol of the Duhamel kernel. Evaluated as t e^(-a t) phi1(-|1 - mu| t) with
/// a = min(mu, 1), which is regular at mu = 1 (where D = t e^(-t)) and never
/// overflows. Throws ValidationError for negative or non-finite inputs.
double duhamel_kernel(double mu, double t);

/// d/dt D(t, mu) = e^(-t) - mu D(t, mu).
double duhamel_kernel_dt(double mu, double t);

/// Built from D: a00 = e^(-mu t) + mu D, a01 = D, a10 = -mu D, a11 = e^(-t) - mu D.
ModeCoeffs mode_coeffs(double mu, double t);

/// Advances (u, u_t) by dt with the exact propagator applied mode by mode.
StatePair evolve_linear(const StatePair& state, double dt);

/// e^(-t) u1, the exact value of u_t + (-Delta)^sigma u for the unforced
/// problem started from u(0) = 0, u_t(0) = u1.
RealField closed_form_w(const RealField& u1, double t);

}  // namespace dampsim
