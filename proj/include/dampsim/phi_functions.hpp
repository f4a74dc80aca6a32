#pragma once

// Entire functions that show up when exponentials are integrated against
// polynomials. All are evaluated without cancellation for z <= 0; positive
// arguments are accepted but may overflow for large z.
namespace dampsim {

/// (e^z - 1) / z, with a four-term Taylor series for |z| < 1e-4.
double phi1(double z);

/// (e^z - 1 - z) / z^2 = integral_0^1 (1 - s) e^(z s) ds.
double phi2(double z);

/// integral_0^1 s e^(z s) ds = phi1(z) - phi2(z).
double phi1_moment(double z);

}  // namespace dampsim
