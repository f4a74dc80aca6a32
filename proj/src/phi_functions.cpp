#include "dampsim/phi_functions.hpp"

#include <cmath>

namespace dampsim {
namespace {

// sum_j z^j / (j! * (j + offset)) style series, stopped when terms stall.
template <typename Term>
double series(double z, Term term) {
  double sum = 0.0;
  double power = 1.0;  // z^j / j!
  for (int j = 0; j < 40; ++j) {
    const double t = power * term(j);
    sum += t;
    if (std::abs(t) < 1e-18 * std::abs(sum)) break;
    power *= z / (j + 1);
  }
  return sum;
}

}  // namespace

double phi1(double z) {
  if (std::abs(z) < 1e-4) return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
  return std::expm1(z) / z;
}

double phi2(double z) {
  // 1/(j+2)! = (1/j!) * 1/((j+1)(j+2))
  if (std::abs(z) < 1.0) return series(z, [](int j) { return 1.0 / ((j + 1.0) * (j + 2.0)); });
  return (std::expm1(z) - z) / (z * z);
}

double phi1_moment(double z) {
  if (std::abs(z) < 1.0) return series(z, [](int j) { return 1.0 / (j + 2.0); });
  return (1.0 + std::exp(z) * (z - 1.0)) / (z * z);
}

}  // namespace dampsim
