#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dampsim/spectral_core.hpp"

namespace dampsim {

/// Column order used everywhere (CSV header, reports):
///   u_l2, u_l1, u_linf        norms of u
///   ut_l2                     |u_t|_2
///   elastic_l2                |(-Delta)^(sigma/2) u|_2
///   higher_elastic_l2         |(-Delta)^sigma u|_2
///   energy                    |u_t|_2^2 + |(-Delta)^(sigma/2) u|_2^2
///   q_l2, q_linf              norms of w = u_t + (-Delta)^sigma u
///   ut_plus_u_l2              |u_t + u|_2
///   diff_l2                   |u_t - (-Delta)^sigma u|_2
///   utt_combo_l2              |u_tt + (-Delta)^sigma u_t|_2, with u_tt taken from the equation
///   inv_combo_l2              |u + (-Delta)^(-sigma) u_t|_2, only for mean-zero u_t
const std::vector<std::string>& observable_names();

/// Missing entries are unavailable (no right-hand side given, or u_t has a
/// nonzero mean for the inverse-operator combination).
using Observation = std::map<std::string, std::optional<double>>;

/// Named scalar time series.
struct ObservableSeries {
  std::string name;
  std::vector<double> times;
  std::vector<double> values;

  /// Throws ValidationError unless times are strictly increasing, sizes match
  /// and values are finite and >= 0, except that the last value may be +inf
  /// (blow-up marker).
  void validate() const;
};

/// All observables of a state. `rhs` is the current right-hand side F(u, u_t)
/// of the equation; pass a zero field for the linear model.
Observation observe(const StatePair& state, const std::optional<RealField>& rhs = std::nullopt);

/// Same, from spectral data: u_hat and w_hat = (u_t + (-Delta)^sigma u)^, with
/// mu = |xi|^(2 sigma). `rhs_hat` may be null.
Observation observe_modes(const GridSpec& grid, const std::vector<double>& mu,
                          const std::vector<cplx>& u_hat, const std::vector<cplx>& w_hat,
                          const std::vector<cplx>* rhs_hat);

}  // namespace dampsim
