#include "dampsim/observables.hpp"

#include <cmath>
#include <limits>

#include "dampsim/errors.hpp"
#include "dampsim/fft.hpp"

namespace dampsim {

const std::vector<std::string>& observable_names() {
  static const std::vector<std::string> names{
      "u_l2",   "u_l1",         "u_linf",       "ut_l2",        "elastic_l2",
      "higher_elastic_l2",      "energy",       "q_l2",         "q_linf",
      "ut_plus_u_l2",           "diff_l2",      "utt_combo_l2", "inv_combo_l2"};
  return names;
}

void ObservableSeries::validate() const {
  if (times.size() != values.size()) {
    throw ValidationError("series '" + name + "': times and values differ in length");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw ValidationError("series '" + name + "': times not strictly increasing at index " +
                            std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool terminal_marker = i + 1 == values.size() && values[i] == std::numeric_limits<double>::infinity();
    if (!terminal_marker && (!std::isfinite(values[i]) || values[i] < 0.0)) {
      throw ValidationError("series '" + name + "': invalid value at index " + std::to_string(i));
    }
  }
}

namespace {

std::vector<double> nodes_of(const GridSpec& grid, const std::vector<cplx>& coeffs) {
  std::vector<double> out(coeffs.size());
  std::vector<cplx> scratch(coeffs.size());
  fft::inverse_real(grid, coeffs, out, scratch);
  return out;
}

}  // namespace

Observation observe_modes(const GridSpec& grid, const std::vector<double>& mu,
                          const std::vector<cplx>& u_hat, const std::vector<cplx>& w_hat,
                          const std::vector<cplx>* rhs_hat) {
  const std::size_t n = mu.size();
  if (u_hat.size() != n || w_hat.size() != n || (rhs_hat && rhs_hat->size() != n)) {
    throw ValidationError("observe: coefficient arrays do not match the grid");
  }
  std::vector<cplx> ut(n), elastic(n), higher(n), sum(n), diff(n);
  for (std::size_t k = 0; k < n; ++k) {
    ut[k] = w_hat[k] - mu[k] * u_hat[k];
    elastic[k] = std::sqrt(mu[k]) * u_hat[k];
    higher[k] = mu[k] * u_hat[k];
    sum[k] = ut[k] + u_hat[k];
    diff[k] = ut[k] - higher[k];
  }
  const auto u_nodes = nodes_of(grid, u_hat);
  const auto w_nodes = nodes_of(grid, w_hat);

  Observation out;
  out["u_l2"] = parseval_l2(grid, u_hat);
  out["u_l1"] = lq_norm(grid, u_nodes, Norm::L1);
  out["u_linf"] = lq_norm(grid, u_nodes, Norm::Linf);
  const double ut_l2 = parseval_l2(grid, ut);
  const double el_l2 = parseval_l2(grid, elastic);
  out["ut_l2"] = ut_l2;
  out["elastic_l2"] = el_l2;
  out["higher_elastic_l2"] = parseval_l2(grid, higher);
  out["energy"] = ut_l2 * ut_l2 + el_l2 * el_l2;
  out["q_l2"] = parseval_l2(grid, w_hat);
  out["q_linf"] = lq_norm(grid, w_nodes, Norm::Linf);
  out["ut_plus_u_l2"] = parseval_l2(grid, sum);
  out["diff_l2"] = parseval_l2(grid, diff);

  out["utt_combo_l2"] = std::nullopt;
  if (rhs_hat) {
    // u_tt + (-Delta)^sigma u_t = F - u_t - (-Delta)^sigma u = F - w.
    std::vector<cplx> combo(n);
    for (std::size_t k = 0; k < n; ++k) combo[k] = (*rhs_hat)[k] - w_hat[k];
    out["utt_combo_l2"] = parseval_l2(grid, combo);
  }

  out["inv_combo_l2"] = std::nullopt;
  if (has_zero_mean(ut)) {
    std::vector<cplx> combo(n);
    for (std::size_t k = 0; k < n; ++k) {
      combo[k] = mu[k] > 0.0 ? u_hat[k] + ut[k] / mu[k] : u_hat[k];
    }
    out["inv_combo_l2"] = parseval_l2(grid, combo);
  }
  return out;
}

Observation observe(const StatePair& state, const std::optional<RealField>& rhs) {
  state.validate();
  const auto& grid = state.grid();
  const auto mu = symbol(grid, grid.sigma);
  const auto u_field = forward_transform(state.u);
  const auto ut_field = forward_transform(state.ut);
  std::vector<cplx> u_hat(u_field.coeffs().begin(), u_field.coeffs().end());
  std::vector<cplx> w_hat(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) w_hat[k] = ut_field.coeffs()[k] + mu[k] * u_hat[k];
  if (!rhs) return observe_modes(grid, mu, u_hat, w_hat, nullptr);
  if (!(rhs->grid() == grid)) throw ValidationError("observe: right-hand side lives on another grid");
  const auto f_field = forward_transform(*rhs);
  std::vector<cplx> f_hat(f_field.coeffs().begin(), f_field.coeffs().end());
  return observe_modes(grid, mu, u_hat, w_hat, &f_hat);
}

}  // namespace dampsim
