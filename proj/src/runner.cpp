#include "dampsim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dampsim/errors.hpp"
#include "dampsim/fft.hpp"
#include "dampsim/linear_propagator.hpp"

namespace dampsim {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t column_index(const std::string& name) {
  const auto& names = observable_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ValidationError("unknown observable '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

std::vector<cplx> spectrum(const RealField& f) {
  const auto s = forward_transform(f);
  return {s.coeffs().begin(), s.coeffs().end()};
}

std::vector<double> nodes_of(const GridSpec& grid, const std::vector<cplx>& c) {
  std::vector<double> out(c.size());
  std::vector<cplx> scratch(c.size());
  fft::inverse_real(grid, c, out, scratch);
  return out;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Accumulates the exact-identity checks of a run. Samples arrive as
// real-space states so the checks go through the public transforms rather
// than the stepper's internal variables.
class IdentityTracker {
 public:
  IdentityTracker(const RunConfig& config, const RealField& u0, const RealField& u1)
      : config_(config), grid_(config.grid), mu_(symbol(grid_, grid_.sigma)) {
    const auto u0_hat = spectrum(u0);
    const auto u1_hat = spectrum(u1);
    w0_hat_.resize(mu_.size());
    z0_hat_.resize(mu_.size());
    for (std::size_t k = 0; k < mu_.size(); ++k) {
      w0_hat_[k] = u1_hat[k] + mu_[k] * u0_hat[k];
      z0_hat_[k] = u0_hat[k] + u1_hat[k];
    }
    w0_norm_ = parseval_l2(grid_, w0_hat_);
    z0_norm_ = parseval_l2(grid_, z0_hat_);
    w0_nodes_ = nodes_of(grid_, w0_hat_);
    u1_values_.assign(u1.values().begin(), u1.values().end());
    u1_sup_ = sup_abs(u1_values_);
    u0_zero_ = sup_abs(std::vector<double>(u0.values().begin(), u0.values().end())) == 0.0;
    u1_nonnegative_ = std::all_of(u1_values_.begin(), u1_values_.end(), [](double v) { return v >= 0.0; });
    duhamel_sum_.assign(mu_.size(), 0.0);
  }

  void on_sample(const StatePair& s, const Observation& obs) {
    const double t = s.time;
    const auto u_hat = spectrum(s.u);
    const auto ut_hat = spectrum(s.ut);
    std::vector<cplx> w_hat(mu_.size());
    for (std::size_t k = 0; k < mu_.size(); ++k) w_hat[k] = ut_hat[k] + mu_[k] * u_hat[k];

    const double ut_l2 = *obs.at("ut_l2");
    const double higher = *obs.at("higher_elastic_l2");
    const double q = *obs.at("q_l2");
    const double scale = ut_l2 + higher;
    if (scale > 0.0) triangle_ = std::max(triangle_, std::max(0.0, std::abs(ut_l2 - higher) - q) / scale);

    if (config_.model == ModelId::Linear) {
      const double decay = std::exp(-t);
      std::vector<cplx> dw(mu_.size()), dz(mu_.size());
      for (std::size_t k = 0; k < mu_.size(); ++k) {
        dw[k] = w_hat[k] - decay * w0_hat_[k];
        dz[k] = ut_hat[k] + u_hat[k] - std::exp(-mu_[k] * t) * z0_hat_[k];
      }
      if (w0_norm_ > 0.0) {
        w_identity_ = std::max(w_identity_, parseval_l2(grid_, dw) / w0_norm_);
        if (const auto utt = obs.at("utt_combo_l2")) {
          utt_identity_ = std::max(utt_identity_, std::abs(*utt - decay * w0_norm_) / w0_norm_);
        }
      }
      if (z0_norm_ > 0.0) diffusion_ = std::max(diffusion_, parseval_l2(grid_, dz) / z0_norm_);
      const double energy = *obs.at("energy");
      if (energy_first_ < 0.0) energy_first_ = energy;
      if (energy_prev_ >= 0.0 && energy_first_ > 0.0) {
        energy_rise_ = std::max(energy_rise_, (energy - energy_prev_) / energy_first_);
      }
      energy_prev_ = energy;
    }

    if (bernoulli_applies() && u1_sup_ <= 1.0) {
      const auto w = nodes_of(grid_, w_hat);
      for (std::size_t i = 0; i < w.size(); ++i) {
        bernoulli_ = std::max(bernoulli_, std::abs(w[i] - oracle(u1_values_[i], t)));
      }
    }
  }

  // Streaming Simpson integral of g(s) = e^s |w(s)|^p on the uniform step
  // grid; checks w(t) = e^-t w(0) + e^-t int_0^t g at every resolved step,
  // relative to max(|w(0)|_inf, |w(t)|_inf).
  void on_step(const ModeState& state, long index, double h) {
    if (config_.model != ModelId::SemilinearQ || !duhamel_active_) return;
    const auto w = nodes_of(grid_, state.w_hat);
    const double w_sup = sup_abs(w);
    // Past this point the step no longer resolves the growth of w (the run
    // is approaching a singularity) and the quadrature says nothing.
    if (h * std::pow(w_sup, config_.p - 1.0) > 2.5e-3) {
      duhamel_active_ = false;
      return;
    }
    std::vector<double> g(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) g[i] = std::exp(state.time) * std::pow(std::abs(w[i]), config_.p);
    if (index > 0 && std::abs(h - step_) > 1e-12 * step_) {
      duhamel_active_ = false;  // uneven tail step; the uniform rule no longer applies
      return;
    }
    if (index == 0) {
      step_ = h;
    } else if (index == 1) {
      for (std::size_t i = 0; i < g.size(); ++i) duhamel_sum_[i] += 0.5 * h * (g_prev_[i] + g[i]);
    } else if (index % 2 == 0) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        duhamel_sum_[i] = sum_prev2_[i] + h / 3.0 * (g_prev2_[i] + 4.0 * g_prev_[i] + g[i]);
      }
    } else {
      for (std::size_t i = 0; i < g.size(); ++i) {
        duhamel_sum_[i] += h / 12.0 * (-g_prev2_[i] + 8.0 * g_prev_[i] + 5.0 * g[i]);
      }
    }
    if (index > 0) {
      const double decay = std::exp(-state.time);
      const double scale = std::max({sup_abs(w0_nodes_), w_sup, std::numeric_limits<double>::min()});
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double predicted = decay * (w0_nodes_[i] + duhamel_sum_[i]);
        duhamel_ = std::max(duhamel_, std::abs(w[i] - predicted) / scale);
      }
    }
    if (index % 2 == 0) sum_prev2_ = duhamel_sum_;
    g_prev2_ = std::move(g_prev_);
    g_prev_ = std::move(g);
  }

  std::vector<IdentityCheck> finish(const std::optional<BlowUpReport>& blowup) const {
    std::vector<IdentityCheck> out;
    auto add = [&](const std::string& name, double measured, double tol) {
      out.push_back({name, measured, tol, std::isfinite(measured) && measured <= tol});
    };
    if (config_.model == ModelId::Linear) {
      add("w_identity", w_identity_, 1e-10);
      add("utt_identity", utt_identity_, 1e-10);
      add("diffusion_identity", diffusion_, 1e-10);
      add("energy_dissipation", energy_rise_, 1e-12);
    }
    add("triangle", triangle_, 1e-12);
    if (bernoulli_applies()) {
      if (u1_sup_ <= 1.0) {
        add("bernoulli", bernoulli_, 1e-4);
      } else {
        const double t_star = bernoulli_oracle(u1_sup_, config_.p, 0.0).blowup_time;
        if (blowup) {
          add("blowup_time", std::abs(blowup->estimated_time - t_star), 1e-3);
        } else if (t_star <= config_.time.t_end) {
          add("blowup_time", kInf, 1e-3);
        }
      }
    }
    if (config_.model == ModelId::SemilinearQ) add("duhamel_w", duhamel_, 1e-6);
    return out;
  }

 private:
  bool bernoulli_applies() const {
    return config_.model == ModelId::SemilinearQ && u0_zero_ && u1_nonnegative_ && u1_sup_ > 0.0;
  }

  double oracle(double w0, double t) const {
    // Below this the power w0^(1-p) overflows; the forcing is negligible there.
    if (w0 < 1e-100) return w0 * std::exp(-t);
    return bernoulli_oracle(w0, config_.p, t).value;
  }

  const RunConfig& config_;
  GridSpec grid_;
  std::vector<double> mu_;
  std::vector<cplx> w0_hat_, z0_hat_;
  std::vector<double> w0_nodes_, u1_values_;
  double w0_norm_ = 0.0, z0_norm_ = 0.0, u1_sup_ = 0.0;
  bool u0_zero_ = true, u1_nonnegative_ = true;

  double w_identity_ = 0.0, utt_identity_ = 0.0, diffusion_ = 0.0, triangle_ = 0.0;
  double energy_first_ = -1.0, energy_prev_ = -1.0, energy_rise_ = 0.0;
  double bernoulli_ = 0.0;

  bool duhamel_active_ = true;
  double step_ = 0.0, duhamel_ = 0.0;
  std::vector<double> duhamel_sum_, sum_prev2_, g_prev_, g_prev2_;
};

Nonlinearity nonlinearity_for(const RunConfig& c) {
  switch (c.model) {
    case ModelId::Linear: return {NonlinearityKind::None, c.p};
    case ModelId::SemilinearU: return {NonlinearityKind::AbsPowerU, c.p};
    case ModelId::SemilinearQ: return {NonlinearityKind::AbsPowerQ, c.p};
    case ModelId::SemilinearUtPlusU: return {NonlinearityKind::AbsPowerUtPlusU, c.p};
  }
  return {};
}

void append_row(SampleTable& table, double t, const Observation& obs) {
  table.times.push_back(t);
  const auto& names = observable_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& v = obs.at(names[i]);
    table.columns[i].push_back(v ? *v : kNaN);
  }
}

}  // namespace

ObservableSeries SampleTable::series(const std::string& name) const {
  const auto& col = columns.at(column_index(name));
  ObservableSeries s{name, {}, {}};
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::isnan(col[i])) continue;
    s.times.push_back(times[i]);
    s.values.push_back(col[i]);
  }
  return s;
}

SimulationResult simulate(const RunConfig& config) {
  config.validate();
  const auto [u0, u1] = seed_data(config);
  const auto& grid = config.grid;
  const auto mu = symbol(grid, grid.sigma);
  const auto schedule = step_schedule(config.time.t_end, config.time.dt);
  const long last_index = schedule.total();
  const long every = config.time.sample_every;

  SimulationResult result;
  result.samples.columns.assign(observable_names().size(), {});
  IdentityTracker tracker(config, u0, u1);
  const std::vector<cplx> zero(mu.size());

  auto take_sample = [&](const ModeState& state, const std::vector<cplx>& forcing) {
    const auto obs = observe_modes(grid, mu, state.u_hat, state.w_hat, &forcing);
    append_row(result.samples, state.time, obs);
    if (config.checks.identities) tracker.on_sample(state.to_state(), obs);
  };

  if (config.model == ModelId::Linear) {
    // Exact propagation in (u, u_t) variables, mode by mode.
    auto u_hat = spectrum(u0);
    auto ut_hat = spectrum(u1);
    auto coeffs_for = [&](double h) {
      std::vector<ModeCoeffs> c(mu.size());
      for (std::size_t k = 0; k < mu.size(); ++k) c[k] = mode_coeffs(mu[k], h);
      return c;
    };
    const auto main = coeffs_for(config.time.dt);
    auto as_modes = [&](double t) {
      ModeState m{grid, t, u_hat, std::vector<cplx>(mu.size())};
      for (std::size_t k = 0; k < mu.size(); ++k) m.w_hat[k] = ut_hat[k] + mu[k] * u_hat[k];
      return m;
    };
    take_sample(as_modes(0.0), zero);
    for (long i = 1; i <= last_index; ++i) {
      const bool tail = i > schedule.full_steps;
      const auto tail_coeffs = tail ? coeffs_for(schedule.remainder) : std::vector<ModeCoeffs>{};
      const auto& c = tail ? tail_coeffs : main;
      for (std::size_t k = 0; k < mu.size(); ++k) {
        const cplx a = u_hat[k], b = ut_hat[k];
        u_hat[k] = c[k].a00 * a + c[k].a01 * b;
        ut_hat[k] = c[k].a10 * a + c[k].a11 * b;
      }
      const double t = tail ? config.time.t_end : static_cast<double>(i) * config.time.dt;
      if (i % every == 0 || i == last_index) take_sample(as_modes(t), zero);
    }
    result.final_time = config.time.t_end;
  } else {
    EvolveConfig ec;
    ec.dt = config.time.dt;
    ec.t_end = config.time.t_end;
    long index = 0;
    double last_sampled = -1.0;
    const auto evolved = evolve(u0, u1, nonlinearity_for(config), ec,
                                [&](const ModeState& state, const std::vector<cplx>& forcing) {
                                  const double h = index > schedule.full_steps ? schedule.remainder : ec.dt;
                                  if (config.checks.identities) tracker.on_step(state, index, h);
                                  if (index % every == 0 || index == last_index) {
                                    take_sample(state, forcing);
                                    last_sampled = state.time;
                                  }
                                  ++index;
                                });
    result.final_time = evolved.final_state.time;
    if (evolved.blowup) {
      result.blowup = evolved.blowup;
      const auto& last = evolved.final_state;
      if (last.time > last_sampled) {
        const ForcingEvaluator eval(grid, nonlinearity_for(config));
        take_sample(last, eval.evaluate(last.u_hat, last.w_hat).forcing);
      }
      double t_mark = evolved.blowup->estimated_time;
      if (!(t_mark > last.time)) t_mark = std::nextafter(last.time, kInf);
      result.samples.times.push_back(t_mark);
      for (auto& col : result.samples.columns) col.push_back(kInf);
    }
  }
  if (config.checks.identities) result.identities = tracker.finish(result.blowup);
  return result;
}

std::vector<RateRequest> rate_requests(const RunConfig& config) {
  std::vector<RateRequest> out;
  for (const auto& target : theorem_rate_table(config.grid.dim, config.grid.sigma, config.p, config.model)) {
    const bool poly = target.model == RateModel::Polynomial;
    auto window = poly ? config.checks.rate_window : config.checks.exp_window;
    if (window.second <= 0.0) window.second = config.time.t_end;
    out.push_back({target, window, poly ? config.checks.rate_tolerance : config.checks.exp_tolerance});
  }
  return out;
}

std::string rates_json(const SampleTable& samples, const std::vector<RateRequest>& requests) {
  auto doc = ordered_json::array();
  for (const auto& req : requests) {
    ordered_json j;
    j["observable"] = req.target.observable;
    j["model"] = rate_model_name(req.target.model);
    j["exponent"] = req.target.exponent;
    j["source"] = req.target.source;
    j["bound"] = bound_name(req.target.bound);
    j["window"] = {req.window.first, req.window.second};
    j["tolerance"] = req.tolerance;
    try {
      const auto fit = fit_rate(samples.series(req.target.observable), req.target.model, req.window);
      const auto report = judge_rate(req.target, fit, req.tolerance);
      j["slope"] = fit.slope;
      j["rate"] = fit.rate;
      j["residual"] = fit.residual;
      j["samples"] = fit.samples;
      j["pass"] = report.pass;
    } catch (const ValidationError& e) {
      j["slope"] = nullptr;
      j["rate"] = nullptr;
      j["residual"] = nullptr;
      j["samples"] = 0;
      j["pass"] = false;
      j["error"] = e.what();
    }
    doc.push_back(j);
  }
  return doc.dump(2) + "\n";
}

std::vector<RateRequest> parse_rate_requests(const std::string& json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("rate targets: invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ValidationError("rate targets: expected a JSON array");
  std::vector<RateRequest> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& j = doc[i];
    const std::string where = "rate targets[" + std::to_string(i) + "]: ";
    try {
      RateRequest r;
      r.target.observable = j.at("observable").get<std::string>();
      column_index(r.target.observable);
      const auto model = j.at("model").get<std::string>();
      if (model == "polynomial") {
        r.target.model = RateModel::Polynomial;
      } else if (model == "exponential") {
        r.target.model = RateModel::Exponential;
      } else {
        throw ValidationError("model must be polynomial or exponential");
      }
      r.target.exponent = j.at("exponent").get<double>();
      r.target.source = j.value("source", std::string("user"));
      const auto bound = j.value("bound", std::string("sharp"));
      if (bound == "sharp") {
        r.target.bound = BoundKind::Sharp;
      } else if (bound == "upper_bound") {
        r.target.bound = BoundKind::UpperBound;
      } else {
        throw ValidationError("bound must be sharp or upper_bound");
      }
      const auto& w = j.at("window");
      if (!w.is_array() || w.size() != 2) throw ValidationError("window must be [t_lo, t_hi]");
      r.window = {w[0].get<double>(), w[1].get<double>()};
      r.tolerance = j.at("tolerance").get<double>();
      r.target.validate();
      out.push_back(r);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
  }
  return out;
}

namespace {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string observables_csv(const SampleTable& samples) {
  std::string out = "t";
  for (const auto& n : observable_names()) out += "," + n;
  out += "\n";
  for (std::size_t i = 0; i < samples.times.size(); ++i) {
    out += format_number(samples.times[i]);
    for (const auto& col : samples.columns) out += "," + format_number(col[i]);
    out += "\n";
  }
  return out;
}

SampleTable parse_observables_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("observables CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  if (header.empty() || header[0] != "t") throw ValidationError("observables CSV: first column must be 't'");
  std::vector<std::size_t> slots;
  for (std::size_t i = 1; i < header.size(); ++i) slots.push_back(column_index(header[i]));

  SampleTable table;
  table.columns.assign(observable_names().size(), {});
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw ValidationError("observables CSV row " + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " cells");
    }
    auto parse = [&](const std::string& cell) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0') {
        throw ValidationError("observables CSV row " + std::to_string(row) + ": bad number '" + cell + "'");
      }
      return v;
    };
    table.times.push_back(parse(cells[0]));
    std::vector<double> row_values(observable_names().size(), kNaN);
    for (std::size_t i = 0; i < slots.size(); ++i) row_values[slots[i]] = parse(cells[i + 1]);
    for (std::size_t c = 0; c < row_values.size(); ++c) table.columns[c].push_back(row_values[c]);
  }
  return table;
}

std::string identities_json(const RunConfig& config, const SimulationResult& result) {
  ordered_json doc;
  doc["model"] = model_name(config.model);
  doc["status"] = result.blowup ? "blowup" : "completed";
  doc["final_time"] = result.final_time;
  if (result.blowup) {
    doc["blowup"] = {{"last_valid_time", result.blowup->last_valid_time},
                     {"estimated_time", result.blowup->estimated_time}};
  } else {
    doc["blowup"] = nullptr;
  }
  auto checks = ordered_json::array();
  for (const auto& c : result.identities) {
    ordered_json j;
    j["name"] = c.name;
    if (std::isfinite(c.measured)) {
      j["measured"] = c.measured;
    } else {
      j["measured"] = nullptr;
    }
    j["tolerance"] = c.tolerance;
    j["pass"] = c.pass;
    checks.push_back(j);
  }
  doc["checks"] = checks;
  return doc.dump(2) + "\n";
}

std::string inequality_json(const std::vector<InequalityCheck>& checks) {
  auto doc = ordered_json::array();
  for (const auto& c : checks) {
    ordered_json j;
    j["name"] = c.name;
    j["worst_ratio"] = c.worst_ratio;
    j["witness"] = c.witness;
    j["trials"] = c.trials;
    j["bounded"] = c.bounded;
    ordered_json params;
    for (const auto& [k, v] : c.parameters) params[k] = v;
    j["parameters"] = params;
    doc.push_back(j);
  }
  return doc.dump(2) + "\n";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw NumericalError("failed while writing '" + path.string() + "'");
}

std::vector<InequalityCheck> default_inequalities(const RunConfig& config) {
  return {fgn_check(config.grid, 4.0, 0.0, 100, config.seed), integral_ineq_1(2.0, 0.5, 100.0),
          integral_ineq_2(1.0, 2.5, 100.0)};
}

}  // namespace

int run(const RunConfig& config, const RunOptions& options, std::ostream& log) {
  try {
    config.validate();
    const auto result = simulate(config);
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    if (options.write_observables) write_file(dir / "observables.csv", observables_csv(result.samples));
    if (options.write_rates && config.checks.rates) {
      write_file(dir / "rates.json", rates_json(result.samples, rate_requests(config)));
    }
    if (options.write_identities && config.checks.identities) {
      write_file(dir / "identities.json", identities_json(config, result));
    }
    if (config.checks.inequalities) {
      write_file(dir / "inequalities.json", inequality_json(default_inequalities(config)));
    }

    if (result.blowup) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "blow-up: last valid time %.9g, estimated blow-up time %.9g",
                    result.blowup->last_valid_time, result.blowup->estimated_time);
      log << buf << "\n";
      return kExitBlowUp;
    }
    bool all_pass = true;
    for (const auto& c : result.identities) {
      if (!c.pass) {
        all_pass = false;
        log << "identity check failed: " << c.name << " measured " << format_number(c.measured)
            << " > tolerance " << format_number(c.tolerance) << "\n";
      }
    }
    return all_pass ? kExitOk : kExitNumerical;
  } catch (const ValidationError& e) {
    log << "error: validation: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    log << "error: numerical: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: validation: " << e.what() << "\n";
    return kExitValidation;
  }
}

std::vector<InequalityCheck> run_inequality_params(const std::string& text) {
  auto kv = KeyValueFile::parse(text);
  std::vector<InequalityCheck> out;
  std::uint64_t seed = 0;
  if (kv.has("seed")) {
    const long s = kv.integer("seed");
    if (s < 0) throw ValidationError("seed must be >= 0");
    seed = static_cast<std::uint64_t>(s);
  }
  if (kv.has("fgn.q") || kv.has("fgn.s") || kv.has("fgn.trials")) {
    GridSpec grid;
    grid.dim = static_cast<int>(kv.integer("grid.dim"));
    grid.points = static_cast<int>(kv.integer("grid.points"));
    grid.half_length = kv.number("grid.half_length");
    if (kv.has("grid.sigma")) grid.sigma = kv.number("grid.sigma");
    const double q = kv.number("fgn.q");
    const double s = kv.has("fgn.s") ? kv.number("fgn.s") : 0.0;
    const int trials = kv.has("fgn.trials") ? static_cast<int>(kv.integer("fgn.trials")) : 100;
    out.push_back(fgn_check(grid, q, s, trials, seed));
  }
  if (kv.has("ineq1.a") || kv.has("ineq1.b")) {
    out.push_back(integral_ineq_1(kv.number("ineq1.a"), kv.number("ineq1.b"),
                                  kv.has("ineq1.t_max") ? kv.number("ineq1.t_max") : 100.0));
  }
  if (kv.has("ineq2.c") || kv.has("ineq2.alpha")) {
    out.push_back(integral_ineq_2(kv.number("ineq2.c"), kv.number("ineq2.alpha"),
                                  kv.has("ineq2.t_max") ? kv.number("ineq2.t_max") : 100.0));
  }
  kv.reject_unused();
  if (out.empty()) throw ValidationError("inequality parameters select no check (use fgn.*, ineq1.*, ineq2.*)");
  return out;
}

}  // namespace dampsim
