#pragma once

#include <optional>
#include <string>
#include <vector>

#include <iosfwd>

#include "dampsim/inequality_lab.hpp"
#include "dampsim/nonlinear_evolver.hpp"
#include "dampsim/observables.hpp"
#include "dampsim/rate_analysis.hpp"
#include "dampsim/run_config.hpp"

namespace dampsim {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitBlowUp = 3,
  kExitNumerical = 4,
};

/// Sampled observables, one column per name in observable_names(); missing
/// values are NaN. A run that blew up ends with a row of +inf at the
/// estimated blow-up time.
struct SampleTable {
  std::vector<double> times;
  std::vector<std::vector<double>> columns;

  ObservableSeries series(const std::string& name) const;
};

struct IdentityCheck {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SimulationResult {
  SampleTable samples;
  std::vector<IdentityCheck> identities;
  std::optional<BlowUpReport> blowup;
  double final_time = 0.0;
};

/// Runs the configured model and evaluates the identity checks along the way.
SimulationResult simulate(const RunConfig& config);

/// A rate target with the fit window and tolerance used to judge it; the
/// input format of `rates`.
struct RateRequest {
  RateTarget target;
  std::pair<double, double> window;
  double tolerance = 0.0;
};

std::vector<RateRequest> rate_requests(const RunConfig& config);
std::string rates_json(const SampleTable& samples, const std::vector<RateRequest>& requests);
std::vector<RateRequest> parse_rate_requests(const std::string& json_text);

std::string observables_csv(const SampleTable& samples);
SampleTable parse_observables_csv(const std::string& text);

std::string identities_json(const RunConfig& config, const SimulationResult& result);
std::string inequality_json(const std::vector<InequalityCheck>& checks);

struct RunOptions {
  bool write_observables = true;
  bool write_rates = true;
  bool write_identities = true;
};

/// Full pipeline for one config: writes observables.csv, rates.json,
/// identities.json (and inequalities.json when requested) into
/// config.output_dir and returns the exit code. Diagnostics go to `log`.
int run(const RunConfig& config, const RunOptions& options, std::ostream& log);

/// Parses the key = value inequality parameter file and runs the checks.
std::vector<InequalityCheck> run_inequality_params(const std::string& text);

}  // namespace dampsim
