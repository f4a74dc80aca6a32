#include <glob.h>

#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dampsim/errors.hpp"
#include "dampsim/runner.hpp"

using namespace dampsim;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << content;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return kExitValidation;
  } catch (const BlowUpError& e) {
    std::cerr << "error: blow-up at t = " << e.time() << ": " << e.what() << "\n";
    return kExitBlowUp;
  } catch (const NumericalError& e) {
    std::cerr << "error: numerical: " << e.what() << "\n";
    return kExitNumerical;
  }
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<std::string> out;
  if (rc == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  if (rc != 0 && rc != GLOB_NOMATCH) throw ValidationError("glob failed for '" + pattern + "'");
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral lab for the doubly damped sigma-evolution equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  auto* simulate = app.add_subcommand("simulate", "Run a configuration and write its reports");
  simulate->add_option("config", config_path, "Run configuration file")->required();
  simulate->add_option("--output-dir", output_dir, "Override output_dir from the config");

  std::string csv_path, targets_path, rates_out;
  auto* rates = app.add_subcommand("rates", "Refit decay rates from an observables CSV");
  rates->add_option("csv", csv_path, "observables.csv")->required();
  rates->add_option("targets", targets_path, "JSON list of rate targets (rates.json is accepted)")->required();
  rates->add_option("-o,--output", rates_out, "Write JSON here instead of stdout");

  std::string identity_config;
  auto* identities = app.add_subcommand("check-identities", "Run a configuration and check only the exact identities");
  identities->add_option("config", identity_config, "Run configuration file")->required();

  std::string params_path, ineq_out;
  auto* inequalities = app.add_subcommand("check-inequalities", "Run the inequality checks in a parameter file");
  inequalities->add_option("params", params_path, "Parameter file")->required();
  inequalities->add_option("-o,--output", ineq_out, "Write JSON here instead of stdout");

  std::string pattern;
  auto* sweep = app.add_subcommand("sweep", "Run every configuration matching a glob concurrently");
  sweep->add_option("pattern", pattern, "Glob pattern for configuration files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  if (*simulate) {
    return guarded([&] {
      auto config = load_config(config_path);
      if (!output_dir.empty()) config.output_dir = output_dir;
      return run(config, RunOptions{}, std::cerr);
    });
  }
  if (*rates) {
    return guarded([&] {
      const auto samples = parse_observables_csv(read_file(csv_path));
      const auto requests = parse_rate_requests(read_file(targets_path));
      write_output(rates_out, rates_json(samples, requests));
      return static_cast<int>(kExitOk);
    });
  }
  if (*identities) {
    return guarded([&] {
      auto config = load_config(identity_config);
      config.checks.rates = false;
      config.checks.inequalities = false;
      const int rc = run(config, RunOptions{false, false, true}, std::cerr);
      std::ifstream report(config.output_dir + "/identities.json");
      if (report) std::cout << report.rdbuf();
      return rc;
    });
  }
  if (*inequalities) {
    return guarded([&] {
      const auto checks = run_inequality_params(read_file(params_path));
      write_output(ineq_out, inequality_json(checks));
      bool bounded = true;
      for (const auto& c : checks) bounded = bounded && c.bounded;
      return bounded ? static_cast<int>(kExitOk) : static_cast<int>(kExitNumerical);
    });
  }
  if (*sweep) {
    return guarded([&] {
      const auto paths = expand_glob(pattern);
      if (paths.empty()) throw ValidationError("no configuration matches '" + pattern + "'");
      std::vector<RunConfig> configs;
      std::set<std::string> dirs;
      for (const auto& p : paths) {
        configs.push_back(load_config(p));
        if (!dirs.insert(configs.back().output_dir).second) {
          throw ValidationError("sweep: output_dir '" + configs.back().output_dir +
                                "' is used by more than one configuration");
        }
      }
      std::vector<std::future<std::pair<int, std::string>>> jobs;
      for (const auto& c : configs) {
        jobs.push_back(std::async(std::launch::async, [c] {
          std::ostringstream log;
          const int rc = run(c, RunOptions{}, log);
          return std::make_pair(rc, log.str());
        }));
      }
      int worst = kExitOk;
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto [rc, log] = jobs[i].get();
        std::cout << paths[i] << ": exit " << rc << "\n";
        std::cerr << log;
        worst = std::max(worst, rc);
      }
      return worst;
    });
  }
  return kExitValidation;
}
