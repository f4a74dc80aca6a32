#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dampsim/rate_analysis.hpp"
#include "dampsim/spectral_core.hpp"

namespace dampsim {

/// `key = value` lines; '#' starts a comment. Every accessor marks its key
/// as used so that reject_unused can flag typos.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text);

  bool has(const std::string& key) const;
  std::string text(const std::string& key);
  double number(const std::string& key);
  long integer(const std::string& key);
  bool boolean(const std::string& key);
  /// Comma-separated numbers.
  std::vector<double> list(const std::string& key);
  void reject_unused() const;

 private:
  const std::pair<std::string, int>& entry(const std::string& key);
  static double parse_double(const std::string& v, const std::string& key, int line);

  std::map<std::string, std::pair<std::string, int>> values_;
  std::set<std::string> used_;
};

/// Initial data. `gaussian`: u1 = amplitude exp(-|x - c|^2 / (2 width^2)).
/// `gaussian_dx`: u1 = amplitude ((x_0 - c_0) / width) exp(...), odd along the
/// first axis and therefore mean-zero. u0 is zero unless u0_zero is false, in
/// which case it is the same profile scaled by u0_amplitude.
struct DataSpec {
  std::string shape = "gaussian";
  double amplitude = 1.0;
  double width = 1.0;
  std::vector<double> center;
  bool u0_zero = true;
  double u0_amplitude = 0.0;
};

struct TimeSpec {
  double dt = 0.01;
  double t_end = 1.0;
  int sample_every = 1;
};

struct CheckSpec {
  bool rates = true;
  /// Fit windows for polynomial and exponential rates; t_hi <= 0 means t_end.
  std::pair<double, double> rate_window{10.0, 0.0};
  std::pair<double, double> exp_window{1.0, 0.0};
  double rate_tolerance = 0.1;
  double exp_tolerance = 0.02;
  bool identities = true;
  bool inequalities = false;
};

struct RunConfig {
  GridSpec grid;
  ModelId model = ModelId::Linear;
  double p = 2.0;
  DataSpec data;
  TimeSpec time;
  CheckSpec checks;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  /// Throws ValidationError on any inconsistency, including the
  /// admissibility conditions of the |u|^p model.
  void validate() const;
};

/// Parses the `key = value` format (see README). Unknown keys, duplicate keys
/// and malformed values are errors that name the offending line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// (u0, u1) sampled on the grid. Throws ValidationError when the width is
/// under-resolved (fewer than 6 grid points per e-folding length
/// sqrt(2) width).
std::pair<RealField, RealField> seed_data(const RunConfig& config);

}  // namespace dampsim
