#include "dampsim/run_config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dampsim/errors.hpp"

namespace dampsim {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::pair<double, double> window_pair(const std::vector<double>& v, const std::string& key) {
  if (v.size() != 2) throw ValidationError(key + " expects two comma-separated numbers");
  return {v[0], v[1]};
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text) {
  KeyValueFile e;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("line " + std::to_string(line) + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ValidationError("line " + std::to_string(line) + ": empty key");
    if (e.values_.count(key)) {
      throw ValidationError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    e.values_[key] = {value, line};
  }
  return e;
}

bool KeyValueFile::has(const std::string& key) const { return values_.count(key) > 0; }

const std::pair<std::string, int>& KeyValueFile::entry(const std::string& key) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError("missing required key '" + key + "'");
  used_.insert(key);
  return it->second;
}

std::string KeyValueFile::text(const std::string& key) { return entry(key).first; }

double KeyValueFile::parse_double(const std::string& v, const std::string& key, int line) {
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(x)) {
    throw ValidationError("line " + std::to_string(line) + ": " + key +
                          " expects a finite number, got '" + v + "'");
  }
  return x;
}

double KeyValueFile::number(const std::string& key) {
  const auto& [v, line] = entry(key);
  return parse_double(v, key, line);
}

long KeyValueFile::integer(const std::string& key) {
  const auto& [v, line] = entry(key);
  char* end = nullptr;
  errno = 0;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno != 0) {
    throw ValidationError("line " + std::to_string(line) + ": " + key +
                          " expects an integer, got '" + v + "'");
  }
  return x;
}

bool KeyValueFile::boolean(const std::string& key) {
  const auto& [v, line] = entry(key);
  if (v == "true") return true;
  if (v == "false") return false;
  throw ValidationError("line " + std::to_string(line) + ": " + key +
                        " expects true or false, got '" + v + "'");
}

std::vector<double> KeyValueFile::list(const std::string& key) {
  const auto& [v, line] = entry(key);
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item), key, line));
  return out;
}

void KeyValueFile::reject_unused() const {
  for (const auto& [key, entry] : values_) {
    if (!used_.count(key)) {
      throw ValidationError("line " + std::to_string(entry.second) + ": unknown key '" + key + "'");
    }
  }
}

RunConfig parse_config(const std::string& text) {
  auto e = KeyValueFile::parse(text);

  const char* required[] = {"grid.dim",   "grid.points",   "grid.half_length", "model",
                            "time.dt",    "time.t_end",    "data.amplitude",   "data.width"};
  for (const char* key : required) {
    if (!e.has(key)) throw ValidationError(std::string("config is missing required key '") + key + "'");
  }

  RunConfig c;
  c.grid.dim = static_cast<int>(e.integer("grid.dim"));
  c.grid.points = static_cast<int>(e.integer("grid.points"));
  c.grid.half_length = e.number("grid.half_length");
  if (e.has("grid.sigma")) c.grid.sigma = e.number("grid.sigma");
  c.model = parse_model(e.text("model"));
  if (e.has("p")) {
    c.p = e.number("p");
  } else if (c.model != ModelId::Linear) {
    throw ValidationError("config is missing required key 'p' for a semilinear model");
  }
  if (e.has("data.shape")) c.data.shape = e.text("data.shape");
  c.data.amplitude = e.number("data.amplitude");
  c.data.width = e.number("data.width");
  if (e.has("data.center")) c.data.center = e.list("data.center");
  if (e.has("data.u0_zero")) c.data.u0_zero = e.boolean("data.u0_zero");
  if (e.has("data.u0_amplitude")) c.data.u0_amplitude = e.number("data.u0_amplitude");
  c.time.dt = e.number("time.dt");
  c.time.t_end = e.number("time.t_end");
  if (e.has("time.sample_every")) c.time.sample_every = static_cast<int>(e.integer("time.sample_every"));
  if (e.has("checks.rates")) c.checks.rates = e.boolean("checks.rates");
  if (e.has("checks.rate_window")) c.checks.rate_window = window_pair(e.list("checks.rate_window"), "checks.rate_window");
  if (e.has("checks.exp_window")) c.checks.exp_window = window_pair(e.list("checks.exp_window"), "checks.exp_window");
  if (e.has("checks.rate_tolerance")) c.checks.rate_tolerance = e.number("checks.rate_tolerance");
  if (e.has("checks.exp_tolerance")) c.checks.exp_tolerance = e.number("checks.exp_tolerance");
  if (e.has("checks.identities")) c.checks.identities = e.boolean("checks.identities");
  if (e.has("checks.inequalities")) c.checks.inequalities = e.boolean("checks.inequalities");
  if (e.has("seed")) {
    const long s = e.integer("seed");
    if (s < 0) throw ValidationError("seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (e.has("output_dir")) c.output_dir = e.text("output_dir");
  e.reject_unused();
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void RunConfig::validate() const {
  grid.validate();
  if (data.shape != "gaussian" && data.shape != "gaussian_dx") {
    throw ValidationError("data.shape must be gaussian or gaussian_dx (got '" + data.shape + "')");
  }
  if (!(data.amplitude > 0.0)) throw ValidationError("data.amplitude must be > 0");
  if (!(data.width > 0.0)) throw ValidationError("data.width must be > 0");
  if (!data.center.empty() && data.center.size() != static_cast<std::size_t>(grid.dim)) {
    throw ValidationError("data.center must list grid.dim coordinates");
  }
  if (!(time.dt > 0.0)) throw ValidationError("time.dt must be > 0");
  if (!(time.t_end > 0.0)) throw ValidationError("time.t_end must be > 0");
  if (time.dt > time.t_end) throw ValidationError("time.dt must not exceed time.t_end");
  if (time.sample_every < 1) throw ValidationError("time.sample_every must be >= 1");
  if (!(checks.rate_tolerance >= 0.0) || !(checks.exp_tolerance >= 0.0)) {
    throw ValidationError("rate tolerances must be >= 0");
  }
  if (output_dir.empty()) throw ValidationError("output_dir must not be empty");
  // Admissibility of (n, sigma, p) for the model; throws with the violated conditions.
  theorem_rate_table(grid.dim, grid.sigma, p, model);
}

std::pair<RealField, RealField> seed_data(const RunConfig& config) {
  config.validate();
  const auto& grid = config.grid;
  const auto& d = config.data;
  const double efold = std::sqrt(2.0) * d.width;
  if (efold / grid.spacing() < 6.0) {
    std::ostringstream os;
    os << "data.width = " << d.width << " is under-resolved: " << efold / grid.spacing()
       << " grid points per e-folding length (need >= 6)";
    throw ValidationError(os.str());
  }
  std::vector<double> center = d.center;
  center.resize(static_cast<std::size_t>(grid.dim), 0.0);

  RealField profile(grid);
  for (std::size_t flat = 0; flat < profile.size(); ++flat) {
    const auto idx = grid.unflatten(flat);
    double r2 = 0.0;
    for (int k = 0; k < grid.dim; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const double x = grid.coordinate(idx[kk]) - center[kk];
      r2 += x * x;
    }
    double v = std::exp(-r2 / (2.0 * d.width * d.width));
    if (d.shape == "gaussian_dx") v *= (grid.coordinate(idx[0]) - center[0]) / d.width;
    profile[flat] = v;
  }
  RealField u1 = profile;
  for (auto& v : u1.values()) v *= d.amplitude;
  RealField u0(grid);
  if (!d.u0_zero) {
    u0 = profile;
    for (auto& v : u0.values()) v *= d.u0_amplitude;
  }
  return {u0, u1};
}

}  // namespace dampsim
