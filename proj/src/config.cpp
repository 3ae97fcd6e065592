#include "sns/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "sns/solver.hpp"

namespace sns {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open config file");
  KeyValueConfig cfg;
  cfg.path_ = path;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    if (cfg.values_.count(key))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    cfg.values_[key] = val;
    cfg.lines_[key] = lineno;
  }
  return cfg;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    fail(key, "not a number: '" + it->second + "'");
  }
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    fail(key, "not an integer: '" + it->second + "'");
  }
}

std::string KeyValueConfig::require_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(path_ + ": missing required key '" + key + "'");
  return it->second;
}

int KeyValueConfig::line_of(const std::string& key) const {
  auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

void KeyValueConfig::fail(const std::string& key, const std::string& msg) const {
  throw ConfigError(path_ + ":" + std::to_string(line_of(key)) + ": key '" + key + "': " + msg);
}

SolverConfig load_solver_config(const std::string& path) {
  const KeyValueConfig kv = KeyValueConfig::parse_file(path);

  static const std::set<std::string> known = {
      "n",          "seed",       "dt",        "t_end",      "kappa",       "a",
      "zeta.mode",  "zeta.sigma", "zeta.theta", "zeta.path", "ceiling",     "out_dir",
      "noise",
      "dealias",    "cadence",    "snapshot_every",          "dt_noise",    "u0.mode",
      "u0.norm",    "u0.decay",   "u0.amplitude"};
  for (const auto& [key, value] : kv.raw()) {
    (void)value;
    if (!known.count(key)) kv.fail(key, "unknown key");
  }

  SolverConfig cfg;
  cfg.n = static_cast<int>(kv.get_int("n", 0));
  if (!kv.has("n")) throw ConfigError(path + ": missing required key 'n'");
  if (cfg.n < 4 || cfg.n % 2 != 0) kv.fail("n", "must be even and >= 4");
  if (!kv.has("seed")) throw ConfigError(path + ": missing required key 'seed'");
  cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed", 0));

  cfg.dt = kv.get_double("dt", 5e-4);
  if (cfg.dt <= 0.0) kv.fail("dt", "must be positive");
  cfg.t_end = kv.get_double("t_end", 2.0);
  if (cfg.t_end < 0.0) kv.fail("t_end", "must be nonnegative");
  cfg.kappa = kv.get_double("kappa", 0.1);
  if (cfg.kappa <= 0.0 || cfg.kappa >= 0.5) kv.fail("kappa", "must lie in (0, 0.5)");
  cfg.a = kv.get_double("a", 3.0);
  if (cfg.a <= 2.0 || cfg.a > 3.0) kv.fail("a", "must lie in (2, 3]");

  const std::string zmode = kv.get_string("zeta.mode", "spectral");
  if (zmode == "off") {
    cfg.zeta.mode = ZetaSpec::Mode::Off;
  } else if (zmode == "spectral") {
    cfg.zeta.mode = ZetaSpec::Mode::Spectral;
  } else if (zmode == "deterministic") {
    cfg.zeta.mode = ZetaSpec::Mode::Deterministic;
  } else {
    kv.fail("zeta.mode", "expected off, spectral or deterministic");
  }
  cfg.zeta.sigma = kv.get_double("zeta.sigma", 1.0);
  if (cfg.zeta.sigma < 0.0) kv.fail("zeta.sigma", "must be nonnegative");
  cfg.zeta.theta = kv.get_double("zeta.theta", 0.5);
  if (cfg.zeta.theta <= 0.0) kv.fail("zeta.theta", "must be positive");
  cfg.zeta.path = kv.get_string("zeta.path", "");
  if (cfg.zeta.mode == ZetaSpec::Mode::Deterministic && cfg.zeta.path.empty())
    kv.fail("zeta.mode", "deterministic mode requires zeta.path");

  const std::string umode = kv.get_string("u0.mode", "random");
  if (umode == "zero") {
    cfg.u0.mode = U0Spec::Mode::Zero;
  } else if (umode == "shear") {
    cfg.u0.mode = U0Spec::Mode::Shear;
  } else if (umode == "random") {
    cfg.u0.mode = U0Spec::Mode::Random;
  } else {
    kv.fail("u0.mode", "expected zero, shear or random");
  }
  cfg.u0.norm = kv.get_double("u0.norm", 0.5);
  if (cfg.u0.norm < 0.0) kv.fail("u0.norm", "must be nonnegative");
  cfg.u0.decay = kv.get_double("u0.decay", 2.0);
  cfg.u0.amplitude = kv.get_double("u0.amplitude", 1.0);

  cfg.ceiling = kv.get_double("ceiling", 1e6);
  if (cfg.ceiling <= 0.0) kv.fail("ceiling", "must be positive");
  cfg.dealias = kv.get_int("dealias", 1) != 0;
  cfg.noise_on = kv.get_int("noise", 1) != 0;
  cfg.cadence = static_cast<int>(kv.get_int("cadence", 10));
  if (cfg.cadence < 1) kv.fail("cadence", "must be >= 1");
  cfg.snapshot_every = static_cast<int>(kv.get_int("snapshot_every", 0));
  if (cfg.snapshot_every < 0) kv.fail("snapshot_every", "must be >= 0");
  cfg.dt_noise = kv.get_double("dt_noise", 0.0);
  if (cfg.dt_noise < 0.0) kv.fail("dt_noise", "must be nonnegative");
  if (cfg.dt_noise > 0.0) {
    const double ratio = cfg.dt / cfg.dt_noise;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0 - 1e-12)
      kv.fail("dt_noise", "dt must be an integer multiple of dt_noise");
  }
  cfg.out_dir = kv.get_string("out_dir", "sns_out");
  return cfg;
}

}  // namespace sns
