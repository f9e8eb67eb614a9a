#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numbers>
#include <sstream>

namespace rdlab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_plain(const std::string& s) {
  if (s == "pi") return std::numbers::pi;
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError("not a number: '" + s + "'");
  return v;
}

}  // namespace

double parse_number(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError("empty number");
  if (const auto star = s.find('*'); star != std::string::npos) {
    return parse_plain(trim(s.substr(0, star))) * parse_plain(trim(s.substr(star + 1)));
  }
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    return parse_plain(trim(s.substr(0, slash))) / parse_plain(trim(s.substr(slash + 1)));
  }
  return parse_plain(s);
}

const std::map<std::string, std::string>& Config::defaults() {
  static const std::map<std::string, std::string> table = {
      {"seed", "0"},
      {"domain.dim", "1"},
      {"domain.lengths", "pi"},
      {"domain.resolution", "63"},
      {"nonlinearity.family", "cubic_chafee_infante"},
      {"nonlinearity.params", "2"},
      {"forcing.profile", "zero"},
      {"forcing.amplitude", "0"},
      {"forcing.s", "2"},
      {"solver.dt", "0.01"},
      {"solver.horizon", "10"},
      {"solver.scheme", "etd2rk"},
      {"solver.stiffness_cap", "0.1"},
      {"initial.profile", "random"},
      {"initial.l2", "1"},
      {"initial.decay", "1"},
      {"initial.max_mode", "16"},
      {"output.norm_orders", "2,4,8,16,32,64"},
      {"output.snapshot_stride", "100"},
      {"ensemble.size", "40"},
      {"ensemble.held_out", "10"},
      {"ensemble.l2_min", "1"},
      {"ensemble.l2_max", "1000"},
      {"ensemble.horizon", "4"},
      {"ladder.t1", "1"},
      {"ladder.tau", "1"},
      {"ladder.D_exp", "1"},
      {"ladder.m0", "2"},
      {"ladder.m_max", "64"},
      {"ladder.floor", "1"},
      {"equilibria.seed_count", "6"},
      {"equilibria.max_mode", "4"},
      {"equilibria.spectrum_count", "6"},
      {"structure.ensemble", "20"},
      {"structure.horizon", "30"},
      {"structure.window_start", "10"},
      {"structure.window_stride", "0.1"},
      {"structure.small_fraction", "0.75"},
      {"structure.small_norm", "0.001"},
      {"structure.large_norm", "20"},
      {"structure.spacing", "0.001"},
      {"structure.manifold_amplitude", "0.0001"},
      {"structure.manifold_horizon", "40"},
      {"structure.limit_tol", "1e-6"},
      {"structure.undecided_quota", "0"},
      {"lipschitz.samples", "10000"},
      {"lipschitz.pairs", "100"},
      {"lipschitz.t_max", "2"},
      {"branching.scales", "1e-4,1e-5,1e-6,1e-7"},
      {"branching.ensemble", "4"},
      {"branching.horizon", "2"},
      {"dimension.t_min", "0.001"},
      {"dimension.t_max", "10"},
      {"dimension.t_count", "400"},
      {"dimension.N_max", "5000"},
      {"dimension.spectrum_count", "20000"},
      {"dimension.alpha_slack", "1"},
      {"dimension.projection_modes", "8"},
      {"dimension.box_counting", "true"},
  };
  return table;
}

Config::Config() : values_(defaults()) {}

void Config::set(const std::string& key, const std::string& value, const std::string& where) {
  if (!defaults().contains(key)) {
    throw ConfigError(where + (where.empty() ? "" : ": ") + "unknown key '" + key + "'");
  }
  values_[key] = value;
}

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(number);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key");
    cfg.set(key, value, where);
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse(in, path);
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "': expected key=value");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), "override");
}

const std::string& Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
  return it->second;
}

double Config::number(const std::string& key) const {
  try {
    return parse_number(raw(key));
  } catch (const ConfigError& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

std::int64_t Config::integer(const std::string& key) const {
  const double v = number(key);
  if (v != static_cast<double>(static_cast<std::int64_t>(v))) {
    throw ConfigError("key '" + key + "': expected an integer");
  }
  return static_cast<std::int64_t>(v);
}

std::uint64_t Config::unsigned_integer(const std::string& key) const {
  const std::string& s = raw(key);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("key '" + key + "': expected an unsigned integer");
  }
  return v;
}

std::string Config::text(const std::string& key) const { return raw(key); }

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(raw(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_number(item));
    } catch (const ConfigError& e) {
      throw ConfigError("key '" + key + "': " + e.what());
    }
  }
  return out;
}

bool Config::flag(const std::string& key) const {
  std::string s = raw(key);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("key '" + key + "': expected a boolean");
}

}  // namespace rdlab::cli
