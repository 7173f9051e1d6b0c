#include "dynkf/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "dynkf/kitti_io.hpp"

namespace dynkf {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* first = value.data();
  const auto* last = first + value.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError("config key '" + key + "': invalid value '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "off" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

std::string fmt_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"model_order", [](RunConfig& c, const std::string& v) { c.model_order = parse_number<int>("model_order", v); }},
      {"dynamics_enabled", [](RunConfig& c, const std::string& v) { c.dynamics_enabled = parse_bool("dynamics_enabled", v); }},
      {"transition_window", [](RunConfig& c, const std::string& v) { c.transition_window = parse_number<int>("transition_window", v); }},
      {"smoothing_window", [](RunConfig& c, const std::string& v) { c.smoothing_window = parse_number<int>("smoothing_window", v); }},
      {"dynamics_factor_v", [](RunConfig& c, const std::string& v) { c.dynamics_factor_v = parse_number<double>("dynamics_factor_v", v); }},
      {"dynamics_factor_a", [](RunConfig& c, const std::string& v) { c.dynamics_factor_a = parse_number<double>("dynamics_factor_a", v); }},
      {"dynamics_factor_j", [](RunConfig& c, const std::string& v) { c.dynamics_factor_j = parse_number<double>("dynamics_factor_j", v); }},
      {"process_noise", [](RunConfig& c, const std::string& v) { c.process_noise = parse_number<double>("process_noise", v); }},
      {"sigma_meas", [](RunConfig& c, const std::string& v) { c.sigma_meas = parse_number<double>("sigma_meas", v); }},
      {"gate_distance", [](RunConfig& c, const std::string& v) { c.gate_distance = parse_number<double>("gate_distance", v); }},
      {"min_hits", [](RunConfig& c, const std::string& v) { c.min_hits = parse_number<int>("min_hits", v); }},
      {"max_misses", [](RunConfig& c, const std::string& v) { c.max_misses = parse_number<int>("max_misses", v); }},
      {"dt", [](RunConfig& c, const std::string& v) { c.dt = parse_number<double>("dt", v); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>("seed", v); }},
      {"cold_start", [](RunConfig& c, const std::string& v) { c.cold_start = v; }},
      {"covariance", [](RunConfig& c, const std::string& v) { c.covariance = v; }},
  };
  return table;
}

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
  for (const auto& [name, setter] : setters()) {
    if (name == key) {
      setter(c, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("config key '" + key + "': " + what);
}

}  // namespace

void RunConfig::validate() const {
  require(model_order >= 1 && model_order <= 3, "model_order", "must be 1, 2 or 3");
  require(transition_window >= 3, "transition_window", "must be >= 3");
  require(smoothing_window >= 1, "smoothing_window", "must be >= 1");
  require(dynamics_factor_v > 0.0 && std::isfinite(dynamics_factor_v), "dynamics_factor_v",
          "must be positive");
  require(dynamics_factor_a > 0.0 && std::isfinite(dynamics_factor_a), "dynamics_factor_a",
          "must be positive");
  require(dynamics_factor_j > 0.0 && std::isfinite(dynamics_factor_j), "dynamics_factor_j",
          "must be positive");
  require(process_noise >= 0.0 && std::isfinite(process_noise), "process_noise",
          "must be non-negative");
  require(sigma_meas > 0.0 && std::isfinite(sigma_meas), "sigma_meas", "must be positive");
  require(gate_distance > 0.0 && std::isfinite(gate_distance), "gate_distance",
          "must be positive");
  require(min_hits >= 1, "min_hits", "must be >= 1");
  require(max_misses >= 0, "max_misses", "must be >= 0");
  require(dt > 0.0 && std::isfinite(dt), "dt", "must be positive");
  require(cold_start == "cv" || cold_start == "identity", "cold_start",
          "must be 'cv' or 'identity'");
  require(covariance == "transition" || covariance == "weighted", "covariance",
          "must be 'transition' or 'weighted'");
}

TrackerConfig RunConfig::tracker_config() const {
  validate();
  TrackerConfig t;
  t.filter.order = motion_order_from_int(model_order);
  t.filter.variant = dynamics_enabled ? FilterVariant::kDynamic : FilterVariant::kBaseline;
  t.filter.dt = dt;
  t.filter.process_noise = process_noise;
  t.filter.sigma_meas = sigma_meas;
  t.filter.transition_window = transition_window;
  t.filter.smoothing_window = smoothing_window;
  t.filter.factors = DynamicsFactors{dynamics_factor_v, dynamics_factor_a, dynamics_factor_j};
  t.filter.cold_start = cold_start == "identity" ? WeightVector{{1.0, 1.0, 1.0, 1.0}}
                                                 : WeightVector{{1.0, 1.0, 0.0, 0.0}};
  t.filter.covariance = covariance == "weighted" ? CovariancePropagation::kWeighted
                                                : CovariancePropagation::kTransition;
  t.gate_distance = gate_distance;
  t.min_hits = min_hits;
  t.max_misses = max_misses;
  return t;
}

RunConfig parse_run_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    try {
      set_key(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  base.validate();
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  return parse_run_config(read_text_file(path), std::move(base));
}

RunConfig apply_overrides(RunConfig base, const std::map<std::string, std::string>& overrides) {
  for (const auto& [k, v] : overrides) set_key(base, k, v);
  base.validate();
  return base;
}

std::string format_run_config(const RunConfig& c) {
  std::ostringstream os;
  os << "model_order = " << c.model_order << "\n"
     << "dynamics_enabled = " << (c.dynamics_enabled ? "true" : "false") << "\n"
     << "transition_window = " << c.transition_window << "\n"
     << "smoothing_window = " << c.smoothing_window << "\n"
     << "dynamics_factor_v = " << fmt_real(c.dynamics_factor_v) << "\n"
     << "dynamics_factor_a = " << fmt_real(c.dynamics_factor_a) << "\n"
     << "dynamics_factor_j = " << fmt_real(c.dynamics_factor_j) << "\n"
     << "process_noise = " << fmt_real(c.process_noise) << "\n"
     << "sigma_meas = " << fmt_real(c.sigma_meas) << "\n"
     << "gate_distance = " << fmt_real(c.gate_distance) << "\n"
     << "min_hits = " << c.min_hits << "\n"
     << "max_misses = " << c.max_misses << "\n"
     << "dt = " << fmt_real(c.dt) << "\n"
     << "seed = " << c.seed << "\n"
     << "cold_start = " << c.cold_start << "\n"
     << "covariance = " << c.covariance << "\n";
  return os.str();
}

}  // namespace dynkf
