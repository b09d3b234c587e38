#include "cfmimo/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cfmimo/errors.hpp"

namespace cfmimo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty list element in '" + value + "'");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& s) {
  std::uint64_t v = 0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::size_t to_count(const std::string& key, const std::string& s) { return static_cast<std::size_t>(to_u64(key, s)); }

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

}  // namespace

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::equal: return "equal";
    case Scheme::ipce: return "ipce";
    case Scheme::pce: return "pce";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "pce") return Scheme::pce;
  if (name == "ipce") return Scheme::ipce;
  if (name == "equal") return Scheme::equal;
  throw ConfigError("unknown scheme '" + name + "' (expected pce, ipce or equal)");
}

std::string QosRule::label() const {
  switch (kind) {
    case Kind::equal_power_rate: return "equal-power-rate";
    case Kind::per_user: return "per-user";
    case Kind::uniform: {
      std::ostringstream os;
      os << value;
      return os.str();
    }
  }
  return "unknown";
}

PowerParams ExperimentConfig::power_params(std::size_t m, double rho_f_watts) const {
  const auto mi = static_cast<Eigen::Index>(m);
  PowerParams p;
  p.bandwidth_hz = bandwidth_hz;
  p.n0_watts = noise_power_watts(bandwidth_hz, noise_figure_db);
  p.rho_f = rho_f_watts / p.n0_watts;
  p.rho_r = rho_r_w / p.n0_watts;
  p.tau = tau;
  p.tau_u = pilot_length();
  p.alpha = Eigen::VectorXd::Constant(mi, 1.0 / drain_efficiency);
  p.p_cir = p_cir_w;
  p.p_cm = Eigen::VectorXd::Constant(mi, p_cm_w);
  p.p_0m = Eigen::VectorXd::Constant(mi, p_0m_w);
  p.p_btm = Eigen::VectorXd::Constant(mi, p_bt_w_per_gbps * 1e-9);
  return p;
}

void ExperimentConfig::validate() const {
  if (m_list.empty()) throw ConfigError("M: list must not be empty");
  if (rho_f_w.empty()) throw ConfigError("rho_f_w: list must not be empty");
  if (schemes.empty()) throw ConfigError("schemes: list must not be empty");
  if (k == 0) throw ConfigError("K must be >= 1");
  for (auto m : m_list) {
    if (m < k) throw ConfigError("M=" + std::to_string(m) + " is smaller than K=" + std::to_string(k));
  }
  for (double r : rho_f_w) {
    if (!(r > 0.0)) throw ConfigError("rho_f_w: powers must be positive");
  }
  if (!(rho_r_w > 0.0)) throw ConfigError("rho_r_w must be positive");
  if (!(area_side_km > 0.0)) throw ConfigError("area_side_km must be positive");
  if (sigma_shad_db < 0.0 || d_min_km < 0.0) throw ConfigError("sigma_shad_db and d_min_km must be >= 0");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth_hz must be positive");
  if (pilot_length() < k) throw ConfigError("tau_u must be >= K");
  if (tau <= pilot_length()) throw ConfigError("tau must exceed tau_u");
  if (!(drain_efficiency > 0.0)) throw ConfigError("drain_efficiency must be positive");
  if (p_cm_w < 0.0 || p_cir_w < 0.0 || p_0m_w < 0.0 || p_bt_w_per_gbps < 0.0) {
    throw ConfigError("power constants must be >= 0");
  }
  if (n_topologies == 0) throw ConfigError("n_topologies must be >= 1");
  if (n_mc == 0) throw ConfigError("n_mc must be >= 1");
  if (qos.kind == QosRule::Kind::uniform && qos.value < 0.0) throw ConfigError("qos must be >= 0");
  if (qos.kind == QosRule::Kind::per_user) {
    if (qos.per_user.size() != k) throw ConfigError("qos: per-user list needs exactly K entries");
    if (std::any_of(qos.per_user.begin(), qos.per_user.end(), [](double r) { return r < 0.0; })) {
      throw ConfigError("qos must be >= 0");
    }
  }
}

ExperimentConfig ExperimentConfig::ap_sweep_defaults() {
  ExperimentConfig c;
  c.m_list = {20, 40, 60, 80, 100, 120};
  c.rho_f_w = {0.2};
  c.qos.kind = QosRule::Kind::equal_power_rate;
  return c;
}

ExperimentConfig ExperimentConfig::power_sweep_defaults() {
  ExperimentConfig c;
  c.m_list = {100};
  c.rho_f_w = {0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2};
  c.qos.kind = QosRule::Kind::uniform;
  c.qos.value = 1.0;
  return c;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "M") {
    cfg.m_list.clear();
    for (const auto& s : split_list(value)) cfg.m_list.push_back(to_count(key, s));
  } else if (key == "K") {
    cfg.k = to_count(key, value);
  } else if (key == "area_side_km") {
    cfg.area_side_km = to_double(key, value);
  } else if (key == "sigma_shad_db") {
    cfg.sigma_shad_db = to_double(key, value);
  } else if (key == "d_min_km") {
    cfg.d_min_km = to_double(key, value);
  } else if (key == "carrier_ghz") {
    cfg.carrier_ghz = to_double(key, value);
  } else if (key == "bandwidth_hz") {
    cfg.bandwidth_hz = to_double(key, value);
  } else if (key == "noise_figure_db") {
    cfg.noise_figure_db = to_double(key, value);
  } else if (key == "tau") {
    cfg.tau = to_count(key, value);
  } else if (key == "tau_u") {
    if (value == "K") {
      cfg.tau_u.reset();
    } else {
      cfg.tau_u = to_count(key, value);
    }
  } else if (key == "rho_f_w") {
    cfg.rho_f_w.clear();
    for (const auto& s : split_list(value)) cfg.rho_f_w.push_back(to_double(key, s));
  } else if (key == "rho_r_w") {
    cfg.rho_r_w = to_double(key, value);
  } else if (key == "qos") {
    if (value == "equal-power-rate") {
      cfg.qos = {QosRule::Kind::equal_power_rate, 0.0, {}};
    } else {
      const auto items = split_list(value);
      if (items.size() == 1) {
        cfg.qos = {QosRule::Kind::uniform, to_double(key, items[0]), {}};
      } else {
        cfg.qos = {QosRule::Kind::per_user, 0.0, {}};
        for (const auto& s : items) cfg.qos.per_user.push_back(to_double(key, s));
      }
    }
  } else if (key == "drain_efficiency") {
    cfg.drain_efficiency = to_double(key, value);
  } else if (key == "p_cm_w") {
    cfg.p_cm_w = to_double(key, value);
  } else if (key == "p_cir_w") {
    cfg.p_cir_w = to_double(key, value);
  } else if (key == "p_0m_w") {
    cfg.p_0m_w = to_double(key, value);
  } else if (key == "p_bt_w_per_gbps") {
    cfg.p_bt_w_per_gbps = to_double(key, value);
  } else if (key == "n_topologies") {
    cfg.n_topologies = to_count(key, value);
  } else if (key == "n_mc") {
    cfg.n_mc = to_count(key, value);
  } else if (key == "seed") {
    cfg.seed = to_u64(key, value);
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "schemes") {
    cfg.schemes.clear();
    for (const auto& s : split_list(value)) cfg.schemes.push_back(parse_scheme(s));
  } else if (key == "record_timing") {
    cfg.record_timing = to_bool(key, value);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    }
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    try {
      apply_setting(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

}  // namespace cfmimo
