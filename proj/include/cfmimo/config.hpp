#pragma once

// Flat key=value experiment configuration. Lists are comma separated,
// '#' starts a comment, unknown or repeated keys are errors.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "cfmimo/power_model.hpp"

namespace cfmimo {

enum class Scheme { equal, ipce, pce };

const char* to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

struct QosRule {
  enum class Kind { uniform, per_user, equal_power_rate };
  Kind kind = Kind::uniform;
  double value = 0.0;
  std::vector<double> per_user;

  /// Label written to the qos_rule CSV column.
  std::string label() const;
};

struct ExperimentConfig {
  std::vector<std::size_t> m_list{100};
  std::size_t k = 16;
  double area_side_km = 1.0;
  double sigma_shad_db = 8.0;
  double d_min_km = 0.01;
  double carrier_ghz = 1.9;  // informational; the path-loss law has it built in
  double bandwidth_hz = 20e6;
  double noise_figure_db = 9.0;
  std::size_t tau = 200;
  std::optional<std::size_t> tau_u;  // nullopt: tau_u = K
  std::vector<double> rho_f_w{0.2};
  double rho_r_w = 0.1;
  QosRule qos;
  double drain_efficiency = 0.388;
  double p_cm_w = 0.2;
  double p_cir_w = 9.0;
  double p_0m_w = 0.2;
  double p_bt_w_per_gbps = 0.25;
  std::size_t n_topologies = 30;
  std::size_t n_mc = 1000;
  std::uint64_t seed = 1;
  std::string out = "results.csv";
  std::vector<Scheme> schemes{Scheme::pce, Scheme::ipce, Scheme::equal};
  bool record_timing = false;

  std::size_t pilot_length() const { return tau_u.value_or(k); }

  /// Power constants for an M-AP deployment at the given AP power.
  PowerParams power_params(std::size_t m, double rho_f_watts) const;

  /// Throws ConfigError on empty lists, non-positive powers, M < K,
  /// tau_u < K or tau <= tau_u.
  void validate() const;

  /// Sweep over M in {20, ..., 120} at 0.2 W with QoS tied to the
  /// equal-power rates.
  static ExperimentConfig ap_sweep_defaults();
  /// Sweep over rho_f in {0.2, ..., 2.2} W at M = 100 with a 1 bit/s/Hz floor.
  static ExperimentConfig power_sweep_defaults();
};

/// Applies key=value lines on top of base. Throws ConfigError.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Applies a single key=value assignment; exposed for CLI overrides.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

}  // namespace cfmimo
