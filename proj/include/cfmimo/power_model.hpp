#pragma once

// Rate model, downlink power-consumption model and energy efficiency.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cfmimo {

struct ZfStatistics;

inline constexpr double kBoltzmann = 1.380649e-23;

/// Thermal noise power 290 K * kappa * B * NF in watts.
double noise_power_watts(double bandwidth_hz, double noise_figure_db);

/// System and power-consumption constants. Powers rho_f and rho_r are
/// normalized to the noise power (P_watts / N0), so rho_f * n0_watts is the
/// per-AP transmit budget in watts.
struct PowerParams {
  double bandwidth_hz = 20e6;
  double rho_f = 0.0;
  double rho_r = 0.0;
  double n0_watts = 0.0;
  std::size_t tau = 200;
  std::size_t tau_u = 0;
  Eigen::VectorXd alpha;  // reciprocal PA drain efficiency per AP
  double p_cir = 9.0;
  Eigen::VectorXd p_cm;   // W per AP
  Eigen::VectorXd p_0m;   // W per AP
  Eigen::VectorXd p_btm;  // W per bit/s per AP

  std::size_t num_aps() const { return static_cast<std::size_t>(alpha.size()); }

  /// Training overhead factor 1 - tau_u / tau.
  double prelog() const;

  /// P_cir + sum_m (P_c,m + P_0,m): the part of the consumption that does
  /// not depend on the power coefficients.
  double fixed_power() const;

  /// Watts per unit of eta_i: rho_f N0 sum_m alpha_m theta_mi.
  Eigen::VectorXd transmit_weights(const Eigen::MatrixXd& theta) const;

  /// Throws ParameterError unless tau > tau_u >= k, powers are non-negative
  /// and per-AP vectors have m entries.
  void validate(std::size_t m, std::size_t k) const;
};

/// Constants of the reference scenario: B = 20 MHz, NF = 9 dB,
/// tau = 200, tau_u = k, alpha = 1/0.388, P_c = P_0 = 0.2 W, P_cir = 9 W,
/// P_bt = 0.25 W per Gbit/s.
PowerParams reference_power_params(std::size_t m, std::size_t k, double rho_f_watts = 0.2,
                                   double rho_r_watts = 0.1);

struct PowerAllocation {
  Eigen::VectorXd eta;

  std::size_t size() const { return static_cast<std::size_t>(eta.size()); }
};

/// Per-user spectral-efficiency floors. r_tilde rescales them by the
/// training overhead so they can be compared against the bare log term.
struct QosSpec {
  Eigen::VectorXd r_bar;

  static QosSpec uniform(std::size_t k, double r);
  Eigen::VectorXd r_tilde(const PowerParams& params) const;
  /// 2^{r_tilde} - 1, the SINR each user must reach.
  Eigen::VectorXd sinr_targets(const PowerParams& params) const;
  bool all_zero() const;
};

/// r_k = prelog * log2(1 + rho_f eta_k / (1 + rho_f sum_i gamma_ki eta_i)).
Eigen::VectorXd per_user_rate(const PowerAllocation& eta, const Eigen::MatrixXd& gamma,
                              const PowerParams& params);

double sum_rate(const PowerAllocation& eta, const Eigen::MatrixXd& gamma, const PowerParams& params);

/// Full consumption model, watts, including the traffic-dependent backhaul
/// term driven by sum_rate_bits_per_s.
double total_power(const PowerAllocation& eta, const Eigen::MatrixXd& theta, const PowerParams& params,
                   double sum_rate_bits_per_s);

/// Consumption without the traffic term: transmit power plus fixed_power().
double reduced_power(const PowerAllocation& eta, const Eigen::MatrixXd& theta, const PowerParams& params);

struct EnergyEfficiency {
  double bits_per_joule = 0.0;     // B r / P_total
  double reciprocal_form = 0.0;    // 1 / (P_reduced / (B r) + sum_m P_bt,m)
  double reduced_ratio = 0.0;      // B r / P_reduced
  double throughput_bps = 0.0;     // B r
  double total_power_w = 0.0;
  double reduced_power_w = 0.0;
};

EnergyEfficiency energy_efficiency(const PowerAllocation& eta, const ZfStatistics& zf, const PowerParams& params);

/// Equal coefficients 1 / max_m sum_k theta_mk. Throws ParameterError if
/// every row of theta sums to zero.
PowerAllocation equal_power_allocation(const Eigen::MatrixXd& theta);

struct FeasibilityReport {
  bool feasible = true;
  std::vector<std::size_t> qos_violations;
  std::vector<std::size_t> ap_violations;
  std::vector<std::size_t> negative_entries;
  double max_violation = 0.0;
};

FeasibilityReport check_feasibility(const PowerAllocation& eta, const ZfStatistics& zf, const PowerParams& params,
                                    const QosSpec& qos, double tol = 1e-9);

}  // namespace cfmimo
