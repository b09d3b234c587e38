#pragma once

// The power coefficients live around 1 / max_m sum_k theta_mk, which for
// realistic path loss is 1e-14 .. 1e-10. The solvers work on
// s = eta / eta_scale so that the equal-power point sits at s = 1 and all
// barrier terms are O(1).

#include <Eigen/Dense>

#include "cfmimo/power_model.hpp"
#include "cfmimo/zf_statistics.hpp"

namespace cfmimo {

struct NormalizedProblem {
  double eta_scale = 1.0;
  Eigen::MatrixXd theta;        // theta * eta_scale, M x K
  Eigen::MatrixXd gamma;        // unchanged, K x K
  double rho = 0.0;             // rho_f * eta_scale
  Eigen::VectorXd weights;      // watts per unit s
  double fixed_power = 0.0;     // watts
  double prelog = 1.0;
  Eigen::VectorXd sinr_target;  // 2^{r_tilde} - 1 per user

  static NormalizedProblem make(const ZfStatistics& zf, const PowerParams& params, const QosSpec& qos);

  Eigen::Index num_users() const { return theta.cols(); }
  Eigen::Index num_aps() const { return theta.rows(); }

  PowerAllocation to_allocation(const Eigen::VectorXd& s) const { return {eta_scale * s}; }
  Eigen::VectorXd from_allocation(const PowerAllocation& eta) const { return eta.eta / eta_scale; }

  /// Reduced power (no traffic term) in watts.
  double reduced_power(const Eigen::VectorXd& s) const { return weights.dot(s) + fixed_power; }
};

}  // namespace cfmimo
