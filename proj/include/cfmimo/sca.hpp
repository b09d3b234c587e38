#pragma once

// Path-following (successive convex approximation) solver for the
// energy-efficiency problem under imperfect CSI. The decision variable of
// the inner programs is the amplitude v_k with eta_k = eta_scale * v_k^2.
//
// Each iteration replaces ln(1 + x_k) / t by the tangent bound
// a_k - b_k / x_k - c_k t of the jointly convex ln(1 + 1/y) / t, bounds the
// interference ratios with the convexity of x^2 / t, and solves the
// resulting concave program with the barrier method.

#include <optional>
#include <string>

#include "cfmimo/barrier_solver.hpp"
#include "cfmimo/power_model.hpp"
#include "cfmimo/solve_report.hpp"
#include "cfmimo/zf_statistics.hpp"

namespace cfmimo {

inline constexpr double kScaAmplitudeFloor = 1e-6;

struct Surrogate {
  // problem data in normalized units
  double eta_scale = 1.0;
  double rho = 0.0;
  Eigen::MatrixXd gamma;
  Eigen::VectorXd weights;
  double fixed_power = 0.0;

  Eigen::VectorXd amplitude;  // expansion point
  Eigen::VectorXd x;          // per-user SINR at the expansion point
  double t = 0.0;             // reduced power at the expansion point, W
  Eigen::VectorXd a, b, c;
  /// Coefficient of v_k^2 produced by the interference-ratio bound:
  /// b_k sum_i gamma_ki v_i^2 / v_k^4 at the expansion point.
  Eigen::VectorXd e;

  Eigen::VectorXd amplitude_of(const PowerAllocation& eta) const { return (eta.eta / eta_scale).cwiseSqrt(); }
  PowerAllocation allocation_of(const Eigen::VectorXd& v) const { return {eta_scale * v.cwiseAbs2()}; }
};

/// Throws ParameterError if any amplitude at eta_n is at or below floor.
Surrogate build_surrogate(const PowerAllocation& eta_n, const ZfStatistics& zf, const PowerParams& params,
                          double floor = kScaAmplitudeFloor);

/// F = sum_k ln(1 + x_k) / t with t the reduced power; B/ln2 * prelog * F is
/// the reduced energy-efficiency ratio.
double sca_objective(const PowerAllocation& eta, const ZfStatistics& zf, const PowerParams& params);
double sca_objective(const Surrogate& s, const Eigen::VectorXd& amplitude);

/// The surrogate F^(n) exactly as constructed from the three bounds.
double surrogate_value(const Surrogate& s, const Eigen::VectorXd& amplitude);

/// F^(n) with the positive v_k^2 term replaced by its tangent, which makes
/// it concave in v > 0. Equal to F^(n) at the expansion point.
class ConcaveSurrogate final : public ConcaveObjective {
 public:
  explicit ConcaveSurrogate(Surrogate s);

  double evaluate(const Eigen::VectorXd& v, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const override;
  std::string name() const override { return "sca-surrogate"; }
  std::optional<std::string> convex_term(const Eigen::VectorXd& v, const Eigen::VectorXd& d) const override;

  const Surrogate& surrogate() const { return s_; }

 private:
  Surrogate s_;
  double c_sum_;
};

struct ScaOptions {
  double tol = 1e-6;
  int max_iter = 50;
  double floor = kScaAmplitudeFloor;
  double ascent_tol = 1e-8;
  BarrierOptions inner;
};

struct ScaStep {
  PowerAllocation allocation;
  KktReport report;
  bool unchanged = false;
};

/// Maximizes the concave surrogate subject to the tangent-convexified QoS
/// rows, exact per-AP rows sum_k theta_mk eta_k <= 1 and the floor.
ScaStep sca_step(const Surrogate& s, const ZfStatistics& zf, const PowerParams& params, const QosSpec& qos,
                 const ScaOptions& options = {});

SolveResult solve_ipce(const ZfStatistics& zf, const PowerParams& params, const QosSpec& qos,
                       const ScaOptions& options = {});

}  // namespace cfmimo
