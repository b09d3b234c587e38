#pragma once

// Energy-efficiency maximization under perfect channel estimation. The
// objective is a ratio of a concave sum-rate and an affine power, so
// Dinkelbach's parametric method finds the global optimum through a
// sequence of concave programs.

#include "cfmimo/barrier_solver.hpp"
#include "cfmimo/power_model.hpp"
#include "cfmimo/solve_report.hpp"
#include "cfmimo/zf_statistics.hpp"

namespace cfmimo {

struct DinkelbachOptions {
  double tol = 1e-6;
  int max_outer = 50;
  /// Include the traffic-dependent backhaul power in the parametric
  /// subtraction. Off by default: the traffic term is constant per unit of
  /// throughput and does not move the maximizer.
  bool include_traffic_power = false;
  BarrierOptions inner;
};

/// gamma in zf is ignored (perfect CSI); theta is used as is.
SolveResult solve_pce(const ZfStatistics& zf, const PowerParams& params, const QosSpec& qos,
                      const DinkelbachOptions& options = {});

/// Parametric objective N(s) - lambda D(s) on the normalized coefficients
/// s = eta / eta_scale, exposed for tests.
class DinkelbachObjective final : public ConcaveObjective {
 public:
  DinkelbachObjective(Eigen::VectorXd weights, double fixed_power, double rho, double prelog, double lambda,
                      double rate_coefficient = 1.0);

  double evaluate(const Eigen::VectorXd& s, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const override;
  std::string name() const override { return "dinkelbach"; }

 private:
  Eigen::VectorXd weights_;
  double fixed_power_;
  double rho_;
  double prelog_;
  double lambda_;
  double rate_coefficient_;
};

}  // namespace cfmimo
