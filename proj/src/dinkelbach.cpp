#include "cfmimo/dinkelbach.hpp"

#include <chrono>
#include <cmath>

#include "cfmimo/feasible_point.hpp"
#include "cfmimo/normalized_problem.hpp"

namespace cfmimo {

using Eigen::Index;
using Eigen::VectorXd;

namespace {

constexpr double kInteriorFloor = 1e-12;
constexpr double kReportZero = 1e-8;

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

DinkelbachObjective::DinkelbachObjective(VectorXd weights, double fixed_power, double rho, double prelog,
                                         double lambda, double rate_coefficient)
    : weights_(std::move(weights)),
      fixed_power_(fixed_power),
      rho_(rho),
      prelog_(prelog),
      lambda_(lambda),
      rate_coefficient_(rate_coefficient) {}

double DinkelbachObjective::evaluate(const VectorXd& s, VectorXd* grad, Eigen::MatrixXd* hess) const {
  const double scale = rate_coefficient_ * prelog_ / std::log(2.0);
  const Eigen::ArrayXd one_plus = 1.0 + rho_ * s.array();
  if (grad) *grad = (scale * rho_ / one_plus).matrix() - lambda_ * weights_;
  if (hess) {
    hess->setZero(s.size(), s.size());
    hess->diagonal() = (-scale * rho_ * rho_ / one_plus.square()).matrix();
  }
  return scale * (rho_ * s.array()).log1p().sum() - lambda_ * (weights_.dot(s) + fixed_power_);
}

SolveResult solve_pce(const ZfStatistics& zf, const PowerParams& params, const QosSpec& qos,
                      const DinkelbachOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  ZfStatistics perfect = zf;
  perfect.gamma.setZero();
  perfect.gamma_se.setZero();

  SolveResult out;
  const Index k = zf.theta.cols();
  out.allocation.eta = VectorXd::Zero(k);

  const auto start = feasible_point(perfect, params, qos, options.inner);
  if (!start) {
    out.report.status = RunStatus::infeasible;
    out.report.wall_ms = elapsed_ms(t_start);
    return out;
  }

  const NormalizedProblem p = NormalizedProblem::make(perfect, params, qos);
  ConstraintSet rows(k);
  for (Index u = 0; u < k; ++u) rows.lower(u) = std::max(p.sinr_target(u) / p.rho, kInteriorFloor);
  for (Index ap = 0; ap < p.num_aps(); ++ap) rows.add_linear(p.theta.row(ap), 1.0);

  const double traffic = params.bandwidth_hz * params.p_btm.sum();  // W per (bit/s/Hz)
  auto numerator = [&](const VectorXd& s) { return p.prelog * (p.rho * s.array()).log1p().sum() / std::log(2.0); };
  auto denominator = [&](const VectorXd& s) {
    const double d = p.reduced_power(s);
    return options.include_traffic_power ? d + traffic * numerator(s) : d;
  };

  VectorXd s = p.from_allocation(*start);
  double lambda = numerator(s) / denominator(s);
  out.report.status = RunStatus::max_iter;

  for (int iter = 0; iter < options.max_outer; ++iter) {
    const double rate_coef = options.include_traffic_power ? 1.0 - lambda * traffic : 1.0;
    const DinkelbachObjective objective(p.weights, p.fixed_power, p.rho, p.prelog, lambda, rate_coef);
    const InnerResult inner = solve_inner(objective, rows, s, options.inner);
    out.report.inner.push_back(inner.report);
    out.report.outer_iterations = iter + 1;
    s = inner.x;
    out.report.lambda.push_back(lambda * params.bandwidth_hz);
    out.report.iterates.push_back(p.to_allocation(s));
    out.report.ee.push_back(energy_efficiency(out.report.iterates.back(), perfect, params).bits_per_joule);
    if (inner.report.status != InnerStatus::converged) {
      out.report.status = RunStatus::inner_failure;
      break;
    }
    const double n = numerator(s);
    const double d = denominator(s);
    if (n - lambda * d <= options.tol * d) {
      out.report.status = RunStatus::converged;
      break;
    }
    lambda = n / d;
  }

  for (Index u = 0; u < k; ++u) {
    if (s(u) < kReportZero && p.sinr_target(u) == 0.0) s(u) = 0.0;
  }
  out.allocation = p.to_allocation(s);
  out.report.wall_ms = elapsed_ms(t_start);
  return out;
}

}  // namespace cfmimo
