#include "cfmimo/sca.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "cfmimo/errors.hpp"
#include "cfmimo/feasible_point.hpp"
#include "cfmimo/normalized_problem.hpp"

namespace cfmimo {

using Eigen::Index;
using Eigen::VectorXd;

namespace {

constexpr double kReportZero = 1e-8;

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

VectorXd sinr(const Surrogate& s, const VectorXd& v) {
  const VectorXd v2 = v.cwiseAbs2();
  const VectorXd denom = VectorXd::Ones(v.size()) + s.rho * (s.gamma * v2);
  return (s.rho * v2.array() / denom.array()).matrix();
}

double power_at(const Surrogate& s, const VectorXd& v) { return s.weights.dot(v.cwiseAbs2()) + s.fixed_power; }

Surrogate problem_shell(const ZfStatistics& zf, const PowerParams& params) {
  const NormalizedProblem p =
      NormalizedProblem::make(zf, params, QosSpec::uniform(static_cast<std::size_t>(zf.theta.cols()), 0.0));
  Surrogate s;
  s.eta_scale = p.eta_scale;
  s.rho = p.rho;
  s.gamma = p.gamma;
  s.weights = p.weights;
  s.fixed_power = p.fixed_power;
  return s;
}

}  // namespace

Surrogate build_surrogate(const PowerAllocation& eta_n, const ZfStatistics& zf, const PowerParams& params,
                          double floor) {
  Surrogate s = problem_shell(zf, params);
  if (eta_n.eta.size() != zf.theta.cols()) throw ParameterError("build_surrogate: dimension mismatch");
  s.amplitude = s.amplitude_of(eta_n);
  for (Index k = 0; k < s.amplitude.size(); ++k) {
    if (!(s.amplitude(k) > floor)) {
      std::ostringstream os;
      os << "build_surrogate: user " << k << " amplitude " << s.amplitude(k) << " is at or below the floor "
         << floor;
      throw ParameterError(os.str());
    }
  }
  s.x = sinr(s, s.amplitude);
  s.t = power_at(s, s.amplitude);
  const Eigen::ArrayXd x = s.x.array();
  const Eigen::ArrayXd l = x.log1p();
  s.a = (2.0 * l / s.t + x / (s.t * (x + 1.0))).matrix();
  s.b = (x.square() / (s.t * (x + 1.0))).matrix();
  s.c = (l / (s.t * s.t)).matrix();
  const VectorXd v2 = s.amplitude.cwiseAbs2();
  s.e = (s.b.array() * (s.gamma * v2).array() / v2.array().square()).matrix();
  return s;
}

double sca_objective(const Surrogate& s, const VectorXd& amplitude) {
  return sinr(s, amplitude).array().log1p().sum() / power_at(s, amplitude);
}

double sca_objective(const PowerAllocation& eta, const ZfStatistics& zf, const PowerParams& params) {
  const Surrogate shell = problem_shell(zf, params);
  return sca_objective(shell, shell.amplitude_of(eta));
}

double surrogate_value(const Surrogate& s, const VectorXd& v) {
  const VectorXd vb2 = s.amplitude.cwiseAbs2();
  const VectorXd v2 = v.cwiseAbs2();
  const double t = power_at(s, v);
  double total = 0.0;
  for (Index k = 0; k < v.size(); ++k) {
    double cross = 0.0;
    for (Index i = 0; i < v.size(); ++i) cross += s.gamma(k, i) * s.amplitude(i) * v(i);
    total += s.a(k) - s.b(k) / (s.rho * v2(k)) - 2.0 * s.b(k) * cross / vb2(k) + s.e(k) * v2(k) - s.c(k) * t;
  }
  return total;
}

ConcaveSurrogate::ConcaveSurrogate(Surrogate s) : s_(std::move(s)), c_sum_(s_.c.sum()) {}

double ConcaveSurrogate::evaluate(const VectorXd& v, VectorXd* grad, Eigen::MatrixXd* hess) const {
  const VectorXd& vb = s_.amplitude;
  const VectorXd vb2 = vb.cwiseAbs2();
  // d/dv_j of sum_k 2 b_k sum_i gamma_ki vb_i v_i / vb_k^2
  const VectorXd cross_lin = 2.0 * vb.cwiseProduct(s_.gamma.transpose() * s_.b.cwiseQuotient(vb2));
  const VectorXd own_lin = 2.0 * s_.e.cwiseProduct(vb);
  const Eigen::ArrayXd v2 = v.array().square();
  const double t = power_at(s_, v);

  const double value = s_.a.sum() - (s_.b.array() / (s_.rho * v2)).sum() - cross_lin.dot(v) + own_lin.dot(v) -
                       s_.e.dot(vb2) - c_sum_ * t;
  if (grad) {
    *grad = (2.0 * s_.b.array() / (s_.rho * v2 * v.array())).matrix() - cross_lin + own_lin -
            2.0 * c_sum_ * s_.weights.cwiseProduct(v);
  }
  if (hess) {
    hess->setZero(v.size(), v.size());
    hess->diagonal() =
        (-6.0 * s_.b.array() / (s_.rho * v2.square())).matrix() - 2.0 * c_sum_ * s_.weights;
  }
  return value;
}

std::optional<std::string> ConcaveSurrogate::convex_term(const VectorXd& v, const VectorXd& d) const {
  const double rate = (-6.0 * s_.b.array() / (s_.rho * v.array().pow(4)) * d.array().square()).sum();
  const double power = -2.0 * c_sum_ * s_.weights.dot(d.cwiseAbs2());
  if (rate > 0.0) return "rate bound -b/(rho v^2)";
  if (power > 0.0) return "power term -c t(v)";
  return std::nullopt;
}

ScaStep sca_step(const Surrogate& s, const ZfStatistics& zf, const PowerParams& params, const QosSpec& qos,
                 const ScaOptions& options) {
  const NormalizedProblem p = NormalizedProblem::make(zf, params, qos);
  const Index k = p.num_users();
  const VectorXd& vb = s.amplitude;

  ConstraintSet rows(k);
  rows.lower.setConstant(options.floor);
  for (Index ap = 0; ap < p.num_aps(); ++ap) {
    rows.add_quadratic({p.theta.row(ap).transpose(), VectorXd::Zero(k), -1.0});
  }
  for (Index u = 0; u < k; ++u) {
    const double c = p.sinr_target(u);
    if (c == 0.0) continue;
    // c (1 + rho sum_i gamma_ui v_i^2) <= rho (2 vb_u v_u - vb_u^2)
    QuadraticRow row{c * p.rho * p.gamma.row(u).transpose(), VectorXd::Zero(k), p.rho * vb(u) * vb(u) + c};
    row.linear(u) = -2.0 * p.rho * vb(u);
    rows.add_quadratic(std::move(row));
  }

  const ConcaveSurrogate objective(s);
  const InnerResult res = solve_inner(objective, rows, vb, options.inner);
  ScaStep out;
  out.report = res.report;
  const double before = objective.evaluate(vb, nullptr, nullptr);
  if (res.report.objective - before < 1e-12 * std::max(1.0, std::abs(before))) {
    out.allocation = s.allocation_of(vb);
    out.unchanged = true;
  } else {
    out.allocation = s.allocation_of(res.x);
  }
  return out;
}

SolveResult solve_ipce(const ZfStatistics& zf, const PowerParams& params, const QosSpec& qos,
                       const ScaOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  SolveResult out;
  const Index k = zf.theta.cols();
  out.allocation.eta = VectorXd::Zero(k);

  const auto start = feasible_point(zf, params, qos, options.inner);
  if (!start) {
    out.report.status = RunStatus::infeasible;
    out.report.wall_ms = elapsed_ms(t_start);
    return out;
  }

  const NormalizedProblem p = NormalizedProblem::make(zf, params, qos);
  VectorXd v = (start->eta / p.eta_scale).cwiseSqrt().cwiseMax(2.0 * options.floor);
  PowerAllocation current = p.to_allocation(v.cwiseAbs2());
  double ee = energy_efficiency(current, zf, params).bits_per_joule;
  out.report.ee.push_back(ee);
  out.report.iterates.push_back(current);
  PowerAllocation best = current;
  double best_ee = ee;
  out.report.status = RunStatus::max_iter;

  for (int iter = 0; iter < options.max_iter; ++iter) {
    const Surrogate sur = build_surrogate(current, zf, params, options.floor);
    const ScaStep step = sca_step(sur, zf, params, qos, options);
    out.report.inner.push_back(step.report);
    out.report.outer_iterations = iter + 1;
    if (step.report.status != InnerStatus::converged) {
      out.report.status = RunStatus::inner_failure;
      break;
    }
    const VectorXd v_new = sur.amplitude_of(step.allocation);
    out.report.max_surrogate_excess =
        std::max(out.report.max_surrogate_excess, surrogate_value(sur, v_new) - sca_objective(sur, v_new));

    const double ee_new = energy_efficiency(step.allocation, zf, params).bits_per_joule;
    out.report.ee.push_back(ee_new);
    out.report.iterates.push_back(step.allocation);
    if (ee_new < ee * (1.0 - options.ascent_tol)) ++out.report.ascent_violations;
    if (ee_new > best_ee) {
      best_ee = ee_new;
      best = step.allocation;
    }
    const bool settled = step.unchanged || std::abs(ee_new - ee) < options.tol * ee;
    current = step.allocation;
    ee = ee_new;
    if (settled) {
      out.report.status = RunStatus::converged;
      break;
    }
  }
  if (out.report.status == RunStatus::converged && out.report.ascent_violations > 0) {
    out.report.status = RunStatus::ascent_flag;
  }

  VectorXd s_best = best.eta / p.eta_scale;
  for (Index u = 0; u < k; ++u) {
    if (s_best(u) < kReportZero && p.sinr_target(u) == 0.0) s_best(u) = 0.0;
  }
  out.allocation = p.to_allocation(s_best);
  out.report.wall_ms = elapsed_ms(t_start);
  return out;
}

}  // namespace cfmimo
