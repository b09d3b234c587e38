#include "cfmimo/power_model.hpp"

#include <cmath>
#include <string>

#include "cfmimo/errors.hpp"
#include "cfmimo/zf_statistics.hpp"

namespace cfmimo {

double noise_power_watts(double bandwidth_hz, double noise_figure_db) {
  return 290.0 * kBoltzmann * bandwidth_hz * std::pow(10.0, noise_figure_db / 10.0);
}

double PowerParams::prelog() const {
  return 1.0 - static_cast<double>(tau_u) / static_cast<double>(tau);
}

double PowerParams::fixed_power() const { return p_cir + p_cm.sum() + p_0m.sum(); }

Eigen::VectorXd PowerParams::transmit_weights(const Eigen::MatrixXd& theta) const {
  return rho_f * n0_watts * (theta.transpose() * alpha);
}

void PowerParams::validate(std::size_t m, std::size_t k) const {
  const auto mi = static_cast<Eigen::Index>(m);
  if (alpha.size() != mi || p_cm.size() != mi || p_0m.size() != mi || p_btm.size() != mi) {
    throw ParameterError("PowerParams: per-AP vectors must have M=" + std::to_string(m) + " entries");
  }
  if (!(tau > tau_u) || tau_u < k) throw ParameterError("PowerParams: need tau > tau_u >= K");
  if (!(rho_f > 0.0) || !(rho_r > 0.0)) throw ParameterError("PowerParams: rho_f and rho_r must be positive");
  if (!(bandwidth_hz > 0.0) || n0_watts < 0.0 || p_cir < 0.0) {
    throw ParameterError("PowerParams: bandwidth must be positive and powers non-negative");
  }
  if ((alpha.array() < 0.0).any() || (p_cm.array() < 0.0).any() || (p_0m.array() < 0.0).any() ||
      (p_btm.array() < 0.0).any()) {
    throw ParameterError("PowerParams: per-AP powers must be non-negative");
  }
}

PowerParams reference_power_params(std::size_t m, std::size_t k, double rho_f_watts, double rho_r_watts) {
  const auto mi = static_cast<Eigen::Index>(m);
  PowerParams p;
  p.bandwidth_hz = 20e6;
  p.n0_watts = noise_power_watts(p.bandwidth_hz, 9.0);
  p.rho_f = rho_f_watts / p.n0_watts;
  p.rho_r = rho_r_watts / p.n0_watts;
  p.tau = 200;
  p.tau_u = k;
  p.alpha = Eigen::VectorXd::Constant(mi, 1.0 / 0.388);
  p.p_cir = 9.0;
  p.p_cm = Eigen::VectorXd::Constant(mi, 0.2);
  p.p_0m = Eigen::VectorXd::Constant(mi, 0.2);
  p.p_btm = Eigen::VectorXd::Constant(mi, 0.25e-9);
  return p;
}

QosSpec QosSpec::uniform(std::size_t k, double r) {
  return {Eigen::VectorXd::Constant(static_cast<Eigen::Index>(k), r)};
}

Eigen::VectorXd QosSpec::r_tilde(const PowerParams& params) const {
  const double scale = static_cast<double>(params.tau) / static_cast<double>(params.tau - params.tau_u);
  return scale * r_bar;
}

Eigen::VectorXd QosSpec::sinr_targets(const PowerParams& params) const {
  return r_tilde(params).unaryExpr([](double r) { return std::exp2(r) - 1.0; });
}

bool QosSpec::all_zero() const { return (r_bar.array() == 0.0).all(); }

Eigen::VectorXd per_user_rate(const PowerAllocation& eta, const Eigen::MatrixXd& gamma, const PowerParams& params) {
  const Eigen::VectorXd interference = Eigen::VectorXd::Ones(eta.eta.size()) + params.rho_f * (gamma * eta.eta);
  const Eigen::ArrayXd sinr = params.rho_f * eta.eta.array() / interference.array();
  return (params.prelog() * sinr.log1p() / std::log(2.0)).matrix();
}

double sum_rate(const PowerAllocation& eta, const Eigen::MatrixXd& gamma, const PowerParams& params) {
  return per_user_rate(eta, gamma, params).sum();
}

double reduced_power(const PowerAllocation& eta, const Eigen::MatrixXd& theta, const PowerParams& params) {
  return params.transmit_weights(theta).dot(eta.eta) + params.fixed_power();
}

double total_power(const PowerAllocation& eta, const Eigen::MatrixXd& theta, const PowerParams& params,
                   double sum_rate_bits_per_s) {
  return reduced_power(eta, theta, params) + sum_rate_bits_per_s * params.p_btm.sum();
}

EnergyEfficiency energy_efficiency(const PowerAllocation& eta, const ZfStatistics& zf, const PowerParams& params) {
  EnergyEfficiency out;
  out.throughput_bps = params.bandwidth_hz * sum_rate(eta, zf.gamma, params);
  out.reduced_power_w = reduced_power(eta, zf.theta, params);
  out.total_power_w = out.reduced_power_w + out.throughput_bps * params.p_btm.sum();
  if (out.throughput_bps > 0.0) {
    out.bits_per_joule = out.throughput_bps / out.total_power_w;
    out.reciprocal_form = 1.0 / (out.reduced_power_w / out.throughput_bps + params.p_btm.sum());
    out.reduced_ratio = out.throughput_bps / out.reduced_power_w;
  }
  return out;
}

PowerAllocation equal_power_allocation(const Eigen::MatrixXd& theta) {
  if (theta.size() == 0) throw ParameterError("equal_power_allocation: empty theta");
  const double worst = theta.rowwise().sum().maxCoeff();
  if (!(worst > 0.0) || !std::isfinite(worst)) {
    throw ParameterError("equal_power_allocation: theta has no positive finite row sum");
  }
  return {Eigen::VectorXd::Constant(theta.cols(), 1.0 / worst)};
}

FeasibilityReport check_feasibility(const PowerAllocation& eta, const ZfStatistics& zf, const PowerParams& params,
                                    const QosSpec& qos, double tol) {
  FeasibilityReport rep;
  auto note = [&rep](double excess) { rep.max_violation = std::max(rep.max_violation, excess); };
  for (Eigen::Index k = 0; k < eta.eta.size(); ++k) {
    if (eta.eta(k) < -tol) {
      rep.negative_entries.push_back(static_cast<std::size_t>(k));
      note(-eta.eta(k));
    }
  }
  const Eigen::VectorXd rates = per_user_rate(eta, zf.gamma, params);
  for (Eigen::Index k = 0; k < rates.size(); ++k) {
    const double gap = qos.r_bar(k) - rates(k);
    if (gap > tol) rep.qos_violations.push_back(static_cast<std::size_t>(k));
    note(gap);
  }
  const Eigen::VectorXd load = zf.theta * eta.eta;
  for (Eigen::Index m = 0; m < load.size(); ++m) {
    const double gap = load(m) - 1.0;
    if (gap > tol) rep.ap_violations.push_back(static_cast<std::size_t>(m));
    note(gap);
  }
  rep.feasible = rep.negative_entries.empty() && rep.qos_violations.empty() && rep.ap_violations.empty();
  return rep;
}

}  // namespace cfmimo
