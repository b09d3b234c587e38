#include "cfmimo/normalized_problem.hpp"

#include "cfmimo/errors.hpp"

namespace cfmimo {

NormalizedProblem NormalizedProblem::make(const ZfStatistics& zf, const PowerParams& params, const QosSpec& qos) {
  const auto k = zf.theta.cols();
  if (zf.gamma.rows() != k || zf.gamma.cols() != k || qos.r_bar.size() != k) {
    throw ParameterError("NormalizedProblem: gamma, theta and QoS dimensions disagree");
  }
  params.validate(static_cast<std::size_t>(zf.theta.rows()), static_cast<std::size_t>(k));
  NormalizedProblem p;
  p.eta_scale = equal_power_allocation(zf.theta).eta(0);
  p.theta = zf.theta * p.eta_scale;
  p.gamma = zf.gamma;
  p.rho = params.rho_f * p.eta_scale;
  p.weights = params.transmit_weights(zf.theta) * p.eta_scale;
  p.fixed_power = params.fixed_power();
  p.prelog = params.prelog();
  p.sinr_target = qos.sinr_targets(params);
  return p;
}

}  // namespace cfmimo
