#include "cfmimo/feasible_point.hpp"

#include <cmath>
#include <limits>

#include "cfmimo/normalized_problem.hpp"

namespace cfmimo {

namespace {

using Eigen::Index;
using Eigen::VectorXd;

constexpr double kShrink = 1.0 - 1e-6;

// maximize -s over (u, s)
class MinimizeSlackVariable final : public ConcaveObjective {
 public:
  explicit MinimizeSlackVariable(Index n) : n_(n) {}
  double evaluate(const VectorXd& x, VectorXd* grad, Eigen::MatrixXd* hess) const override {
    if (grad) {
      grad->setZero(n_);
      (*grad)(n_ - 1) = -1.0;
    }
    if (hess) hess->setZero(n_, n_);
    return -x(n_ - 1);
  }
  std::string name() const override { return "phase-1"; }

 private:
  Index n_;
};

struct PhaseOne {
  ConstraintSet rows;
  VectorXd start;
};

// Rows in the normalized power variable u, each scaled to unit coefficient
// norm so that the common slack variable compares like with like.
PhaseOne build_phase_one(const NormalizedProblem& p) {
  const Index k = p.num_users();
  const Index m = p.num_aps();
  PhaseOne out{ConstraintSet(k + 1), VectorXd::Constant(k + 1, 0.5)};
  out.rows.lower.head(k).setZero();
  auto add = [&](Eigen::RowVectorXd coef, double bound) {
    const double norm = coef.norm();
    if (!(norm > 0.0)) return;
    Eigen::RowVectorXd row(k + 1);
    row.head(k) = coef / norm;
    row(k) = -1.0;
    out.rows.add_linear(row, bound / norm);
  };
  for (Index u = 0; u < k; ++u) {
    const double c = p.sinr_target(u);
    if (c == 0.0) {
      // keep unconstrained users away from zero as well
      Eigen::RowVectorXd coef = Eigen::RowVectorXd::Zero(k);
      coef(u) = -1.0;
      add(coef, 0.0);
      continue;
    }
    Eigen::RowVectorXd coef = c * p.rho * p.gamma.row(u);
    coef(u) -= p.rho;
    add(coef, -c);
  }
  for (Index ap = 0; ap < m; ++ap) add(p.theta.row(ap), 1.0);

  const VectorXd u0 = out.start.head(k);
  double worst = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < out.rows.linear.rows(); ++i) {
    worst = std::max(worst, out.rows.linear.row(i).head(k).dot(u0) - out.rows.bound(i));
  }
  // relative margin so the start stays interior when a floor is astronomically high
  out.start(k) = worst + 1.0 + 1e-3 * std::abs(worst);
  return out;
}

BarrierOptions phase_one_options(BarrierOptions o) {
  o.tol = std::min(o.tol, 1e-9);
  return o;
}

}  // namespace

double phase_one_violation(const ZfStatistics& zf, const PowerParams& params, const QosSpec& qos) {
  const NormalizedProblem p = NormalizedProblem::make(zf, params, qos);
  if (!p.sinr_target.allFinite()) return std::numeric_limits<double>::infinity();
  const PhaseOne ph = build_phase_one(p);
  const MinimizeSlackVariable obj(p.num_users() + 1);
  const InnerResult res = solve_inner(obj, ph.rows, ph.start, phase_one_options({}));
  return res.x(p.num_users());
}

std::optional<PowerAllocation> feasible_point(const ZfStatistics& zf, const PowerParams& params, const QosSpec& qos,
                                              const BarrierOptions& options) {
  if (qos.all_zero()) {
    PowerAllocation eq = equal_power_allocation(zf.theta);
    eq.eta *= kShrink;
    return eq;
  }
  if ((qos.r_bar.array() < 0.0).any()) return std::nullopt;
  const NormalizedProblem p = NormalizedProblem::make(zf, params, qos);
  // 2^{r_tilde} overflows long before any AP budget could meet it.
  if (!p.sinr_target.allFinite()) return std::nullopt;

  const Index k = p.num_users();
  const PhaseOne ph = build_phase_one(p);
  const MinimizeSlackVariable obj(k + 1);
  const InnerResult res = solve_inner(obj, ph.rows, ph.start, phase_one_options(options));
  if (!(res.x(k) < 0.0)) return std::nullopt;

  const VectorXd u = res.x.head(k);
  // Re-check the un-normalized rows strictly.
  for (Index i = 0; i < k; ++i) {
    const double c = p.sinr_target(i);
    if (c > 0.0 && !(p.rho * u(i) > c * (1.0 + p.rho * p.gamma.row(i).dot(u)))) return std::nullopt;
  }
  if (!((p.theta * u).maxCoeff() < 1.0) || !((u.array() > 0.0).all())) return std::nullopt;
  return p.to_allocation(u);
}

}  // namespace cfmimo
