#include "cfmimo/barrier_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cfmimo/errors.hpp"

namespace cfmimo {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double QuadraticRow::value(const VectorXd& x) const {
  return diag.dot(x.cwiseAbs2()) + linear.dot(x) + constant;
}

VectorXd QuadraticRow::gradient(const VectorXd& x) const {
  return 2.0 * diag.cwiseProduct(x) + linear;
}

ConstraintSet::ConstraintSet(Index n)
    : linear(0, n), bound(0), lower(VectorXd::Constant(n, -std::numeric_limits<double>::infinity())) {}

void ConstraintSet::add_linear(const Eigen::RowVectorXd& a, double b) {
  linear.conservativeResize(linear.rows() + 1, Eigen::NoChange);
  linear.row(linear.rows() - 1) = a;
  bound.conservativeResize(bound.size() + 1);
  bound(bound.size() - 1) = b;
}

void ConstraintSet::add_quadratic(QuadraticRow row) {
  if ((row.diag.array() < 0.0).any()) {
    throw ParameterError("ConstraintSet: quadratic row must have a non-negative diagonal");
  }
  quadratic.push_back(std::move(row));
}

std::size_t ConstraintSet::barrier_terms() const {
  const auto finite = static_cast<std::size_t>((lower.array() > -std::numeric_limits<double>::infinity()).count());
  return static_cast<std::size_t>(linear.rows()) + quadratic.size() + finite;
}

double ConstraintSet::min_slack(const VectorXd& x) const {
  double s = std::numeric_limits<double>::infinity();
  if (linear.rows() > 0) s = std::min(s, (bound - linear * x).minCoeff());
  for (const auto& q : quadratic) s = std::min(s, -q.value(x));
  for (Index j = 0; j < lower.size(); ++j) {
    if (std::isfinite(lower(j))) s = std::min(s, x(j) - lower(j));
  }
  return s;
}

double ConstraintSet::max_violation(const VectorXd& x) const {
  return std::max(0.0, -min_slack(x));
}

const char* to_string(InnerStatus s) {
  switch (s) {
    case InnerStatus::converged: return "converged";
    case InnerStatus::max_iter: return "max-iter";
    case InnerStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

constexpr double kQuadraticRegion = 0.0625;

// phi(x) = -t f(x) - sum log slack_i(x)
struct Barrier {
  const ConcaveObjective& f;
  const ConstraintSet& c;

  // Returns +inf outside the strict interior.
  double value(const VectorXd& x, double t) const {
    if (!(c.min_slack(x) > 0.0)) return std::numeric_limits<double>::infinity();
    double phi = -t * f.evaluate(x, nullptr, nullptr);
    if (c.linear.rows() > 0) phi -= (c.bound - c.linear * x).array().log().sum();
    for (const auto& q : c.quadratic) phi -= std::log(-q.value(x));
    for (Index j = 0; j < c.lower.size(); ++j) {
      if (std::isfinite(c.lower(j))) phi -= std::log(x(j) - c.lower(j));
    }
    return phi;
  }

  // Gradient and Hessian of phi plus the objective pieces.
  void derivatives(const VectorXd& x, double t, VectorXd& g, MatrixXd& h, VectorXd& fg, MatrixXd& fh) const {
    const Index n = x.size();
    fg.resize(n);
    fh.resize(n, n);
    f.evaluate(x, &fg, &fh);
    g = -t * fg;
    h = -t * fh;
    for (Index i = 0; i < c.linear.rows(); ++i) {
      const double s = c.bound(i) - c.linear.row(i).dot(x);
      const VectorXd a = c.linear.row(i).transpose();
      g += a / s;
      h.noalias() += (a * a.transpose()) / (s * s);
    }
    for (const auto& q : c.quadratic) {
      const double s = -q.value(x);
      const VectorXd qg = q.gradient(x);
      g += qg / s;
      h.noalias() += (qg * qg.transpose()) / (s * s);
      h.diagonal() += 2.0 * q.diag / s;
    }
    for (Index j = 0; j < n; ++j) {
      if (!std::isfinite(c.lower(j))) continue;
      const double s = x(j) - c.lower(j);
      g(j) -= 1.0 / s;
      h(j, j) += 1.0 / (s * s);
    }
  }
};

void check_curvature(const ConcaveObjective& f, const VectorXd& x, const VectorXd& d, const MatrixXd& fh) {
  const double scale = d.squaredNorm() * fh.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return;
  const double curv = d.dot(fh * d);
  if (curv > 1e-10 * scale) {
    std::ostringstream os;
    os << "solve_inner: objective '" << f.name() << "' is not concave: curvature " << curv
       << " along the Newton direction";
    if (auto term = f.convex_term(x, d)) os << " (term: " << *term << ")";
    throw NonConcavityError(os.str());
  }
}

KktReport assess(const ConcaveObjective& f, const ConstraintSet& c, const VectorXd& x, double t) {
  KktReport r;
  VectorXd fg(x.size());
  MatrixXd fh(x.size(), x.size());
  r.objective = f.evaluate(x, &fg, nullptr);
  VectorXd resid = fg;
  r.linear_multipliers = VectorXd::Zero(c.linear.rows());
  for (Index i = 0; i < c.linear.rows(); ++i) {
    const double s = c.bound(i) - c.linear.row(i).dot(x);
    const double mu = 1.0 / (t * s);
    r.linear_multipliers(i) = mu;
    resid -= mu * c.linear.row(i).transpose();
    r.complementarity = std::max(r.complementarity, mu * s);
  }
  r.quadratic_multipliers = VectorXd::Zero(static_cast<Index>(c.quadratic.size()));
  for (std::size_t i = 0; i < c.quadratic.size(); ++i) {
    const double s = -c.quadratic[i].value(x);
    const double mu = 1.0 / (t * s);
    r.quadratic_multipliers(static_cast<Index>(i)) = mu;
    resid -= mu * c.quadratic[i].gradient(x);
    r.complementarity = std::max(r.complementarity, mu * s);
  }
  r.lower_multipliers = VectorXd::Zero(x.size());
  for (Index j = 0; j < x.size(); ++j) {
    if (!std::isfinite(c.lower(j))) continue;
    const double s = x(j) - c.lower(j);
    const double mu = 1.0 / (t * s);
    r.lower_multipliers(j) = mu;
    resid(j) += mu;
    r.complementarity = std::max(r.complementarity, mu * s);
  }
  r.stationarity = resid.norm();
  r.max_violation = c.max_violation(x);
  r.duality_gap = static_cast<double>(c.barrier_terms()) / t;
  return r;
}

}  // namespace

InnerResult solve_inner(const ConcaveObjective& objective, const ConstraintSet& constraints, const VectorXd& start,
                        const BarrierOptions& options) {
  const Index n = start.size();
  if (constraints.dimension() != n || constraints.linear.cols() != n) {
    throw ParameterError("solve_inner: constraint set dimension does not match the start point");
  }
  for (const auto& q : constraints.quadratic) {
    if (q.diag.size() != n || q.linear.size() != n) {
      throw ParameterError("solve_inner: quadratic row dimension does not match the start point");
    }
  }
  const double slack0 = constraints.min_slack(start);
  if (!(slack0 > 0.0) || !start.allFinite()) {
    std::ostringstream os;
    os << "solve_inner: start point is not strictly feasible (min slack " << slack0 << ")";
    throw InfeasibleStartError(os.str());
  }

  const Barrier barrier{objective, constraints};
  VectorXd x = start;
  double t = options.t0;
  int newton_steps = 0;
  bool stalled = false;
  VectorXd g, fg;
  MatrixXd h, fh;

  for (int stage = 0; stage < options.max_stages; ++stage) {
    bool centered = false;
    for (int it = 0; it < options.max_newton_per_stage; ++it) {
      barrier.derivatives(x, t, g, h, fg, fh);
      Eigen::LDLT<MatrixXd> ldlt(h);
      VectorXd d = ldlt.solve(-g);
      if (ldlt.info() != Eigen::Success || !d.allFinite() || !ldlt.isPositive()) {
        // An indefinite barrier Hessian can only come from the objective.
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(fh);
        const Index worst = [&] {
          Index idx = 0;
          eig.eigenvalues().maxCoeff(&idx);
          return idx;
        }();
        check_curvature(objective, x, eig.eigenvectors().col(worst), fh);
        // Numerically semidefinite: fall back to a regularized solve.
        MatrixXd hr = h;
        hr.diagonal().array() += 1e-12 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
        d = hr.ldlt().solve(-g);
      }
      check_curvature(objective, x, d, fh);
      const double decrement = -g.dot(d);
      if (decrement / 2.0 <= options.newton_tol) {
        centered = true;
        break;
      }

      const double phi0 = barrier.value(x, t);
      double step = 1.0;
      while (!(constraints.min_slack(x + step * d) > 0.0) && step > 1e-20) step *= 0.5;
      // Inside the quadratic-convergence region (Newton decrement below 1/4)
      // the full step is taken; the sufficient-decrease test there would only
      // compare rounding noise in phi.
      if (decrement >= kQuadraticRegion) {
        while (barrier.value(x + step * d, t) > phi0 - 0.25 * step * decrement && step > 1e-20) step *= 0.5;
      }
      ++newton_steps;
      if (step <= 1e-20) {
        stalled = true;
        break;
      }
      x += step * d;
    }

    // On the central path f* - f(x) <= #terms / t. The stationarity
    // residual is reported but not used: near active rows the multiplier
    // estimates 1 / (t slack) inherit the cancellation error of the slack.
    KktReport rep = assess(objective, constraints, x, t);
    const bool gap_ok = rep.duality_gap <= options.tol * (1.0 + std::abs(rep.objective));
    if (gap_ok && (centered || stalled)) {
      rep.iterations = newton_steps;
      rep.status = InnerStatus::converged;
      return {x, rep};
    }
    stalled = false;
    t *= options.mu;
  }

  KktReport rep = assess(objective, constraints, x, t / options.mu);
  rep.iterations = newton_steps;
  rep.status = InnerStatus::max_iter;
  return {x, rep};
}

}  // namespace cfmimo
