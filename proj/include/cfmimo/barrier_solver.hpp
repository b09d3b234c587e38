#pragma once

// Small dense log-barrier interior-point method: maximize a smooth concave
// objective subject to linear rows, separable convex quadratic rows and
// per-variable lower bounds, from a strictly feasible start.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cfmimo {

class ConcaveObjective {
 public:
  virtual ~ConcaveObjective() = default;

  /// Value at x; fills the gradient and Hessian when the pointers are set.
  virtual double evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const = 0;

  virtual std::string name() const { return "objective"; }

  /// For composite objectives: the name of a term with positive curvature
  /// along d at x, if there is one.
  virtual std::optional<std::string> convex_term(const Eigen::VectorXd& /*x*/, const Eigen::VectorXd& /*d*/) const {
    return std::nullopt;
  }
};

/// sum_j diag_j x_j^2 + linear . x + constant <= 0, with diag >= 0.
struct QuadraticRow {
  Eigen::VectorXd diag;
  Eigen::VectorXd linear;
  double constant = 0.0;

  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
};

struct ConstraintSet {
  Eigen::MatrixXd linear;  // rows a_i, a_i . x <= bound_i
  Eigen::VectorXd bound;
  std::vector<QuadraticRow> quadratic;
  Eigen::VectorXd lower;   // -infinity disables a bound

  explicit ConstraintSet(Eigen::Index n = 0);

  Eigen::Index dimension() const { return lower.size(); }
  void add_linear(const Eigen::RowVectorXd& a, double b);
  void add_quadratic(QuadraticRow row);

  /// Number of barrier terms (finite lower bounds included).
  std::size_t barrier_terms() const;
  /// Smallest slack over all rows; positive iff strictly feasible.
  double min_slack(const Eigen::VectorXd& x) const;
  /// Largest constraint excess, 0 when feasible.
  double max_violation(const Eigen::VectorXd& x) const;
};

enum class InnerStatus { converged, max_iter, infeasible };

const char* to_string(InnerStatus s);

struct KktReport {
  double objective = 0.0;
  double stationarity = 0.0;     // ||grad f - sum mu grad g||
  double max_violation = 0.0;
  double complementarity = 0.0;  // max_i mu_i * slack_i
  double duality_gap = 0.0;      // barrier bound (#terms / t)
  int iterations = 0;            // Newton steps over all stages
  InnerStatus status = InnerStatus::max_iter;
  Eigen::VectorXd linear_multipliers;
  Eigen::VectorXd quadratic_multipliers;
  Eigen::VectorXd lower_multipliers;
};

struct BarrierOptions {
  double tol = 1e-6;
  double t0 = 1.0;
  double mu = 10.0;
  int max_newton_per_stage = 100;
  int max_stages = 60;
  double newton_tol = 1e-10;  // lambda^2 / 2 stopping level
};

struct InnerResult {
  Eigen::VectorXd x;
  KktReport report;
};

/// Throws InfeasibleStartError if start is not strictly feasible and
/// NonConcavityError if the objective curves upward along a Newton step.
InnerResult solve_inner(const ConcaveObjective& objective, const ConstraintSet& constraints,
                        const Eigen::VectorXd& start, const BarrierOptions& options = {});

}  // namespace cfmimo
