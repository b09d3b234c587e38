#include <doctest.h>

#include <cmath>

#include "cfmimo/dinkelbach.hpp"
#include "cfmimo/feasible_point.hpp"
#include "oracles.hpp"

using namespace cfmimo;

TEST_CASE("K=1, M=1 matches a golden-section search of the energy efficiency") {
  ZfStatistics z;
  z.theta = Eigen::MatrixXd::Ones(1, 1);
  z.gamma = Eigen::MatrixXd::Zero(1, 1);
  z.theta_se = z.gamma_se = Eigen::MatrixXd::Zero(1, 1);
  for (double rho_w : {0.2, 1e-6, 1e-9}) {
    const PowerParams p = reference_power_params(1, 1, rho_w);
    auto ee = [&](double eta) { return energy_efficiency({Eigen::VectorXd::Constant(1, eta)}, z, p).bits_per_joule; };
    const double eta_star = testing::golden_section_max(ee, 0.0, 1.0);
    const SolveResult r = solve_pce(z, p, QosSpec::uniform(1, 0.0));
    CAPTURE(rho_w);
    CHECK(r.report.status == RunStatus::converged);
    CHECK(ee(r.allocation.eta(0)) >= 0.999 * ee(eta_star));
  }
}

TEST_CASE("K=2, M=8 matches an exhaustive grid") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto inst = testing::make_small_instance(8, 2, seed, 500);
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
    const testing::GridOptimum grid =
        testing::grid_ee_k2(inst.zf_perfect.theta, zero, inst.params, Eigen::Vector2d::Zero(), 200);
    const SolveResult r = solve_pce(inst.zf_perfect, inst.params, QosSpec::uniform(2, 0.0));
    CHECK(r.report.status == RunStatus::converged);
    const double ee = energy_efficiency(r.allocation, inst.zf_perfect, inst.params).bits_per_joule;
    CHECK(ee >= 0.99 * grid.ee);
    // the grid never beats a global optimum by more than rounding
    CHECK(grid.ee <= ee * (1.0 + 1e-9));
  }
}

TEST_CASE("outer loop invariants on reference-scale instances") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto inst = testing::make_small_instance(40, 8, seed, 200);
    const PowerAllocation eq = equal_power_allocation(inst.zf_perfect.theta);
    const double floor = 0.8 * per_user_rate(eq, Eigen::MatrixXd::Zero(8, 8), inst.params).minCoeff();
    const QosSpec qos = QosSpec::uniform(8, floor);
    const SolveResult r = solve_pce(inst.zf_perfect, inst.params, qos);
    REQUIRE(r.report.status == RunStatus::converged);
    CHECK(r.report.outer_iterations <= 15);
    for (std::size_t i = 1; i < r.report.lambda.size(); ++i) {
      CHECK(r.report.lambda[i] >= r.report.lambda[i - 1] * (1.0 - 1e-12));
    }
    CHECK(r.report.ee.back() >= r.report.ee.front() * (1.0 - 1e-12));
    ZfStatistics perfect = inst.zf_perfect;
    CHECK(check_feasibility(r.allocation, perfect, inst.params, qos).feasible);
    const double ee = energy_efficiency(r.allocation, perfect, inst.params).bits_per_joule;
    CHECK(ee >= energy_efficiency(eq, perfect, inst.params).bits_per_joule);
  }
}

TEST_CASE("gamma in the input is ignored") {
  const auto inst = testing::make_small_instance(16, 4, 7, 200);
  ZfStatistics noisy = inst.zf_perfect;
  noisy.gamma = inst.zf.gamma;
  const SolveResult a = solve_pce(inst.zf_perfect, inst.params, QosSpec::uniform(4, 0.0));
  const SolveResult b = solve_pce(noisy, inst.params, QosSpec::uniform(4, 0.0));
  CHECK(a.allocation.eta == b.allocation.eta);
}

TEST_CASE("unreachable floors give an infeasible status") {
  const auto inst = testing::make_small_instance(16, 4, 7, 200);
  const SolveResult r = solve_pce(inst.zf_perfect, inst.params, QosSpec::uniform(4, 500.0));
  CHECK(r.report.status == RunStatus::infeasible);
  CHECK(r.report.outer_iterations == 0);
}

TEST_CASE("including the traffic power does not move the optimum") {
  const auto inst = testing::make_small_instance(24, 4, 9, 200);
  DinkelbachOptions with;
  with.include_traffic_power = true;
  const SolveResult a = solve_pce(inst.zf_perfect, inst.params, QosSpec::uniform(4, 0.0));
  const SolveResult b = solve_pce(inst.zf_perfect, inst.params, QosSpec::uniform(4, 0.0), with);
  CHECK(b.report.status == RunStatus::converged);
  const double ea = energy_efficiency(a.allocation, inst.zf_perfect, inst.params).bits_per_joule;
  const double eb = energy_efficiency(b.allocation, inst.zf_perfect, inst.params).bits_per_joule;
  CHECK(eb == doctest::Approx(ea).epsilon(1e-5));
}

TEST_CASE("parametric objective: diagonal negative Hessian and exact gradient") {
  const Eigen::Vector3d w(0.3, 0.5, 0.2);
  const DinkelbachObjective f(w, 4.0, 50.0, 0.92, 1.7);
  const Eigen::Vector3d s(0.2, 0.9, 0.5);
  Eigen::VectorXd g;
  Eigen::MatrixXd h;
  f.evaluate(s, &g, &h);
  CHECK((h.diagonal().array() < 0.0).all());
  CHECK((h - Eigen::MatrixXd(h.diagonal().asDiagonal())).isZero(0.0));
  const Eigen::VectorXd fd =
      testing::central_gradient([&](const Eigen::VectorXd& x) { return f.evaluate(x, nullptr, nullptr); }, s);
  CHECK((fd - g).norm() <= 1e-6 * g.norm());
}
