#include <doctest.h>

#include <cmath>

#include "cfmimo/errors.hpp"
#include "cfmimo/zf_statistics.hpp"
#include "oracles.hpp"

using namespace cfmimo;

namespace {

MmseStats sample_stats(std::size_t m, std::size_t k, std::uint64_t seed) {
  const Topology t = generate_topology(m, k, 1.0, seed);
  Rng rng = make_stream(seed, 1);
  const BetaMatrix b = large_scale_fading(t, 8.0, kDefaultMinDistanceKm, rng);
  return mmse_stats(b, 0.1 / noise_power_watts(20e6, 9.0), k);
}

}  // namespace

TEST_CASE("zf_matrix inverts the estimate on random draws") {
  for (std::size_t m : {8u, 16u}) {
    for (std::size_t k : {2u, 4u}) {
      const MmseStats s = sample_stats(m, k, 100 + m + k);
      Rng rng(m * 10 + k);
      for (int d = 0; d < 25; ++d) {
        const Eigen::MatrixXcd g = draw_estimate(s, rng);
        const Eigen::MatrixXcd b = zf_matrix(g);
        const double err = (g.transpose() * b - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff();
        CHECK(err <= 1e-8);
      }
    }
  }
}

TEST_CASE("zf identity is invariant to a common scaling of the channel") {
  const MmseStats s = sample_stats(12, 3, 5);
  Rng rng(1);
  const Eigen::MatrixXcd g = draw_estimate(s, rng);
  const Eigen::MatrixXcd b1 = zf_matrix(g);
  const Eigen::MatrixXcd b2 = zf_matrix(std::sqrt(2.0) * g);
  CHECK((g.transpose() * b1 - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((std::sqrt(2.0) * g.transpose() * b2 - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("zf_matrix rejects rank-deficient estimates") {
  Eigen::MatrixXcd g(3, 2);
  g.col(0) << 1.0, 2.0, 3.0;
  g.col(1) = g.col(0);
  CHECK(gram_condition(g) > 1e10);
  CHECK_THROWS_AS(zf_matrix(g), SingularChannelError);
}

TEST_CASE("perfect CSI gives exactly zero gamma and positive theta") {
  const Topology t = generate_topology(10, 3, 1.0, 9);
  Rng rng(2);
  const BetaMatrix b = large_scale_fading(t, 8.0, kDefaultMinDistanceKm, rng);
  const ZfStatistics z = estimate_zf_statistics(MmseStats::perfect(b), 200, 4);
  CHECK(z.gamma.isZero(0.0));
  CHECK((z.theta.array() > 0.0).all());
  CHECK(z.theta.allFinite());
  CHECK(z.n_realizations == 200);
}

TEST_CASE("estimates are nonnegative and reproducible") {
  const MmseStats s = sample_stats(16, 4, 3);
  const ZfStatistics a = estimate_zf_statistics(s, 300, 77);
  const ZfStatistics b = estimate_zf_statistics(s, 300, 77);
  CHECK((a.gamma.array() >= 0.0).all());
  CHECK((a.theta.array() >= 0.0).all());
  CHECK(a.gamma == b.gamma);
  CHECK(a.theta == b.theta);
  const ZfStatistics c = estimate_zf_statistics(s, 300, 78);
  CHECK(c.theta != a.theta);
}

TEST_CASE("parallel kernel agrees with the literal serial reference") {
  const MmseStats s = sample_stats(20, 4, 12);
  const ZfStatistics par = estimate_zf_statistics(s, 150, 5);
  const ZfStatistics ref = reference::estimate_zf_statistics(s, 150, 5);
  CHECK(par.rejected == ref.rejected);
  CHECK((par.theta - ref.theta).cwiseAbs().maxCoeff() <= 1e-10 * ref.theta.cwiseAbs().maxCoeff());
  CHECK((par.gamma - ref.gamma).cwiseAbs().maxCoeff() <= 1e-10 * ref.gamma.cwiseAbs().maxCoeff());
  CHECK((par.theta_se - ref.theta_se).cwiseAbs().maxCoeff() <= 1e-8 * ref.theta_se.cwiseAbs().maxCoeff());
}

TEST_CASE("M=2, K=1 theta matches its closed form and two independent runs agree") {
  // With |g_1|^2, |g_2|^2 i.i.d. exponential of mean v, |g_1|^2 / ||g||^2 is
  // uniform and independent of ||g||^2 ~ Gamma(2, v), so
  // theta_1 = E[|g_1|^2 / ||g||^4] = 1/2 * 1/v.
  BetaMatrix b{Eigen::MatrixXd::Constant(2, 1, 2.0)};
  const MmseStats s = MmseStats::perfect(b);
  const ZfStatistics a = estimate_zf_statistics(s, 1000000, 1);
  const ZfStatistics c = estimate_zf_statistics(s, 1000000, 2);
  for (int m = 0; m < 2; ++m) {
    const double combined = std::hypot(a.theta_se(m, 0), c.theta_se(m, 0));
    CHECK(std::abs(a.theta(m, 0) - c.theta(m, 0)) <= 3.0 * combined);
    CHECK(std::abs(a.theta(m, 0) - 0.25) <= 4.0 * a.theta_se(m, 0));
  }
}

TEST_CASE("gamma vanishes as the estimation error vanishes") {
  const Topology t = generate_topology(16, 4, 1.0, 31);
  Rng rng(6);
  const BetaMatrix b = large_scale_fading(t, 8.0, kDefaultMinDistanceKm, rng);
  double last = std::numeric_limits<double>::infinity();
  for (double rho : {1e9, 1e11, 1e13}) {
    const ZfStatistics z = estimate_zf_statistics(mmse_stats(b, rho, 4), 200, 3);
    const double g = z.gamma.maxCoeff();
    CHECK(g < last);
    CHECK(z.theta.allFinite());
    last = g;
  }
  CHECK(last < 1e-2);
}

TEST_CASE("too many singular draws abort the estimate") {
  // A user with zero estimate variance makes every Gram matrix singular.
  MmseStats s;
  s.var_hat = Eigen::MatrixXd::Constant(4, 2, 1.0);
  s.var_hat.col(1).setZero();
  s.var_err = Eigen::MatrixXd::Zero(4, 2);
  CHECK_THROWS_AS(estimate_zf_statistics(s, 10, 1), RejectionRateError);
  CHECK_THROWS_AS(reference::estimate_zf_statistics(s, 10, 1), RejectionRateError);
}

TEST_CASE("signal-level simulation: desired power is deterministic and interference follows gamma") {
  const MmseStats s = sample_stats(16, 2, 44);
  const ZfStatistics z = estimate_zf_statistics(s, 10000, 8);
  const double rho_f = 0.2 / noise_power_watts(20e6, 9.0);
  const PowerAllocation eta = equal_power_allocation(z.theta);
  const SinrValidation v = validate_sinr(s, z, eta, rho_f, 20000, 9);
  for (Eigen::Index k = 0; k < 2; ++k) {
    CHECK(v.max_desired_deviation(k) <= 1e-9);
    CHECK(v.desired_power(k) == doctest::Approx(rho_f * eta.eta(k)).epsilon(1e-9));
    const double se = std::hypot(v.interference_se(k), v.predicted_se(k));
    CHECK(std::abs(v.interference_power(k) - v.predicted_interference(k)) <= 3.0 * se);
  }
}

TEST_CASE("signal-level simulation: perfect CSI has no interference") {
  const Topology t = generate_topology(8, 2, 1.0, 2);
  Rng rng(2);
  const BetaMatrix b = large_scale_fading(t, 8.0, kDefaultMinDistanceKm, rng);
  const MmseStats s = MmseStats::perfect(b);
  const ZfStatistics z = estimate_zf_statistics(s, 200, 3);
  const SinrValidation v = validate_sinr(s, z, equal_power_allocation(z.theta), 1e11, 500, 4);
  CHECK(v.interference_power.isZero(0.0));
}
