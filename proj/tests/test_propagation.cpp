#include <doctest.h>

#include <cmath>

#include "cfmimo/errors.hpp"
#include "cfmimo/propagation.hpp"

using namespace cfmimo;

TEST_CASE("generate_topology keeps every point inside the square") {
  const Topology t = generate_topology(4, 2, 1.0, 7);
  CHECK(t.num_aps() == 4);
  CHECK(t.num_users() == 2);
  for (const auto* list : {&t.ap_positions, &t.user_positions}) {
    for (const Point& p : *list) {
      CHECK(p.x >= 0.0);
      CHECK(p.x < 1.0);
      CHECK(p.y >= 0.0);
      CHECK(p.y < 1.0);
    }
  }
}

TEST_CASE("generate_topology is deterministic given the seed") {
  const Topology a = generate_topology(4, 2, 1.0, 7);
  const Topology b = generate_topology(4, 2, 1.0, 7);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.ap_positions[i].x == b.ap_positions[i].x);
    CHECK(a.ap_positions[i].y == b.ap_positions[i].y);
  }
  const Topology c = generate_topology(4, 2, 1.0, 8);
  CHECK(c.ap_positions[0].x != a.ap_positions[0].x);
}

TEST_CASE("generate_topology rejects fewer APs than users") {
  CHECK_THROWS_AS(generate_topology(1, 2, 1.0, 7), ParameterError);
  CHECK_THROWS_AS(generate_topology(0, 0, 1.0, 7), ParameterError);
  CHECK_THROWS_AS(generate_topology(4, 2, 0.0, 7), ParameterError);
}

TEST_CASE("wrapped_distance examples") {
  CHECK(wrapped_distance({0.3, 0.4}, {0.3, 0.4}, 1.0) == 0.0);
  CHECK(wrapped_distance({0.0, 0.0}, {0.9, 0.0}, 1.0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(wrapped_distance({0.0, 0.0}, {0.5, 0.5}, 1.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("wrapped_distance is a bounded symmetric metric on sampled triples") {
  Rng rng(99);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const double side = 2.0;
  for (int i = 0; i < 2000; ++i) {
    const Point p{u(rng), u(rng)}, q{u(rng), u(rng)}, r{u(rng), u(rng)};
    const double pq = wrapped_distance(p, q, side);
    CHECK(pq == doctest::Approx(wrapped_distance(q, p, side)).epsilon(1e-14));
    CHECK(pq <= side * std::sqrt(0.5) + 1e-12);
    CHECK(pq <= wrapped_distance(p, r, side) + wrapped_distance(r, q, side) + 1e-12);
  }
}

TEST_CASE("COST-Hata gain values") {
  CHECK(cost_hata_gain(1.0, 0.0) == doctest::Approx(std::pow(10.0, -13.6)).epsilon(1e-14));
  CHECK(cost_hata_gain(0.1, 0.0) == doctest::Approx(std::pow(10.0, -10.1)).epsilon(1e-14));
  CHECK(cost_hata_gain(0.37, 8.0) / cost_hata_gain(0.37, 0.0) == doctest::Approx(std::pow(10.0, 0.8)).epsilon(1e-13));
  // d_min floor
  CHECK(cost_hata_gain(0.0, 0.0) == cost_hata_gain(kDefaultMinDistanceKm, 0.0));
  CHECK(std::isfinite(cost_hata_gain(0.0, 0.0)));
}

TEST_CASE("large_scale_fading without shadowing decreases with distance") {
  Topology t;
  t.area_side = 1.0;
  t.ap_positions = {{0.0, 0.0}};
  t.user_positions = {{0.05, 0.0}, {0.2, 0.0}, {0.45, 0.0}};
  Rng rng(1);
  const BetaMatrix b = large_scale_fading(t, 0.0, kDefaultMinDistanceKm, rng);
  CHECK(b.beta(0, 0) > b.beta(0, 1));
  CHECK(b.beta(0, 1) > b.beta(0, 2));
  CHECK((b.beta.array() > 0.0).all());
  CHECK(b.beta(0, 1) == doctest::Approx(cost_hata_gain(0.2, 0.0)).epsilon(1e-12));
}

TEST_CASE("large_scale_fading entries are positive and finite with shadowing") {
  const Topology t = generate_topology(50, 10, 1.0, 3);
  Rng rng(4);
  const BetaMatrix b = large_scale_fading(t, 8.0, kDefaultMinDistanceKm, rng);
  CHECK((b.beta.array() > 0.0).all());
  CHECK(b.beta.allFinite());
}

TEST_CASE("mmse_stats examples") {
  BetaMatrix beta{Eigen::MatrixXd(1, 3)};
  beta.beta << 0.0, 1.0, 1.0;
  // rho_r tau_u = 1
  MmseStats s = mmse_stats(beta, 1.0 / 3.0, 3);
  CHECK(s.var_hat(0, 0) == 0.0);
  CHECK(s.var_err(0, 0) == 0.0);
  CHECK(s.var_hat(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.var_err(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  // rho_r tau_u = 1e12
  s = mmse_stats(beta, 1e12 / 3.0, 3);
  CHECK(s.var_hat(0, 1) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(s.var_err(0, 1) == doctest::Approx(1e-12).epsilon(1e-3));
}

TEST_CASE("mmse_stats rejects short pilots") {
  BetaMatrix beta{Eigen::MatrixXd::Constant(4, 3, 1e-12)};
  CHECK_THROWS_AS(mmse_stats(beta, 1.0, 2), ParameterError);
  CHECK_THROWS_AS(mmse_stats(beta, 0.0, 3), ParameterError);
}

TEST_CASE("estimate and error variances add up to beta") {
  const Topology t = generate_topology(40, 8, 1.0, 21);
  Rng rng(5);
  const BetaMatrix b = large_scale_fading(t, 8.0, kDefaultMinDistanceKm, rng);
  const MmseStats s = mmse_stats(b, 0.1 / 6.4e-13, 8);
  const double eps = std::numeric_limits<double>::epsilon();
  for (Eigen::Index i = 0; i < b.beta.size(); ++i) {
    const double beta = b.beta.data()[i];
    CHECK(std::abs(s.var_hat.data()[i] + s.var_err.data()[i] - beta) <= eps * beta);
    CHECK(s.var_hat.data()[i] >= 0.0);
    CHECK(s.var_hat.data()[i] <= beta);
  }
}

TEST_CASE("draw_realization with perfect CSI has zero error") {
  BetaMatrix b{Eigen::MatrixXd::Constant(3, 2, 2.0)};
  Rng rng(1);
  const ChannelRealization r = draw_realization(MmseStats::perfect(b), rng);
  CHECK(r.g_err.isZero(0.0));
  CHECK((r.channel() - r.g_hat).isZero(0.0));
}

TEST_CASE("draw_realization is deterministic for a fixed seed") {
  BetaMatrix b{Eigen::MatrixXd::Constant(3, 2, 2.0)};
  const MmseStats s = mmse_stats(b, 0.25, 2);
  Rng r1(17), r2(17);
  const ChannelRealization a = draw_realization(s, r1);
  const ChannelRealization c = draw_realization(s, r2);
  CHECK(a.g_hat == c.g_hat);
  CHECK(a.g_err == c.g_err);
}

TEST_CASE("empirical second moments match the MMSE variances within 3 standard errors") {
  BetaMatrix b{Eigen::MatrixXd(2, 2)};
  b.beta << 1.0, 0.3, 2.5, 0.05;
  const MmseStats s = mmse_stats(b, 0.7, 2);
  Rng rng(2024);
  const int n = 100000;
  Eigen::MatrixXd hat_sum = Eigen::MatrixXd::Zero(2, 2), hat_sq = hat_sum, err_sum = hat_sum, err_sq = hat_sum;
  std::complex<double> cross(0.0, 0.0);
  for (int i = 0; i < n; ++i) {
    const ChannelRealization r = draw_realization(s, rng);
    const Eigen::MatrixXd ph = r.g_hat.cwiseAbs2(), pe = r.g_err.cwiseAbs2();
    hat_sum += ph;
    hat_sq += ph.cwiseAbs2();
    err_sum += pe;
    err_sq += pe.cwiseAbs2();
    cross += r.g_hat(0, 0) * std::conj(r.g_err(0, 0));
  }
  auto within = [n](const Eigen::MatrixXd& sum, const Eigen::MatrixXd& sq, const Eigen::MatrixXd& var) {
    for (Eigen::Index i = 0; i < var.size(); ++i) {
      const double mean = sum.data()[i] / n;
      const double se = std::sqrt((sq.data()[i] / n - mean * mean) / (n - 1));
      CHECK(std::abs(mean - var.data()[i]) <= 3.0 * se);
    }
  };
  within(hat_sum, hat_sq, s.var_hat);
  within(err_sum, err_sq, s.var_err);
  // independence: E[g_hat conj(g_err)] = 0, se of the product ~ sqrt(vh ve / n)
  const double se_cross = std::sqrt(s.var_hat(0, 0) * s.var_err(0, 0) / n);
  CHECK(std::abs(cross / static_cast<double>(n)) <= 4.0 * se_cross);
}
