#include "cfmimo/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cfmimo/errors.hpp"

namespace cfmimo {

namespace {

Eigen::MatrixXcd draw_cn(const Eigen::MatrixXd& variance, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd out(variance.rows(), variance.cols());
  for (Eigen::Index j = 0; j < variance.cols(); ++j) {
    for (Eigen::Index i = 0; i < variance.rows(); ++i) {
      const double scale = std::sqrt(variance(i, j) / 2.0);
      const double re = normal(rng);
      const double im = normal(rng);
      out(i, j) = {scale * re, scale * im};
    }
  }
  return out;
}

}  // namespace

MmseStats MmseStats::perfect(const BetaMatrix& beta) {
  return {beta.beta, Eigen::MatrixXd::Zero(beta.beta.rows(), beta.beta.cols())};
}

Topology generate_topology(std::size_t m, std::size_t k, double area_side, std::uint64_t seed) {
  if (m == 0 || k == 0) throw ParameterError("generate_topology: need at least one AP and one user");
  if (!(area_side > 0.0)) throw ParameterError("generate_topology: area_side must be positive");
  if (m < k) {
    throw ParameterError("generate_topology: M=" + std::to_string(m) + " < K=" + std::to_string(k));
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> coord(0.0, area_side);
  Topology topo;
  topo.area_side = area_side;
  auto draw = [&] {
    Point p{coord(rng), coord(rng)};
    // uniform_real_distribution may round up to the upper bound
    if (p.x >= area_side) p.x = std::nextafter(area_side, 0.0);
    if (p.y >= area_side) p.y = std::nextafter(area_side, 0.0);
    return p;
  };
  topo.ap_positions.reserve(m);
  topo.user_positions.reserve(k);
  for (std::size_t i = 0; i < m; ++i) topo.ap_positions.push_back(draw());
  for (std::size_t i = 0; i < k; ++i) topo.user_positions.push_back(draw());
  return topo;
}

double wrapped_distance(Point p, Point q, double area_side) {
  double best = std::numeric_limits<double>::infinity();
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      const double ex = p.x - (q.x + dx * area_side);
      const double ey = p.y - (q.y + dy * area_side);
      best = std::min(best, std::hypot(ex, ey));
    }
  }
  return best;
}

double cost_hata_gain(double distance_km, double shadow_db, double d_min_km) {
  const double d = std::max(distance_km, d_min_km);
  return std::pow(10.0, -13.6 - 3.5 * std::log10(d) + shadow_db / 10.0);
}

BetaMatrix large_scale_fading(const Topology& topo, double sigma_shad_db, double d_min_km, Rng& rng) {
  if (sigma_shad_db < 0.0) throw ParameterError("large_scale_fading: sigma_shad must be >= 0");
  if (d_min_km < 0.0) throw ParameterError("large_scale_fading: d_min must be >= 0");
  const auto m = static_cast<Eigen::Index>(topo.num_aps());
  const auto k = static_cast<Eigen::Index>(topo.num_users());
  std::normal_distribution<double> shadow(0.0, 1.0);
  BetaMatrix out{Eigen::MatrixXd(m, k)};
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index u = 0; u < k; ++u) {
      const double d = wrapped_distance(topo.ap_positions[a], topo.user_positions[u], topo.area_side);
      const double x = sigma_shad_db * shadow(rng);
      out.beta(a, u) = cost_hata_gain(d, x, d_min_km);
    }
  }
  return out;
}

MmseStats mmse_stats(const BetaMatrix& beta, double rho_r, std::size_t tau_u) {
  if (!(rho_r > 0.0)) throw ParameterError("mmse_stats: rho_r must be positive");
  if (tau_u < static_cast<std::size_t>(beta.beta.cols())) {
    throw ParameterError("mmse_stats: orthonormal pilots need tau_u >= K");
  }
  const double gain = rho_r * static_cast<double>(tau_u);
  MmseStats out;
  out.var_hat.resize(beta.beta.rows(), beta.beta.cols());
  out.var_err.resize(beta.beta.rows(), beta.beta.cols());
  // The larger share comes from its formula and the smaller by subtraction,
  // which is exact when the larger lies in [b/2, b]; the pair then sums to b.
  for (Eigen::Index j = 0; j < beta.beta.cols(); ++j) {
    for (Eigen::Index i = 0; i < beta.beta.rows(); ++i) {
      const double b = beta.beta(i, j);
      const double x = gain * b;
      double err = b / (1.0 + x);
      double hat = 0.0;
      if (err >= 0.5 * b) {
        hat = b - err;
      } else {
        hat = x * b / (1.0 + x);
        err = b - hat;
      }
      out.var_hat(i, j) = hat;
      out.var_err(i, j) = err;
    }
  }
  return out;
}

Eigen::MatrixXcd draw_estimate(const MmseStats& stats, Rng& rng) { return draw_cn(stats.var_hat, rng); }

ChannelRealization draw_realization(const MmseStats& stats, Rng& rng) {
  ChannelRealization out;
  out.g_hat = draw_cn(stats.var_hat, rng);
  out.g_err = draw_cn(stats.var_err, rng);
  return out;
}

}  // namespace cfmimo
