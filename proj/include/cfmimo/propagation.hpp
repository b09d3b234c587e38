#pragma once

// Network geometry, large-scale fading and MMSE channel-estimation
// statistics for a cell-free deployment of single-antenna APs.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cfmimo/rng.hpp"

namespace cfmimo {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// AP and user positions (km) inside the square [0, area_side)^2.
struct Topology {
  std::vector<Point> ap_positions;
  std::vector<Point> user_positions;
  double area_side = 1.0;

  std::size_t num_aps() const { return ap_positions.size(); }
  std::size_t num_users() const { return user_positions.size(); }
};

/// Large-scale fading gains, M x K, linear scale.
struct BetaMatrix {
  Eigen::MatrixXd beta;
};

/// Variances of the MMSE estimate and of the estimation error, M x K.
/// var_hat + var_err reproduces beta entrywise.
struct MmseStats {
  Eigen::MatrixXd var_hat;
  Eigen::MatrixXd var_err;

  std::size_t num_aps() const { return static_cast<std::size_t>(var_hat.rows()); }
  std::size_t num_users() const { return static_cast<std::size_t>(var_hat.cols()); }

  /// Perfect CSI: the estimate carries all of beta and the error is zero.
  static MmseStats perfect(const BetaMatrix& beta);
};

/// One small-scale draw: estimate and independent estimation error.
struct ChannelRealization {
  Eigen::MatrixXcd g_hat;
  Eigen::MatrixXcd g_err;

  Eigen::MatrixXcd channel() const { return g_hat + g_err; }
};

inline constexpr double kDefaultMinDistanceKm = 0.01;

/// Uniform i.i.d. placement of m APs and k users. Throws ParameterError
/// for m < k, zero counts or a non-positive side.
Topology generate_topology(std::size_t m, std::size_t k, double area_side, std::uint64_t seed);

/// Torus distance: the minimum over the 9 periodic images of q.
double wrapped_distance(Point p, Point q, double area_side);

/// COST-Hata gain 10^(-13.6 - 3.5 log10(max(d, d_min)) + shadow_db / 10).
double cost_hata_gain(double distance_km, double shadow_db, double d_min_km = kDefaultMinDistanceKm);

/// Draws i.i.d. N(0, sigma_shad^2) shadowing per (m, k) and applies the
/// COST-Hata law over the wrapped distances.
BetaMatrix large_scale_fading(const Topology& topo, double sigma_shad_db, double d_min_km, Rng& rng);

/// MMSE variances with orthonormal pilots of length tau_u and normalized
/// uplink power rho_r. Throws ParameterError if tau_u < K or rho_r <= 0.
MmseStats mmse_stats(const BetaMatrix& beta, double rho_r, std::size_t tau_u);

/// Draws only the estimate; the ZF expectation kernels need nothing else.
Eigen::MatrixXcd draw_estimate(const MmseStats& stats, Rng& rng);

/// Circularly-symmetric complex Gaussian entries with the given variances,
/// estimate first, then error.
ChannelRealization draw_realization(const MmseStats& stats, Rng& rng);

}  // namespace cfmimo
