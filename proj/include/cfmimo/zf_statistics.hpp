#pragma once

// Zero-forcing precoder and the Monte-Carlo expectations gamma (residual
// interference from estimation error) and theta (per-AP power usage) that
// parameterize the power-control problems.
//
// Two implementations of the expectation are kept: an OpenMP kernel used by
// the library and a serial reference that evaluates the defining matrix
// products literally. Both consume identical random streams, so their
// outputs agree to rounding.

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "cfmimo/power_model.hpp"
#include "cfmimo/propagation.hpp"

namespace cfmimo {

struct ZfStatistics {
  Eigen::MatrixXd gamma;     // K x K
  Eigen::MatrixXd theta;     // M x K
  Eigen::MatrixXd gamma_se;  // Monte-Carlo standard errors, same shapes
  Eigen::MatrixXd theta_se;
  std::size_t n_realizations = 0;
  std::size_t rejected = 0;

  std::size_t num_aps() const { return static_cast<std::size_t>(theta.rows()); }
  std::size_t num_users() const { return static_cast<std::size_t>(theta.cols()); }
};

struct ZfOptions {
  double max_condition = 1e10;
  double max_reject_rate = 0.01;
  /// Realizations per independent random stream.
  std::size_t block_size = 32;
};

/// B = conj(G) (G^T conj(G))^{-1}. Throws SingularChannelError when the
/// Gram matrix condition number exceeds max_condition.
Eigen::MatrixXcd zf_matrix(const Eigen::MatrixXcd& g_hat, double max_condition = 1e10);

/// Condition number of G^T conj(G) (ratio of extreme eigenvalues).
double gram_condition(const Eigen::MatrixXcd& g_hat);

/// Averages gamma and theta over n_mc accepted draws of the estimate.
/// Singular draws are redrawn and counted; RejectionRateError if more than
/// max_reject_rate of all attempts were rejected.
ZfStatistics estimate_zf_statistics(const MmseStats& stats, std::size_t n_mc, std::uint64_t seed,
                                    const ZfOptions& options = {});

namespace reference {

/// Serial evaluation of diag(B^H D_k B) and
/// diag((G^T G*)^{-1} g_m^T g_m^* (G^T G*)^{-1}) per draw.
ZfStatistics estimate_zf_statistics(const MmseStats& stats, std::size_t n_mc, std::uint64_t seed,
                                    const ZfOptions& options = {});

}  // namespace reference

/// Empirical powers of the two signal terms at each user.
struct SinrValidation {
  Eigen::VectorXd desired_power;           // mean |sqrt(rho_f) g_hat_k^T B P s|^2
  Eigen::VectorXd max_desired_deviation;   // max relative deviation from rho_f eta_k over draws
  Eigen::VectorXd interference_power;      // mean |sqrt(rho_f) g_err_k^T B P s|^2
  Eigen::VectorXd interference_se;
  Eigen::VectorXd predicted_interference;  // rho_f sum_i gamma_ki eta_i
  Eigen::VectorXd predicted_se;            // from zf.gamma_se, conservative
  std::size_t n_realizations = 0;
};

/// Signal-level simulation of the received sample with unit-modulus QPSK
/// symbols. Confirms that gamma captures the interference created by the
/// estimation error.
SinrValidation validate_sinr(const MmseStats& stats, const ZfStatistics& zf, const PowerAllocation& eta,
                             double rho_f, std::size_t n_mc, std::uint64_t seed);

}  // namespace cfmimo
