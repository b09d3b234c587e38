#include "cfmimo/zf_statistics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include "cfmimo/errors.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

struct Accumulator {
  MatrixXd theta_sum, theta_sq, gamma_sum, gamma_sq;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  bool exhausted = false;

  Accumulator(Index m, Index k)
      : theta_sum(MatrixXd::Zero(m, k)),
        theta_sq(MatrixXd::Zero(m, k)),
        gamma_sum(MatrixXd::Zero(k, k)),
        gamma_sq(MatrixXd::Zero(k, k)) {}

  void add(const MatrixXd& theta, const MatrixXd& gamma) {
    theta_sum += theta;
    theta_sq += theta.cwiseAbs2();
    gamma_sum += gamma;
    gamma_sq += gamma.cwiseAbs2();
    ++accepted;
  }

  void merge(const Accumulator& o) {
    theta_sum += o.theta_sum;
    theta_sq += o.theta_sq;
    gamma_sum += o.gamma_sum;
    gamma_sq += o.gamma_sq;
    accepted += o.accepted;
    rejected += o.rejected;
    exhausted = exhausted || o.exhausted;
  }
};

MatrixXcd gram(const MatrixXcd& g_hat) { return g_hat.transpose() * g_hat.conjugate(); }

double condition_of(const MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(a, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

double real_checked(std::complex<double> z, const char* what) {
  if (std::abs(z.imag()) > 1e-10 * std::abs(z.real()) && std::abs(z.imag()) > 1e-300) {
    std::ostringstream os;
    os << what << ": diagonal entry has imaginary residue " << z.imag() << " vs real " << z.real();
    throw std::runtime_error(os.str());
  }
  return z.real();
}

std::size_t block_count(std::size_t n_mc, std::size_t block) { return (n_mc + block - 1) / block; }

std::size_t block_length(std::size_t b, std::size_t n_mc, std::size_t block) {
  return std::min(block, n_mc - b * block);
}

void check_inputs(const MmseStats& stats, std::size_t n_mc, const ZfOptions& options) {
  if (n_mc == 0) throw ParameterError("estimate_zf_statistics: n_mc must be >= 1");
  if (options.block_size == 0) throw ParameterError("estimate_zf_statistics: block_size must be >= 1");
  if (stats.num_aps() < stats.num_users()) {
    throw ParameterError("estimate_zf_statistics: ZF needs M >= K");
  }
  if (stats.var_err.rows() != stats.var_hat.rows() || stats.var_err.cols() != stats.var_hat.cols()) {
    throw ParameterError("estimate_zf_statistics: var_hat and var_err shapes differ");
  }
}

// Runs one block of draws. `sample` maps an accepted estimate to (theta, gamma).
template <typename Sample>
Accumulator run_block(const MmseStats& stats, std::size_t count, std::uint64_t seed, std::size_t block_index,
                      const ZfOptions& options, Sample&& sample) {
  const auto m = static_cast<Index>(stats.num_aps());
  const auto k = static_cast<Index>(stats.num_users());
  Accumulator acc(m, k);
  Rng rng = make_stream(seed, block_index);
  // Hard cap keeps a degenerate input from looping forever; the global
  // rejection-rate check reports it.
  const std::size_t max_rejects = std::max<std::size_t>(8, count);
  MatrixXd theta(m, k), gamma(k, k);
  while (acc.accepted < count) {
    const MatrixXcd g_hat = draw_estimate(stats, rng);
    const MatrixXcd a = gram(g_hat);
    if (condition_of(a) > options.max_condition) {
      if (++acc.rejected > max_rejects) {
        acc.exhausted = true;
        break;
      }
      continue;
    }
    sample(g_hat, a, theta, gamma);
    acc.add(theta, gamma);
  }
  return acc;
}

ZfStatistics finalize(const Accumulator& total, std::size_t n_mc, const ZfOptions& options) {
  const std::size_t attempts = total.accepted + total.rejected;
  if (total.exhausted || static_cast<double>(total.rejected) > options.max_reject_rate * static_cast<double>(attempts)) {
    std::ostringstream os;
    os << "estimate_zf_statistics: " << total.rejected << " of " << attempts
       << " channel draws rejected as singular (limit " << options.max_reject_rate * 100.0 << "%)";
    throw RejectionRateError(os.str());
  }
  const double n = static_cast<double>(n_mc);
  auto standard_error = [n](const MatrixXd& sum, const MatrixXd& sq) -> MatrixXd {
    if (n < 2.0) return MatrixXd::Constant(sum.rows(), sum.cols(), std::numeric_limits<double>::infinity());
    const MatrixXd mean = sum / n;
    const MatrixXd var = ((sq - n * mean.cwiseAbs2()) / (n - 1.0)).cwiseMax(0.0);
    return MatrixXd((var / n).cwiseSqrt());
  };
  ZfStatistics out;
  out.theta = total.theta_sum / n;
  out.gamma = total.gamma_sum / n;
  out.theta_se = standard_error(total.theta_sum, total.theta_sq);
  out.gamma_se = standard_error(total.gamma_sum, total.gamma_sq);
  out.n_realizations = n_mc;
  out.rejected = total.rejected;
  return out;
}

}  // namespace

double gram_condition(const MatrixXcd& g_hat) { return condition_of(gram(g_hat)); }

MatrixXcd zf_matrix(const MatrixXcd& g_hat, double max_condition) {
  if (g_hat.rows() < g_hat.cols() || g_hat.cols() == 0) {
    throw SingularChannelError("zf_matrix: estimate must be M x K with M >= K >= 1");
  }
  const MatrixXcd a = gram(g_hat);
  const double cond = condition_of(a);
  if (cond > max_condition) {
    std::ostringstream os;
    os << "zf_matrix: Gram matrix condition number " << cond << " exceeds " << max_condition;
    throw SingularChannelError(os.str());
  }
  // B^H = A^{-1} G^T since A is Hermitian positive definite.
  const MatrixXcd bh = a.llt().solve(g_hat.transpose());
  return bh.adjoint();
}

ZfStatistics estimate_zf_statistics(const MmseStats& stats, std::size_t n_mc, std::uint64_t seed,
                                    const ZfOptions& options) {
  check_inputs(stats, n_mc, options);
  const auto m = static_cast<Index>(stats.num_aps());
  const auto k = static_cast<Index>(stats.num_users());
  const MatrixXd err_t = stats.var_err.transpose();

  const std::size_t blocks = block_count(n_mc, options.block_size);
  std::vector<Accumulator> partial(blocks, Accumulator(0, 0));

  auto sample = [&err_t](const MatrixXcd& g_hat, const MatrixXcd& a, MatrixXd& theta, MatrixXd& gamma) {
    const MatrixXcd bh = a.llt().solve(g_hat.transpose());
    theta = bh.cwiseAbs2().transpose();
    gamma.noalias() = err_t * theta;
  };

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const auto ub = static_cast<std::size_t>(b);
    partial[ub] = run_block(stats, block_length(ub, n_mc, options.block_size), seed, ub, options, sample);
  }

  Accumulator total(m, k);
  for (const auto& p : partial) total.merge(p);
  return finalize(total, n_mc, options);
}

namespace reference {

ZfStatistics estimate_zf_statistics(const MmseStats& stats, std::size_t n_mc, std::uint64_t seed,
                                    const ZfOptions& options) {
  check_inputs(stats, n_mc, options);
  const auto m = static_cast<Index>(stats.num_aps());
  const auto k = static_cast<Index>(stats.num_users());

  auto sample = [&](const MatrixXcd& g_hat, const MatrixXcd& a, MatrixXd& theta, MatrixXd& gamma) {
    const MatrixXcd a_inv = a.inverse();
    const MatrixXcd b = g_hat.conjugate() * a_inv;
    for (Index u = 0; u < k; ++u) {
      const MatrixXcd d = stats.var_err.col(u).cast<std::complex<double>>().asDiagonal();
      const MatrixXcd q = b.adjoint() * d * b;
      for (Index i = 0; i < k; ++i) gamma(u, i) = real_checked(q(i, i), "gamma");
    }
    for (Index ap = 0; ap < m; ++ap) {
      const Eigen::RowVectorXcd row = g_hat.row(ap);
      const MatrixXcd q = a_inv * row.transpose() * row.conjugate() * a_inv;
      for (Index i = 0; i < k; ++i) theta(ap, i) = real_checked(q(i, i), "theta");
    }
  };

  Accumulator total(m, k);
  const std::size_t blocks = block_count(n_mc, options.block_size);
  for (std::size_t b = 0; b < blocks; ++b) {
    total.merge(run_block(stats, block_length(b, n_mc, options.block_size), seed, b, options, sample));
  }
  return finalize(total, n_mc, options);
}

}  // namespace reference

SinrValidation validate_sinr(const MmseStats& stats, const ZfStatistics& zf, const PowerAllocation& eta,
                             double rho_f, std::size_t n_mc, std::uint64_t seed) {
  const auto k = static_cast<Index>(stats.num_users());
  if (eta.eta.size() != k || zf.gamma.rows() != k) throw ParameterError("validate_sinr: dimension mismatch");
  if (n_mc == 0) throw ParameterError("validate_sinr: n_mc must be >= 1");

  Eigen::VectorXd des_sum = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd des_dev = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd int_sum = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd int_sq = Eigen::VectorXd::Zero(k);
  const Eigen::VectorXd amp = eta.eta.cwiseSqrt();
  const double sr = std::sqrt(rho_f);
  const double h = 1.0 / std::sqrt(2.0);

  Rng rng = make_stream(seed, 0);
  std::bernoulli_distribution coin(0.5);
  std::size_t done = 0;
  while (done < n_mc) {
    const ChannelRealization ch = draw_realization(stats, rng);
    if (gram_condition(ch.g_hat) > ZfOptions{}.max_condition) continue;
    const MatrixXcd b = zf_matrix(ch.g_hat);
    Eigen::VectorXcd s(k);
    for (Index i = 0; i < k; ++i) s(i) = {coin(rng) ? h : -h, coin(rng) ? h : -h};
    const Eigen::VectorXcd x = b * (amp.cast<std::complex<double>>().asDiagonal() * s);
    const Eigen::VectorXcd desired = sr * (ch.g_hat.transpose() * x);
    const Eigen::VectorXcd interference = sr * (ch.g_err.transpose() * x);
    for (Index u = 0; u < k; ++u) {
      const double p = std::norm(desired(u));
      des_sum(u) += p;
      const double expect = rho_f * eta.eta(u);
      if (expect > 0.0) des_dev(u) = std::max(des_dev(u), std::abs(p - expect) / expect);
      const double q = std::norm(interference(u));
      int_sum(u) += q;
      int_sq(u) += q * q;
    }
    ++done;
  }

  const double n = static_cast<double>(n_mc);
  SinrValidation out;
  out.n_realizations = n_mc;
  out.desired_power = des_sum / n;
  out.max_desired_deviation = des_dev;
  out.interference_power = int_sum / n;
  out.interference_se = Eigen::VectorXd::Zero(k);
  if (n_mc > 1) {
    const Eigen::VectorXd mean = out.interference_power;
    out.interference_se =
        (((int_sq - n * mean.cwiseAbs2()) / (n - 1.0)).cwiseMax(0.0) / n).cwiseSqrt();
  }
  out.predicted_interference = rho_f * (zf.gamma * eta.eta);
  out.predicted_se = rho_f * (zf.gamma_se * eta.eta);
  return out;
}

}  // namespace cfmimo
