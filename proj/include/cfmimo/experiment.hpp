#pragma once

// Seeded Monte-Carlo experiments comparing the optimized allocations with
// the equal-power baseline, and their CSV output.

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/propagation.hpp"
#include "cfmimo/zf_statistics.hpp"

namespace cfmimo {

struct ResultRow {
  Scheme scheme = Scheme::equal;
  std::size_t m = 0;
  std::size_t k = 0;
  double rho_f_w = 0.0;
  std::string qos_rule;
  std::uint64_t seed = 0;
  double ee_bits_per_joule = 0.0;
  double sum_se = 0.0;
  int iterations = 0;
  std::string status;
  double wall_ms = 0.0;
};

struct AggregateRow {
  Scheme scheme = Scheme::equal;
  std::size_t m = 0;
  std::size_t k = 0;
  double rho_f_w = 0.0;
  std::string qos_rule;
  std::size_t runs = 0;
  std::size_t converged = 0;
  double mean_ee = 0.0;
  double se_ee = 0.0;
  double mean_sum_se = 0.0;
  double mean_iterations = 0.0;

  std::size_t failures() const { return runs - converged; }
};

/// One topology with its perfect- and imperfect-CSI expectations. These do
/// not depend on rho_f, so a power sweep reuses them.
struct Instance {
  std::size_t m = 0;
  std::uint64_t seed = 0;
  BetaMatrix beta;
  ZfStatistics perfect;
  ZfStatistics imperfect;
};

Instance make_instance(const ExperimentConfig& cfg, std::size_t m, std::uint64_t seed);

/// One row per configured scheme. PCE is solved on the perfect-CSI
/// statistics, IPCE and the equal-power baseline on the imperfect ones.
std::vector<ResultRow> evaluate_instance(const ExperimentConfig& cfg, const Instance& inst, double rho_f_w);

std::vector<ResultRow> run_point(const ExperimentConfig& cfg, std::size_t m, double rho_f_w, std::uint64_t seed);

/// Seed of the i-th topology; identical across M and rho_f values.
std::uint64_t topology_seed(const ExperimentConfig& cfg, std::size_t index);

struct SweepResult {
  std::vector<ResultRow> rows;        // ordered by (M, rho_f, scheme, seed)
  std::vector<AggregateRow> aggregates;

  /// True when every optimized (non-baseline) row is infeasible.
  bool all_infeasible() const;
};

/// Full product over cfg.m_list x cfg.rho_f_w with cfg.n_topologies draws.
SweepResult run_sweep(const ExperimentConfig& cfg);
SweepResult sweep_m(const ExperimentConfig& cfg);
SweepResult sweep_rho_f(const ExperimentConfig& cfg);

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows);

inline constexpr const char* kRowHeader =
    "scheme,M,K,rho_f_w,qos_rule,seed,ee_bits_per_joule,sum_se,iters,status,wall_ms";
inline constexpr const char* kAggregateHeader =
    "scheme,M,K,rho_f_w,qos_rule,runs,converged,failures,mean_ee_bits_per_joule,se_ee,mean_sum_se,mean_iters";

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows);

/// results.csv -> results_aggregate.csv
std::string aggregate_path(const std::string& out);

}  // namespace cfmimo
