#pragma once

#include <vector>

#include "cfmimo/barrier_solver.hpp"
#include "cfmimo/power_model.hpp"

namespace cfmimo {

enum class RunStatus { converged, infeasible, max_iter, ascent_flag, inner_failure };

const char* to_string(RunStatus s);

struct SolveReport {
  std::vector<double> lambda;  // Dinkelbach parameter, bits/Joule (empty for SCA)
  std::vector<double> ee;      // full energy efficiency per outer iterate, bits/Joule
  std::vector<PowerAllocation> iterates;  // aligned with ee
  int outer_iterations = 0;
  std::vector<KktReport> inner;
  RunStatus status = RunStatus::converged;
  double wall_ms = 0.0;
  int ascent_violations = 0;   // SCA only
  double max_surrogate_excess = 0.0;  // SCA only: max(F^(n) - F) at returned points
};

struct SolveResult {
  PowerAllocation allocation;
  SolveReport report;
};

}  // namespace cfmimo
