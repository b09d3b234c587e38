#pragma once

#include <optional>

#include "cfmimo/barrier_solver.hpp"
#include "cfmimo/power_model.hpp"
#include "cfmimo/zf_statistics.hpp"

namespace cfmimo {

/// Strictly feasible power coefficients for the QoS and per-AP rows, or
/// nullopt if none exist. In the power coefficients themselves both row
/// families are linear, so this is a phase-1 LP: maximize the smallest
/// normalized slack. With all floors at zero the slightly shrunk
/// equal-power point is returned without solving anything.
std::optional<PowerAllocation> feasible_point(const ZfStatistics& zf, const PowerParams& params, const QosSpec& qos,
                                              const BarrierOptions& options = {});

/// Optimal value of the phase-1 problem: the smallest achievable largest
/// normalized row excess. Negative iff a strictly feasible point exists.
double phase_one_violation(const ZfStatistics& zf, const PowerParams& params, const QosSpec& qos);

}  // namespace cfmimo
