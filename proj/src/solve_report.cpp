#include "cfmimo/solve_report.hpp"

namespace cfmimo {

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::infeasible: return "infeasible";
    case RunStatus::max_iter: return "max-iter";
    case RunStatus::ascent_flag: return "ascent-flag";
    case RunStatus::inner_failure: return "inner-failure";
  }
  return "unknown";
}

}  // namespace cfmimo
