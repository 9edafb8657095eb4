#pragma once

// One-shot verification harness: runs the vacuum fixed point, the
// massless degeneration, the canonical weak-field scenario across three
// refinement levels (n, 2n, 4n), builds global and cone charts, the
// double-null cross-check and all bound certificates, and prints one
// pass/fail line per check with the measured values and convergence
// orders.

#include <iosfwd>
#include <string>
#include <vector>

#include "ekg/config.hpp"

namespace ekg {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  double wall_seconds = 0.0;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// The full suite; logs one line per check to `log`.
VerifyReport run_verification(const RunConfig& cfg, std::ostream& log);

// The canonical weak-field scenario used by `ekg-axis verify` when no
// config overrides are wanted and by the acceptance suite.
std::string canonical_config_text();

}  // namespace ekg
