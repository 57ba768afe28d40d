#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clonelab/lab_config.hpp"

namespace clonelab {

struct RunContext {
  std::string out_dir = "out";
  bool quiet = false;
  std::optional<std::uint64_t> seed_override;
};

// Result of one experiment run: `violations` names every asserted property
// that failed; `report` is the deterministic payload also written to disk.
struct RunOutcome {
  bool ok = true;
  std::vector<std::string> violations;
  Json report;

  void require(bool condition, const std::string& property) {
    if (!condition) {
      ok = false;
      violations.push_back(property);
    }
  }
};

RunOutcome run_clone_r2n(const LabConfig& cfg, const RunContext& ctx);
RunOutcome run_no_go(const LabConfig& cfg, const RunContext& ctx);
RunOutcome run_approx(const LabConfig& cfg, const RunContext& ctx);
RunOutcome run_points(const LabConfig& cfg, const RunContext& ctx);
RunOutcome run_quantum(const LabConfig& cfg, const RunContext& ctx);
RunOutcome run_selftest(const LabConfig& cfg, const RunContext& ctx);

// Energy-drift scaling and time-reversal diagnostics for the pendulum flow.
struct PendulumHealth {
  std::vector<double> steps;
  std::vector<double> drifts;  // max |H - H(z0)| along [0, t_end] per step size
  std::vector<double> ratios;  // drifts[i] / drifts[i + 1]
  double reversal_error = 0.0;  // round trip at the finest step
};

PendulumHealth pendulum_health(const std::vector<double>& steps, double t_end,
                               const Eigen::Vector2d& z0 = Eigen::Vector2d(2.5, 0.0));

}  // namespace clonelab
