#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace clonelab {

struct CmaOptions {
  int population = 16;
  double sigma0 = 0.5;
  int stagnation = 50;   // generations without relative improvement before a restart
  double target = 0.0;   // stop once the best value is <= target
  long budget = 10000;   // total objective evaluations allowed
  std::uint64_t seed = 0;
};

struct CmaResult {
  Eigen::VectorXd best;
  double best_value = 0.0;
  long evaluations = 0;
  int restarts = 0;
  std::vector<double> trace;  // global best after each generation
};

// Covariance matrix adaptation with rank-1/rank-mu updates and step-size
// control.  Starts from the origin; stagnation triggers restarts that
// alternate between polishing around the incumbent (sigma0 / 10) and
// diversifying from it (sigma0 * 1.5).  Fully deterministic for a fixed seed.
CmaResult cma_minimize(const std::function<double(const Eigen::VectorXd&)>& f, int n,
                       const CmaOptions& options);

}  // namespace clonelab
