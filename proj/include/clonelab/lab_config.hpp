#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clonelab/lab_io.hpp"

namespace clonelab {

// All tolerances, seeds, budgets, and sizes for the experiment runner.  Every
// field has a shipped default; a config file overrides selectively, and
// unknown keys anywhere in the file are rejected.
struct CloneR2nConfig {
  std::vector<int> ns{1, 2};
  int g = 1;
  std::uint64_t seed = 11;
  int defect_samples = 1000;
  double defect_box = 10.0;
  double defect_tol = 1e-12;
  double eta_tol = 1e-12;
  int flow_samples = 1000;
  double flow_box = 1.0;
  double flow_step = 1e-4;
  double flow_tol = 1e-6;
  int jacobian_samples = 5;
  double jacobian_tol = 1e-5;
};

struct NoGoConfig {
  int witness_count = 20;
  std::uint64_t seed = 7;
  int stage_count = 2;
  int max_harmonic = 2;
  int max_power = 2;
  int max_total_degree = 2;
  double coeff_scale = 0.4;
  int probe_samples = 64;
  double probe_momentum = 0.25;
  std::vector<double> blank{0.0, 0.0};
  std::vector<double> machine_start{0.0, 0.0};
  double step = 1e-3;
  int max_doublings = 4;
};

struct ApproxSuiteConfig {
  long budget = 50000;
  std::vector<std::uint64_t> seeds{1};
  int sample_count = 24;
  double sample_box = 1.0;
  double target = 1e-3;
  double step = 0.01;
  int population = 16;
  double sigma0 = 0.5;
  int stagnation = 50;
};

struct ApproxConfig {
  ApproxSuiteConfig r2;
  ApproxSuiteConfig cylinder;
  std::vector<double> cylinder_blank{3.141592653589793, 0.0};
  int cylinder_max_harmonic = 1;
  int cylinder_max_power = 2;
  int cylinder_max_total_degree = 2;
  int stages = 2;
  int floor_samples = 2048;
  double floor_step = 2e-3;
  double floor_threshold = 3.0915926535897933;  // pi - 0.05

  ApproxConfig() {
    cylinder.budget = 20000;
    cylinder.seeds = {1, 2, 3, 4, 5};
    cylinder.sample_count = 12;
    cylinder.step = 0.02;
    cylinder.target = 0.0;
  }
};

struct PointsConfig {
  std::uint64_t seed = 5;
  int random_count = 8;
  double min_spacing = 0.5;
  double momentum_box = 1.5;
  double step = 1e-3;
  double endpoint_tol = 1e-6;
  double interference_tol = 1e-9;
  int jacobian_probes = 5;
  double jacobian_tol = 1e-5;
};

struct QuantumConfig {
  std::uint64_t seed = 3;
  int regroup_pairs = 1000;
  int unitary_pairs = 100;
  int max_dim = 8;
  double tol = 1e-12;
};

struct SelftestConfig {
  std::uint64_t seed = 9;
  int sample_count = 200;
  std::vector<double> pendulum_steps{1e-2, 5e-3, 2.5e-3};
  double pendulum_time = 10.0;
  double ratio_low = 3.5;
  double ratio_high = 4.5;
  double reversal_tol = 1e-9;
  int quick_witnesses = 3;
  long quick_budget = 600;
  int quick_floor_samples = 128;
};

struct LabConfig {
  std::string experiment_id = "default";
  CloneR2nConfig clone_r2n;
  NoGoConfig no_go;
  ApproxConfig approx;
  PointsConfig points;
  QuantumConfig quantum;
  SelftestConfig selftest;

  static LabConfig from_json(const Json& j);
  static LabConfig load(const std::string& path);
  Json to_json() const;
};

}  // namespace clonelab
