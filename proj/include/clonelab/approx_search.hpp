#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "clonelab/cloning_linear.hpp"
#include "clonelab/cma_es.hpp"
#include "clonelab/loop_topology.hpp"

namespace clonelab {

// A parametrized family of two-or-more-stage Hamiltonian isotopies on a
// product space.  Two kinds:
//   Quadratic — one symmetric coefficient matrix per stage (upper-triangle
//     parametrization), for spaces without angular slots;
//   TrigPoly — one coefficient per basis term per stage, where the basis is
//     every product of per-slot atoms (cos/sin up to harmonic cap on angular
//     slots, monomials up to the power cap on linear slots) with total degree
//     at most the cross cap.
// Every realized candidate is a flow and therefore isotopic to the identity.
class CandidateFamily {
 public:
  enum class Kind { Quadratic, TrigPoly };

  static CandidateFamily quadratic(PhaseSpace space, int stages,
                                   double stage_duration = 0.5);
  static CandidateFamily trig_poly(PhaseSpace space, int stages, int max_harmonic,
                                   int max_power, int max_total_degree,
                                   double stage_duration = 0.5);

  const PhaseSpace& space() const { return space_; }
  Kind kind() const { return kind_; }
  int stages() const { return stages_; }
  double stage_duration() const { return stage_duration_; }
  int parameters_per_stage() const { return per_stage_; }
  int parameter_count() const { return stages_ * per_stage_; }

  // Current parameter vector (zero = identity candidate).
  const Eigen::VectorXd& params() const { return params_; }
  void set_params(Eigen::VectorXd p);

  // Build the isotopy for an explicit parameter vector.
  Isotopy realize(const Eigen::VectorXd& p) const;
  Isotopy realize() const { return realize(params_); }

  // Basis terms of one stage (TrigPoly kind only).
  const std::vector<TrigPolyTerm>& basis() const { return basis_; }

 private:
  CandidateFamily() = default;

  PhaseSpace space_{std::vector<Factor>{Factor{}}};
  Kind kind_ = Kind::Quadratic;
  int stages_ = 0;
  int per_stage_ = 0;
  double stage_duration_ = 0.5;
  Eigen::VectorXd params_;
  std::vector<TrigPolyTerm> basis_;
};

// Mean over the sample of d(out1, x)^2 + d(out2, x)^2 under the candidate
// flow.  Integration failures make the candidate infinitely bad.
double cloning_objective(const CandidateFamily& family, const Eigen::VectorXd& params,
                         const CloneSetup& setup, std::span<const Eigen::VectorXd> sample,
                         double step);
double cloning_objective(const CandidateFamily& family, const CloneSetup& setup,
                         std::span<const Eigen::VectorXd> sample, double step);

struct ApproxReport {
  Eigen::VectorXd best_params;
  double best_objective = 0.0;
  std::vector<double> objective_trace;  // global best per generation
  double deviation_first = 0.0;         // max over sample of d(out1, x)
  double deviation_second = 0.0;        // max over sample of d(out2, x)
  long evaluations = 0;
  int restarts = 0;
  std::uint64_t seed = 0;
  int sample_size = 0;
  double step = 0.0;
};

struct OptimizeOptions {
  long budget = 50000;
  std::uint64_t seed = 1;
  double step = 0.01;
  int population = 16;
  double sigma0 = 0.5;
  int stagnation = 50;
  double target = 0.0;
};

// Evolution-strategy search over the family parameters.  A budget too small
// for a single generation degenerates to the identity-candidate report.
ApproxReport optimize(const CandidateFamily& family, const CloneSetup& setup,
                      std::span<const Eigen::VectorXd> sample, const OptimizeOptions& opt);

// Max over probe samples of the shortest-arc error of output 2 against the
// input in the angular slots.  Requires an adequate probe with nonzero
// winding on a space with angular slots.
double angular_error_floor(const CandidateFamily& family, const Eigen::VectorXd& params,
                           const CloneSetup& setup, const Loop& probe, double step);
double angular_error_floor(const CandidateFamily& family, const CloneSetup& setup,
                           const Loop& probe, double step);

}  // namespace clonelab
