#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "clonelab/dynamics.hpp"
#include "clonelab/phase_space.hpp"

namespace clonelab {

// One stage moves one tracked point along a polyline; every other tracked
// point stays outside the tube of radius rho around the path.  `parking`
// marks intermediate relocations that do not end at the point's target.
struct TransportStage {
  int point_index = 0;
  std::vector<Eigen::VectorXd> waypoints;  // wrapped chart coords, >= 2 entries
  double rho = 0.0;
  bool parking = false;
};

struct PointTransportPlan {
  PhaseSpace space;
  std::vector<Eigen::VectorXd> sources;
  std::vector<Eigen::VectorXd> targets;
  double rho = 0.0;
  std::vector<TransportStage> stages;
};

// Compactly supported Hamiltonian whose time-1 flow translates a tube around
// the segment a -> c rigidly by the (per-slot shortest) displacement and is
// the identity outside the tube.  Angular displacements must satisfy
// |disp| + rho < pi; longer segments must be split by the caller.
HamiltonianSpec bump_translation_hamiltonian(const PhaseSpace& space,
                                             const Eigen::VectorXd& a,
                                             const Eigen::VectorXd& c, double rho);

// Greedy route planning: move one point at a time, inserting perpendicular
// detour waypoints when a straight segment runs too close to another tracked
// point, and parking stages when a cyclic arrangement blocks every direct
// move.  rho is one third of the minimum pairwise distance among all listed
// points (capped on angular spaces).  Throws PlanningError when clearance
// cannot be achieved within the attempt budget.
PointTransportPlan plan_transport(const PhaseSpace& space,
                                  const std::vector<Eigen::VectorXd>& sources,
                                  const std::vector<Eigen::VectorXd>& targets);

struct ExecutionRecord {
  std::vector<double> endpoint_errors;     // per tracked point, final vs target
  std::vector<double> stage_interference;  // per stage, max motion of the others
  double worst_endpoint = 0.0;
  int worst_endpoint_index = -1;
  double worst_interference = 0.0;
  int worst_interference_stage = -1;
  int worst_interference_point = -1;
};

// Realize the plan as one Isotopy (one bump Hamiltonian per polyline segment)
// and verify it by flowing every tracked point through every stage.  Throws
// ExecutionError naming the worst offender if an endpoint misses by more than
// `endpoint_tol` or any non-moving point drifts by more than `interference_tol`.
std::pair<Isotopy, ExecutionRecord> execute_plan(const PointTransportPlan& plan,
                                                 double step,
                                                 double endpoint_tol = 1e-6,
                                                 double interference_tol = 1e-9);

}  // namespace clonelab
