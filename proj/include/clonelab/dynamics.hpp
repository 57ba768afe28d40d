#pragma once

#include <Eigen/Dense>
#include <vector>

#include "clonelab/hamiltonian.hpp"
#include "clonelab/phase_space.hpp"

namespace clonelab {

// X_H = Omega * grad H, evaluated slot-pair-wise.
TangentVector hamiltonian_vector_field(const HamiltonianSpec& h, const PhasePoint& z,
                                       double t);

// One implicit midpoint step z -> z' solving
//   z' = z + step * X_H((z + z') / 2, t + step / 2).
// Fixed-point iteration with a Newton fallback; throws IntegrationError with
// the final residual if the combined iteration cap (50) is exhausted before
// the residual falls below 1e-13 * max(1, |z|).  `step` may be negative.
PhasePoint step_implicit_midpoint(const HamiltonianSpec& h, const PhasePoint& z,
                                  double t, double step);

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> points;  // wrapped chart coords, one per time
  double step = 0.0;
  const char* integrator = "implicit_midpoint";
};

// Integrate from t0 to t1 (either direction) with uniform steps of size
// `step`; a final shorter step covers any remainder.  Records every state.
Trajectory flow(const HamiltonianSpec& h, const PhasePoint& z0, double t0, double t1,
                double step);

// Same integration without storing the intermediate states.
PhasePoint flow_endpoint(const HamiltonianSpec& h, const PhasePoint& z0, double t0,
                         double t1, double step);

// Jacobian of the time-t0 -> t1 flow map by central differences (chart-aware
// in the angular slots).
Eigen::MatrixXd flow_jacobian(const HamiltonianSpec& h, const PhasePoint& z0, double t0,
                              double t1, double step, double delta = 1e-5);

// Largest entry of |J^T Omega J - Omega|: zero exactly when J preserves the
// pairing.
double symplecticity_residual(const PhaseSpace& space, const Eigen::MatrixXd& jac);

struct IsotopyStage {
  HamiltonianSpec hamiltonian;
  double duration;
};

// A finite concatenation of Hamiltonian flows on one space.  An empty stage
// list is the identity isotopy.
class Isotopy {
 public:
  explicit Isotopy(PhaseSpace space, std::vector<IsotopyStage> stages = {});

  const PhaseSpace& space() const { return space_; }
  const std::vector<IsotopyStage>& stages() const { return stages_; }
  double total_duration() const;

 private:
  PhaseSpace space_;
  std::vector<IsotopyStage> stages_;
};

// Push a point through every stage in order.
PhasePoint transport(const Isotopy& iso, const PhasePoint& z, double step);

// Fourth-order central-difference Jacobian of the whole isotopy map.
Eigen::MatrixXd transport_jacobian(const Isotopy& iso, const PhasePoint& z, double step,
                                   double delta = 1e-5);

}  // namespace clonelab
