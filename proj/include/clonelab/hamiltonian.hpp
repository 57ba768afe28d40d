#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "clonelab/phase_space.hpp"

namespace clonelab {

// Time table of symmetric quadratic forms: H(z, t) = z^T Q(t) z / 2.
// Piecewise constant on [times[i], times[i+1]) by default; with
// `interpolate` set, Q(t) is linear between knots.  Only meaningful on
// spaces without angular slots.
struct QuadraticTable {
  std::vector<double> times;            // ascending knots; evaluation clamps
  std::vector<Eigen::MatrixXd> coeffs;  // one symmetric matrix per knot
  bool interpolate = false;

  Eigen::MatrixXd at(double t) const;
};

// One multiplicative slot factor of a trig/poly term.
struct SlotBasis {
  enum class Kind { One, Cos, Sin, Pow };
  Kind kind = Kind::One;
  int degree = 0;  // harmonic for Cos/Sin, exponent for Pow; >= 1 when used
};

struct TrigPolyTerm {
  double coeff = 0.0;
  std::vector<SlotBasis> basis;  // one entry per chart slot
};

// Sum of products of per-slot factors: cos/sin harmonics on angular slots,
// monomials on linear slots.  Time independent.
struct TrigPoly {
  std::vector<TrigPolyTerm> terms;
  int max_harmonic = 0;
  int max_power = 0;
};

// Bump-supported translation generator.  Let d(z) be the chart distance from
// z to the segment {anchor + u * disp : u in [0, 1]} (angular differences by
// shortest arc against the segment's lift).  With chi the quintic smoothstep
// profile equal to 1 on [0, rho/2] and 0 outside [0, rho),
//   H(z) = chi(d(z)) * pairing-linear form generating translation by disp.
// The flow translates the plateau region rigidly by disp over unit time and
// is exactly the identity outside the rho tube.
struct BumpPath {
  Eigen::VectorXd anchor;  // wrapped chart coords of the segment start
  Eigen::VectorXd disp;    // displacement to the segment end (|angular| < pi)
  double rho = 0.0;        // tube radius, > 0
};

// H(theta, p) = p^2 / 2 - cos(theta) on the cylinder.
struct Pendulum {};

// A Hamiltonian attached to a phase space.  `value`/`gradient` accept chart
// coordinates, possibly in an unwrapped angular lift; every form evaluates
// periodically in the angular slots so lifts are safe.
class HamiltonianSpec {
 public:
  using Form = std::variant<QuadraticTable, TrigPoly, BumpPath, Pendulum>;

  HamiltonianSpec(PhaseSpace space, Form form);

  static HamiltonianSpec quadratic(PhaseSpace space, QuadraticTable table);
  static HamiltonianSpec quadratic_constant(PhaseSpace space, Eigen::MatrixXd q);
  static HamiltonianSpec trig_poly(PhaseSpace space, TrigPoly poly);
  static HamiltonianSpec bump_path(PhaseSpace space, BumpPath path);
  static HamiltonianSpec pendulum();
  static HamiltonianSpec zero(PhaseSpace space);

  const PhaseSpace& space() const { return space_; }
  const Form& form() const { return form_; }

  double value(const Eigen::VectorXd& z, double t) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& z, double t) const;

 private:
  PhaseSpace space_;
  Form form_;
};

// Quintic smoothstep profile: 1 on u <= 1/2, 0 on u >= 1, C^2 monotone bridge
// in between (u = d / rho).  chi_prime is the derivative with respect to d.
double bump_profile(double d, double rho);
double bump_profile_prime(double d, double rho);

}  // namespace clonelab
