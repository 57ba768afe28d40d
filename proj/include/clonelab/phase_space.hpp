#pragma once

#include <Eigen/Dense>
#include <vector>

#include "clonelab/errors.hpp"

namespace clonelab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.1415926535897932384626433832795;

// Reduce an angle to the fundamental chart interval [0, 2*pi).
double wrap_angle(double theta);

// Signed shortest angular difference to - from, in (-pi, pi].
double arc_delta(double from, double to);

enum class FactorKind { Euclidean, Cylinder, Torus2 };

// One factor of a product phase space.  `dim` is the number of chart slots
// (even, and exactly 2 for Cylinder/Torus2); `form_sign` scales the
// symplectic form of the factor by +1 or -1.
struct Factor {
  FactorKind kind = FactorKind::Euclidean;
  int dim = 2;
  int form_sign = +1;
};

// A product of elementary factors with a single global chart.  Slots are laid
// out factor by factor; Euclidean factors interleave as (q0, p0, q1, p1, ...),
// a Cylinder is (theta, p) with theta angular, and Torus2 is (theta1, theta2)
// with both slots angular and pairing(d/dtheta1, d/dtheta2) = form_sign.
class PhaseSpace {
 public:
  explicit PhaseSpace(std::vector<Factor> factors);

  static PhaseSpace euclidean(int dim, int form_sign = +1);
  static PhaseSpace cylinder(int form_sign = +1);
  static PhaseSpace torus2(int form_sign = +1);
  static PhaseSpace product(const std::vector<PhaseSpace>& parts);

  int dim() const { return dim_; }
  const std::vector<Factor>& factors() const { return factors_; }

  // First slot of factor `idx` in the global chart.
  int factor_offset(int idx) const { return offsets_.at(idx); }

  bool angular(int slot) const { return angular_.at(slot); }
  const std::vector<int>& angular_slots() const { return angular_slots_; }
  bool has_angular() const { return !angular_slots_.empty(); }

  // Conjugate slot pairs (a, b, sign): pairing(e_a, e_b) = sign.
  struct SlotPair {
    int a;
    int b;
    double sign;
  };
  const std::vector<SlotPair>& slot_pairs() const { return pairs_; }

  // Matrix Omega of the pairing in the chart basis: pairing(u, v) = u^T Omega v.
  Eigen::MatrixXd pairing_matrix() const;

  bool operator==(const PhaseSpace& other) const;
  bool operator!=(const PhaseSpace& other) const { return !(*this == other); }

 private:
  std::vector<Factor> factors_;
  std::vector<int> offsets_;
  std::vector<bool> angular_;
  std::vector<int> angular_slots_;
  std::vector<SlotPair> pairs_;
  int dim_ = 0;
};

// A point in the global chart.  Angular slots are kept wrapped to [0, 2*pi).
struct PhasePoint {
  Eigen::VectorXd coords;
};

// A tangent vector in chart components.
struct TangentVector {
  Eigen::VectorXd components;
};

// Build a point from raw chart values, wrapping angular slots.
// Throws DomainError on non-finite input or dimension mismatch.
PhasePoint make_point(const PhaseSpace& space, const Eigen::VectorXd& raw);

// Wrap the angular slots of `raw` in place (returns the wrapped copy).
Eigen::VectorXd wrap_coords(const PhaseSpace& space, Eigen::VectorXd raw);

// Chart distance: Euclidean length of the per-slot differences, where angular
// slots contribute their shortest arc.
double chart_distance(const PhaseSpace& space, const PhasePoint& a, const PhasePoint& b);
double chart_distance(const PhaseSpace& space, const Eigen::VectorXd& a,
                      const Eigen::VectorXd& b);

// Evaluate the symplectic pairing on two tangent vectors at a (common) point.
double symplectic_pairing(const PhaseSpace& space, const TangentVector& u,
                          const TangentVector& v);

}  // namespace clonelab
