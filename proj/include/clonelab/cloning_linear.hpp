#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <span>
#include <variant>

#include "clonelab/dynamics.hpp"
#include "clonelab/phase_space.hpp"

namespace clonelab {

// Metric eta = diag(1, 1, -1) used by the frame construction.
Eigen::Matrix3d eta_metric();

// Largest entry of |M^T eta M - eta|.
double eta_residual(const Eigen::Matrix3d& m);

// A linear map on (x, y, z) triples of 2n-blocks, acting as mc tensor the
// identity.  Frames produced by complete_lorentz_frame have first column
// (1, 1, g); the induced block map preserves the product pairing with signs
// (+1, +1, -1) exactly when mc preserves eta.
struct LinearCloneMap {
  Eigen::Matrix3d mc = Eigen::Matrix3d::Identity();
  int block_dim = 2;  // 2n

  // Induced 6n x 6n block matrix.
  Eigen::MatrixXd induced() const;

  // Euclidean(2n, +1) x Euclidean(2n, +1) x Euclidean(2n, -1).
  PhaseSpace product_space() const;

  // Frame convention: the z-component of the first column, rounded.
  int g() const;
};

// Build a frame with first column (1, 1, g), |g| = 1, unit eta-norm second
// column and eta-norm -1 third column, mutually eta-orthogonal.  The second
// column is found by intersecting the eta-orthogonal line cut out by a seed
// covector with the unit quadric; canonical seeds are tried in order and a
// ConstructionError reports exhaustion.  Deterministic: the same g always
// yields the same frame.
LinearCloneMap complete_lorentz_frame(int g, int block_dim = 2);

// Apply the block map to a triple of 2n-vectors.
std::array<Eigen::VectorXd, 3> apply_clone_map(const LinearCloneMap& map,
                                               const Eigen::VectorXd& x,
                                               const Eigen::VectorXd& y,
                                               const Eigen::VectorXd& z);

// Realize the induced map as the time-one flow of a piecewise quadratic
// Hamiltonian on the product space: two constant pieces of duration 1/2.
// When the spectrum allows a real logarithm directly, both pieces share it;
// otherwise the map splits into a symmetric-positive and an orthogonal
// symplectic factor, one piece each (orthogonal factor first).  Throws
// ConstructionError (with the spectrum in the message) if the factor
// verification fails.
HamiltonianSpec generator_hamiltonian(const LinearCloneMap& map);

// The same two pieces as explicit isotopy stages.
Isotopy generator_isotopy(const LinearCloneMap& map);

// Layout helper for system x system x machine products.
struct TripleSpace {
  PhaseSpace sys;
  PhaseSpace machine;
  PhaseSpace product;

  TripleSpace(PhaseSpace system_space, PhaseSpace machine_space);

  Eigen::VectorXd embed(const Eigen::VectorXd& x, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& r) const;
  std::array<Eigen::VectorXd, 3> split(const Eigen::VectorXd& w) const;
};

// A candidate cloning arrangement: system space M with blank state b, machine
// space N with ready state r, and a witness transformation of M x M x N.
struct CloneSetup {
  PhaseSpace sys;
  PhaseSpace machine;
  PhasePoint blank;          // b in M
  PhasePoint machine_start;  // r in N
  std::variant<LinearCloneMap, Isotopy> witness;
};

struct CloneDefect {
  double value = 0.0;            // max over the sample of d(out1, x) + d(out2, x)
  Eigen::VectorXd worst_input;   // argmax sample point
  double worst_first = 0.0;      // d(out1, x) at the argmax
  double worst_second = 0.0;     // d(out2, x) at the argmax
};

// Evaluate how far the witness is from cloning every sample point: for each x
// push (x, b, r) through the witness and measure both outputs against x.
CloneDefect clone_defect(const CloneSetup& setup, std::span<const Eigen::VectorXd> sample,
                         double step);

}  // namespace clonelab
