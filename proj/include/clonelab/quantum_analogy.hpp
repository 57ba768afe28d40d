#pragma once

#include <Eigen/Dense>
#include <complex>

#include "clonelab/errors.hpp"

namespace clonelab {

using Ket = Eigen::VectorXcd;

// Kronecker product of two kets.
Ket tensor(const Ket& a, const Ket& b);

struct SubspaceCloneResult {
  std::complex<double> c;  // psi = c * b
  Ket machine_final;       // (1/c)|1> for c != 0; zero ket for psi = 0
  Ket left;                // psi (x) b (x) |1>
  Ket right;               // psi (x) psi (x) machine_final
  double residual = 0.0;   // max entrywise |left - right|
};

// Clone a state of the one-dimensional subspace spanned by b: compute c with
// psi = c*b and regroup the tensor so both sides agree entrywise.  The blank b
// must be nonzero and psi colinear with it (residual < 1e-12 relative).
SubspaceCloneResult clone_1d_subspace(const Ket& b, const Ket& psi);

// A unitary sending b into the line spanned by v (two-vector Householder-type
// rotation; identity when b is already proportional to v).
Eigen::MatrixXcd rotate_b_into_subspace(const Ket& b, const Ket& v);

}  // namespace clonelab
