#include "clonelab/quantum_analogy.hpp"

#include <cmath>
#include <sstream>

namespace clonelab {

Ket tensor(const Ket& a, const Ket& b) {
  Ket out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

SubspaceCloneResult clone_1d_subspace(const Ket& b, const Ket& psi) {
  if (b.size() == 0 || b.size() != psi.size())
    throw DomainError("clone_1d_subspace: dimension mismatch");
  if (b.norm() == 0.0) throw DomainError("clone_1d_subspace: blank state must be nonzero");

  SubspaceCloneResult result;
  result.c = b.dot(psi) / std::complex<double>(b.squaredNorm(), 0.0);
  double colinearity = (psi - result.c * b).norm();
  if (colinearity > 1e-12 * std::max(1.0, psi.norm())) {
    std::ostringstream msg;
    msg << "clone_1d_subspace: state is not in the blank's subspace (residual "
        << colinearity << ")";
    throw DomainError(msg.str());
  }

  Ket one(1);
  one[0] = std::complex<double>(1.0, 0.0);
  result.machine_final = Ket::Zero(1);
  if (result.c != std::complex<double>(0.0, 0.0))
    result.machine_final[0] = std::complex<double>(1.0, 0.0) / result.c;

  result.left = tensor(tensor(psi, b), one);
  result.right = tensor(tensor(psi, psi), result.machine_final);
  result.residual = (result.left - result.right).cwiseAbs().maxCoeff();
  if (result.residual > 1e-12 * std::max(1.0, result.left.cwiseAbs().maxCoeff())) {
    std::ostringstream msg;
    msg << "clone_1d_subspace: regrouping identity violated (residual " << result.residual
        << ")";
    throw ConsistencyError(msg.str());
  }
  return result;
}

Eigen::MatrixXcd rotate_b_into_subspace(const Ket& b, const Ket& v) {
  if (b.size() == 0 || b.size() != v.size())
    throw DomainError("rotate_b_into_subspace: dimension mismatch");
  if (b.norm() == 0.0 || v.norm() == 0.0)
    throw DomainError("rotate_b_into_subspace: zero input");

  const Eigen::Index d = b.size();
  Ket u1 = b / b.norm();
  Ket u2 = v / v.norm();
  // Phase choice makes <u1, e^{i theta} u2> real and nonnegative, so a single
  // reflection suffices.
  std::complex<double> overlap = u1.dot(u2);
  std::complex<double> phase =
      std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : std::complex<double>(1.0, 0.0);
  Ket y = u2 / phase;
  Ket w = u1 - y;
  double ww = w.squaredNorm();
  if (ww < 1e-24) return Eigen::MatrixXcd::Identity(d, d);
  return Eigen::MatrixXcd::Identity(d, d) - (2.0 / ww) * (w * w.adjoint());
}

}  // namespace clonelab
