#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>

#include "clonelab/errors.hpp"
#include "clonelab/quantum_analogy.hpp"

using namespace clonelab;
using namespace std::complex_literals;

namespace {

Ket random_ket(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Ket v(dim);
  for (int i = 0; i < dim; ++i) v[i] = std::complex<double>(gauss(rng), gauss(rng));
  return v;
}

}  // namespace

TEST_SUITE("quantum_analogy") {

TEST_CASE("tensor product follows the row-major convention") {
  Ket a(2), b(2);
  a << 1.0, 2.0;
  b << 3.0, 4.0;
  const Ket t = tensor(a, b);
  REQUIRE(t.size() == 4);
  CHECK(t[0] == std::complex<double>(3.0, 0.0));
  CHECK(t[1] == std::complex<double>(4.0, 0.0));
  CHECK(t[2] == std::complex<double>(6.0, 0.0));
  CHECK(t[3] == std::complex<double>(8.0, 0.0));
}

TEST_CASE("real worked example: psi twice the blank") {
  Ket b(2), psi(2);
  b << 1.0, 0.0;
  psi << 2.0, 0.0;
  const SubspaceCloneResult res = clone_1d_subspace(b, psi);
  CHECK(res.c == std::complex<double>(2.0, 0.0));
  REQUIRE(res.machine_final.size() == 1);
  CHECK(std::abs(res.machine_final[0] - 0.5) < 1e-15);
  REQUIRE(res.left.size() == 4);
  CHECK(res.residual < 1e-14);
  // Both regroupings equal 2|00> (x) |1> up to the stored machine factor.
  CHECK(std::abs(res.left[0] - 2.0) < 1e-15);
  CHECK(std::abs(res.right[0] - 2.0) < 1e-15);
}

TEST_CASE("complex phase example") {
  Ket b(2), psi(2);
  const double s = 1.0 / std::sqrt(2.0);
  b << s, s * 1i;
  psi << s * 1i, -s;  // psi = i * b
  const SubspaceCloneResult res = clone_1d_subspace(b, psi);
  CHECK(std::abs(res.c - 1i) < 1e-12);
  CHECK(std::abs(res.machine_final[0] - (-1i)) < 1e-12);
  CHECK(res.residual < 1e-12);
}

TEST_CASE("zero state clones to the zero tensor") {
  Ket b(3);
  b << 1.0, 2.0, -1.0;
  const SubspaceCloneResult res = clone_1d_subspace(b, Ket::Zero(3));
  CHECK(res.c == std::complex<double>(0.0, 0.0));
  CHECK(res.machine_final.cwiseAbs().maxCoeff() == 0.0);
  CHECK(res.left.cwiseAbs().maxCoeff() == 0.0);
  CHECK(res.right.cwiseAbs().maxCoeff() == 0.0);
  CHECK(res.residual == 0.0);
}

TEST_CASE("inputs outside the blank line are rejected") {
  Ket b(2), psi(2);
  b << 1.0, 0.0;
  psi << 0.0, 1.0;
  CHECK_THROWS_AS(clone_1d_subspace(b, psi), DomainError);
  CHECK_THROWS_AS(clone_1d_subspace(Ket::Zero(2), psi), DomainError);
  Ket mismatched(3);
  mismatched << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(clone_1d_subspace(b, mismatched), DomainError);
}

TEST_CASE("regrouping identity holds over random colinear pairs") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> dims(1, 8);
  std::uniform_real_distribution<double> mag(0.25, 2.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = dims(rng);
    const Ket b = random_ket(rng, d);
    const std::complex<double> c = std::polar(mag(rng), phase(rng));
    const SubspaceCloneResult res = clone_1d_subspace(b, c * b);
    CHECK(res.residual < 1e-12);
    CHECK(std::abs(res.c - c) < 1e-12 * std::abs(c));
  }
}

TEST_CASE("rotation into a colinear target is the identity") {
  Ket b(2);
  b << 1.0, 1i;
  const Eigen::MatrixXcd u = rotate_b_into_subspace(b, 3.0 * b);
  CHECK((u - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("basis flip example") {
  Ket b(2), v(2);
  b << 1.0, 0.0;
  v << 0.0, 1.0;
  const Eigen::MatrixXcd u = rotate_b_into_subspace(b, v);
  Eigen::MatrixXcd flip(2, 2);
  flip << 0.0, 1.0, 1.0, 0.0;
  CHECK((u - flip).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rotations are unitary and land b on the target line") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 4;
    const Ket b = random_ket(rng, d);
    const Ket v = random_ket(rng, d);
    const Eigen::MatrixXcd u = rotate_b_into_subspace(b, v);
    CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
    const Ket image = u * b;
    // image must be proportional to v: remove the projection and check the rest.
    const std::complex<double> coeff = v.dot(image) / v.squaredNorm();
    CHECK((image - coeff * v).cwiseAbs().maxCoeff() < 1e-10 * b.norm());
  }
}

}  // TEST_SUITE
