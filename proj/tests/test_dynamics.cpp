#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "clonelab/dynamics.hpp"
#include "clonelab/errors.hpp"
#include "clonelab/hamiltonian.hpp"
#include "clonelab/phase_space.hpp"

using namespace clonelab;

namespace {

HamiltonianSpec harmonic() {
  return HamiltonianSpec::quadratic_constant(PhaseSpace::euclidean(2),
                                             Eigen::Matrix2d::Identity());
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("vector field of the pendulum at (0, 1)") {
  const HamiltonianSpec h = HamiltonianSpec::pendulum();
  const PhasePoint z = make_point(h.space(), Eigen::Vector2d(0.0, 1.0));
  const TangentVector v = hamiltonian_vector_field(h, z, 0.0);
  CHECK(v.components[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(v.components[1] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("vector field of the unit quadratic form at (1, 0)") {
  const HamiltonianSpec h = harmonic();
  const PhasePoint z = make_point(h.space(), Eigen::Vector2d(1.0, 0.0));
  const TangentVector v = hamiltonian_vector_field(h, z, 0.0);
  CHECK(v.components[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(v.components[1] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("zero Hamiltonian has a vanishing field") {
  const PhaseSpace space = PhaseSpace::product({PhaseSpace::cylinder(), PhaseSpace::euclidean(2)});
  const HamiltonianSpec h = HamiltonianSpec::zero(space);
  Eigen::VectorXd coords(4);
  coords << 1.0, -2.0, 0.5, 3.0;
  const TangentVector v = hamiltonian_vector_field(h, make_point(space, coords), 1.7);
  CHECK(v.components.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("midpoint step is exact for the zero Hamiltonian") {
  const PhaseSpace space = PhaseSpace::euclidean(2);
  const HamiltonianSpec h = HamiltonianSpec::zero(space);
  const PhasePoint z = make_point(space, Eigen::Vector2d(0.3, -0.9));
  const PhasePoint out = step_implicit_midpoint(h, z, 0.0, 0.1);
  CHECK(out.coords[0] == z.coords[0]);
  CHECK(out.coords[1] == z.coords[1]);
}

TEST_CASE("pendulum equilibrium stays fixed") {
  const HamiltonianSpec h = HamiltonianSpec::pendulum();
  const PhasePoint z = make_point(h.space(), Eigen::Vector2d(0.0, 0.0));
  const PhasePoint out = flow_endpoint(h, z, 0.0, 2.0, 1e-2);
  CHECK(std::abs(out.coords[0]) < 1e-13);
  CHECK(std::abs(out.coords[1]) < 1e-13);
}

TEST_CASE("harmonic oscillator closes a period") {
  const HamiltonianSpec h = harmonic();
  const PhasePoint z0 = make_point(h.space(), Eigen::Vector2d(1.0, 0.0));

  SUBCASE("fine step recovers the start to 1e-8") {
    const PhasePoint out = flow_endpoint(h, z0, 0.0, kTwoPi, 1e-4);
    CHECK((out.coords - z0.coords).cwiseAbs().maxCoeff() < 1e-8);
  }

  SUBCASE("coarse step keeps the radius while the phase drifts as step^2") {
    const PhasePoint out = flow_endpoint(h, z0, 0.0, kTwoPi, 1e-2);
    const double err = (out.coords - z0.coords).cwiseAbs().maxCoeff();
    CHECK(err < 6e-5);   // phase error ~ pi * step^2 / 6
    CHECK(err > 1e-6);   // the drift is genuinely second order, not zero
    CHECK(std::abs(out.coords.norm() - 1.0) < 1e-10);
  }
}

TEST_CASE("flow of the zero Hamiltonian records a constant trajectory") {
  const PhaseSpace space = PhaseSpace::cylinder();
  const HamiltonianSpec h = HamiltonianSpec::zero(space);
  const PhasePoint z0 = make_point(space, Eigen::Vector2d(1.0, -0.5));
  const Trajectory traj = flow(h, z0, 0.0, 1.0, 0.125);
  REQUIRE(traj.times.size() == 9);
  REQUIRE(traj.points.size() == 9);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(1.0).epsilon(1e-15));
  for (const auto& p : traj.points) {
    CHECK(p[0] == z0.coords[0]);
    CHECK(p[1] == z0.coords[1]);
  }
}

TEST_CASE("flows compose exactly on a shared grid") {
  const HamiltonianSpec h = HamiltonianSpec::pendulum();
  const PhasePoint z0 = make_point(h.space(), Eigen::Vector2d(0.7, 0.3));
  const double step = 0.015625;  // dyadic, so both paths use identical steps
  const PhasePoint direct = flow_endpoint(h, z0, 0.0, 2.0, step);
  const PhasePoint half = flow_endpoint(h, z0, 0.0, 1.0, step);
  const PhasePoint relay = flow_endpoint(h, half, 1.0, 2.0, step);
  CHECK(direct.coords[0] == relay.coords[0]);
  CHECK(direct.coords[1] == relay.coords[1]);
}

TEST_CASE("flow runs backward and undoes itself") {
  const HamiltonianSpec h = HamiltonianSpec::pendulum();
  const PhasePoint z0 = make_point(h.space(), Eigen::Vector2d(2.5, 0.0));
  const PhasePoint fwd = flow_endpoint(h, z0, 0.0, 1.0, 1e-3);
  const PhasePoint back = flow_endpoint(h, fwd, 1.0, 0.0, 1e-3);
  CHECK(std::abs(arc_delta(z0.coords[0], back.coords[0])) < 1e-9);
  CHECK(std::abs(back.coords[1] - z0.coords[1]) < 1e-9);
}

TEST_CASE("flow jacobian of the zero Hamiltonian is the identity") {
  const PhaseSpace space = PhaseSpace::euclidean(2);
  const HamiltonianSpec h = HamiltonianSpec::zero(space);
  const PhasePoint z = make_point(space, Eigen::Vector2d(0.2, 0.4));
  const Eigen::MatrixXd jac = flow_jacobian(h, z, 0.0, 1.0, 1e-2);
  CHECK((jac - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("harmonic quarter-period jacobian is the quarter turn") {
  const HamiltonianSpec h = harmonic();
  const PhasePoint z = make_point(h.space(), Eigen::Vector2d(0.3, -0.1));
  const Eigen::MatrixXd jac = flow_jacobian(h, z, 0.0, kPi / 2.0, 1e-3);
  Eigen::Matrix2d turn;
  turn << 0.0, 1.0, -1.0, 0.0;
  CHECK((jac - turn).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("symplecticity residual on reference matrices") {
  const PhaseSpace space = PhaseSpace::euclidean(2);
  CHECK(symplecticity_residual(space, Eigen::Matrix2d::Identity()) == 0.0);
  CHECK(symplecticity_residual(space, 2.0 * Eigen::Matrix2d::Identity()) ==
        doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("pendulum time-one flow is symplectic to 1e-6") {
  const HamiltonianSpec h = HamiltonianSpec::pendulum();
  const PhasePoint z = make_point(h.space(), Eigen::Vector2d(1.1, 0.4));
  const Eigen::MatrixXd jac = flow_jacobian(h, z, 0.0, 1.0, 1e-3);
  CHECK(symplecticity_residual(h.space(), jac) < 1e-6);
}

TEST_CASE("random flows stay symplectic at the difference-quotient scale") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double delta = 1e-5;
  const double bound = std::max(1e-6, 10.0 * delta * delta);
  for (int trial = 0; trial < 20; ++trial) {
    if (trial % 2 == 0) {
      const PhaseSpace space = PhaseSpace::euclidean(4);
      Eigen::Matrix4d a;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) a(r, c) = 0.4 * gauss(rng);
      const Eigen::Matrix4d q = 0.5 * (a + a.transpose());
      const HamiltonianSpec h = HamiltonianSpec::quadratic_constant(space, q);
      Eigen::Vector4d z;
      for (int i = 0; i < 4; ++i) z[i] = gauss(rng);
      const Eigen::MatrixXd jac =
          flow_jacobian(h, make_point(space, z), 0.0, 0.7, 1e-3, delta);
      CHECK(symplecticity_residual(space, jac) < bound);
    } else {
      const HamiltonianSpec h = HamiltonianSpec::pendulum();
      const Eigen::Vector2d z(wrap_angle(3.0 * gauss(rng)), gauss(rng));
      const Eigen::MatrixXd jac =
          flow_jacobian(h, make_point(h.space(), z), 0.0, 0.7, 1e-3, delta);
      CHECK(symplecticity_residual(h.space(), jac) < bound);
    }
  }
}

TEST_CASE("isotopy transport chains its stages") {
  const PhaseSpace space = PhaseSpace::cylinder();
  // H = p generates rigid rotation at unit angular speed.
  TrigPoly poly;
  TrigPolyTerm term;
  term.coeff = 1.0;
  term.basis = {SlotBasis{SlotBasis::Kind::One, 0}, SlotBasis{SlotBasis::Kind::Pow, 1}};
  poly.terms.push_back(term);
  poly.max_power = 1;
  const HamiltonianSpec rot = HamiltonianSpec::trig_poly(space, poly);
  const Isotopy iso(space, {{rot, 1.0}, {rot, 0.5}});
  CHECK(iso.total_duration() == doctest::Approx(1.5));
  const PhasePoint z0 = make_point(space, Eigen::Vector2d(0.25, 0.75));
  const PhasePoint out = transport(iso, z0, 1e-3);
  CHECK(std::abs(arc_delta(out.coords[0], wrap_angle(0.25 + 1.5))) < 1e-9);
  CHECK(out.coords[1] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("empty isotopy is the identity and its jacobian is too") {
  const PhaseSpace space = PhaseSpace::euclidean(2);
  const Isotopy iso(space);
  const PhasePoint z = make_point(space, Eigen::Vector2d(1.0, 2.0));
  const PhasePoint out = transport(iso, z, 1e-2);
  CHECK(out.coords == z.coords);
  const Eigen::MatrixXd jac = transport_jacobian(iso, z, 1e-2);
  CHECK((jac - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-10);
}

}  // TEST_SUITE
