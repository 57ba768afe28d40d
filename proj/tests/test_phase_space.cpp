#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "clonelab/errors.hpp"
#include "clonelab/phase_space.hpp"

using namespace clonelab;

TEST_SUITE("phase_space") {

TEST_CASE("wrap_angle maps representatives into [0, 2pi)") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(kTwoPi) == 0.0);
  CHECK(wrap_angle(-kPi / 2.0) == doctest::Approx(3.0 * kPi / 2.0).epsilon(1e-15));
  CHECK(wrap_angle(7.0 * kTwoPi + 1.25) == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("wrap_angle is idempotent") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> box(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double raw = box(rng);
    const double once = wrap_angle(raw);
    CHECK(once >= 0.0);
    CHECK(once < kTwoPi);
    CHECK(wrap_angle(once) == once);
  }
}

TEST_CASE("wrap_angle rejects non-finite input") {
  CHECK_THROWS_AS(wrap_angle(std::numeric_limits<double>::infinity()), DomainError);
  CHECK_THROWS_AS(wrap_angle(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("arc_delta returns the short signed arc in (-pi, pi]") {
  CHECK(arc_delta(0.0, kPi / 2.0) == doctest::Approx(kPi / 2.0).epsilon(1e-15));
  CHECK(arc_delta(0.0, 3.0 * kPi / 2.0) == doctest::Approx(-kPi / 2.0).epsilon(1e-15));
  CHECK(arc_delta(0.1, 0.1 + kPi) == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("arc_delta is antisymmetric away from the cut") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  for (int i = 0; i < 1000; ++i) {
    const double a = angle(rng);
    const double b = angle(rng);
    const double fwd = arc_delta(a, b);
    const double bwd = arc_delta(b, a);
    if (std::abs(std::abs(fwd) - kPi) > 1e-9) {
      CHECK(fwd == doctest::Approx(-bwd).epsilon(1e-12));
    }
  }
}

TEST_CASE("factories validate their dimensions") {
  CHECK(PhaseSpace::euclidean(4).dim() == 4);
  CHECK(PhaseSpace::cylinder().dim() == 2);
  CHECK(PhaseSpace::torus2().dim() == 2);
  CHECK_THROWS_AS(PhaseSpace::euclidean(3), DomainError);
  CHECK_THROWS_AS(PhaseSpace::euclidean(0), DomainError);
  CHECK_THROWS_AS(PhaseSpace::euclidean(2, 0), DomainError);
}

TEST_CASE("product spaces concatenate factors and angular slots") {
  const PhaseSpace space =
      PhaseSpace::product({PhaseSpace::euclidean(2), PhaseSpace::cylinder(), PhaseSpace::torus2()});
  CHECK(space.dim() == 6);
  const auto angular = space.angular_slots();
  REQUIRE(angular.size() == 3);
  CHECK(angular[0] == 2);
  CHECK(angular[1] == 4);
  CHECK(angular[2] == 5);
  CHECK_FALSE(space.angular(0));
  CHECK(space.angular(2));
}

TEST_CASE("make_point wraps angular coordinates into the canonical chart") {
  const PhaseSpace cyl = PhaseSpace::cylinder();
  const PhasePoint z = make_point(cyl, Eigen::Vector2d(kTwoPi + 0.5, -1.25));
  CHECK(z.coords[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(z.coords[1] == -1.25);
  CHECK_THROWS_AS(make_point(cyl, Eigen::Vector3d::Zero()), DomainError);
}

TEST_CASE("chart distance matches the worked values") {
  const PhaseSpace cyl = PhaseSpace::cylinder();
  const PhasePoint a = make_point(cyl, Eigen::Vector2d(0.0, 0.0));
  const PhasePoint b = make_point(cyl, Eigen::Vector2d(3.0 * kPi / 2.0, 0.0));
  CHECK(chart_distance(cyl, a, a) == 0.0);
  CHECK(chart_distance(cyl, a, b) == doctest::Approx(kPi / 2.0).epsilon(1e-12));

  const PhaseSpace plane = PhaseSpace::euclidean(2);
  const PhasePoint o = make_point(plane, Eigen::Vector2d(0.0, 0.0));
  const PhasePoint q = make_point(plane, Eigen::Vector2d(3.0, 4.0));
  CHECK(chart_distance(plane, o, q) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("chart distance rejects mismatched dimensions") {
  const PhaseSpace cyl = PhaseSpace::cylinder();
  const PhasePoint a = make_point(cyl, Eigen::Vector2d(0.0, 0.0));
  const PhasePoint big =
      make_point(PhaseSpace::euclidean(4), Eigen::Vector4d(0.0, 0.0, 0.0, 0.0));
  CHECK_THROWS_AS(chart_distance(cyl, a, big), DomainError);
  CHECK_THROWS_AS(chart_distance(PhaseSpace::euclidean(4), big, a), DomainError);
}

TEST_CASE("symplectic pairing on the plane") {
  const PhaseSpace plane = PhaseSpace::euclidean(2);
  Eigen::Vector2d u(1.0, 0.0);
  Eigen::Vector2d v(0.0, 1.0);
  CHECK(symplectic_pairing(plane, TangentVector{u}, TangentVector{v}) == doctest::Approx(1.0));
  CHECK(symplectic_pairing(plane, TangentVector{u}, TangentVector{u}) == 0.0);

  const PhaseSpace flipped = PhaseSpace::euclidean(2, -1);
  CHECK(symplectic_pairing(flipped, TangentVector{u}, TangentVector{v}) == doctest::Approx(-1.0));
}

TEST_CASE("pairing matrix is block diagonal over factor slots") {
  const PhaseSpace space =
      PhaseSpace::product({PhaseSpace::euclidean(4), PhaseSpace::cylinder(-1), PhaseSpace::torus2()});
  const Eigen::MatrixXd omega = space.pairing_matrix();
  REQUIRE(omega.rows() == 8);
  CHECK(omega(0, 1) == 1.0);
  CHECK(omega(1, 0) == -1.0);
  CHECK(omega(2, 3) == 1.0);
  CHECK(omega(4, 5) == -1.0);
  CHECK(omega(6, 7) == 1.0);
  CHECK((omega + omega.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pairing is bilinear and antisymmetric on random product vectors") {
  const PhaseSpace space =
      PhaseSpace::product({PhaseSpace::euclidean(4), PhaseSpace::cylinder(-1), PhaseSpace::torus2()});
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto draw = [&] {
    Eigen::VectorXd v(space.dim());
    for (int i = 0; i < v.size(); ++i) v[i] = gauss(rng);
    return v;
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd u = draw();
    const Eigen::VectorXd v = draw();
    const Eigen::VectorXd w = draw();
    const double uv = symplectic_pairing(space, TangentVector{u}, TangentVector{v});
    const double vu = symplectic_pairing(space, TangentVector{v}, TangentVector{u});
    CHECK(std::abs(uv + vu) < 1e-12);
    const double left = symplectic_pairing(space, TangentVector{u + w}, TangentVector{v});
    const double split =
        uv + symplectic_pairing(space, TangentVector{w}, TangentVector{v});
    CHECK(std::abs(left - split) < 1e-10 * (1.0 + std::abs(left)));
  }
}

TEST_CASE("wrap_coords leaves linear slots untouched") {
  const PhaseSpace space = PhaseSpace::product({PhaseSpace::cylinder(), PhaseSpace::euclidean(2)});
  Eigen::VectorXd raw(4);
  raw << -kPi, 2.0, 9.0, -3.5;
  const Eigen::VectorXd wrapped = wrap_coords(space, raw);
  CHECK(wrapped[0] == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(wrapped[1] == 2.0);
  CHECK(wrapped[2] == 9.0);
  CHECK(wrapped[3] == -3.5);
}

}  // TEST_SUITE
