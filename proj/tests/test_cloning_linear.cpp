#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "clonelab/cloning_linear.hpp"
#include "clonelab/dynamics.hpp"
#include "clonelab/errors.hpp"
#include "clonelab/phase_space.hpp"

using namespace clonelab;

TEST_SUITE("cloning_linear") {

TEST_CASE("frame for g = +1 matches the closed form") {
  const LinearCloneMap map = complete_lorentz_frame(+1);
  Eigen::Matrix3d expected;
  expected << 1.0, 1.0, 1.0,
              1.0, -0.5, 0.5,
              1.0, 0.5, 1.5;
  CHECK((map.mc - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(map.g() == 1);
}

TEST_CASE("frames have the required first column and metric residual") {
  for (int g : {+1, -1}) {
    const LinearCloneMap map = complete_lorentz_frame(g);
    CHECK(map.mc(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(map.mc(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(map.mc(2, 0) == doctest::Approx(double(g)).epsilon(1e-14));
    CHECK(eta_residual(map.mc) < 1e-12);
    CHECK(std::abs(std::abs(map.mc.determinant()) - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(complete_lorentz_frame(0), DomainError);
  CHECK_THROWS_AS(complete_lorentz_frame(2), DomainError);
}

TEST_CASE("frame construction is deterministic") {
  const LinearCloneMap a = complete_lorentz_frame(-1);
  const LinearCloneMap b = complete_lorentz_frame(-1);
  CHECK((a.mc - b.mc).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("induced block map preserves the signed product pairing") {
  for (int n : {1, 2}) {
    const LinearCloneMap map = complete_lorentz_frame(+1, 2 * n);
    const Eigen::MatrixXd big = map.induced();
    REQUIRE(big.rows() == 6 * n);
    CHECK(symplecticity_residual(map.product_space(), big) < 1e-12);
    CHECK(std::abs(big.determinant() - 1.0) < 1e-10);
  }
}

TEST_CASE("blank inputs clone the x block into the y slot") {
  const LinearCloneMap map = complete_lorentz_frame(+1);

  SUBCASE("worked example x = (1, 2)") {
    const Eigen::Vector2d x(1.0, 2.0);
    const auto out = apply_clone_map(map, x, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero());
    for (const auto& block : out) {
      CHECK(block[0] == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(block[1] == doctest::Approx(2.0).epsilon(1e-14));
    }
  }

  SUBCASE("zero input stays zero") {
    const auto out = apply_clone_map(map, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(),
                                     Eigen::Vector2d::Zero());
    for (const auto& block : out) CHECK(block.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("y' = x exactly over random draws") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> box(-10.0, 10.0);
    for (int trial = 0; trial < 1000; ++trial) {
      const Eigen::Vector2d x(box(rng), box(rng));
      const auto out = apply_clone_map(map, x, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero());
      CHECK((out[0] - x).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((out[1] - x).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("identity map yields an identically zero generator") {
  LinearCloneMap id;
  const HamiltonianSpec h = generator_hamiltonian(id);
  Eigen::VectorXd z(6);
  z << 0.3, -0.2, 1.0, 0.4, -0.7, 0.9;
  CHECK(h.value(z, 0.2) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(hamiltonian_vector_field(h, make_point(h.space(), z), 0.7)
            .components.cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("generator flow reproduces the induced map") {
  const LinearCloneMap map = complete_lorentz_frame(+1);
  const Eigen::MatrixXd big = map.induced();
  const HamiltonianSpec h = generator_hamiltonian(map);
  const PhaseSpace space = map.product_space();

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd z(6);
    for (int i = 0; i < 6; ++i) z[i] = box(rng);
    const PhasePoint out = flow_endpoint(h, make_point(space, z), 0.0, 1.0, 1e-4);
    const Eigen::VectorXd expected = big * z;
    CHECK((out.coords - expected).cwiseAbs().maxCoeff() < 1e-6);
  }

  SUBCASE("time zero is the identity") {
    Eigen::VectorXd z(6);
    z << 1.0, 0.0, -1.0, 0.5, 0.25, -0.75;
    const PhasePoint out = flow_endpoint(h, make_point(space, z), 0.0, 0.0, 1e-4);
    CHECK((out.coords - z).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("generator isotopy has two half-time stages and a symplectic jacobian") {
  const LinearCloneMap map = complete_lorentz_frame(+1);
  const Isotopy iso = generator_isotopy(map);
  REQUIRE(iso.stages().size() == 2);
  CHECK(iso.stages()[0].duration == doctest::Approx(0.5));
  CHECK(iso.stages()[1].duration == doctest::Approx(0.5));

  Eigen::VectorXd z(6);
  z << 0.2, -0.4, 0.6, 0.1, -0.3, 0.5;
  const Eigen::MatrixXd jac = transport_jacobian(iso, make_point(iso.space(), z), 1e-3);
  CHECK((jac - map.induced()).cwiseAbs().maxCoeff() < 1e-5);
  CHECK(symplecticity_residual(iso.space(), jac) < 1e-5);
}

TEST_CASE("triple space embeds and splits consistently") {
  const TripleSpace triple(PhaseSpace::euclidean(2), PhaseSpace::euclidean(2));
  const Eigen::Vector2d x(1.0, 2.0);
  const Eigen::Vector2d b(3.0, 4.0);
  const Eigen::Vector2d r(5.0, 6.0);
  const Eigen::VectorXd w = triple.embed(x, b, r);
  REQUIRE(w.size() == 6);
  const auto parts = triple.split(w);
  CHECK((parts[0] - x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((parts[1] - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((parts[2] - r).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("clone defect vanishes for the exact map and is honest otherwise") {
  const PhaseSpace plane = PhaseSpace::euclidean(2);
  const PhaseSpace machine = PhaseSpace::euclidean(2, -1);
  const LinearCloneMap map = complete_lorentz_frame(+1);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> box(-10.0, 10.0);
  std::vector<Eigen::VectorXd> sample;
  for (int i = 0; i < 200; ++i) sample.push_back(Eigen::Vector2d(box(rng), box(rng)));

  CloneSetup exact{plane, machine, make_point(plane, Eigen::Vector2d::Zero()),
                   make_point(machine, Eigen::Vector2d::Zero()), map};
  const CloneDefect good = clone_defect(exact, sample, 1e-2);
  CHECK(good.value <= 1e-12);

  CloneSetup lazy{plane, machine, make_point(plane, Eigen::Vector2d::Zero()),
                  make_point(machine, Eigen::Vector2d::Zero()),
                  Isotopy(TripleSpace(plane, machine).product)};
  const CloneDefect bad = clone_defect(lazy, sample, 1e-2);
  // Identity witness leaves the blank in place, so the defect is the largest
  // sampled distance from b to x.
  double expected = 0.0;
  for (const auto& x : sample) expected = std::max(expected, x.norm());
  CHECK(bad.value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(bad.worst_second == doctest::Approx(expected).epsilon(1e-12));
  CHECK(bad.worst_first == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("clone defect accepts the generator isotopy as witness") {
  const PhaseSpace plane = PhaseSpace::euclidean(2);
  const PhaseSpace machine = PhaseSpace::euclidean(2, -1);
  const LinearCloneMap map = complete_lorentz_frame(+1);
  std::mt19937_64 rng(78);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::vector<Eigen::VectorXd> sample;
  for (int i = 0; i < 40; ++i) sample.push_back(Eigen::Vector2d(box(rng), box(rng)));

  CloneSetup setup{plane, machine, make_point(plane, Eigen::Vector2d::Zero()),
                   make_point(machine, Eigen::Vector2d::Zero()), generator_isotopy(map)};
  const CloneDefect defect = clone_defect(setup, sample, 1e-4);
  CHECK(defect.value < 1e-6);
}

}  // TEST_SUITE
