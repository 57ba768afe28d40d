// Acceptance gate: one line per criterion, nonzero exit when any of them
// fails.  Every check is self-contained against the library API.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "clonelab/approx_search.hpp"
#include "clonelab/cloning_linear.hpp"
#include "clonelab/dynamics.hpp"
#include "clonelab/experiments.hpp"
#include "clonelab/loop_topology.hpp"
#include "clonelab/phase_space.hpp"
#include "clonelab/point_cloning.hpp"
#include "clonelab/quantum_analogy.hpp"

using namespace clonelab;

namespace {

struct Checker {
  int failures = 0;

  void run(int index, const std::string& label, double time_limit,
           const std::function<std::string()>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string problem;
    try {
      problem = body();
    } catch (const std::exception& e) {
      problem = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (problem.empty() && time_limit > 0.0 && elapsed > time_limit) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "took %.1fs, limit %.0fs", elapsed, time_limit);
      problem = buf;
    }
    if (problem.empty()) {
      std::printf("PASS criterion %d: %s (%.2fs)\n", index, label.c_str(), elapsed);
    } else {
      std::printf("FAIL criterion %d: %s (%.2fs) -- %s\n", index, label.c_str(), elapsed,
                  problem.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
};

std::string check_exact_cloning() {
  for (int n : {1, 2}) {
    const LinearCloneMap map = complete_lorentz_frame(+1, 2 * n);
    if (eta_residual(map.mc) >= 1e-12) return "metric residual too large";
    const PhaseSpace sys = PhaseSpace::euclidean(2 * n);
    const PhaseSpace machine = PhaseSpace::euclidean(2 * n, -1);
    std::mt19937_64 rng(11 + n);
    std::uniform_real_distribution<double> box(-10.0, 10.0);
    std::vector<Eigen::VectorXd> sample;
    for (int i = 0; i < 1000; ++i) {
      Eigen::VectorXd x(2 * n);
      for (int k = 0; k < 2 * n; ++k) x[k] = box(rng);
      sample.push_back(x);
    }
    const CloneSetup setup{sys, machine, make_point(sys, Eigen::VectorXd::Zero(2 * n)),
                           make_point(machine, Eigen::VectorXd::Zero(2 * n)), map};
    const CloneDefect defect = clone_defect(setup, sample, 1e-2);
    if (defect.value > 1e-12) {
      return "clone defect " + std::to_string(defect.value) + " at n = " + std::to_string(n);
    }
  }
  return "";
}

std::string check_generator_flow() {
  const LinearCloneMap map = complete_lorentz_frame(+1);
  const Eigen::MatrixXd big = map.induced();
  const HamiltonianSpec gen = generator_hamiltonian(map);
  const PhaseSpace space = map.product_space();

  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd z(6);
    for (int i = 0; i < 6; ++i) z[i] = box(rng);
    const PhasePoint out = flow_endpoint(gen, make_point(space, z), 0.0, 1.0, 1e-4);
    worst = std::max(worst, (out.coords - big * z).cwiseAbs().maxCoeff());
  }
  if (worst >= 1e-6) return "flow deviates from the closed form by " + std::to_string(worst);

  const Isotopy iso = generator_isotopy(map);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd z(6);
    for (int i = 0; i < 6; ++i) z[i] = box(rng);
    const Eigen::MatrixXd jac = transport_jacobian(iso, make_point(space, z), 1e-3);
    const double res = symplecticity_residual(space, jac);
    if (res >= 1e-5) return "jacobian symplecticity residual " + std::to_string(res);
  }
  return "";
}

struct WitnessBundle {
  std::vector<NoGoCertificate> certs;
  bool ready = false;
};

CloneSetup cylinder_triple_setup() {
  const PhaseSpace sys = PhaseSpace::cylinder();
  const PhaseSpace machine = PhaseSpace::cylinder(-1);
  return CloneSetup{sys, machine, make_point(sys, Eigen::Vector2d(0.0, 0.0)),
                    make_point(machine, Eigen::Vector2d(0.0, 0.0)),
                    Isotopy(TripleSpace(sys, machine).product)};
}

std::string check_winding_invariance(WitnessBundle& bundle) {
  CloneSetup setup = cylinder_triple_setup();
  const TripleSpace triple(setup.sys, setup.machine);
  const CandidateFamily family = CandidateFamily::trig_poly(triple.product, 2, 2, 2, 2);

  LoopShape shape;
  shape.slots.resize(2);
  shape.slots[0].winding = 1;
  shape.slots[1].offset = 0.25;
  const Loop probe = make_loop(setup.sys, shape, 64);

  for (int k = 0; k < 20; ++k) {
    std::mt19937_64 rng(7 + std::uint64_t(k));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd params(family.parameter_count());
    for (int i = 0; i < params.size(); ++i) params[i] = 0.4 * gauss(rng);
    setup.witness = family.realize(params);
    const NoGoCertificate cert =
        no_go_certificate(setup, probe, 1e-3, "random-trigpoly-" + std::to_string(7 + k));
    bundle.certs.push_back(cert);
  }
  bundle.ready = true;

  int violations = 0;
  for (const NoGoCertificate& cert : bundle.certs) {
    if (cert.input_windings[0] != 1 || cert.input_windings[1] != 0) ++violations;
    if (cert.transported_windings[0] != 1 || cert.transported_windings[1] != 0) ++violations;
  }
  if (violations > 0) return std::to_string(violations) + " winding violations";
  return "";
}

std::string check_no_go(const WitnessBundle& bundle) {
  if (!bundle.ready || bundle.certs.size() != 20) return "witness certificates unavailable";
  for (const NoGoCertificate& cert : bundle.certs) {
    if (cert.verdict != Verdict::Obstructed)
      return "witness " + cert.witness_id + " was not obstructed";
    if (cert.required_windings[0] != 1 || cert.required_windings[1] != 1)
      return "witness " + cert.witness_id + " compared against the wrong class";
  }

  const PhaseSpace torus = PhaseSpace::torus2();
  LoopShape first, diagonal;
  first.slots.resize(2);
  first.slots[0].winding = 1;
  diagonal.slots.resize(2);
  diagonal.slots[0].winding = 1;
  diagonal.slots[1].winding = 1;
  const Eigen::VectorXi wa = winding_vector(make_loop(torus, first, 64));
  const Eigen::VectorXi wb = winding_vector(make_loop(torus, diagonal, 64));
  if (wa[0] != 1 || wa[1] != 0) return "torus probe class mismatch";
  if (wb[0] != 1 || wb[1] != 1) return "torus diagonal class mismatch";
  if (wa == wb) return "torus classes failed to separate";
  return "";
}

std::string check_approx_contrast() {
  // Plane: the search must actually clone.
  {
    const PhaseSpace plane = PhaseSpace::euclidean(2);
    const PhaseSpace machine = PhaseSpace::euclidean(2, -1);
    const TripleSpace triple(plane, machine);
    const CloneSetup setup{plane, machine, make_point(plane, Eigen::Vector2d::Zero()),
                           make_point(machine, Eigen::Vector2d::Zero()), Isotopy(triple.product)};
    const CandidateFamily family = CandidateFamily::quadratic(triple.product, 2);
    std::mt19937_64 rng(1000004);
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    std::vector<Eigen::VectorXd> sample;
    for (int i = 0; i < 24; ++i) sample.push_back(Eigen::Vector2d(box(rng), box(rng)));
    OptimizeOptions opt;
    opt.budget = 50000;
    opt.seed = 1;
    opt.step = 0.01;
    opt.target = 1e-3;
    const ApproxReport report = optimize(family, setup, sample, opt);
    if (!(report.best_objective < 1e-3))
      return "plane objective stalled at " + std::to_string(report.best_objective);
    if (report.evaluations > 50000)
      return "plane search overspent its evaluation budget";
  }

  // Cylinder: every seeded search keeps an angular error floor near pi.
  const CloneSetup setup_base = cylinder_triple_setup();
  CloneSetup setup = setup_base;
  setup.blank = make_point(setup.sys, Eigen::Vector2d(kPi, 0.0));
  const TripleSpace triple(setup.sys, setup.machine);
  const CandidateFamily family = CandidateFamily::trig_poly(triple.product, 2, 1, 2, 2);

  LoopShape probe_shape;
  probe_shape.slots.resize(2);
  probe_shape.slots[0].winding = 1;
  probe_shape.slots[1].offset = 0.25;
  const Loop probe = make_loop(setup.sys, probe_shape, 2048);

  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    std::mt19937_64 rng(seed + 1000003);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::uniform_real_distribution<double> mom(-1.0, 1.0);
    std::vector<Eigen::VectorXd> sample;
    for (int i = 0; i < 8; ++i) sample.push_back(Eigen::Vector2d(angle(rng), mom(rng)));
    OptimizeOptions opt;
    opt.budget = 12000;
    opt.seed = seed;
    opt.step = 0.04;
    opt.target = 0.0;
    const ApproxReport report = optimize(family, setup, sample, opt);
    const double floor =
        angular_error_floor(family, report.best_params, setup, probe, 5e-3);
    if (!(floor >= kPi - 0.05)) {
      return "seed " + std::to_string(seed) + " floor " + std::to_string(floor) +
             " below pi - 0.05";
    }
  }
  return "";
}

std::string check_point_transport() {
  // Coin: one tracked point on cylinder x cylinder, second pair flips.
  {
    const PhaseSpace space =
        PhaseSpace::product({PhaseSpace::cylinder(), PhaseSpace::cylinder()});
    Eigen::VectorXd src(4), dst(4);
    src << kPi, 0.0, 0.0, 0.0;
    dst << kPi, 0.0, kPi, 0.0;
    const PointTransportPlan plan = plan_transport(space, {src}, {dst});
    const auto [iso, record] = execute_plan(plan, 1e-3);
    if (record.worst_endpoint >= 1e-6)
      return "coin endpoint error " + std::to_string(record.worst_endpoint);
    const PhasePoint out = transport(iso, make_point(space, src), 1e-3);
    const double a_drift =
        std::hypot(arc_delta(out.coords[0], kPi), out.coords[1]);
    if (a_drift >= 1e-9) return "coin moved the first pair by " + std::to_string(a_drift);
  }

  // Swap on the plane.
  {
    const PhaseSpace plane = PhaseSpace::euclidean(2);
    const std::vector<Eigen::VectorXd> src{Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 0.0)};
    const std::vector<Eigen::VectorXd> dst{Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 0.0)};
    const PointTransportPlan plan = plan_transport(plane, src, dst);
    const auto [iso, record] = execute_plan(plan, 1e-3);
    (void)iso;
    if (record.worst_endpoint >= 1e-6)
      return "swap endpoint error " + std::to_string(record.worst_endpoint);
    if (record.worst_interference >= 1e-9)
      return "swap interference " + std::to_string(record.worst_interference);
  }

  // Eight random cylinder points with spaced sources and targets.
  {
    const PhaseSpace cyl = PhaseSpace::cylinder();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::uniform_real_distribution<double> mom(-1.5, 1.5);
    std::vector<Eigen::VectorXd> pts;
    int attempts = 0;
    while (int(pts.size()) < 16 && attempts < 100000) {
      ++attempts;
      Eigen::Vector2d cand(angle(rng), mom(rng));
      bool clear = true;
      for (const Eigen::VectorXd& p : pts)
        clear = clear && chart_distance(cyl, p, cand) >= 0.5;
      if (clear) pts.push_back(cand);
    }
    if (int(pts.size()) < 16) return "could not draw spaced random points";
    const std::vector<Eigen::VectorXd> src(pts.begin(), pts.begin() + 8);
    const std::vector<Eigen::VectorXd> dst(pts.begin() + 8, pts.end());
    const PointTransportPlan plan = plan_transport(cyl, src, dst);
    const auto [iso, record] = execute_plan(plan, 1e-3);
    (void)iso;
    if (record.worst_endpoint >= 1e-6)
      return "random-suite endpoint error " + std::to_string(record.worst_endpoint);
    if (record.worst_interference >= 1e-9)
      return "random-suite interference " + std::to_string(record.worst_interference);
  }
  return "";
}

std::string check_quantum() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dims(1, 8);
  std::uniform_real_distribution<double> mag(0.25, 2.0);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const auto draw_ket = [&](int d) {
    Ket v(d);
    for (int i = 0; i < d; ++i) v[i] = std::complex<double>(gauss(rng), gauss(rng));
    return v;
  };

  for (int trial = 0; trial < 1000; ++trial) {
    const int d = dims(rng);
    const Ket b = draw_ket(d);
    const std::complex<double> c =
        trial % 100 == 99 ? 0.0 : std::polar(mag(rng), phase(rng));
    const SubspaceCloneResult res = clone_1d_subspace(b, c * b);
    if (res.residual >= 1e-12)
      return "regroup residual " + std::to_string(res.residual);
  }

  for (int trial = 0; trial < 100; ++trial) {
    const int d = dims(rng);
    const Ket b = draw_ket(d);
    const Ket v = draw_ket(d);
    const Eigen::MatrixXcd u = rotate_b_into_subspace(b, v);
    const double unit =
        (u.adjoint() * u - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
    if (unit >= 1e-12) return "unitarity residual " + std::to_string(unit);
  }
  return "";
}

std::string check_integrator_health() {
  const PendulumHealth health = pendulum_health({1e-2, 5e-3, 2.5e-3}, 10.0);
  for (double ratio : health.ratios) {
    if (!(ratio > 3.5 && ratio < 4.5))
      return "drift ratio " + std::to_string(ratio) + " outside 4 +/- 0.5";
  }
  if (health.reversal_error >= 1e-9)
    return "reversal error " + std::to_string(health.reversal_error);
  return "";
}

}  // namespace

int main() {
  Checker checker;
  WitnessBundle bundle;

  checker.run(1, "exact linear cloning on the plane and the double plane", 1.0,
              check_exact_cloning);
  checker.run(2, "generator flow realizes the clone map symplectically", 30.0,
              check_generator_flow);
  checker.run(3, "winding numbers survive twenty random isotopies", 120.0,
              [&] { return check_winding_invariance(bundle); });
  checker.run(4, "certificates obstruct cylinder cloning and split the torus classes", 60.0,
              [&] { return check_no_go(bundle); });
  checker.run(5, "plane search clones while cylinder floors stay near pi", 300.0,
              check_approx_contrast);
  checker.run(6, "coin, swap, and random point-transport suites", 60.0, check_point_transport);
  checker.run(7, "one-dimensional subspace cloning and rotations", 1.0, check_quantum);
  checker.run(8, "integrator drift scaling and reversibility", 0.0, check_integrator_health);

  if (checker.failures > 0) {
    std::printf("%d criterion(s) failed\n", checker.failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
