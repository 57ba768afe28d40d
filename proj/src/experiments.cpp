#include "clonelab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "clonelab/quantum_analogy.hpp"

namespace clonelab {

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void emit_report(const RunContext& ctx, const std::string& name, const Json& data) {
  Json wrapped{{"meta", Json{{"written_at", utc_now()}}}, {"data", data}};
  write_json_file(ctx.out_dir + "/" + name + "/report.json", wrapped);
}

void emit_csv(const RunContext& ctx, const std::string& rel,
              const std::function<void(std::ostream&)>& writer) {
  std::filesystem::path path = std::filesystem::path(ctx.out_dir) / rel;
  std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  writer(os);
}

void log_line(const RunContext& ctx, const std::string& line) {
  if (!ctx.quiet) std::cout << line << "\n";
}

std::uint64_t pick_seed(const RunContext& ctx, std::uint64_t from_config) {
  return ctx.seed_override.value_or(from_config);
}

std::vector<std::uint64_t> pick_seeds(const RunContext& ctx,
                                      const std::vector<std::uint64_t>& from_config) {
  if (!ctx.seed_override) return from_config;
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < from_config.size(); ++i)
    out.push_back(*ctx.seed_override + i);
  return out;
}

std::vector<Eigen::VectorXd> sample_euclidean_box(std::mt19937_64& rng, int dim, int count,
                                                  double box) {
  std::uniform_real_distribution<double> u(-box, box);
  std::vector<Eigen::VectorXd> out;
  out.reserve(std::size_t(count));
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd x(dim);
    for (int i = 0; i < dim; ++i) x[i] = u(rng);
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Eigen::VectorXd> sample_cylinder(std::mt19937_64& rng, int count, double p_box) {
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  std::uniform_real_distribution<double> mom(-p_box, p_box);
  std::vector<Eigen::VectorXd> out;
  out.reserve(std::size_t(count));
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd x(2);
    x[0] = ang(rng);
    x[1] = mom(rng);
    out.push_back(std::move(x));
  }
  return out;
}

Eigen::VectorXd normal_vector(std::mt19937_64& rng, int dim, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = n(rng);
  return v;
}

LoopShape winding_one_shape(double momentum_offset) {
  LoopShape shape;
  shape.slots.resize(2);
  shape.slots[0].winding = 1;
  shape.slots[1].offset = momentum_offset;
  return shape;
}

}  // namespace

RunOutcome run_clone_r2n(const LabConfig& cfg, const RunContext& ctx) {
  const CloneR2nConfig& c = cfg.clone_r2n;
  RunOutcome out;
  Json cases = Json::array();

  for (int n : c.ns) {
    const int block = 2 * n;
    LinearCloneMap map = complete_lorentz_frame(c.g, block);
    const double eta_res = eta_residual(map.mc);
    out.require(eta_res < c.eta_tol, "clone_r2n: eta residual (n=" + std::to_string(n) + ")");

    CloneSetup setup{PhaseSpace::euclidean(block, +1), PhaseSpace::euclidean(block, -1),
                     PhasePoint{Eigen::VectorXd::Zero(block)},
                     PhasePoint{Eigen::VectorXd::Zero(block)}, map};

    std::mt19937_64 rng(pick_seed(ctx, c.seed) + std::uint64_t(n));
    auto sample = sample_euclidean_box(rng, block, c.defect_samples, c.defect_box);
    CloneDefect defect = clone_defect(setup, sample, c.flow_step);
    out.require(defect.value <= c.defect_tol,
                "clone_r2n: clone defect (n=" + std::to_string(n) + ")");

    HamiltonianSpec gen = generator_hamiltonian(map);
    Isotopy iso = generator_isotopy(map);
    TripleSpace ts(setup.sys, setup.machine);
    const Eigen::MatrixXd induced = map.induced();

    auto flow_inputs = sample_euclidean_box(rng, 3 * block, c.flow_samples, c.flow_box);
    double flow_err = 0.0;
    for (const auto& w : flow_inputs) {
      PhasePoint got = transport(iso, make_point(ts.product, w), c.flow_step);
      flow_err = std::max(flow_err, (got.coords - induced * w).cwiseAbs().maxCoeff());
    }
    out.require(flow_err < c.flow_tol,
                "clone_r2n: generator flow vs closed form (n=" + std::to_string(n) + ")");

    double jac_res = 0.0;
    auto jac_inputs = sample_euclidean_box(rng, 3 * block, c.jacobian_samples, c.flow_box);
    for (const auto& w : jac_inputs) {
      Eigen::MatrixXd jac = transport_jacobian(iso, make_point(ts.product, w), c.flow_step);
      jac_res = std::max(jac_res, symplecticity_residual(ts.product, jac));
    }
    out.require(jac_res < c.jacobian_tol,
                "clone_r2n: flow-Jacobian symplecticity (n=" + std::to_string(n) + ")");

    write_json_file(ctx.out_dir + "/clone_r2n/mc_n" + std::to_string(n) + ".json",
                    clone_map_to_json(map));
    write_json_file(ctx.out_dir + "/clone_r2n/generator_n" + std::to_string(n) + ".json",
                    hamiltonian_to_json(gen));

    cases.push_back(Json{{"n", n},
                         {"eta_residual", eta_res},
                         {"clone_defect", defect.value},
                         {"defect_worst_first", defect.worst_first},
                         {"defect_worst_second", defect.worst_second},
                         {"flow_error", flow_err},
                         {"jacobian_residual", jac_res}});
    log_line(ctx, "clone-r2n n=" + std::to_string(n) + ": defect " +
                      std::to_string(defect.value) + ", flow err " + std::to_string(flow_err));
  }

  out.report = Json{{"experiment", "clone_r2n"}, {"g", c.g}, {"cases", std::move(cases)}};
  emit_report(ctx, "clone_r2n", out.report);
  return out;
}

RunOutcome run_no_go(const LabConfig& cfg, const RunContext& ctx) {
  const NoGoConfig& c = cfg.no_go;
  RunOutcome out;

  PhaseSpace sys = PhaseSpace::cylinder(+1);
  PhaseSpace machine = PhaseSpace::cylinder(-1);
  TripleSpace ts(sys, machine);
  CloneSetup setup{sys, machine,
                   make_point(sys, Eigen::Vector2d(c.blank[0], c.blank[1])),
                   make_point(machine, Eigen::Vector2d(c.machine_start[0], c.machine_start[1])),
                   Isotopy(ts.product)};

  Loop probe = make_loop(sys, winding_one_shape(c.probe_momentum), c.probe_samples);
  CandidateFamily family = CandidateFamily::trig_poly(
      ts.product, c.stage_count, c.max_harmonic, c.max_power, c.max_total_degree);

  const std::uint64_t base_seed = pick_seed(ctx, c.seed);
  Json certs = Json::array();
  int obstructed = 0;
  int exact_transport = 0;
  for (int k = 0; k < c.witness_count; ++k) {
    std::mt19937_64 rng(base_seed + std::uint64_t(k));
    Eigen::VectorXd params = normal_vector(rng, family.parameter_count(), c.coeff_scale);
    setup.witness = family.realize(params);
    NoGoCertificate cert =
        no_go_certificate(setup, probe, c.step,
                          "random-trigpoly-" + std::to_string(base_seed + std::uint64_t(k)),
                          c.max_doublings);
    if (cert.verdict == Verdict::Obstructed) ++obstructed;
    const bool kept = cert.transported_windings[cert.compared_slots[0]] == 1 &&
                      cert.transported_windings[cert.compared_slots[1]] == 0;
    if (kept) ++exact_transport;
    certs.push_back(certificate_to_json(cert));

    if (k == 0) {
      Loop lifted = lift_probe(setup, probe);
      Loop transported = transport_loop(std::get<Isotopy>(setup.witness), lifted, c.step,
                                        c.max_doublings);
      emit_csv(ctx, "no_go/transported_loop_witness0.csv", [&](std::ostream& os) {
        write_loop_csv(os, ts.product, transported);
      });
      write_json_file(ctx.out_dir + "/no_go/witness0.json",
                      isotopy_to_json(std::get<Isotopy>(setup.witness)));
    }
  }
  out.require(exact_transport == c.witness_count,
              "no_go: winding invariance (1,0,*) under every random isotopy");
  out.require(obstructed == c.witness_count,
              "no_go: OBSTRUCTED verdict for every random isotopy");

  NoGoCertificate cheat = pointwise_duplication_certificate(setup, probe);
  out.require(cheat.verdict == Verdict::Consistent,
              "no_go: pointwise duplication reported CONSISTENT");

  PhaseSpace torus = PhaseSpace::torus2(+1);
  LoopShape a_shape, b_shape;
  a_shape.slots.resize(2);
  a_shape.slots[0].winding = 1;
  b_shape.slots.resize(2);
  b_shape.slots[0].winding = 1;
  b_shape.slots[1].winding = 1;
  Loop torus_a = make_loop(torus, a_shape, c.probe_samples);
  Loop torus_b = make_loop(torus, b_shape, c.probe_samples);
  Eigen::VectorXi wa = winding_vector(torus_a);
  Eigen::VectorXi wb = winding_vector(torus_b);
  out.require(wa[0] == 1 && wa[1] == 0, "no_go: torus loop A winds (1,0)");
  out.require(wb[0] == 1 && wb[1] == 1, "no_go: torus loop B winds (1,1)");
  out.require(wa != wb, "no_go: torus classes (1,0) and (1,1) differ");

  emit_csv(ctx, "no_go/probe_loop.csv",
           [&](std::ostream& os) { write_loop_csv(os, sys, probe); });
  emit_csv(ctx, "no_go/torus_loop_10.csv",
           [&](std::ostream& os) { write_loop_csv(os, torus, torus_a); });
  emit_csv(ctx, "no_go/torus_loop_11.csv",
           [&](std::ostream& os) { write_loop_csv(os, torus, torus_b); });

  out.report = Json{{"experiment", "no_go"},
                    {"witness_count", c.witness_count},
                    {"obstructed", obstructed},
                    {"winding_preserved", exact_transport},
                    {"certificates", std::move(certs)},
                    {"cheat", certificate_to_json(cheat)},
                    {"torus", Json{{"winding_10", Json{wa[0], wa[1]}},
                                   {"winding_11", Json{wb[0], wb[1]}},
                                   {"distinct", wa != wb}}}};
  emit_report(ctx, "no_go", out.report);
  log_line(ctx, "no-go: " + std::to_string(obstructed) + "/" +
                    std::to_string(c.witness_count) + " witnesses obstructed");
  return out;
}

namespace {

Json run_approx_suite(const LabConfig& cfg, const RunContext& ctx, bool cylinder,
                      RunOutcome& out) {
  const ApproxConfig& a = cfg.approx;
  const ApproxSuiteConfig& suite = cylinder ? a.cylinder : a.r2;

  PhaseSpace sys = cylinder ? PhaseSpace::cylinder(+1) : PhaseSpace::euclidean(2, +1);
  PhaseSpace machine = cylinder ? PhaseSpace::cylinder(-1) : PhaseSpace::euclidean(2, -1);
  TripleSpace ts(sys, machine);
  Eigen::Vector2d blank = cylinder
                              ? Eigen::Vector2d(a.cylinder_blank[0], a.cylinder_blank[1])
                              : Eigen::Vector2d::Zero();
  CloneSetup setup{sys, machine, make_point(sys, blank),
                   make_point(machine, Eigen::Vector2d::Zero()), Isotopy(ts.product)};

  CandidateFamily family =
      cylinder ? CandidateFamily::trig_poly(ts.product, a.stages, a.cylinder_max_harmonic,
                                            a.cylinder_max_power, a.cylinder_max_total_degree)
               : CandidateFamily::quadratic(ts.product, a.stages);

  std::optional<Loop> probe;
  if (cylinder) probe = make_loop(sys, winding_one_shape(0.0), a.floor_samples);

  const std::string name = cylinder ? "cylinder" : "r2";
  Json runs = Json::array();
  for (std::uint64_t seed : pick_seeds(ctx, suite.seeds)) {
    std::mt19937_64 rng(seed + 1000003);
    auto sample = cylinder ? sample_cylinder(rng, suite.sample_count, suite.sample_box)
                           : sample_euclidean_box(rng, 2, suite.sample_count, suite.sample_box);

    OptimizeOptions opt;
    opt.budget = suite.budget;
    opt.seed = seed;
    opt.step = suite.step;
    opt.population = suite.population;
    opt.sigma0 = suite.sigma0;
    opt.stagnation = suite.stagnation;
    opt.target = suite.target;
    ApproxReport report = optimize(family, setup, sample, opt);

    Json entry = approx_report_to_json(report);
    if (!cylinder) {
      out.require(report.best_objective < suite.target,
                  "approx: r2 objective below target (seed " + std::to_string(seed) + ")");
      out.require(report.evaluations <= suite.budget,
                  "approx: r2 evaluation budget respected (seed " + std::to_string(seed) + ")");
    } else {
      const double floor =
          angular_error_floor(family, report.best_params, setup, *probe, a.floor_step);
      entry["angular_error_floor"] = floor;
      out.require(floor >= a.floor_threshold,
                  "approx: cylinder angular error floor (seed " + std::to_string(seed) + ")");
    }
    emit_csv(ctx, "approx/trace_" + name + "_seed" + std::to_string(seed) + ".csv",
             [&](std::ostream& os) { write_trace_csv(os, report.objective_trace); });
    log_line(ctx, "approx " + name + " seed " + std::to_string(seed) + ": objective " +
                      std::to_string(report.best_objective) + " after " +
                      std::to_string(report.evaluations) + " evals");
    runs.push_back(std::move(entry));
  }
  return Json{{"suite", name}, {"runs", std::move(runs)}};
}

}  // namespace

RunOutcome run_approx(const LabConfig& cfg, const RunContext& ctx) {
  RunOutcome out;
  Json r2 = run_approx_suite(cfg, ctx, false, out);
  Json cyl = run_approx_suite(cfg, ctx, true, out);
  out.report = Json{{"experiment", "approx"},
                    {"r2", std::move(r2)},
                    {"cylinder", std::move(cyl)},
                    {"floor_threshold", cfg.approx.floor_threshold}};
  emit_report(ctx, "approx", out.report);
  return out;
}

namespace {

Json points_case(const RunContext& ctx, RunOutcome& out, const PointsConfig& c,
                 const std::string& label, const PhaseSpace& space,
                 const std::vector<Eigen::VectorXd>& sources,
                 const std::vector<Eigen::VectorXd>& targets) {
  PointTransportPlan plan = plan_transport(space, sources, targets);
  Json entry{{"label", label}, {"plan", plan_to_json(plan)}};
  bool executed = false;
  try {
    auto [iso, record] = execute_plan(plan, c.step, c.endpoint_tol, c.interference_tol);
    executed = true;
    entry["record"] = execution_record_to_json(record);
    entry["stage_count"] = plan.stages.size();

    std::mt19937_64 rng(c.seed ^ 0x9E3779B97F4A7C15ull);
    double jac_res = 0.0;
    for (int k = 0; k < c.jacobian_probes; ++k) {
      Eigen::VectorXd z(space.dim());
      for (int i = 0; i < space.dim(); ++i)
        z[i] = space.angular(i)
                   ? std::uniform_real_distribution<double>(0.0, kTwoPi)(rng)
                   : std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
      // Bump profiles have steep high-order derivatives near the tube
      // boundary; this delta balances stencil truncation against roundoff for
      // every plan geometry the suite produces.
      Eigen::MatrixXd jac = transport_jacobian(iso, make_point(space, z), c.step, 1e-6);
      jac_res = std::max(jac_res, symplecticity_residual(space, jac));
    }
    entry["jacobian_residual"] = jac_res;
    out.require(jac_res < c.jacobian_tol, "points: stage symplecticity (" + label + ")");
  } catch (const ExecutionError& e) {
    entry["execution_error"] = e.what();
  }
  out.require(executed, "points: endpoints and non-interference (" + label + ")");
  return entry;
}

}  // namespace

RunOutcome run_points(const LabConfig& cfg, const RunContext& ctx) {
  const PointsConfig& c = cfg.points;
  RunOutcome out;
  Json cases = Json::array();

  // Two-cylinder computer-copy scenario: copy slot A's bit onto blank slot B.
  PhaseSpace coin_space =
      PhaseSpace::product({PhaseSpace::cylinder(+1), PhaseSpace::cylinder(+1)});
  Eigen::VectorXd coin_src(4), coin_dst(4);
  coin_src << kPi, 0.0, 0.0, 0.0;
  coin_dst << kPi, 0.0, kPi, 0.0;
  Json coin = points_case(ctx, out, c, "coin", coin_space, {coin_src}, {coin_dst});
  {
    PointTransportPlan plan = plan_transport(coin_space, {coin_src}, {coin_dst});
    auto [iso, record] = execute_plan(plan, c.step, c.endpoint_tol, c.interference_tol);
    PhasePoint moved = transport(iso, make_point(coin_space, coin_src), c.step);
    const double a_drift = std::hypot(arc_delta(moved.coords[0], kPi), moved.coords[1]);
    coin["a_slot_drift"] = a_drift;
    out.require(a_drift < c.interference_tol, "points: coin keeps slot A unmoved");

    Trajectory traj;
    traj.step = c.step;
    double t = 0.0;
    Eigen::VectorXd z = coin_src;
    traj.times.push_back(t);
    traj.points.push_back(z);
    for (const IsotopyStage& stage : iso.stages()) {
      Trajectory piece = flow(stage.hamiltonian, make_point(coin_space, z), 0.0,
                              stage.duration, c.step);
      for (std::size_t i = 1; i < piece.times.size(); ++i) {
        traj.times.push_back(t + piece.times[i]);
        traj.points.push_back(piece.points[i]);
      }
      t += stage.duration;
      z = piece.points.back();
    }
    emit_csv(ctx, "points/coin_trajectory.csv",
             [&](std::ostream& os) { write_trajectory_csv(os, traj); });
  }
  cases.push_back(std::move(coin));

  PhaseSpace plane = PhaseSpace::euclidean(2, +1);
  Eigen::VectorXd pa(2), pb(2);
  pa << 0.0, 0.0;
  pb << 1.0, 0.0;
  cases.push_back(points_case(ctx, out, c, "swap", plane, {pa, pb}, {pb, pa}));

  PhaseSpace cyl = PhaseSpace::cylinder(+1);
  std::mt19937_64 rng(pick_seed(ctx, c.seed));
  std::vector<Eigen::VectorXd> all_points;
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  std::uniform_real_distribution<double> mom(-c.momentum_box, c.momentum_box);
  int attempts = 0;
  while (int(all_points.size()) < 2 * c.random_count) {
    if (++attempts > 100000)
      throw PlanningError("points: rejection sampling failed to reach the spacing");
    Eigen::VectorXd p(2);
    p << ang(rng), mom(rng);
    bool clear = true;
    for (const auto& q : all_points)
      if (chart_distance(cyl, p, q) < c.min_spacing) {
        clear = false;
        break;
      }
    if (clear) all_points.push_back(std::move(p));
  }
  std::vector<Eigen::VectorXd> rnd_src(all_points.begin(),
                                       all_points.begin() + c.random_count);
  std::vector<Eigen::VectorXd> rnd_dst(all_points.begin() + c.random_count,
                                       all_points.end());
  Json random_case = points_case(ctx, out, c, "random", cyl, rnd_src, rnd_dst);

  {
    // Winding compatibility: the full random-suite isotopy cannot change a
    // probe loop's class.
    PointTransportPlan plan = plan_transport(cyl, rnd_src, rnd_dst);
    auto [iso, record] = execute_plan(plan, c.step, c.endpoint_tol, c.interference_tol);
    Loop probe = make_loop(cyl, winding_one_shape(0.1), 256);
    Loop moved = transport_loop(iso, probe, c.step);
    Eigen::VectorXi w = winding_vector(moved);
    random_case["transported_probe_winding"] = w[0];
    out.require(w[0] == 1, "points: transport preserves probe winding");
  }
  cases.push_back(std::move(random_case));

  out.report = Json{{"experiment", "points"}, {"cases", std::move(cases)}};
  emit_report(ctx, "points", out.report);
  return out;
}

RunOutcome run_quantum(const LabConfig& cfg, const RunContext& ctx) {
  const QuantumConfig& c = cfg.quantum;
  RunOutcome out;
  std::mt19937_64 rng(pick_seed(ctx, c.seed));
  std::uniform_int_distribution<int> dim(1, c.max_dim);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> mag(0.25, 2.0);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);

  double max_residual = 0.0;
  int zero_cases = 0;
  for (int k = 0; k < c.regroup_pairs; ++k) {
    const int d = dim(rng);
    Ket b(d);
    for (int i = 0; i < d; ++i) b[i] = std::complex<double>(gauss(rng), gauss(rng));
    if (b.norm() == 0.0) b[0] = 1.0;
    Ket psi;
    if (k % 100 == 99) {
      psi = Ket::Zero(d);
      ++zero_cases;
    } else {
      const double r = mag(rng);
      const double ph = phase(rng);
      psi = std::complex<double>(r * std::cos(ph), r * std::sin(ph)) * b;
    }
    SubspaceCloneResult result = clone_1d_subspace(b, psi);
    max_residual = std::max(max_residual, result.residual);
  }
  out.require(max_residual < c.tol, "quantum: tensor regrouping identity");

  double max_unitarity = 0.0;
  double max_alignment = 0.0;
  for (int k = 0; k < c.unitary_pairs; ++k) {
    const int d = dim(rng);
    Ket b(d), v(d);
    for (int i = 0; i < d; ++i) {
      b[i] = std::complex<double>(gauss(rng), gauss(rng));
      v[i] = std::complex<double>(gauss(rng), gauss(rng));
    }
    if (b.norm() == 0.0) b[0] = 1.0;
    if (v.norm() == 0.0) v[0] = 1.0;
    Eigen::MatrixXcd u = rotate_b_into_subspace(b, v);
    max_unitarity = std::max(
        max_unitarity,
        (u.adjoint() * u - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff());
    Ket ub = u * b;
    std::complex<double> coeff = v.dot(ub) / std::complex<double>(v.squaredNorm(), 0.0);
    max_alignment = std::max(max_alignment, (ub - coeff * v).norm() / b.norm());
  }
  out.require(max_unitarity < c.tol, "quantum: rotation unitarity");
  out.require(max_alignment < c.tol, "quantum: rotation lands in the subspace");

  out.report = Json{{"experiment", "quantum"},
                    {"regroup_pairs", c.regroup_pairs},
                    {"zero_cases", zero_cases},
                    {"max_regroup_residual", max_residual},
                    {"max_unitarity_residual", max_unitarity},
                    {"max_alignment_residual", max_alignment}};
  emit_report(ctx, "quantum", out.report);
  log_line(ctx, "quantum: max regroup residual " + std::to_string(max_residual));
  return out;
}

PendulumHealth pendulum_health(const std::vector<double>& steps, double t_end,
                               const Eigen::Vector2d& z0) {
  HamiltonianSpec pend = HamiltonianSpec::pendulum();
  const PhaseSpace& cyl = pend.space();
  PendulumHealth health;
  health.steps = steps;
  const double h0 = pend.value(z0, 0.0);
  for (double h : steps) {
    Trajectory traj = flow(pend, make_point(cyl, z0), 0.0, t_end, h);
    double drift = 0.0;
    for (const auto& z : traj.points) drift = std::max(drift, std::abs(pend.value(z, 0.0) - h0));
    health.drifts.push_back(drift);
  }
  for (std::size_t i = 0; i + 1 < health.drifts.size(); ++i)
    health.ratios.push_back(health.drifts[i] / health.drifts[i + 1]);

  const double h_fine = steps.back();
  PhasePoint fwd = flow_endpoint(pend, make_point(cyl, z0), 0.0, t_end, h_fine);
  PhasePoint back = flow_endpoint(pend, fwd, t_end, 0.0, h_fine);
  health.reversal_error = chart_distance(cyl, back.coords, Eigen::VectorXd(z0));
  return health;
}

RunOutcome run_selftest(const LabConfig& cfg, const RunContext& ctx) {
  const SelftestConfig& c = cfg.selftest;
  RunOutcome out;
  std::mt19937_64 rng(pick_seed(ctx, c.seed));
  std::uniform_real_distribution<double> u(-20.0, 20.0);

  // Chart identities.
  double worst_wrap = 0.0, worst_arc = 0.0;
  for (int k = 0; k < c.sample_count; ++k) {
    const double a = u(rng), b = u(rng);
    const double wa = wrap_angle(a);
    worst_wrap = std::max(worst_wrap, std::abs(wrap_angle(wa) - wa));
    const double d = arc_delta(wrap_angle(a), wrap_angle(b));
    const double r = arc_delta(wrap_angle(b), wrap_angle(a));
    const double closure = std::abs(d + r);
    worst_arc = std::max(worst_arc, std::min(closure, std::abs(closure - kTwoPi)));
  }
  out.require(worst_wrap == 0.0, "selftest: wrap_angle idempotent");
  out.require(worst_arc < 1e-12, "selftest: arc_delta antisymmetric (mod 2 pi)");

  // Pairing antisymmetry on a random product space.
  {
    PhaseSpace space = PhaseSpace::product(
        {PhaseSpace::euclidean(4, +1), PhaseSpace::cylinder(-1), PhaseSpace::torus2(+1)});
    double worst = 0.0;
    for (int k = 0; k < c.sample_count; ++k) {
      TangentVector a{normal_vector(rng, space.dim(), 1.0)};
      TangentVector b{normal_vector(rng, space.dim(), 1.0)};
      worst = std::max(worst, std::abs(symplectic_pairing(space, a, b) +
                                       symplectic_pairing(space, b, a)));
    }
    out.require(worst < 1e-12, "selftest: pairing antisymmetry");
  }

  // Dynamics health.
  PendulumHealth health = pendulum_health(c.pendulum_steps, c.pendulum_time);
  bool ratios_ok = !health.ratios.empty();
  for (double r : health.ratios) ratios_ok = ratios_ok && r > c.ratio_low && r < c.ratio_high;
  out.require(ratios_ok, "selftest: pendulum energy drift scales at order 2");
  out.require(health.reversal_error < c.reversal_tol, "selftest: time reversal round trip");

  // Exact linear cloning, small sample.
  {
    LinearCloneMap map = complete_lorentz_frame(+1, 2);
    CloneSetup setup{PhaseSpace::euclidean(2, +1), PhaseSpace::euclidean(2, -1),
                     PhasePoint{Eigen::VectorXd::Zero(2)},
                     PhasePoint{Eigen::VectorXd::Zero(2)}, map};
    auto sample = sample_euclidean_box(rng, 2, std::min(c.sample_count, 100), 10.0);
    CloneDefect defect = clone_defect(setup, sample, 1e-3);
    out.require(defect.value <= 1e-12, "selftest: linear clone defect");
    out.require(eta_residual(map.mc) < 1e-12, "selftest: frame eta residual");

    Isotopy iso = generator_isotopy(map);
    TripleSpace ts(setup.sys, setup.machine);
    const Eigen::MatrixXd induced = map.induced();
    double err = 0.0;
    for (const auto& w : sample_euclidean_box(rng, 6, 20, 1.0)) {
      PhasePoint got = transport(iso, make_point(ts.product, w), 1e-3);
      err = std::max(err, (got.coords - induced * w).cwiseAbs().maxCoeff());
    }
    out.require(err < 1e-4, "selftest: generator flow approximates the closed form");
  }

  // Winding extraction.
  {
    LoopShape shape;
    shape.slots.resize(2);
    shape.slots[0].winding = -2;
    shape.slots[0].harmonics = {{0.0, 0.3}};
    Loop loop = make_loop(PhaseSpace::cylinder(+1), shape, 64);
    Eigen::VectorXi w = winding_vector(loop);
    out.require(w[0] == -2, "selftest: winding extraction on a wavy loop");
  }

  // Identity candidate objective on the unit circle is exactly 1.
  {
    PhaseSpace sys = PhaseSpace::euclidean(2, +1);
    PhaseSpace machine = PhaseSpace::euclidean(2, -1);
    TripleSpace ts(sys, machine);
    CloneSetup setup{sys, machine, PhasePoint{Eigen::VectorXd::Zero(2)},
                     PhasePoint{Eigen::VectorXd::Zero(2)}, Isotopy(ts.product)};
    CandidateFamily family = CandidateFamily::quadratic(ts.product, 2);
    std::vector<Eigen::VectorXd> circle;
    for (int k = 0; k < 16; ++k) {
      Eigen::VectorXd x(2);
      x << std::cos(kTwoPi * k / 16.0), std::sin(kTwoPi * k / 16.0);
      circle.push_back(std::move(x));
    }
    const double identity_obj = cloning_objective(
        family, Eigen::VectorXd::Zero(family.parameter_count()), setup, circle, 0.01);
    out.require(std::abs(identity_obj - 1.0) < 1e-12,
                "selftest: identity candidate objective on the unit circle");

    OptimizeOptions opt;
    opt.budget = c.quick_budget;
    opt.seed = pick_seed(ctx, c.seed);
    ApproxReport quick = optimize(family, setup, circle, opt);
    out.require(quick.best_objective < identity_obj,
                "selftest: short search improves on the identity");
  }

  // Identity candidate floor on the cylinder is the half turn.
  {
    PhaseSpace sys = PhaseSpace::cylinder(+1);
    PhaseSpace machine = PhaseSpace::cylinder(-1);
    TripleSpace ts(sys, machine);
    CloneSetup setup{sys, machine, make_point(sys, Eigen::Vector2d(kPi, 0.0)),
                     make_point(machine, Eigen::Vector2d::Zero()), Isotopy(ts.product)};
    CandidateFamily family = CandidateFamily::trig_poly(ts.product, 2, 1, 2, 2);
    Loop probe = make_loop(sys, winding_one_shape(0.0), c.quick_floor_samples);
    const double floor = angular_error_floor(
        family, Eigen::VectorXd::Zero(family.parameter_count()), setup, probe, 2e-3);
    out.require(floor >= kPi - 0.05, "selftest: identity candidate angular floor");
  }

  // Coin transport.
  {
    PhaseSpace coin_space =
        PhaseSpace::product({PhaseSpace::cylinder(+1), PhaseSpace::cylinder(+1)});
    Eigen::VectorXd src(4), dst(4);
    src << kPi, 0.0, 0.0, 0.0;
    dst << kPi, 0.0, kPi, 0.0;
    PointTransportPlan plan = plan_transport(coin_space, {src}, {dst});
    auto [iso, record] = execute_plan(plan, cfg.points.step, cfg.points.endpoint_tol,
                                      cfg.points.interference_tol);
    out.require(record.worst_endpoint < cfg.points.endpoint_tol,
                "selftest: coin endpoint accuracy");
  }

  // Quantum regrouping, small run.
  {
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < std::min(c.sample_count, 200); ++k) {
      const int d = 1 + int(rng() % 8);
      Ket b(d);
      for (int i = 0; i < d; ++i) b[i] = std::complex<double>(gauss(rng), gauss(rng));
      if (b.norm() == 0.0) b[0] = 1.0;
      std::complex<double> cc(gauss(rng), gauss(rng));
      if (std::abs(cc) < 0.1) cc += 1.0;
      worst = std::max(worst, clone_1d_subspace(b, cc * b).residual);
    }
    out.require(worst < 1e-12, "selftest: tensor regrouping identity");
  }

  out.report = Json{{"experiment", "selftest"},
                    {"pendulum_drifts", health.drifts},
                    {"pendulum_ratios", health.ratios},
                    {"reversal_error", health.reversal_error},
                    {"violations", out.violations}};
  emit_report(ctx, "selftest", out.report);
  log_line(ctx, out.ok ? "selftest: all properties hold" : "selftest: violations found");
  return out;
}

}  // namespace clonelab
