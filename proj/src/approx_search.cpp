#include "clonelab/approx_search.hpp"

#include <cmath>
#include <limits>

namespace clonelab {

namespace {

// Upper-triangle (row-major) symmetric unpacking.
Eigen::MatrixXd unpack_symmetric(const Eigen::VectorXd& v, int n) {
  Eigen::MatrixXd q(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      q(i, j) = v[k];
      q(j, i) = v[k];
      ++k;
    }
  return q;
}

// All products of per-slot atoms with total degree in [1, cap].
void enumerate_terms(const PhaseSpace& space, int max_harmonic, int max_power,
                     int degree_left, int slot, TrigPolyTerm& current,
                     std::vector<TrigPolyTerm>& out) {
  if (slot == space.dim()) {
    bool nontrivial = false;
    for (const SlotBasis& b : current.basis)
      if (b.kind != SlotBasis::Kind::One) nontrivial = true;
    if (nontrivial) out.push_back(current);
    return;
  }
  current.basis[slot] = SlotBasis{};
  enumerate_terms(space, max_harmonic, max_power, degree_left, slot + 1, current, out);
  if (space.angular(slot)) {
    for (int k = 1; k <= max_harmonic && k <= degree_left; ++k) {
      current.basis[slot] = SlotBasis{SlotBasis::Kind::Cos, k};
      enumerate_terms(space, max_harmonic, max_power, degree_left - k, slot + 1, current,
                      out);
      current.basis[slot] = SlotBasis{SlotBasis::Kind::Sin, k};
      enumerate_terms(space, max_harmonic, max_power, degree_left - k, slot + 1, current,
                      out);
    }
  } else {
    for (int m = 1; m <= max_power && m <= degree_left; ++m) {
      current.basis[slot] = SlotBasis{SlotBasis::Kind::Pow, m};
      enumerate_terms(space, max_harmonic, max_power, degree_left - m, slot + 1, current,
                      out);
    }
  }
  current.basis[slot] = SlotBasis{};
}

}  // namespace

CandidateFamily CandidateFamily::quadratic(PhaseSpace space, int stages,
                                           double stage_duration) {
  if (space.has_angular())
    throw DomainError("CandidateFamily: quadratic kind requires a space without angular slots");
  if (stages < 1) throw DomainError("CandidateFamily: at least one stage");
  if (!(stage_duration > 0.0)) throw DomainError("CandidateFamily: positive stage duration");
  CandidateFamily fam;
  fam.space_ = std::move(space);
  fam.kind_ = Kind::Quadratic;
  fam.stages_ = stages;
  fam.stage_duration_ = stage_duration;
  const int n = fam.space_.dim();
  fam.per_stage_ = n * (n + 1) / 2;
  fam.params_ = Eigen::VectorXd::Zero(fam.parameter_count());
  return fam;
}

CandidateFamily CandidateFamily::trig_poly(PhaseSpace space, int stages, int max_harmonic,
                                           int max_power, int max_total_degree,
                                           double stage_duration) {
  if (stages < 1) throw DomainError("CandidateFamily: at least one stage");
  if (max_harmonic < 0 || max_power < 0 || max_total_degree < 1)
    throw DomainError("CandidateFamily: invalid degree caps");
  if (!(stage_duration > 0.0)) throw DomainError("CandidateFamily: positive stage duration");
  CandidateFamily fam;
  fam.space_ = std::move(space);
  fam.kind_ = Kind::TrigPoly;
  fam.stages_ = stages;
  fam.stage_duration_ = stage_duration;
  TrigPolyTerm current;
  current.coeff = 1.0;
  current.basis.assign(fam.space_.dim(), SlotBasis{});
  enumerate_terms(fam.space_, max_harmonic, max_power, max_total_degree, 0, current,
                  fam.basis_);
  if (fam.basis_.empty()) throw DomainError("CandidateFamily: empty basis");
  fam.per_stage_ = int(fam.basis_.size());
  fam.params_ = Eigen::VectorXd::Zero(fam.parameter_count());
  return fam;
}

void CandidateFamily::set_params(Eigen::VectorXd p) {
  if (p.size() != parameter_count())
    throw DomainError("CandidateFamily: parameter count mismatch");
  params_ = std::move(p);
}

Isotopy CandidateFamily::realize(const Eigen::VectorXd& p) const {
  if (p.size() != parameter_count())
    throw DomainError("CandidateFamily: parameter count mismatch");
  std::vector<IsotopyStage> stages;
  stages.reserve(stages_);
  for (int s = 0; s < stages_; ++s) {
    Eigen::VectorXd slice = p.segment(s * per_stage_, per_stage_);
    if (kind_ == Kind::Quadratic) {
      stages.push_back({HamiltonianSpec::quadratic_constant(
                            space_, unpack_symmetric(slice, space_.dim())),
                        stage_duration_});
    } else {
      TrigPoly poly;
      poly.terms = basis_;
      for (int k = 0; k < per_stage_; ++k) poly.terms[k].coeff = slice[k];
      stages.push_back({HamiltonianSpec::trig_poly(space_, std::move(poly)),
                        stage_duration_});
    }
  }
  return Isotopy(space_, std::move(stages));
}

double cloning_objective(const CandidateFamily& family, const Eigen::VectorXd& params,
                         const CloneSetup& setup, std::span<const Eigen::VectorXd> sample,
                         double step) {
  if (sample.empty()) throw DomainError("cloning_objective: empty sample");
  TripleSpace triple(setup.sys, setup.machine);
  if (family.space() != triple.product)
    throw DomainError("cloning_objective: family space is not the setup product space");
  try {
    Isotopy iso = family.realize(params);
    double acc = 0.0;
    for (const Eigen::VectorXd& x : sample) {
      Eigen::VectorXd w = triple.embed(x, setup.blank.coords, setup.machine_start.coords);
      std::array<Eigen::VectorXd, 3> out =
          triple.split(transport(iso, PhasePoint{wrap_coords(triple.product, w)}, step).coords);
      Eigen::VectorXd xw = wrap_coords(setup.sys, x);
      double d1 = chart_distance(setup.sys, out[0], xw);
      double d2 = chart_distance(setup.sys, out[1], xw);
      acc += d1 * d1 + d2 * d2;
    }
    return acc / double(sample.size());
  } catch (const IntegrationError&) {
    return std::numeric_limits<double>::infinity();
  }
}

double cloning_objective(const CandidateFamily& family, const CloneSetup& setup,
                         std::span<const Eigen::VectorXd> sample, double step) {
  return cloning_objective(family, family.params(), setup, sample, step);
}

namespace {

void fill_deviations(const CandidateFamily& family, const Eigen::VectorXd& params,
                     const CloneSetup& setup, std::span<const Eigen::VectorXd> sample,
                     double step, ApproxReport& report) {
  TripleSpace triple(setup.sys, setup.machine);
  Isotopy iso = family.realize(params);
  double d1max = 0.0, d2max = 0.0;
  for (const Eigen::VectorXd& x : sample) {
    Eigen::VectorXd w = triple.embed(x, setup.blank.coords, setup.machine_start.coords);
    std::array<Eigen::VectorXd, 3> out =
        triple.split(transport(iso, PhasePoint{wrap_coords(triple.product, w)}, step).coords);
    Eigen::VectorXd xw = wrap_coords(setup.sys, x);
    d1max = std::max(d1max, chart_distance(setup.sys, out[0], xw));
    d2max = std::max(d2max, chart_distance(setup.sys, out[1], xw));
  }
  report.deviation_first = d1max;
  report.deviation_second = d2max;
}

}  // namespace

ApproxReport optimize(const CandidateFamily& family, const CloneSetup& setup,
                      std::span<const Eigen::VectorXd> sample, const OptimizeOptions& opt) {
  ApproxReport report;
  report.seed = opt.seed;
  report.sample_size = int(sample.size());
  report.step = opt.step;

  const int n = family.parameter_count();
  auto objective = [&](const Eigen::VectorXd& p) {
    return cloning_objective(family, p, setup, sample, opt.step);
  };

  if (opt.budget < opt.population + 1) {
    // Degenerate budget: report the identity candidate.
    report.best_params = Eigen::VectorXd::Zero(n);
    report.best_objective = objective(report.best_params);
    report.evaluations = 1;
    fill_deviations(family, report.best_params, setup, sample, opt.step, report);
    return report;
  }

  CmaOptions copt;
  copt.population = opt.population;
  copt.sigma0 = opt.sigma0;
  copt.stagnation = opt.stagnation;
  copt.target = opt.target;
  copt.budget = opt.budget;
  copt.seed = opt.seed;
  CmaResult res = cma_minimize(objective, n, copt);

  report.best_params = res.best;
  report.best_objective = res.best_value;
  report.objective_trace = std::move(res.trace);
  report.evaluations = res.evaluations;
  report.restarts = res.restarts;
  fill_deviations(family, report.best_params, setup, sample, opt.step, report);
  return report;
}

double angular_error_floor(const CandidateFamily& family, const Eigen::VectorXd& params,
                           const CloneSetup& setup, const Loop& probe, double step) {
  if (!setup.sys.has_angular())
    throw DomainError("angular_error_floor: system space has no angular slots");
  if (!probe.adequate)
    throw ResolutionError("angular_error_floor: probe loop is not adequate");
  Eigen::VectorXi w = winding_vector(probe);
  if (w.cwiseAbs().maxCoeff() == 0)
    throw DomainError("angular_error_floor: probe loop is contractible (zero winding)");

  TripleSpace triple(setup.sys, setup.machine);
  if (family.space() != triple.product)
    throw DomainError("angular_error_floor: family space is not the setup product space");
  Isotopy iso = family.realize(params);

  double floor = 0.0;
  for (const Eigen::VectorXd& x : probe.samples) {
    Eigen::VectorXd emb = triple.embed(x, setup.blank.coords, setup.machine_start.coords);
    std::array<Eigen::VectorXd, 3> out =
        triple.split(transport(iso, PhasePoint{wrap_coords(triple.product, emb)}, step).coords);
    double worst = 0.0;
    for (int s : setup.sys.angular_slots())
      worst = std::max(worst, std::abs(arc_delta(out[1][s], x[s])));
    floor = std::max(floor, worst);
  }
  return floor;
}

double angular_error_floor(const CandidateFamily& family, const CloneSetup& setup,
                           const Loop& probe, double step) {
  return angular_error_floor(family, family.params(), setup, probe, step);
}

}  // namespace clonelab
