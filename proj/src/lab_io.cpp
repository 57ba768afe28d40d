#include "clonelab/lab_io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace clonelab {

namespace {

void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

std::ostream& csv_stream(std::ostream& os) {
  os << std::setprecision(17);
  return os;
}

}  // namespace

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("vector: expected an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[Eigen::Index(i)] = j[i].get<double>();
  return v;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix: expected a nested array");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw ConfigError("matrix: ragged rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(Eigen::Index(r), Eigen::Index(c)) = j[r][c].get<double>();
  }
  return m;
}

Json space_to_json(const PhaseSpace& space) {
  Json factors = Json::array();
  for (const Factor& f : space.factors()) {
    const char* kind = f.kind == FactorKind::Euclidean ? "euclidean"
                       : f.kind == FactorKind::Cylinder ? "cylinder"
                                                        : "torus2";
    factors.push_back(Json{{"kind", kind}, {"dim", f.dim}, {"form_sign", f.form_sign}});
  }
  return Json{{"factors", std::move(factors)}};
}

PhaseSpace space_from_json(const Json& j) {
  check_keys(j, {"factors"}, "space");
  if (!j.contains("factors")) throw ConfigError("space: missing 'factors'");
  std::vector<Factor> factors;
  for (const Json& fj : j.at("factors")) {
    check_keys(fj, {"kind", "dim", "form_sign"}, "space.factors[]");
    Factor f;
    const std::string kind = fj.at("kind").get<std::string>();
    if (kind == "euclidean")
      f.kind = FactorKind::Euclidean;
    else if (kind == "cylinder")
      f.kind = FactorKind::Cylinder;
    else if (kind == "torus2")
      f.kind = FactorKind::Torus2;
    else
      throw ConfigError("space: unknown factor kind '" + kind + "'");
    f.dim = fj.value("dim", 2);
    f.form_sign = fj.value("form_sign", +1);
    factors.push_back(f);
  }
  return PhaseSpace(std::move(factors));
}

namespace {

Json form_to_json(const HamiltonianSpec::Form& form) {
  if (const auto* q = std::get_if<QuadraticTable>(&form)) {
    Json coeffs = Json::array();
    for (const auto& m : q->coeffs) coeffs.push_back(matrix_to_json(m));
    return Json{{"kind", "quadratic"},
                {"times", q->times},
                {"coeffs", std::move(coeffs)},
                {"interpolate", q->interpolate}};
  }
  if (const auto* p = std::get_if<TrigPoly>(&form)) {
    Json terms = Json::array();
    for (const TrigPolyTerm& term : p->terms) {
      Json basis = Json::array();
      for (const SlotBasis& b : term.basis) {
        const char* kind = b.kind == SlotBasis::Kind::One   ? "one"
                           : b.kind == SlotBasis::Kind::Cos ? "cos"
                           : b.kind == SlotBasis::Kind::Sin ? "sin"
                                                            : "pow";
        basis.push_back(Json{{"kind", kind}, {"degree", b.degree}});
      }
      terms.push_back(Json{{"coeff", term.coeff}, {"basis", std::move(basis)}});
    }
    return Json{{"kind", "trig_poly"},
                {"terms", std::move(terms)},
                {"max_harmonic", p->max_harmonic},
                {"max_power", p->max_power}};
  }
  if (const auto* b = std::get_if<BumpPath>(&form)) {
    return Json{{"kind", "bump"},
                {"anchor", vector_to_json(b->anchor)},
                {"disp", vector_to_json(b->disp)},
                {"rho", b->rho}};
  }
  return Json{{"kind", "pendulum"}};
}

HamiltonianSpec::Form form_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "quadratic") {
    check_keys(j, {"kind", "times", "coeffs", "interpolate"}, "hamiltonian.quadratic");
    QuadraticTable table;
    table.times = j.at("times").get<std::vector<double>>();
    for (const Json& mj : j.at("coeffs")) table.coeffs.push_back(matrix_from_json(mj));
    table.interpolate = j.value("interpolate", false);
    return table;
  }
  if (kind == "trig_poly") {
    check_keys(j, {"kind", "terms", "max_harmonic", "max_power"}, "hamiltonian.trig_poly");
    TrigPoly poly;
    poly.max_harmonic = j.value("max_harmonic", 0);
    poly.max_power = j.value("max_power", 0);
    for (const Json& tj : j.at("terms")) {
      check_keys(tj, {"coeff", "basis"}, "hamiltonian.trig_poly.terms[]");
      TrigPolyTerm term;
      term.coeff = tj.at("coeff").get<double>();
      for (const Json& bj : tj.at("basis")) {
        check_keys(bj, {"kind", "degree"}, "hamiltonian.trig_poly.basis[]");
        SlotBasis basis;
        const std::string bk = bj.at("kind").get<std::string>();
        if (bk == "one")
          basis.kind = SlotBasis::Kind::One;
        else if (bk == "cos")
          basis.kind = SlotBasis::Kind::Cos;
        else if (bk == "sin")
          basis.kind = SlotBasis::Kind::Sin;
        else if (bk == "pow")
          basis.kind = SlotBasis::Kind::Pow;
        else
          throw ConfigError("hamiltonian: unknown basis kind '" + bk + "'");
        basis.degree = bj.value("degree", 0);
        term.basis.push_back(basis);
      }
      poly.terms.push_back(std::move(term));
    }
    return poly;
  }
  if (kind == "bump") {
    check_keys(j, {"kind", "anchor", "disp", "rho"}, "hamiltonian.bump");
    BumpPath path;
    path.anchor = vector_from_json(j.at("anchor"));
    path.disp = vector_from_json(j.at("disp"));
    path.rho = j.at("rho").get<double>();
    return path;
  }
  if (kind == "pendulum") return Pendulum{};
  throw ConfigError("hamiltonian: unknown kind '" + kind + "'");
}

}  // namespace

Json hamiltonian_to_json(const HamiltonianSpec& h) {
  return Json{{"space", space_to_json(h.space())}, {"form", form_to_json(h.form())}};
}

HamiltonianSpec hamiltonian_from_json(const Json& j) {
  check_keys(j, {"space", "form"}, "hamiltonian");
  return HamiltonianSpec(space_from_json(j.at("space")), form_from_json(j.at("form")));
}

Json isotopy_to_json(const Isotopy& iso) {
  Json stages = Json::array();
  for (const IsotopyStage& stage : iso.stages())
    stages.push_back(Json{{"form", form_to_json(stage.hamiltonian.form())},
                          {"duration", stage.duration}});
  return Json{{"space", space_to_json(iso.space())}, {"stages", std::move(stages)}};
}

Isotopy isotopy_from_json(const Json& j) {
  check_keys(j, {"space", "stages"}, "isotopy");
  PhaseSpace space = space_from_json(j.at("space"));
  std::vector<IsotopyStage> stages;
  for (const Json& sj : j.at("stages")) {
    check_keys(sj, {"form", "duration"}, "isotopy.stages[]");
    stages.push_back(IsotopyStage{HamiltonianSpec(space, form_from_json(sj.at("form"))),
                                  sj.at("duration").get<double>()});
  }
  return Isotopy(std::move(space), std::move(stages));
}

Json clone_map_to_json(const LinearCloneMap& map) {
  return Json{{"mc", matrix_to_json(map.mc)},
              {"block_dim", map.block_dim},
              {"g", map.g()},
              {"eta_residual", eta_residual(map.mc)}};
}

LinearCloneMap clone_map_from_json(const Json& j) {
  check_keys(j, {"mc", "block_dim", "g", "eta_residual"}, "clone_map");
  LinearCloneMap map;
  Eigen::MatrixXd mc = matrix_from_json(j.at("mc"));
  if (mc.rows() != 3 || mc.cols() != 3) throw ConfigError("clone_map: mc must be 3x3");
  map.mc = mc;
  map.block_dim = j.at("block_dim").get<int>();
  return map;
}

namespace {

Json winding_to_json(const Eigen::VectorXi& w) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < w.size(); ++i) out.push_back(w[i]);
  return out;
}

}  // namespace

Json certificate_to_json(const NoGoCertificate& cert) {
  return Json{{"input_windings", winding_to_json(cert.input_windings)},
              {"transported_windings", winding_to_json(cert.transported_windings)},
              {"required_windings", winding_to_json(cert.required_windings)},
              {"compared_slots", cert.compared_slots},
              {"verdict", to_string(cert.verdict)},
              {"witness_id", cert.witness_id},
              {"probe_samples", cert.probe_samples},
              {"transported_samples", cert.transported_samples},
              {"step", cert.step}};
}

Json approx_report_to_json(const ApproxReport& report) {
  return Json{{"best_params", vector_to_json(report.best_params)},
              {"best_objective", report.best_objective},
              {"deviation_first", report.deviation_first},
              {"deviation_second", report.deviation_second},
              {"evaluations", report.evaluations},
              {"restarts", report.restarts},
              {"seed", report.seed},
              {"sample_size", report.sample_size},
              {"step", report.step},
              {"generations", report.objective_trace.size()}};
}

Json plan_to_json(const PointTransportPlan& plan) {
  Json stages = Json::array();
  for (const TransportStage& stage : plan.stages) {
    Json waypoints = Json::array();
    for (const auto& w : stage.waypoints) waypoints.push_back(vector_to_json(w));
    stages.push_back(Json{{"point_index", stage.point_index},
                          {"waypoints", std::move(waypoints)},
                          {"rho", stage.rho},
                          {"parking", stage.parking}});
  }
  Json sources = Json::array();
  for (const auto& s : plan.sources) sources.push_back(vector_to_json(s));
  Json targets = Json::array();
  for (const auto& t : plan.targets) targets.push_back(vector_to_json(t));
  return Json{{"space", space_to_json(plan.space)},
              {"sources", std::move(sources)},
              {"targets", std::move(targets)},
              {"rho", plan.rho},
              {"stages", std::move(stages)}};
}

Json execution_record_to_json(const ExecutionRecord& record) {
  return Json{{"endpoint_errors", record.endpoint_errors},
              {"stage_interference", record.stage_interference},
              {"worst_endpoint", record.worst_endpoint},
              {"worst_endpoint_index", record.worst_endpoint_index},
              {"worst_interference", record.worst_interference},
              {"worst_interference_stage", record.worst_interference_stage},
              {"worst_interference_point", record.worst_interference_point}};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  csv_stream(os) << "t";
  const Eigen::Index dim = traj.points.empty() ? 0 : traj.points.front().size();
  for (Eigen::Index i = 0; i < dim; ++i) os << ",coord_" << i;
  os << "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << traj.times[k];
    for (Eigen::Index i = 0; i < dim; ++i) os << "," << traj.points[k][i];
    os << "\n";
  }
}

void write_loop_csv(std::ostream& os, const PhaseSpace& space, const Loop& loop) {
  csv_stream(os) << "loop_s";
  std::vector<int> order = space.angular_slots();
  for (int slot = 0; slot < space.dim(); ++slot)
    if (!space.angular(slot)) order.push_back(slot);
  for (int slot : order) os << (space.angular(slot) ? ",theta_" : ",coord_") << slot;
  os << "\n";
  const int n = loop.count();
  for (int k = 0; k < n; ++k) {
    os << double(k) / double(n);
    for (int slot : order) os << "," << loop.samples[std::size_t(k)][slot];
    os << "\n";
  }
}

void write_trace_csv(std::ostream& os, const std::vector<double>& best_per_generation) {
  csv_stream(os) << "generation,best_objective\n";
  for (std::size_t g = 0; g < best_per_generation.size(); ++g)
    os << g << "," << best_per_generation[g] << "\n";
}

void write_json_file(const std::string& path, const Json& j) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  os << j.dump(2) << "\n";
}

Json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open: " + path);
  Json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw ConfigError("parse failure in " + path + ": " + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  os << text;
}

}  // namespace clonelab
