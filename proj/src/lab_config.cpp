#include "clonelab/lab_config.hpp"

#include <set>

namespace clonelab {

namespace {

// A config section: every key must come from the allowed list.
class Section {
 public:
  Section(const Json& j, std::string where, std::initializer_list<const char*> allowed)
      : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    const std::set<std::string> known(allowed.begin(), allowed.end());
    for (const auto& item : j_.items())
      if (!known.count(item.key()))
        throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
  }

  template <typename T>
  void get(const char* key, T& slot) {
    if (j_.contains(key)) {
      try {
        slot = j_.at(key).get<T>();
      } catch (const std::exception&) {
        throw ConfigError(where_ + "." + key + ": wrong value type");
      }
    }
  }

  bool sub(const char* key, Json& out) {
    if (!j_.contains(key)) return false;
    out = j_.at(key);
    return true;
  }

 private:
  const Json& j_;
  std::string where_;
};

void parse_suite(const Json& j, const std::string& where, ApproxSuiteConfig& suite) {
  Section s(j, where,
            {"budget", "seeds", "sample_count", "sample_box", "target", "step",
             "population", "sigma0", "stagnation"});
  s.get("budget", suite.budget);
  s.get("seeds", suite.seeds);
  s.get("sample_count", suite.sample_count);
  s.get("sample_box", suite.sample_box);
  s.get("target", suite.target);
  s.get("step", suite.step);
  s.get("population", suite.population);
  s.get("sigma0", suite.sigma0);
  s.get("stagnation", suite.stagnation);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw ConfigError(std::string("config: ") + name + " must be > 0");
}

void require_positive(long v, const char* name) {
  if (v <= 0) throw ConfigError(std::string("config: ") + name + " must be > 0");
}

void require_positive(int v, const char* name) {
  if (v <= 0) throw ConfigError(std::string("config: ") + name + " must be > 0");
}

}  // namespace

LabConfig LabConfig::from_json(const Json& j) {
  LabConfig cfg;
  Section root(j, "config",
               {"experiment_id", "clone_r2n", "no_go", "approx", "points", "quantum",
                "selftest"});
  root.get("experiment_id", cfg.experiment_id);

  Json sub;
  if (root.sub("clone_r2n", sub)) {
    Section s(sub, "clone_r2n",
              {"ns", "g", "seed", "defect_samples", "defect_box", "defect_tol", "eta_tol",
               "flow_samples", "flow_box", "flow_step", "flow_tol", "jacobian_samples",
               "jacobian_tol"});
    s.get("ns", cfg.clone_r2n.ns);
    s.get("g", cfg.clone_r2n.g);
    s.get("seed", cfg.clone_r2n.seed);
    s.get("defect_samples", cfg.clone_r2n.defect_samples);
    s.get("defect_box", cfg.clone_r2n.defect_box);
    s.get("defect_tol", cfg.clone_r2n.defect_tol);
    s.get("eta_tol", cfg.clone_r2n.eta_tol);
    s.get("flow_samples", cfg.clone_r2n.flow_samples);
    s.get("flow_box", cfg.clone_r2n.flow_box);
    s.get("flow_step", cfg.clone_r2n.flow_step);
    s.get("flow_tol", cfg.clone_r2n.flow_tol);
    s.get("jacobian_samples", cfg.clone_r2n.jacobian_samples);
    s.get("jacobian_tol", cfg.clone_r2n.jacobian_tol);
  }
  if (root.sub("no_go", sub)) {
    Section s(sub, "no_go",
              {"witness_count", "seed", "stage_count", "max_harmonic", "max_power",
               "max_total_degree", "coeff_scale", "probe_samples", "probe_momentum",
               "blank", "machine_start", "step", "max_doublings"});
    s.get("witness_count", cfg.no_go.witness_count);
    s.get("seed", cfg.no_go.seed);
    s.get("stage_count", cfg.no_go.stage_count);
    s.get("max_harmonic", cfg.no_go.max_harmonic);
    s.get("max_power", cfg.no_go.max_power);
    s.get("max_total_degree", cfg.no_go.max_total_degree);
    s.get("coeff_scale", cfg.no_go.coeff_scale);
    s.get("probe_samples", cfg.no_go.probe_samples);
    s.get("probe_momentum", cfg.no_go.probe_momentum);
    s.get("blank", cfg.no_go.blank);
    s.get("machine_start", cfg.no_go.machine_start);
    s.get("step", cfg.no_go.step);
    s.get("max_doublings", cfg.no_go.max_doublings);
  }
  if (root.sub("approx", sub)) {
    Section s(sub, "approx",
              {"r2", "cylinder", "cylinder_blank", "cylinder_max_harmonic",
               "cylinder_max_power", "cylinder_max_total_degree", "stages",
               "floor_samples", "floor_step", "floor_threshold"});
    Json suite;
    if (s.sub("r2", suite)) parse_suite(suite, "approx.r2", cfg.approx.r2);
    if (s.sub("cylinder", suite)) parse_suite(suite, "approx.cylinder", cfg.approx.cylinder);
    s.get("cylinder_blank", cfg.approx.cylinder_blank);
    s.get("cylinder_max_harmonic", cfg.approx.cylinder_max_harmonic);
    s.get("cylinder_max_power", cfg.approx.cylinder_max_power);
    s.get("cylinder_max_total_degree", cfg.approx.cylinder_max_total_degree);
    s.get("stages", cfg.approx.stages);
    s.get("floor_samples", cfg.approx.floor_samples);
    s.get("floor_step", cfg.approx.floor_step);
    s.get("floor_threshold", cfg.approx.floor_threshold);
  }
  if (root.sub("points", sub)) {
    Section s(sub, "points",
              {"seed", "random_count", "min_spacing", "momentum_box", "step",
               "endpoint_tol", "interference_tol", "jacobian_probes", "jacobian_tol"});
    s.get("seed", cfg.points.seed);
    s.get("random_count", cfg.points.random_count);
    s.get("min_spacing", cfg.points.min_spacing);
    s.get("momentum_box", cfg.points.momentum_box);
    s.get("step", cfg.points.step);
    s.get("endpoint_tol", cfg.points.endpoint_tol);
    s.get("interference_tol", cfg.points.interference_tol);
    s.get("jacobian_probes", cfg.points.jacobian_probes);
    s.get("jacobian_tol", cfg.points.jacobian_tol);
  }
  if (root.sub("quantum", sub)) {
    Section s(sub, "quantum",
              {"seed", "regroup_pairs", "unitary_pairs", "max_dim", "tol"});
    s.get("seed", cfg.quantum.seed);
    s.get("regroup_pairs", cfg.quantum.regroup_pairs);
    s.get("unitary_pairs", cfg.quantum.unitary_pairs);
    s.get("max_dim", cfg.quantum.max_dim);
    s.get("tol", cfg.quantum.tol);
  }
  if (root.sub("selftest", sub)) {
    Section s(sub, "selftest",
              {"seed", "sample_count", "pendulum_steps", "pendulum_time", "ratio_low",
               "ratio_high", "reversal_tol", "quick_witnesses", "quick_budget",
               "quick_floor_samples"});
    s.get("seed", cfg.selftest.seed);
    s.get("sample_count", cfg.selftest.sample_count);
    s.get("pendulum_steps", cfg.selftest.pendulum_steps);
    s.get("pendulum_time", cfg.selftest.pendulum_time);
    s.get("ratio_low", cfg.selftest.ratio_low);
    s.get("ratio_high", cfg.selftest.ratio_high);
    s.get("reversal_tol", cfg.selftest.reversal_tol);
    s.get("quick_witnesses", cfg.selftest.quick_witnesses);
    s.get("quick_budget", cfg.selftest.quick_budget);
    s.get("quick_floor_samples", cfg.selftest.quick_floor_samples);
  }

  for (int n : cfg.clone_r2n.ns)
    if (n < 1) throw ConfigError("config: clone_r2n.ns entries must be >= 1");
  if (cfg.clone_r2n.g != 1 && cfg.clone_r2n.g != -1)
    throw ConfigError("config: clone_r2n.g must be +1 or -1");
  require_positive(cfg.clone_r2n.defect_samples, "clone_r2n.defect_samples");
  require_positive(cfg.clone_r2n.flow_step, "clone_r2n.flow_step");
  require_positive(cfg.no_go.witness_count, "no_go.witness_count");
  require_positive(cfg.no_go.step, "no_go.step");
  if (cfg.no_go.blank.size() != 2 || cfg.no_go.machine_start.size() != 2)
    throw ConfigError("config: no_go blank/machine_start must have 2 slots");
  require_positive(cfg.approx.r2.budget, "approx.r2.budget");
  require_positive(cfg.approx.cylinder.budget, "approx.cylinder.budget");
  require_positive(cfg.approx.r2.step, "approx.r2.step");
  require_positive(cfg.approx.cylinder.step, "approx.cylinder.step");
  if (cfg.approx.r2.seeds.empty() || cfg.approx.cylinder.seeds.empty())
    throw ConfigError("config: approx seeds must be nonempty");
  if (cfg.approx.cylinder_blank.size() != 2)
    throw ConfigError("config: approx.cylinder_blank must have 2 slots");
  require_positive(cfg.approx.floor_samples, "approx.floor_samples");
  require_positive(cfg.points.step, "points.step");
  if (cfg.points.random_count < 1 || cfg.points.random_count > 16)
    throw ConfigError("config: points.random_count must be in [1, 16]");
  require_positive(cfg.points.min_spacing, "points.min_spacing");
  require_positive(cfg.quantum.regroup_pairs, "quantum.regroup_pairs");
  if (cfg.quantum.max_dim < 1) throw ConfigError("config: quantum.max_dim must be >= 1");
  require_positive(cfg.selftest.sample_count, "selftest.sample_count");
  if (cfg.selftest.pendulum_steps.empty())
    throw ConfigError("config: selftest.pendulum_steps must be nonempty");
  for (double h : cfg.selftest.pendulum_steps) require_positive(h, "selftest.pendulum_steps");

  return cfg;
}

LabConfig LabConfig::load(const std::string& path) {
  return from_json(read_json_file(path));
}

Json LabConfig::to_json() const {
  auto suite = [](const ApproxSuiteConfig& s) {
    return Json{{"budget", s.budget},
                {"seeds", s.seeds},
                {"sample_count", s.sample_count},
                {"sample_box", s.sample_box},
                {"target", s.target},
                {"step", s.step},
                {"population", s.population},
                {"sigma0", s.sigma0},
                {"stagnation", s.stagnation}};
  };
  return Json{
      {"experiment_id", experiment_id},
      {"clone_r2n",
       Json{{"ns", clone_r2n.ns},
            {"g", clone_r2n.g},
            {"seed", clone_r2n.seed},
            {"defect_samples", clone_r2n.defect_samples},
            {"defect_box", clone_r2n.defect_box},
            {"defect_tol", clone_r2n.defect_tol},
            {"eta_tol", clone_r2n.eta_tol},
            {"flow_samples", clone_r2n.flow_samples},
            {"flow_box", clone_r2n.flow_box},
            {"flow_step", clone_r2n.flow_step},
            {"flow_tol", clone_r2n.flow_tol},
            {"jacobian_samples", clone_r2n.jacobian_samples},
            {"jacobian_tol", clone_r2n.jacobian_tol}}},
      {"no_go",
       Json{{"witness_count", no_go.witness_count},
            {"seed", no_go.seed},
            {"stage_count", no_go.stage_count},
            {"max_harmonic", no_go.max_harmonic},
            {"max_power", no_go.max_power},
            {"max_total_degree", no_go.max_total_degree},
            {"coeff_scale", no_go.coeff_scale},
            {"probe_samples", no_go.probe_samples},
            {"probe_momentum", no_go.probe_momentum},
            {"blank", no_go.blank},
            {"machine_start", no_go.machine_start},
            {"step", no_go.step},
            {"max_doublings", no_go.max_doublings}}},
      {"approx",
       Json{{"r2", suite(approx.r2)},
            {"cylinder", suite(approx.cylinder)},
            {"cylinder_blank", approx.cylinder_blank},
            {"cylinder_max_harmonic", approx.cylinder_max_harmonic},
            {"cylinder_max_power", approx.cylinder_max_power},
            {"cylinder_max_total_degree", approx.cylinder_max_total_degree},
            {"stages", approx.stages},
            {"floor_samples", approx.floor_samples},
            {"floor_step", approx.floor_step},
            {"floor_threshold", approx.floor_threshold}}},
      {"points",
       Json{{"seed", points.seed},
            {"random_count", points.random_count},
            {"min_spacing", points.min_spacing},
            {"momentum_box", points.momentum_box},
            {"step", points.step},
            {"endpoint_tol", points.endpoint_tol},
            {"interference_tol", points.interference_tol},
            {"jacobian_probes", points.jacobian_probes},
            {"jacobian_tol", points.jacobian_tol}}},
      {"quantum",
       Json{{"seed", quantum.seed},
            {"regroup_pairs", quantum.regroup_pairs},
            {"unitary_pairs", quantum.unitary_pairs},
            {"max_dim", quantum.max_dim},
            {"tol", quantum.tol}}},
      {"selftest",
       Json{{"seed", selftest.seed},
            {"sample_count", selftest.sample_count},
            {"pendulum_steps", selftest.pendulum_steps},
            {"pendulum_time", selftest.pendulum_time},
            {"ratio_low", selftest.ratio_low},
            {"ratio_high", selftest.ratio_high},
            {"reversal_tol", selftest.reversal_tol},
            {"quick_witnesses", selftest.quick_witnesses},
            {"quick_budget", selftest.quick_budget},
            {"quick_floor_samples", selftest.quick_floor_samples}}}};
}

}  // namespace clonelab
