#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clonelab/approx_search.hpp"
#include "clonelab/cloning_linear.hpp"
#include "clonelab/dynamics.hpp"
#include "clonelab/loop_topology.hpp"
#include "clonelab/phase_space.hpp"
#include "clonelab/point_cloning.hpp"
#include "clonelab/quantum_analogy.hpp"

namespace py = pybind11;
using namespace clonelab;

PYBIND11_MODULE(clonelab, m) {
  m.doc() = "Cloning maps, winding certificates, and point transport on classical "
            "phase spaces";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_RuntimeError);
  py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);
  py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_RuntimeError);
  py::register_exception<ConsistencyError>(m, "ConsistencyError", PyExc_RuntimeError);
  py::register_exception<PlanningError>(m, "PlanningError", PyExc_RuntimeError);
  py::register_exception<ExecutionError>(m, "ExecutionError", PyExc_RuntimeError);

  m.def("wrap_angle", &wrap_angle, py::arg("theta"));
  m.def("arc_delta", &arc_delta, py::arg("from_angle"), py::arg("to_angle"));

  py::class_<PhaseSpace>(m, "PhaseSpace")
      .def_static("euclidean", &PhaseSpace::euclidean, py::arg("dim"),
                  py::arg("form_sign") = +1)
      .def_static("cylinder", &PhaseSpace::cylinder, py::arg("form_sign") = +1)
      .def_static("torus2", &PhaseSpace::torus2, py::arg("form_sign") = +1)
      .def_static("product", &PhaseSpace::product, py::arg("parts"))
      .def_property_readonly("dim", &PhaseSpace::dim)
      .def("angular", &PhaseSpace::angular, py::arg("slot"))
      .def("pairing_matrix", &PhaseSpace::pairing_matrix)
      .def("__eq__", [](const PhaseSpace& a, const PhaseSpace& b) { return a == b; });

  py::class_<PhasePoint>(m, "PhasePoint")
      .def_property_readonly("coords",
                             [](const PhasePoint& p) { return p.coords; });

  m.def("make_point", &make_point, py::arg("space"), py::arg("raw"));
  m.def("chart_distance",
        py::overload_cast<const PhaseSpace&, const PhasePoint&, const PhasePoint&>(
            &chart_distance),
        py::arg("space"), py::arg("a"), py::arg("b"));
  m.def("chart_distance",
        py::overload_cast<const PhaseSpace&, const Eigen::VectorXd&, const Eigen::VectorXd&>(
            &chart_distance),
        py::arg("space"), py::arg("a"), py::arg("b"));

  py::class_<HamiltonianSpec>(m, "HamiltonianSpec")
      .def_static("pendulum", &HamiltonianSpec::pendulum)
      .def_static("zero", &HamiltonianSpec::zero, py::arg("space"))
      .def("value", &HamiltonianSpec::value, py::arg("z"), py::arg("t"))
      .def("gradient", &HamiltonianSpec::gradient, py::arg("z"), py::arg("t"));
  m.def("bump_translation_hamiltonian", &bump_translation_hamiltonian, py::arg("space"),
        py::arg("a"), py::arg("c"), py::arg("rho"));

  m.def(
      "flow_endpoint",
      [](const HamiltonianSpec& h, const PhasePoint& z0, double t0, double t1,
         double step) { return flow_endpoint(h, z0, t0, t1, step); },
      py::arg("hamiltonian"), py::arg("z0"), py::arg("t0"), py::arg("t1"),
      py::arg("step"));
  m.def("symplecticity_residual", &symplecticity_residual, py::arg("space"),
        py::arg("jacobian"));

  py::class_<Isotopy>(m, "Isotopy")
      .def(py::init<PhaseSpace>(), py::arg("space"))
      .def_property_readonly("total_duration", &Isotopy::total_duration)
      .def_property_readonly("stage_count",
                             [](const Isotopy& iso) { return iso.stages().size(); });
  m.def("transport", &transport, py::arg("isotopy"), py::arg("z"), py::arg("step"));
  m.def("transport_jacobian", &transport_jacobian, py::arg("isotopy"), py::arg("z"),
        py::arg("step"), py::arg("delta") = 1e-5);

  py::class_<LinearCloneMap>(m, "LinearCloneMap")
      .def_readonly("mc", &LinearCloneMap::mc)
      .def_readonly("block_dim", &LinearCloneMap::block_dim)
      .def("induced", &LinearCloneMap::induced)
      .def("product_space", &LinearCloneMap::product_space)
      .def("g", &LinearCloneMap::g);
  m.def("eta_residual", &eta_residual, py::arg("m"));
  m.def("complete_lorentz_frame", &complete_lorentz_frame, py::arg("g"),
        py::arg("block_dim") = 2);
  m.def("apply_clone_map", &apply_clone_map, py::arg("map"), py::arg("x"), py::arg("y"),
        py::arg("z"));
  m.def("generator_hamiltonian", &generator_hamiltonian, py::arg("map"));
  m.def("generator_isotopy", &generator_isotopy, py::arg("map"));

  py::class_<TripleSpace>(m, "TripleSpace")
      .def(py::init<PhaseSpace, PhaseSpace>(), py::arg("system"), py::arg("machine"))
      .def_readonly("product", &TripleSpace::product)
      .def("embed", &TripleSpace::embed, py::arg("x"), py::arg("b"), py::arg("r"))
      .def("split", &TripleSpace::split, py::arg("w"));

  py::class_<CloneSetup>(m, "CloneSetup")
      .def(py::init([](const PhaseSpace& sys, const PhaseSpace& machine,
                       const PhasePoint& blank, const PhasePoint& start) {
             return CloneSetup{sys, machine, blank, start,
                               Isotopy(TripleSpace(sys, machine).product)};
           }),
           py::arg("system"), py::arg("machine"), py::arg("blank"),
           py::arg("machine_start"))
      .def(py::init([](const PhaseSpace& sys, const PhaseSpace& machine,
                       const Eigen::VectorXd& blank, const Eigen::VectorXd& start) {
             return CloneSetup{sys, machine, make_point(sys, blank),
                               make_point(machine, start),
                               Isotopy(TripleSpace(sys, machine).product)};
           }),
           py::arg("system"), py::arg("machine"), py::arg("blank"),
           py::arg("machine_start"))
      .def("with_witness_map",
           [](CloneSetup& s, const LinearCloneMap& map) {
             s.witness = map;
             return s;
           })
      .def("with_witness_isotopy", [](CloneSetup& s, const Isotopy& iso) {
        s.witness = iso;
        return s;
      });

  py::class_<CloneDefect>(m, "CloneDefect")
      .def_readonly("value", &CloneDefect::value)
      .def_readonly("worst_input", &CloneDefect::worst_input)
      .def_readonly("worst_first", &CloneDefect::worst_first)
      .def_readonly("worst_second", &CloneDefect::worst_second);
  m.def(
      "clone_defect",
      [](const CloneSetup& setup, const std::vector<Eigen::VectorXd>& sample,
         double step) { return clone_defect(setup, sample, step); },
      py::arg("setup"), py::arg("sample"), py::arg("step"));

  py::class_<LoopShape::Slot>(m, "LoopSlot")
      .def(py::init<>())
      .def_readwrite("winding", &LoopShape::Slot::winding)
      .def_readwrite("offset", &LoopShape::Slot::offset)
      .def_readwrite("harmonics", &LoopShape::Slot::harmonics);
  py::class_<LoopShape>(m, "LoopShape")
      .def(py::init<>())
      .def_readwrite("slots", &LoopShape::slots)
      .def("at", &LoopShape::at, py::arg("s"));
  py::class_<Loop>(m, "Loop")
      .def_readonly("samples", &Loop::samples)
      .def_readonly("adequate", &Loop::adequate)
      .def_readonly("max_angular_step", &Loop::max_angular_step)
      .def_property_readonly("count", &Loop::count);
  m.def("make_loop", &make_loop, py::arg("space"), py::arg("shape"), py::arg("count"));
  m.def("loop_from_samples", &loop_from_samples, py::arg("space"), py::arg("samples"));
  m.def(
      "winding_number",
      [](const std::vector<double>& angles) {
        return winding_number(std::span<const double>(angles));
      },
      py::arg("angles"));
  m.def("winding_vector", &winding_vector, py::arg("loop"));
  m.def("transport_loop", &transport_loop, py::arg("isotopy"), py::arg("loop"),
        py::arg("step"), py::arg("max_doublings") = 4);

  py::enum_<Verdict>(m, "Verdict")
      .value("OBSTRUCTED", Verdict::Obstructed)
      .value("CONSISTENT", Verdict::Consistent);
  py::class_<NoGoCertificate>(m, "NoGoCertificate")
      .def_readonly("input_windings", &NoGoCertificate::input_windings)
      .def_readonly("transported_windings", &NoGoCertificate::transported_windings)
      .def_readonly("required_windings", &NoGoCertificate::required_windings)
      .def_readonly("compared_slots", &NoGoCertificate::compared_slots)
      .def_readonly("verdict", &NoGoCertificate::verdict)
      .def_readonly("witness_id", &NoGoCertificate::witness_id);
  m.def("lift_probe", &lift_probe, py::arg("setup"), py::arg("probe"));
  m.def("no_go_certificate", &no_go_certificate, py::arg("setup"), py::arg("probe"),
        py::arg("step"), py::arg("witness_id") = std::string(),
        py::arg("max_doublings") = 4);
  m.def("pointwise_duplication_certificate", &pointwise_duplication_certificate,
        py::arg("setup"), py::arg("probe"));

  py::class_<CandidateFamily>(m, "CandidateFamily")
      .def_static("quadratic", &CandidateFamily::quadratic, py::arg("space"),
                  py::arg("stages"), py::arg("stage_duration") = 0.5)
      .def_static("trig_poly", &CandidateFamily::trig_poly, py::arg("space"),
                  py::arg("stages"), py::arg("max_harmonic"), py::arg("max_power"),
                  py::arg("max_total_degree"), py::arg("stage_duration") = 0.5)
      .def_property_readonly("parameter_count", &CandidateFamily::parameter_count)
      .def("realize",
           [](const CandidateFamily& f, const Eigen::VectorXd& p) { return f.realize(p); })
      .def("set_params", &CandidateFamily::set_params, py::arg("params"));
  m.def(
      "cloning_objective",
      [](const CandidateFamily& family, const Eigen::VectorXd& params,
         const CloneSetup& setup, const std::vector<Eigen::VectorXd>& sample,
         double step) { return cloning_objective(family, params, setup, sample, step); },
      py::arg("family"), py::arg("params"), py::arg("setup"), py::arg("sample"),
      py::arg("step"));

  py::class_<ApproxReport>(m, "ApproxReport")
      .def_readonly("best_params", &ApproxReport::best_params)
      .def_readonly("best_objective", &ApproxReport::best_objective)
      .def_readonly("objective_trace", &ApproxReport::objective_trace)
      .def_readonly("evaluations", &ApproxReport::evaluations)
      .def_readonly("restarts", &ApproxReport::restarts);
  py::class_<OptimizeOptions>(m, "OptimizeOptions")
      .def(py::init<>())
      .def_readwrite("budget", &OptimizeOptions::budget)
      .def_readwrite("seed", &OptimizeOptions::seed)
      .def_readwrite("step", &OptimizeOptions::step)
      .def_readwrite("population", &OptimizeOptions::population)
      .def_readwrite("sigma0", &OptimizeOptions::sigma0)
      .def_readwrite("stagnation", &OptimizeOptions::stagnation)
      .def_readwrite("target", &OptimizeOptions::target);
  m.def(
      "optimize",
      [](const CandidateFamily& family, const CloneSetup& setup,
         const std::vector<Eigen::VectorXd>& sample, const OptimizeOptions& opt) {
        return optimize(family, setup, sample, opt);
      },
      py::arg("family"), py::arg("setup"), py::arg("sample"), py::arg("options"));
  m.def(
      "angular_error_floor",
      [](const CandidateFamily& family, const Eigen::VectorXd& params,
         const CloneSetup& setup, const Loop& probe, double step) {
        return angular_error_floor(family, params, setup, probe, step);
      },
      py::arg("family"), py::arg("params"), py::arg("setup"), py::arg("probe"),
      py::arg("step"));

  py::class_<TransportStage>(m, "TransportStage")
      .def_readonly("point_index", &TransportStage::point_index)
      .def_readonly("waypoints", &TransportStage::waypoints)
      .def_readonly("rho", &TransportStage::rho)
      .def_readonly("parking", &TransportStage::parking);
  py::class_<PointTransportPlan>(m, "PointTransportPlan")
      .def_readonly("sources", &PointTransportPlan::sources)
      .def_readonly("targets", &PointTransportPlan::targets)
      .def_readonly("rho", &PointTransportPlan::rho)
      .def_readonly("stages", &PointTransportPlan::stages);
  py::class_<ExecutionRecord>(m, "ExecutionRecord")
      .def_readonly("endpoint_errors", &ExecutionRecord::endpoint_errors)
      .def_readonly("stage_interference", &ExecutionRecord::stage_interference)
      .def_readonly("worst_endpoint", &ExecutionRecord::worst_endpoint)
      .def_readonly("worst_interference", &ExecutionRecord::worst_interference);
  m.def("plan_transport", &plan_transport, py::arg("space"), py::arg("sources"),
        py::arg("targets"));
  m.def("execute_plan", &execute_plan, py::arg("plan"), py::arg("step"),
        py::arg("endpoint_tol") = 1e-6, py::arg("interference_tol") = 1e-9);

  py::class_<SubspaceCloneResult>(m, "SubspaceCloneResult")
      .def_readonly("c", &SubspaceCloneResult::c)
      .def_readonly("machine_final", &SubspaceCloneResult::machine_final)
      .def_readonly("left", &SubspaceCloneResult::left)
      .def_readonly("right", &SubspaceCloneResult::right)
      .def_readonly("residual", &SubspaceCloneResult::residual);
  m.def("tensor", &tensor, py::arg("a"), py::arg("b"));
  m.def("clone_1d_subspace", &clone_1d_subspace, py::arg("b"), py::arg("psi"));
  m.def("rotate_b_into_subspace", &rotate_b_into_subspace, py::arg("b"), py::arg("v"));
}
