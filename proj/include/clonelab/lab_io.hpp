#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>

#include "clonelab/approx_search.hpp"
#include "clonelab/cloning_linear.hpp"
#include "clonelab/dynamics.hpp"
#include "clonelab/hamiltonian.hpp"
#include "clonelab/loop_topology.hpp"
#include "clonelab/phase_space.hpp"
#include "clonelab/point_cloning.hpp"

namespace clonelab {

using Json = nlohmann::json;

Json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const Json& j);

Json matrix_to_json(const Eigen::MatrixXd& m);  // row-major nested arrays
Eigen::MatrixXd matrix_from_json(const Json& j);

Json space_to_json(const PhaseSpace& space);
PhaseSpace space_from_json(const Json& j);

Json hamiltonian_to_json(const HamiltonianSpec& h);
HamiltonianSpec hamiltonian_from_json(const Json& j);

Json isotopy_to_json(const Isotopy& iso);
Isotopy isotopy_from_json(const Json& j);

Json clone_map_to_json(const LinearCloneMap& map);
LinearCloneMap clone_map_from_json(const Json& j);

Json certificate_to_json(const NoGoCertificate& cert);
Json approx_report_to_json(const ApproxReport& report);
Json plan_to_json(const PointTransportPlan& plan);
Json execution_record_to_json(const ExecutionRecord& record);

// CSV conventions: trajectories are `t,coord_0,...`; loops are `loop_s`
// followed by the angular slots (theta_<i>) and then the remaining slots
// (coord_<i>).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_loop_csv(std::ostream& os, const PhaseSpace& space, const Loop& loop);
void write_trace_csv(std::ostream& os, const std::vector<double>& best_per_generation);

// Serialize with sorted keys and a trailing newline; parents must exist.
void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace clonelab
