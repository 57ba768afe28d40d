#include "clonelab/point_cloning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace clonelab {

namespace {

// Shortest per-slot displacement from a to b.
Eigen::VectorXd shortest_disp(const PhaseSpace& space, const Eigen::VectorXd& a,
                              const Eigen::VectorXd& b) {
  Eigen::VectorXd d = b - a;
  for (int s : space.angular_slots()) d[s] = arc_delta(a[s], b[s]);
  return d;
}

// Distance from an obstacle to the segment [u, v] given in lifted coords,
// minimized over angular 2*pi shifts of the obstacle.
double dist_point_segment(const PhaseSpace& space, const Eigen::VectorXd& obstacle,
                          const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                          Eigen::VectorXd* best_lift = nullptr) {
  const std::vector<int>& ang = space.angular_slots();
  // Base lift: obstacle shifted near the segment start.
  Eigen::VectorXd base = u + shortest_disp(space, u, obstacle);
  double best = std::numeric_limits<double>::infinity();
  const int na = int(ang.size());
  const int combos = 1;
  int total = combos;
  for (int i = 0; i < na; ++i) total *= 3;
  for (int c = 0; c < total; ++c) {
    Eigen::VectorXd o = base;
    int rem = c;
    for (int i = 0; i < na; ++i) {
      int shift = rem % 3 - 1;  // -1, 0, +1 turns
      rem /= 3;
      o[ang[i]] += kTwoPi * shift;
    }
    Eigen::VectorXd d = v - u;
    double dd = d.squaredNorm();
    double t = dd > 0.0 ? std::clamp((o - u).dot(d) / dd, 0.0, 1.0) : 0.0;
    double dist = (o - (u + t * d)).norm();
    if (dist < best) {
      best = dist;
      if (best_lift) *best_lift = o;
    }
  }
  return best;
}

// A first unit vector perpendicular to dir (deterministic choice).
Eigen::VectorXd perpendicular(const Eigen::VectorXd& dir) {
  const int n = int(dir.size());
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd cand = Eigen::VectorXd::Unit(n, i);
    cand -= cand.dot(dir) / dir.squaredNorm() * dir;
    if (cand.norm() > 1e-6) return cand.normalized();
  }
  throw PlanningError("plan_transport: degenerate direction");
}

struct PathBudget {
  int attempts = 0;
  int cap = 100;
};

// Polyline in lifted coordinates from `from` to `to_lift` keeping distance
// >= clearance from every obstacle; detours by perpendicular offsets.
std::optional<std::vector<Eigen::VectorXd>> build_polyline(
    const PhaseSpace& space, const Eigen::VectorXd& from, const Eigen::VectorXd& to_lift,
    const std::vector<Eigen::VectorXd>& obstacles, double clearance, PathBudget& budget) {
  std::vector<Eigen::VectorXd> pts = {from, to_lift};
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t k = 0; k + 1 < pts.size() && !changed; ++k) {
      for (const Eigen::VectorXd& obstacle : obstacles) {
        Eigen::VectorXd lift;
        double d = dist_point_segment(space, obstacle, pts[k], pts[k + 1], &lift);
        if (d >= clearance * (1.0 - 1e-9)) continue;
        if (++budget.attempts > budget.cap) return std::nullopt;
        // Detour: offset the closest approach point away from the obstacle.
        Eigen::VectorXd seg = pts[k + 1] - pts[k];
        double dd = seg.squaredNorm();
        double t = dd > 0.0 ? std::clamp((lift - pts[k]).dot(seg) / dd, 0.0, 1.0) : 0.5;
        t = std::clamp(t, 0.25, 0.75);  // keep the waypoint off the endpoints
        Eigen::VectorXd q = pts[k] + t * seg;
        Eigen::VectorXd away = q - lift;
        if (away.norm() < 1e-9 * std::max(1.0, q.norm()) || dd == 0.0)
          away = perpendicular(dd > 0.0 ? seg : Eigen::VectorXd::Unit(space.dim(), 0));
        away.normalize();
        pts.insert(pts.begin() + k + 1, lift + clearance * 1.3 * away);
        changed = true;
        break;
      }
    }
    if (pts.size() > 64) return std::nullopt;
  }
  return pts;
}

// Split polyline segments so every angular slot moves less than pi/2 per
// segment (keeps each bump's lift unambiguous alongside rho < 0.45 pi).
std::vector<Eigen::VectorXd> split_segments(const PhaseSpace& space,
                                            const std::vector<Eigen::VectorXd>& pts) {
  std::vector<Eigen::VectorXd> out = {pts.front()};
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    const Eigen::VectorXd& u = pts[k];
    const Eigen::VectorXd& v = pts[k + 1];
    double worst = 0.0;
    for (int s : space.angular_slots()) worst = std::max(worst, std::abs(v[s] - u[s]));
    int pieces = std::max(1, int(std::ceil(worst / (0.5 * kPi - 1e-9))));
    for (int p = 1; p <= pieces; ++p)
      out.push_back(u + (double(p) / pieces) * (v - u));
  }
  return out;
}

std::vector<Eigen::VectorXd> wrap_all(const PhaseSpace& space,
                                      const std::vector<Eigen::VectorXd>& pts) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(pts.size());
  for (const Eigen::VectorXd& p : pts) out.push_back(wrap_coords(space, p));
  return out;
}

}  // namespace

HamiltonianSpec bump_translation_hamiltonian(const PhaseSpace& space,
                                             const Eigen::VectorXd& a,
                                             const Eigen::VectorXd& c, double rho) {
  if (!(rho > 0.0)) throw DomainError("bump_translation_hamiltonian: rho must be positive");
  BumpPath path;
  path.anchor = wrap_coords(space, a);
  path.disp = shortest_disp(space, path.anchor, wrap_coords(space, c));
  path.rho = rho;
  for (int s : space.angular_slots())
    if (std::abs(path.disp[s]) + rho >= kPi)
      throw DomainError(
          "bump_translation_hamiltonian: angular segment too long for this rho; split it");
  return HamiltonianSpec::bump_path(space, std::move(path));
}

PointTransportPlan plan_transport(const PhaseSpace& space,
                                  const std::vector<Eigen::VectorXd>& sources,
                                  const std::vector<Eigen::VectorXd>& targets) {
  if (sources.size() != targets.size())
    throw DomainError("plan_transport: source/target count mismatch");
  if (sources.size() > 16) throw DomainError("plan_transport: at most 16 points supported");

  PointTransportPlan plan{space, wrap_all(space, sources), wrap_all(space, targets), 0.0, {}};
  const int n = int(plan.sources.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (chart_distance(space, plan.sources[i], plan.sources[j]) < 1e-9)
        throw DomainError("plan_transport: sources must be pairwise distinct");
      if (chart_distance(space, plan.targets[i], plan.targets[j]) < 1e-9)
        throw DomainError("plan_transport: targets must be pairwise distinct");
    }

  // Tube radius: one third of the minimum distance among distinct listed
  // points; capped on angular spaces to keep segment lifts unambiguous.
  std::vector<Eigen::VectorXd> all = plan.sources;
  all.insert(all.end(), plan.targets.begin(), plan.targets.end());
  double min_dist = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i + 1; j < all.size(); ++j) {
      double d = chart_distance(space, all[i], all[j]);
      if (d > 1e-9) min_dist = std::min(min_dist, d);
    }
  double rho = std::isfinite(min_dist) ? min_dist / 3.0 : 0.5;
  if (space.has_angular()) rho = std::min(rho, 0.45 * kPi);
  plan.rho = rho;

  std::vector<Eigen::VectorXd> current = plan.sources;
  std::vector<int> pending;
  for (int i = 0; i < n; ++i)
    if (chart_distance(space, plan.sources[i], plan.targets[i]) > 1e-12)
      pending.push_back(i);

  PathBudget budget;
  const double clearance = 1.5 * rho;
  const size_t stage_cap = 3 * pending.size() + 8;

  auto obstacles_for = [&](int skip) {
    std::vector<Eigen::VectorXd> obs;
    for (int j = 0; j < n; ++j)
      if (j != skip) obs.push_back(current[j]);
    return obs;
  };

  while (!pending.empty()) {
    if (plan.stages.size() > stage_cap)
      throw PlanningError("plan_transport: stage budget exhausted");
    bool progress = false;
    for (size_t pi = 0; pi < pending.size(); ++pi) {
      int i = pending[pi];
      // The target must be free of every other tracked point.
      bool blocked = false;
      for (int j = 0; j < n; ++j)
        if (j != i && chart_distance(space, current[j], plan.targets[i]) < 1.6 * rho)
          blocked = true;
      if (blocked) continue;
      Eigen::VectorXd to_lift =
          current[i] + shortest_disp(space, current[i], plan.targets[i]);
      auto path = build_polyline(space, current[i], to_lift, obstacles_for(i), clearance,
                                 budget);
      if (!path) continue;
      plan.stages.push_back(
          {i, wrap_all(space, split_segments(space, *path)), rho, false});
      // Pin the final waypoint to the exact target coordinates.
      plan.stages.back().waypoints.back() = plan.targets[i];
      current[i] = plan.targets[i];
      pending.erase(pending.begin() + pi);
      progress = true;
      break;
    }
    if (progress) continue;

    // Every direct move is blocked: park the first pending point somewhere
    // clear of all current positions and all targets.
    int i = pending.front();
    std::vector<Eigen::VectorXd> avoid = obstacles_for(i);
    avoid.insert(avoid.end(), plan.targets.begin(), plan.targets.end());
    bool parked = false;
    for (double radius : {2.5 * rho, 4.0 * rho, 6.0 * rho}) {
      for (int dir = 0; dir < 2 * space.dim() && !parked; ++dir) {
        int slot = dir / 2;
        double sign = dir % 2 == 0 ? 1.0 : -1.0;
        double r = radius;
        if (space.angular(slot)) r = std::min(r, 0.45 * kPi);
        Eigen::VectorXd spot = current[i];
        spot[slot] += sign * r;
        bool clear = true;
        for (const Eigen::VectorXd& o : avoid)
          if (chart_distance(space, wrap_coords(space, spot), o) < 2.0 * rho) clear = false;
        if (!clear) continue;
        auto path = build_polyline(space, current[i], spot, obstacles_for(i), clearance,
                                   budget);
        if (!path) continue;
        plan.stages.push_back(
            {i, wrap_all(space, split_segments(space, *path)), rho, true});
        current[i] = wrap_coords(space, spot);
        parked = true;
      }
      if (parked) break;
    }
    if (!parked) {
      std::ostringstream msg;
      msg << "plan_transport: clearance unachievable for point " << i << " toward target ("
          << plan.targets[i].transpose() << ") after " << budget.attempts
          << " detour attempts";
      throw PlanningError(msg.str());
    }
  }
  return plan;
}

std::pair<Isotopy, ExecutionRecord> execute_plan(const PointTransportPlan& plan,
                                                 double step, double endpoint_tol,
                                                 double interference_tol) {
  const PhaseSpace& space = plan.space;
  const int n = int(plan.sources.size());

  std::vector<IsotopyStage> iso_stages;
  ExecutionRecord record;
  record.stage_interference.reserve(plan.stages.size());

  std::vector<Eigen::VectorXd> current = plan.sources;
  for (size_t sidx = 0; sidx < plan.stages.size(); ++sidx) {
    const TransportStage& stage = plan.stages[sidx];
    if (stage.point_index < 0 || stage.point_index >= n)
      throw DomainError("execute_plan: stage point index out of range");
    std::vector<Eigen::VectorXd> before = current;
    for (size_t k = 0; k + 1 < stage.waypoints.size(); ++k) {
      HamiltonianSpec bump = bump_translation_hamiltonian(
          space, stage.waypoints[k], stage.waypoints[k + 1], stage.rho);
      for (int j = 0; j < n; ++j)
        current[j] = flow_endpoint(bump, PhasePoint{current[j]}, 0.0, 1.0, step).coords;
      iso_stages.push_back({std::move(bump), 1.0});
    }
    double worst = 0.0;
    int worst_point = -1;
    for (int j = 0; j < n; ++j) {
      if (j == stage.point_index) continue;
      double moved = chart_distance(space, before[j], current[j]);
      if (moved > worst) {
        worst = moved;
        worst_point = j;
      }
    }
    record.stage_interference.push_back(worst);
    if (worst > record.worst_interference) {
      record.worst_interference = worst;
      record.worst_interference_stage = int(sidx);
      record.worst_interference_point = worst_point;
    }
  }

  record.endpoint_errors.resize(n);
  for (int j = 0; j < n; ++j) {
    record.endpoint_errors[j] = chart_distance(space, current[j], plan.targets[j]);
    if (record.endpoint_errors[j] > record.worst_endpoint) {
      record.worst_endpoint = record.endpoint_errors[j];
      record.worst_endpoint_index = j;
    }
  }

  if (record.worst_interference > interference_tol) {
    std::ostringstream msg;
    msg << "execute_plan: point " << record.worst_interference_point << " moved "
        << record.worst_interference << " during stage " << record.worst_interference_stage;
    throw ExecutionError(msg.str());
  }
  if (record.worst_endpoint > endpoint_tol) {
    std::ostringstream msg;
    msg << "execute_plan: point " << record.worst_endpoint_index << " missed its target by "
        << record.worst_endpoint;
    throw ExecutionError(msg.str());
  }
  return {Isotopy(space, std::move(iso_stages)), std::move(record)};
}

}  // namespace clonelab
