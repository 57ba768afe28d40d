#include "clonelab/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace clonelab {

namespace {

Eigen::VectorXd field_raw(const HamiltonianSpec& h, const Eigen::VectorXd& z, double t) {
  Eigen::VectorXd grad = h.gradient(z, t);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(z.size());
  for (const PhaseSpace::SlotPair& p : h.space().slot_pairs()) {
    x[p.a] = p.sign * grad[p.b];
    x[p.b] = -p.sign * grad[p.a];
  }
  return x;
}

// Midpoint residual F(w) = w - z - step * X((z + w) / 2, tm).
Eigen::VectorXd midpoint_residual(const HamiltonianSpec& h, const Eigen::VectorXd& z,
                                  const Eigen::VectorXd& w, double tm, double step) {
  return w - z - step * field_raw(h, 0.5 * (z + w), tm);
}

}  // namespace

TangentVector hamiltonian_vector_field(const HamiltonianSpec& h, const PhasePoint& z,
                                       double t) {
  if (z.coords.size() != h.space().dim())
    throw DomainError("hamiltonian_vector_field: dimension mismatch");
  return TangentVector{field_raw(h, z.coords, t)};
}

PhasePoint step_implicit_midpoint(const HamiltonianSpec& h, const PhasePoint& z,
                                  double t, double step) {
  if (!std::isfinite(step) || step == 0.0)
    throw DomainError("step_implicit_midpoint: step must be finite and nonzero");
  const Eigen::VectorXd& z0 = z.coords;
  const int n = h.space().dim();
  if (z0.size() != n) throw DomainError("step_implicit_midpoint: dimension mismatch");

  const double tm = t + 0.5 * step;
  const double tol = 1e-13 * std::max(1.0, z0.norm());
  const int cap = 50;

  Eigen::VectorXd w = z0 + step * field_raw(h, z0, t);  // Euler predictor
  double res = std::numeric_limits<double>::infinity();
  double prev_res = res;
  int used = 0;
  bool newton = false;

  while (used < cap) {
    Eigen::VectorXd f = midpoint_residual(h, z0, w, tm, step);
    res = f.norm();
    if (res <= tol || !std::isfinite(res)) break;
    if (!newton) {
      // Fixed point: w <- z0 + step * X((z0 + w) / 2).
      w = w - f;
      ++used;
      // Switch to Newton on stagnation or divergence.
      if (res > 0.9 * prev_res && used >= 3) newton = true;
      prev_res = res;
      continue;
    }
    // Newton on F(w) = 0 with a finite-difference Jacobian of the field.
    Eigen::VectorXd m = 0.5 * (z0 + w);
    Eigen::MatrixXd dfield(n, n);
    const double fd = 1e-7 * std::max(1.0, m.norm());
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd mp = m, mm = m;
      mp[i] += fd;
      mm[i] -= fd;
      dfield.col(i) = (field_raw(h, mp, tm) - field_raw(h, mm, tm)) / (2.0 * fd);
    }
    Eigen::MatrixXd jac =
        Eigen::MatrixXd::Identity(n, n) - 0.5 * step * dfield;
    Eigen::VectorXd delta = jac.partialPivLu().solve(f);
    if (!delta.allFinite()) break;
    w = w - delta;
    ++used;
  }

  if (!(res <= tol)) {
    std::ostringstream msg;
    msg << "implicit midpoint failed to converge: residual " << res << " after " << used
        << " iterations (tolerance " << tol << ")";
    throw IntegrationError(msg.str(), std::isfinite(res) ? res : -1.0);
  }
  return make_point(h.space(), w);
}

namespace {

// Shared stepping loop; calls `record` after the initial state and every step.
template <typename Record>
Eigen::VectorXd run_flow(const HamiltonianSpec& h, const Eigen::VectorXd& start,
                         double t0, double t1, double step, Record&& record) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw DomainError("flow: step must be positive and finite");
  if (!std::isfinite(t0) || !std::isfinite(t1)) throw DomainError("flow: non-finite times");
  const double span = t1 - t0;
  const double dir = span >= 0.0 ? 1.0 : -1.0;
  const double hs = dir * step;

  Eigen::VectorXd cur = start;
  double t = t0;
  record(t, cur);
  if (span == 0.0) return cur;

  const long n_full = long(std::floor(std::abs(span) / step + 1e-9));
  for (long k = 0; k < n_full; ++k) {
    cur = step_implicit_midpoint(h, PhasePoint{cur}, t, hs).coords;
    t = t0 + dir * step * double(k + 1);
    record(t, cur);
  }
  const double rem = t1 - t;
  if (std::abs(rem) > 1e-12 * std::max(1.0, std::abs(span))) {
    cur = step_implicit_midpoint(h, PhasePoint{cur}, t, rem).coords;
    t = t1;
    record(t, cur);
  }
  return cur;
}

}  // namespace

Trajectory flow(const HamiltonianSpec& h, const PhasePoint& z0, double t0, double t1,
                double step) {
  Eigen::VectorXd start = wrap_coords(h.space(), z0.coords);
  Trajectory traj;
  traj.step = step;
  run_flow(h, start, t0, t1, step, [&](double t, const Eigen::VectorXd& z) {
    traj.times.push_back(t);
    traj.points.push_back(z);
  });
  return traj;
}

PhasePoint flow_endpoint(const HamiltonianSpec& h, const PhasePoint& z0, double t0,
                         double t1, double step) {
  Eigen::VectorXd start = wrap_coords(h.space(), z0.coords);
  Eigen::VectorXd end =
      run_flow(h, start, t0, t1, step, [](double, const Eigen::VectorXd&) {});
  return PhasePoint{end};
}

Eigen::MatrixXd flow_jacobian(const HamiltonianSpec& h, const PhasePoint& z0, double t0,
                              double t1, double step, double delta) {
  const PhaseSpace& space = h.space();
  const int n = space.dim();
  Eigen::MatrixXd jac(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd zp = z0.coords, zm = z0.coords;
    zp[i] += delta;
    zm[i] -= delta;
    Eigen::VectorXd fp = flow_endpoint(h, PhasePoint{zp}, t0, t1, step).coords;
    Eigen::VectorXd fm = flow_endpoint(h, PhasePoint{zm}, t0, t1, step).coords;
    for (int s = 0; s < n; ++s) {
      double diff = space.angular(s) ? arc_delta(fm[s], fp[s]) : fp[s] - fm[s];
      jac(s, i) = diff / (2.0 * delta);
    }
  }
  return jac;
}

double symplecticity_residual(const PhaseSpace& space, const Eigen::MatrixXd& jac) {
  if (jac.rows() != space.dim() || jac.cols() != space.dim())
    throw DomainError("symplecticity_residual: matrix dimension mismatch");
  Eigen::MatrixXd om = space.pairing_matrix();
  return (jac.transpose() * om * jac - om).cwiseAbs().maxCoeff();
}

Isotopy::Isotopy(PhaseSpace space, std::vector<IsotopyStage> stages)
    : space_(std::move(space)), stages_(std::move(stages)) {
  for (const IsotopyStage& st : stages_) {
    if (st.hamiltonian.space() != space_)
      throw DomainError("Isotopy: stage Hamiltonian lives on a different space");
    if (!(st.duration > 0.0) || !std::isfinite(st.duration))
      throw DomainError("Isotopy: stage durations must be positive");
  }
}

double Isotopy::total_duration() const {
  double acc = 0.0;
  for (const IsotopyStage& st : stages_) acc += st.duration;
  return acc;
}

PhasePoint transport(const Isotopy& iso, const PhasePoint& z, double step) {
  PhasePoint cur = make_point(iso.space(), z.coords);
  for (const IsotopyStage& st : iso.stages())
    cur = flow_endpoint(st.hamiltonian, cur, 0.0, st.duration, step);
  return cur;
}

Eigen::MatrixXd transport_jacobian(const Isotopy& iso, const PhasePoint& z, double step,
                                   double delta) {
  const PhaseSpace& space = iso.space();
  const int n = space.dim();
  Eigen::MatrixXd jac(n, n);
  for (int i = 0; i < n; ++i) {
    // Five-point stencil: bump-profile boundary layers have third derivatives
    // large enough that a plain central difference cannot reach the symplectic
    // residuals we check for at any workable delta.
    Eigen::VectorXd samples[4];
    const double offsets[4] = {-2.0 * delta, -delta, delta, 2.0 * delta};
    for (int k = 0; k < 4; ++k) {
      Eigen::VectorXd zk = z.coords;
      zk[i] += offsets[k];
      samples[k] = transport(iso, PhasePoint{zk}, step).coords;
    }
    for (int s = 0; s < n; ++s) {
      const bool ang = space.angular(s);
      const double inner = ang ? arc_delta(samples[1][s], samples[2][s])
                               : samples[2][s] - samples[1][s];
      const double outer = ang ? arc_delta(samples[0][s], samples[3][s])
                               : samples[3][s] - samples[0][s];
      jac(s, i) = (8.0 * inner - outer) / (12.0 * delta);
    }
  }
  return jac;
}

}  // namespace clonelab
