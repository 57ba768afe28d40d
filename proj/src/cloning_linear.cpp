#include "clonelab/cloning_linear.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <sstream>

namespace clonelab {

Eigen::Matrix3d eta_metric() {
  Eigen::Matrix3d eta = Eigen::Matrix3d::Identity();
  eta(2, 2) = -1.0;
  return eta;
}

double eta_residual(const Eigen::Matrix3d& m) {
  Eigen::Matrix3d eta = eta_metric();
  return (m.transpose() * eta * m - eta).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd LinearCloneMap::induced() const {
  const int n = block_dim;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      t.block(i * n, j * n, n, n) = mc(i, j) * Eigen::MatrixXd::Identity(n, n);
  return t;
}

PhaseSpace LinearCloneMap::product_space() const {
  return PhaseSpace({Factor{FactorKind::Euclidean, block_dim, +1},
                     Factor{FactorKind::Euclidean, block_dim, +1},
                     Factor{FactorKind::Euclidean, block_dim, -1}});
}

int LinearCloneMap::g() const { return int(std::llround(mc(2, 0))); }

namespace {

double eta_dot(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
  return u[0] * v[0] + u[1] * v[1] - u[2] * v[2];
}

// Second frame column for a given first column: intersect the line
//   { v : <v, c1>_eta = 0, v . seed = 1 }
// with the quadric <v, v>_eta = 1, preferring the root of smaller magnitude
// parameter (ties to the smaller value).
std::optional<Eigen::Vector3d> second_column(const Eigen::Vector3d& c1,
                                             const Eigen::Vector3d& seed) {
  Eigen::Vector3d n1 = eta_metric() * c1;
  Eigen::Vector3d dir = n1.cross(seed);
  if (dir.norm() < 1e-12) return std::nullopt;

  // v0 = alpha * n1 + beta * seed solving v0 . n1 = 0, v0 . seed = 1.
  Eigen::Matrix2d a;
  a << n1.dot(n1), seed.dot(n1), n1.dot(seed), seed.dot(seed);
  if (std::abs(a.determinant()) < 1e-12) return std::nullopt;
  Eigen::Vector2d rhs(0.0, 1.0);
  Eigen::Vector2d ab = a.partialPivLu().solve(rhs);
  Eigen::Vector3d v0 = ab[0] * n1 + ab[1] * seed;

  // Quadratic in the line parameter.
  double qa = eta_dot(dir, dir);
  double qb = 2.0 * eta_dot(v0, dir);
  double qc = eta_dot(v0, v0) - 1.0;
  double t;
  if (std::abs(qa) < 1e-14) {
    if (std::abs(qb) < 1e-14) return std::nullopt;
    t = -qc / qb;
  } else {
    double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return std::nullopt;
    double sq = std::sqrt(disc);
    double t1 = (-qb - sq) / (2.0 * qa);
    double t2 = (-qb + sq) / (2.0 * qa);
    if (std::abs(t1) < std::abs(t2))
      t = t1;
    else if (std::abs(t2) < std::abs(t1))
      t = t2;
    else
      t = std::min(t1, t2);
  }
  return v0 + t * dir;
}

}  // namespace

LinearCloneMap complete_lorentz_frame(int g, int block_dim) {
  if (g != 1 && g != -1) throw DomainError("complete_lorentz_frame: g must be +1 or -1");
  if (block_dim < 2 || block_dim % 2 != 0)
    throw DomainError("complete_lorentz_frame: block dimension must be even and >= 2");

  const Eigen::Vector3d c1(1.0, 1.0, double(g));
  const std::array<Eigen::Vector3d, 3> seeds = {Eigen::Vector3d::UnitX(),
                                                Eigen::Vector3d::UnitY(),
                                                Eigen::Vector3d::UnitZ()};
  std::optional<Eigen::Vector3d> c2;
  for (const Eigen::Vector3d& s : seeds) {
    c2 = second_column(c1, s);
    if (c2) break;
  }
  if (!c2)
    throw ConstructionError("complete_lorentz_frame: seed exhaustion for the second column");

  // Third column: eta-orthogonal to both by construction of the cross product
  // against the metric images, normalized to eta-norm -1.
  Eigen::Vector3d w = (eta_metric() * c1).cross(eta_metric() * (*c2));
  double nn = eta_dot(w, w);
  if (!(nn < -1e-12))
    throw ConstructionError("complete_lorentz_frame: third column is not timelike");
  Eigen::Vector3d c3 = w / std::sqrt(-nn);
  for (int i = 0; i < 3; ++i) {
    if (std::abs(c3[i]) > 1e-12) {
      if (c3[i] < 0.0) c3 = -c3;
      break;
    }
  }

  LinearCloneMap map;
  map.mc.col(0) = c1;
  map.mc.col(1) = *c2;
  map.mc.col(2) = c3;
  map.block_dim = block_dim;
  if (eta_residual(map.mc) > 1e-10)
    throw ConstructionError("complete_lorentz_frame: frame fails the metric check");
  return map;
}

std::array<Eigen::VectorXd, 3> apply_clone_map(const LinearCloneMap& map,
                                               const Eigen::VectorXd& x,
                                               const Eigen::VectorXd& y,
                                               const Eigen::VectorXd& z) {
  const int n = map.block_dim;
  if (x.size() != n || y.size() != n || z.size() != n)
    throw DomainError("apply_clone_map: block dimension mismatch");
  std::array<Eigen::VectorXd, 3> out;
  const std::array<const Eigen::VectorXd*, 3> in = {&x, &y, &z};
  for (int i = 0; i < 3; ++i) {
    out[i] = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < 3; ++j) out[i] += map.mc(i, j) * (*in[j]);
  }
  return out;
}

namespace {

struct GeneratorPieces {
  Eigen::MatrixXd a1;  // active on [0, 1/2)
  Eigen::MatrixXd a2;  // active on [1/2, 1]
};

// Real logarithm of an orthogonal symplectic block map through its unitary
// representation in a basis adapted to the pairing complex structure.
Eigen::MatrixXd orthogonal_symplectic_log(const Eigen::MatrixXd& r,
                                          const PhaseSpace& space) {
  const int dim = space.dim();
  const int half = dim / 2;
  Eigen::MatrixXd om = space.pairing_matrix();

  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(dim, half);
  int k = 0;
  for (const PhaseSpace::SlotPair& p : space.slot_pairs()) e(p.a, k++) = 1.0;
  Eigen::MatrixXd f = om * e;
  Eigen::MatrixXd basis(dim, dim);
  basis << e, f;

  Eigen::MatrixXd rb = basis.transpose() * r * basis;
  Eigen::MatrixXd x = rb.topLeftCorner(half, half);
  Eigen::MatrixXd y = rb.bottomLeftCorner(half, half);
  double block_res = std::max((rb.topRightCorner(half, half) + y).cwiseAbs().maxCoeff(),
                              (rb.bottomRightCorner(half, half) - x).cwiseAbs().maxCoeff());
  if (block_res > 1e-8)
    throw ConstructionError(
        "generator_hamiltonian: orthogonal factor does not respect the complex structure");

  Eigen::MatrixXcd u = x.cast<std::complex<double>>();
  u.imag() = y;
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
  Eigen::MatrixXcd tu = schur.matrixT();
  Eigen::MatrixXcd zu = schur.matrixU();
  double offdiag = 0.0;
  for (int i = 0; i < half; ++i)
    for (int j = 0; j < half; ++j)
      if (i != j) offdiag = std::max(offdiag, std::abs(tu(i, j)));
  if (offdiag > 1e-8)
    throw ConstructionError("generator_hamiltonian: unitary factor is not normal");

  Eigen::VectorXcd logdiag(half);
  for (int i = 0; i < half; ++i)
    logdiag[i] = std::complex<double>(0.0, std::arg(tu(i, i)));
  Eigen::MatrixXcd lu = zu * logdiag.asDiagonal() * zu.adjoint();

  Eigen::MatrixXd out(dim, dim);
  out << lu.real(), -lu.imag(), lu.imag(), lu.real();
  return basis * out * basis.transpose();
}

GeneratorPieces factor_generator(const Eigen::MatrixXd& t, const PhaseSpace& space) {
  const int dim = space.dim();

  Eigen::EigenSolver<Eigen::MatrixXd> es(t);
  bool negative_axis = false;
  for (int i = 0; i < dim; ++i) {
    std::complex<double> ev = es.eigenvalues()[i];
    if (std::abs(ev) < 1e-12)
      throw ConstructionError("generator_hamiltonian: map is singular");
    if (std::abs(ev.imag()) < 1e-12 * (1.0 + std::abs(ev)) && ev.real() < 0.0)
      negative_axis = true;
  }

  GeneratorPieces pieces;
  if (!negative_axis) {
    Eigen::MatrixXd l = t.log();
    pieces.a1 = l;
    pieces.a2 = l;
    return pieces;
  }

  // Polar split: t = s * r with s symmetric positive definite symplectic and
  // r orthogonal symplectic; r acts first.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(t * t.transpose());
  Eigen::VectorXd lam = eh.eigenvalues();
  if (lam.minCoeff() <= 0.0)
    throw ConstructionError("generator_hamiltonian: polar factor not positive definite");
  Eigen::MatrixXd v = eh.eigenvectors();
  Eigen::MatrixXd xi_s =
      v * (0.5 * lam.array().log()).matrix().asDiagonal() * v.transpose();
  Eigen::MatrixXd s_inv =
      v * lam.array().rsqrt().matrix().asDiagonal() * v.transpose();
  Eigen::MatrixXd r = s_inv * t;
  Eigen::MatrixXd xi_r = orthogonal_symplectic_log(r, space);

  pieces.a1 = 2.0 * xi_r;
  pieces.a2 = 2.0 * xi_s;
  return pieces;
}

QuadraticTable generator_table(const LinearCloneMap& map, const PhaseSpace& space) {
  Eigen::MatrixXd t = map.induced();
  Eigen::MatrixXd om = space.pairing_matrix();

  if ((t.transpose() * om * t - om).cwiseAbs().maxCoeff() > 1e-10)
    throw ConstructionError("generator_hamiltonian: map does not preserve the pairing");

  GeneratorPieces pieces = factor_generator(t, space);

  // Verify exp(a2 / 2) * exp(a1 / 2) reproduces the map before trusting it.
  Eigen::MatrixXd check = (0.5 * pieces.a2).exp() * (0.5 * pieces.a1).exp();
  double err = (check - t).cwiseAbs().maxCoeff();
  if (err > 1e-10) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(t);
    std::ostringstream msg;
    msg << "generator_hamiltonian: factor verification failed (error " << err
        << "); spectrum:";
    for (int i = 0; i < t.rows(); ++i) msg << " " << es.eigenvalues()[i];
    throw ConstructionError(msg.str());
  }

  auto to_quadratic = [&](const Eigen::MatrixXd& a) {
    Eigen::MatrixXd q = om.transpose() * a;
    double asym = (q - q.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * (1.0 + q.cwiseAbs().maxCoeff()))
      throw ConstructionError("generator_hamiltonian: generator is not Hamiltonian");
    return Eigen::MatrixXd(0.5 * (q + q.transpose()));
  };

  QuadraticTable table;
  table.times = {0.0, 0.5};
  table.coeffs = {to_quadratic(pieces.a1), to_quadratic(pieces.a2)};
  return table;
}

}  // namespace

HamiltonianSpec generator_hamiltonian(const LinearCloneMap& map) {
  PhaseSpace space = map.product_space();
  return HamiltonianSpec::quadratic(space, generator_table(map, space));
}

Isotopy generator_isotopy(const LinearCloneMap& map) {
  PhaseSpace space = map.product_space();
  QuadraticTable table = generator_table(map, space);
  std::vector<IsotopyStage> stages;
  stages.push_back(
      {HamiltonianSpec::quadratic_constant(space, table.coeffs[0]), 0.5});
  stages.push_back(
      {HamiltonianSpec::quadratic_constant(space, table.coeffs[1]), 0.5});
  return Isotopy(std::move(space), std::move(stages));
}

TripleSpace::TripleSpace(PhaseSpace system_space, PhaseSpace machine_space)
    : sys(std::move(system_space)),
      machine(std::move(machine_space)),
      product(PhaseSpace::product({sys, sys, machine})) {}

Eigen::VectorXd TripleSpace::embed(const Eigen::VectorXd& x, const Eigen::VectorXd& b,
                                   const Eigen::VectorXd& r) const {
  if (x.size() != sys.dim() || b.size() != sys.dim() || r.size() != machine.dim())
    throw DomainError("TripleSpace::embed: dimension mismatch");
  Eigen::VectorXd w(product.dim());
  w << x, b, r;
  return w;
}

std::array<Eigen::VectorXd, 3> TripleSpace::split(const Eigen::VectorXd& w) const {
  if (w.size() != product.dim()) throw DomainError("TripleSpace::split: dimension mismatch");
  const int m = sys.dim();
  return {w.segment(0, m), w.segment(m, m), w.segment(2 * m, machine.dim())};
}

CloneDefect clone_defect(const CloneSetup& setup, std::span<const Eigen::VectorXd> sample,
                         double step) {
  if (sample.empty()) throw DomainError("clone_defect: empty sample");
  TripleSpace triple(setup.sys, setup.machine);

  CloneDefect defect;
  defect.value = -1.0;
  for (const Eigen::VectorXd& x : sample) {
    std::array<Eigen::VectorXd, 3> out;
    if (const auto* lin = std::get_if<LinearCloneMap>(&setup.witness)) {
      if (setup.sys.dim() != lin->block_dim || setup.machine.dim() != lin->block_dim)
        throw DomainError("clone_defect: witness block dimension mismatch");
      out = apply_clone_map(*lin, x, setup.blank.coords, setup.machine_start.coords);
    } else {
      const Isotopy& iso = std::get<Isotopy>(setup.witness);
      if (iso.space() != triple.product)
        throw DomainError("clone_defect: witness lives on a different product space");
      Eigen::VectorXd w = triple.embed(x, setup.blank.coords, setup.machine_start.coords);
      out = triple.split(transport(iso, PhasePoint{wrap_coords(triple.product, w)}, step).coords);
    }
    Eigen::VectorXd xw = wrap_coords(setup.sys, x);
    double d1 = chart_distance(setup.sys, out[0], xw);
    double d2 = chart_distance(setup.sys, out[1], xw);
    if (d1 + d2 > defect.value) {
      defect.value = d1 + d2;
      defect.worst_input = x;
      defect.worst_first = d1;
      defect.worst_second = d2;
    }
  }
  return defect;
}

}  // namespace clonelab
