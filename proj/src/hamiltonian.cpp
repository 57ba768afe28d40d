#include "clonelab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

namespace clonelab {

Eigen::MatrixXd QuadraticTable::at(double t) const {
  const size_t n = times.size();
  if (t <= times.front()) return coeffs.front();
  if (t >= times.back()) return coeffs.back();
  size_t hi = 1;
  while (hi < n && times[hi] <= t) ++hi;
  if (!interpolate) return coeffs[hi - 1];
  double span = times[hi] - times[hi - 1];
  double u = span > 0.0 ? (t - times[hi - 1]) / span : 0.0;
  return (1.0 - u) * coeffs[hi - 1] + u * coeffs[hi];
}

double bump_profile(double d, double rho) {
  double u = d / rho;
  if (u <= 0.5) return 1.0;
  if (u >= 1.0) return 0.0;
  double s = 2.0 * (u - 0.5);  // s in (0, 1)
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double bump_profile_prime(double d, double rho) {
  double u = d / rho;
  if (u <= 0.5 || u >= 1.0) return 0.0;
  double s = 2.0 * (u - 0.5);
  double ds_dd = 2.0 / rho;
  double dsmooth = 30.0 * s * s - 60.0 * s * s * s + 30.0 * s * s * s * s;
  return -dsmooth * ds_dd;
}

namespace {

void validate_quadratic(const PhaseSpace& space, QuadraticTable& table) {
  if (space.has_angular())
    throw DomainError("quadratic Hamiltonian requires a space without angular slots");
  if (table.times.empty() || table.times.size() != table.coeffs.size())
    throw DomainError("quadratic table: knot/coefficient count mismatch");
  for (size_t i = 1; i < table.times.size(); ++i)
    if (!(table.times[i] > table.times[i - 1]))
      throw DomainError("quadratic table: knots must be strictly ascending");
  for (Eigen::MatrixXd& q : table.coeffs) {
    if (q.rows() != space.dim() || q.cols() != space.dim())
      throw DomainError("quadratic table: coefficient dimension mismatch");
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + q.cwiseAbs().maxCoeff()))
      throw DomainError("quadratic table: coefficients must be symmetric");
    q = 0.5 * (q + q.transpose().eval());
  }
}

void validate_trig_poly(const PhaseSpace& space, TrigPoly& poly) {
  int seen_harmonic = 0;
  int seen_power = 0;
  for (const TrigPolyTerm& term : poly.terms) {
    if (int(term.basis.size()) != space.dim())
      throw DomainError("trig/poly term: basis size must equal the space dimension");
    for (int s = 0; s < space.dim(); ++s) {
      const SlotBasis& b = term.basis[s];
      switch (b.kind) {
        case SlotBasis::Kind::One:
          break;
        case SlotBasis::Kind::Cos:
        case SlotBasis::Kind::Sin:
          if (!space.angular(s))
            throw DomainError("trig/poly term: harmonic factor on a non-angular slot");
          if (b.degree < 1) throw DomainError("trig/poly term: harmonic degree must be >= 1");
          seen_harmonic = std::max(seen_harmonic, b.degree);
          break;
        case SlotBasis::Kind::Pow:
          if (space.angular(s))
            throw DomainError("trig/poly term: power factor on an angular slot");
          if (b.degree < 1) throw DomainError("trig/poly term: power degree must be >= 1");
          seen_power = std::max(seen_power, b.degree);
          break;
      }
    }
  }
  if (poly.max_harmonic <= 0) poly.max_harmonic = seen_harmonic;
  if (poly.max_power <= 0) poly.max_power = seen_power;
  if (seen_harmonic > poly.max_harmonic || seen_power > poly.max_power)
    throw DomainError("trig/poly term: degree exceeds the declared caps");
}

void validate_bump(const PhaseSpace& space, const BumpPath& path) {
  if (path.anchor.size() != space.dim() || path.disp.size() != space.dim())
    throw DomainError("bump path: anchor/displacement dimension mismatch");
  if (!(path.rho > 0.0)) throw DomainError("bump path: rho must be positive");
  if (!path.anchor.allFinite() || !path.disp.allFinite())
    throw DomainError("bump path: non-finite data");
  for (int s : space.angular_slots())
    if (std::abs(path.disp[s]) + path.rho >= kPi)
      throw DomainError("bump path: angular displacement plus rho must stay below pi");
}

// Relative chart offset of z from the anchor, shortest-arc in angular slots.
Eigen::VectorXd relative_offset(const PhaseSpace& space, const BumpPath& path,
                                const Eigen::VectorXd& z) {
  Eigen::VectorXd w = z - path.anchor;
  for (int s : space.angular_slots()) w[s] = arc_delta(path.anchor[s], z[s]);
  return w;
}

// Per-call table of the slot atoms a trig polynomial can reference: one
// sin/cos per slot with higher harmonics by angle addition, integer powers by
// repeated multiplication.  Terms then evaluate by lookup, which keeps the
// cost of a value or gradient sweep linear in the term count instead of
// paying a transcendental per (term, slot) pair.
struct TrigAtomTable {
  int kmax;
  int mmax;
  int stride;
  std::vector<double> data;  // per slot: cos(k z) k=1..kmax, sin(k z), z^m m=1..mmax

  TrigAtomTable(const TrigPoly& poly, const Eigen::VectorXd& z)
      : kmax(std::max(poly.max_harmonic, 1)),
        mmax(std::max(poly.max_power, 1)),
        stride(2 * kmax + mmax),
        data(size_t(stride) * z.size()) {
    for (int s = 0; s < int(z.size()); ++s) {
      double* row = data.data() + size_t(s) * stride;
      const double c1 = std::cos(z[s]);
      const double s1 = std::sin(z[s]);
      row[0] = c1;
      row[kmax] = s1;
      double ck = c1, sk = s1;
      for (int k = 2; k <= kmax; ++k) {
        const double cn = ck * c1 - sk * s1;
        const double sn = sk * c1 + ck * s1;
        ck = cn;
        sk = sn;
        row[k - 1] = ck;
        row[kmax + k - 1] = sk;
      }
      double pm = z[s];
      row[2 * kmax] = pm;
      for (int m = 2; m <= mmax; ++m) {
        pm *= z[s];
        row[2 * kmax + m - 1] = pm;
      }
    }
  }

  double cosk(int s, int k) const { return data[size_t(s) * stride + (k - 1)]; }
  double sink(int s, int k) const { return data[size_t(s) * stride + kmax + (k - 1)]; }
  double powm(int s, int m) const { return data[size_t(s) * stride + 2 * kmax + (m - 1)]; }

  double value(int s, const SlotBasis& b) const {
    switch (b.kind) {
      case SlotBasis::Kind::One:
        return 1.0;
      case SlotBasis::Kind::Cos:
        return cosk(s, b.degree);
      case SlotBasis::Kind::Sin:
        return sink(s, b.degree);
      case SlotBasis::Kind::Pow:
        return powm(s, b.degree);
    }
    return 1.0;
  }

  double derivative(int s, const SlotBasis& b) const {
    switch (b.kind) {
      case SlotBasis::Kind::One:
        return 0.0;
      case SlotBasis::Kind::Cos:
        return -b.degree * sink(s, b.degree);
      case SlotBasis::Kind::Sin:
        return b.degree * cosk(s, b.degree);
      case SlotBasis::Kind::Pow:
        return b.degree == 1 ? 1.0 : b.degree * powm(s, b.degree - 1);
    }
    return 0.0;
  }
};

}  // namespace

HamiltonianSpec::HamiltonianSpec(PhaseSpace space, Form form)
    : space_(std::move(space)), form_(std::move(form)) {
  if (auto* q = std::get_if<QuadraticTable>(&form_)) {
    validate_quadratic(space_, *q);
  } else if (auto* p = std::get_if<TrigPoly>(&form_)) {
    validate_trig_poly(space_, *p);
  } else if (auto* b = std::get_if<BumpPath>(&form_)) {
    validate_bump(space_, *b);
  } else {
    const PhaseSpace pend = PhaseSpace::cylinder(+1);
    if (space_ != pend) throw DomainError("pendulum lives on the standard cylinder");
  }
}

HamiltonianSpec HamiltonianSpec::quadratic(PhaseSpace space, QuadraticTable table) {
  return HamiltonianSpec(std::move(space), Form(std::move(table)));
}

HamiltonianSpec HamiltonianSpec::quadratic_constant(PhaseSpace space, Eigen::MatrixXd q) {
  QuadraticTable table;
  table.times = {0.0};
  table.coeffs = {std::move(q)};
  return quadratic(std::move(space), std::move(table));
}

HamiltonianSpec HamiltonianSpec::trig_poly(PhaseSpace space, TrigPoly poly) {
  return HamiltonianSpec(std::move(space), Form(std::move(poly)));
}

HamiltonianSpec HamiltonianSpec::bump_path(PhaseSpace space, BumpPath path) {
  return HamiltonianSpec(std::move(space), Form(std::move(path)));
}

HamiltonianSpec HamiltonianSpec::pendulum() {
  return HamiltonianSpec(PhaseSpace::cylinder(+1), Form(Pendulum{}));
}

HamiltonianSpec HamiltonianSpec::zero(PhaseSpace space) {
  TrigPoly poly;
  return trig_poly(std::move(space), std::move(poly));
}

double HamiltonianSpec::value(const Eigen::VectorXd& z, double t) const {
  if (z.size() != space_.dim()) throw DomainError("Hamiltonian value: dimension mismatch");
  if (const auto* q = std::get_if<QuadraticTable>(&form_)) {
    return 0.5 * z.dot(q->at(t) * z);
  }
  if (const auto* poly = std::get_if<TrigPoly>(&form_)) {
    const TrigAtomTable table(*poly, z);
    double acc = 0.0;
    for (const TrigPolyTerm& term : poly->terms) {
      double prod = term.coeff;
      for (int s = 0; s < int(z.size()) && prod != 0.0; ++s)
        prod *= table.value(s, term.basis[s]);
      acc += prod;
    }
    return acc;
  }
  if (const auto* bump = std::get_if<BumpPath>(&form_)) {
    Eigen::VectorXd w = relative_offset(space_, *bump, z);
    double dd = bump->disp.squaredNorm();
    double u = dd > 0.0 ? std::clamp(w.dot(bump->disp) / dd, 0.0, 1.0) : 0.0;
    double d = (w - u * bump->disp).norm();
    double chi = bump_profile(d, bump->rho);
    if (chi == 0.0) return 0.0;
    // Linear form whose field is the constant translation by disp: the
    // gradient must equal Omega^{-1} disp = -Omega disp blockwise.
    Eigen::VectorXd g = Eigen::VectorXd::Zero(space_.dim());
    for (const PhaseSpace::SlotPair& p : space_.slot_pairs()) {
      g[p.a] = -p.sign * bump->disp[p.b];
      g[p.b] = p.sign * bump->disp[p.a];
    }
    return chi * g.dot(w);
  }
  // Pendulum.
  return 0.5 * z[1] * z[1] - std::cos(z[0]);
}

Eigen::VectorXd HamiltonianSpec::gradient(const Eigen::VectorXd& z, double t) const {
  if (z.size() != space_.dim())
    throw DomainError("Hamiltonian gradient: dimension mismatch");
  const int n = space_.dim();
  if (const auto* q = std::get_if<QuadraticTable>(&form_)) {
    return q->at(t) * z;
  }
  if (const auto* poly = std::get_if<TrigPoly>(&form_)) {
    const TrigAtomTable table(*poly, z);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    std::vector<double> vals(n);
    for (const TrigPolyTerm& term : poly->terms) {
      for (int s = 0; s < n; ++s) vals[s] = table.value(s, term.basis[s]);
      for (int s = 0; s < n; ++s) {
        if (term.basis[s].kind == SlotBasis::Kind::One) continue;
        double prod = term.coeff * table.derivative(s, term.basis[s]);
        for (int r = 0; r < n && prod != 0.0; ++r)
          if (r != s) prod *= vals[r];
        grad[s] += prod;
      }
    }
    return grad;
  }
  if (const auto* bump = std::get_if<BumpPath>(&form_)) {
    Eigen::VectorXd w = relative_offset(space_, *bump, z);
    double dd = bump->disp.squaredNorm();
    double u = dd > 0.0 ? std::clamp(w.dot(bump->disp) / dd, 0.0, 1.0) : 0.0;
    Eigen::VectorXd res = w - u * bump->disp;
    double d = res.norm();
    double chi = bump_profile(d, bump->rho);
    if (chi == 0.0) return Eigen::VectorXd::Zero(n);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (const PhaseSpace::SlotPair& p : space_.slot_pairs()) {
      g[p.a] = -p.sign * bump->disp[p.b];
      g[p.b] = p.sign * bump->disp[p.a];
    }
    Eigen::VectorXd grad = chi * g;
    double chip = bump_profile_prime(d, bump->rho);
    if (chip != 0.0 && d > 1e-300) grad += (chip * g.dot(w) / d) * res;
    return grad;
  }
  Eigen::VectorXd grad(2);
  grad[0] = std::sin(z[0]);
  grad[1] = z[1];
  return grad;
}

}  // namespace clonelab
