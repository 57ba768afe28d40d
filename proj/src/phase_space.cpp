#include "clonelab/phase_space.hpp"

#include <cmath>
#include <sstream>

namespace clonelab {

double wrap_angle(double theta) {
  if (!std::isfinite(theta)) throw DomainError("wrap_angle: non-finite angle");
  double x = std::fmod(theta, kTwoPi);
  if (x < 0.0) x += kTwoPi;
  if (x >= kTwoPi) x = 0.0;  // fmod rounding can land exactly on 2*pi
  return x;
}

double arc_delta(double from, double to) {
  double d = std::remainder(to - from, kTwoPi);
  if (d <= -kPi) d += kTwoPi;
  return d;
}

namespace {

void validate_factor(const Factor& f) {
  if (f.form_sign != 1 && f.form_sign != -1)
    throw DomainError("PhaseSpace: form_sign must be +1 or -1");
  switch (f.kind) {
    case FactorKind::Euclidean:
      if (f.dim < 2 || f.dim % 2 != 0)
        throw DomainError("PhaseSpace: Euclidean factor dimension must be even and >= 2");
      break;
    case FactorKind::Cylinder:
    case FactorKind::Torus2:
      if (f.dim != 2)
        throw DomainError("PhaseSpace: Cylinder/Torus2 factors are two dimensional");
      break;
  }
}

}  // namespace

PhaseSpace::PhaseSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw DomainError("PhaseSpace: at least one factor required");
  int off = 0;
  for (const Factor& f : factors_) {
    validate_factor(f);
    offsets_.push_back(off);
    switch (f.kind) {
      case FactorKind::Euclidean:
        for (int k = 0; k < f.dim; k += 2) {
          angular_.push_back(false);
          angular_.push_back(false);
          pairs_.push_back({off + k, off + k + 1, double(f.form_sign)});
        }
        break;
      case FactorKind::Cylinder:
        angular_.push_back(true);
        angular_.push_back(false);
        pairs_.push_back({off, off + 1, double(f.form_sign)});
        break;
      case FactorKind::Torus2:
        angular_.push_back(true);
        angular_.push_back(true);
        pairs_.push_back({off, off + 1, double(f.form_sign)});
        break;
    }
    off += f.dim;
  }
  dim_ = off;
  for (int s = 0; s < dim_; ++s)
    if (angular_[s]) angular_slots_.push_back(s);
}

PhaseSpace PhaseSpace::euclidean(int dim, int form_sign) {
  return PhaseSpace({Factor{FactorKind::Euclidean, dim, form_sign}});
}

PhaseSpace PhaseSpace::cylinder(int form_sign) {
  return PhaseSpace({Factor{FactorKind::Cylinder, 2, form_sign}});
}

PhaseSpace PhaseSpace::torus2(int form_sign) {
  return PhaseSpace({Factor{FactorKind::Torus2, 2, form_sign}});
}

PhaseSpace PhaseSpace::product(const std::vector<PhaseSpace>& parts) {
  std::vector<Factor> all;
  for (const PhaseSpace& p : parts)
    all.insert(all.end(), p.factors().begin(), p.factors().end());
  return PhaseSpace(std::move(all));
}

Eigen::MatrixXd PhaseSpace::pairing_matrix() const {
  Eigen::MatrixXd om = Eigen::MatrixXd::Zero(dim_, dim_);
  for (const SlotPair& p : pairs_) {
    om(p.a, p.b) = p.sign;
    om(p.b, p.a) = -p.sign;
  }
  return om;
}

bool PhaseSpace::operator==(const PhaseSpace& other) const {
  if (factors_.size() != other.factors_.size()) return false;
  for (size_t i = 0; i < factors_.size(); ++i) {
    const Factor& a = factors_[i];
    const Factor& b = other.factors_[i];
    if (a.kind != b.kind || a.dim != b.dim || a.form_sign != b.form_sign) return false;
  }
  return true;
}

Eigen::VectorXd wrap_coords(const PhaseSpace& space, Eigen::VectorXd raw) {
  if (raw.size() != space.dim())
    throw DomainError("wrap_coords: coordinate dimension mismatch");
  if (!raw.allFinite()) throw DomainError("wrap_coords: non-finite coordinates");
  for (int s : space.angular_slots()) raw[s] = wrap_angle(raw[s]);
  return raw;
}

PhasePoint make_point(const PhaseSpace& space, const Eigen::VectorXd& raw) {
  return PhasePoint{wrap_coords(space, raw)};
}

double chart_distance(const PhaseSpace& space, const Eigen::VectorXd& a,
                      const Eigen::VectorXd& b) {
  if (a.size() != space.dim() || b.size() != space.dim())
    throw DomainError("chart_distance: coordinate dimension mismatch");
  double acc = 0.0;
  for (int s = 0; s < space.dim(); ++s) {
    double d = space.angular(s) ? arc_delta(a[s], b[s]) : (b[s] - a[s]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

double chart_distance(const PhaseSpace& space, const PhasePoint& a, const PhasePoint& b) {
  return chart_distance(space, a.coords, b.coords);
}

double symplectic_pairing(const PhaseSpace& space, const TangentVector& u,
                          const TangentVector& v) {
  if (u.components.size() != space.dim() || v.components.size() != space.dim())
    throw DomainError("symplectic_pairing: component dimension mismatch");
  double acc = 0.0;
  for (const PhaseSpace::SlotPair& p : space.slot_pairs())
    acc += p.sign * (u.components[p.a] * v.components[p.b] -
                     u.components[p.b] * v.components[p.a]);
  return acc;
}

}  // namespace clonelab
