#include "clonelab/loop_topology.hpp"

#include <cmath>
#include <sstream>

namespace clonelab {

Eigen::VectorXd LoopShape::at(double s) const {
  Eigen::VectorXd z(slots.size());
  for (size_t i = 0; i < slots.size(); ++i) {
    const Slot& sl = slots[i];
    double v = sl.offset + kTwoPi * sl.winding * s;
    for (size_t k = 0; k < sl.harmonics.size(); ++k) {
      double arg = kTwoPi * double(k + 1) * s;
      v += sl.harmonics[k].first * std::cos(arg) + sl.harmonics[k].second * std::sin(arg);
    }
    z[int(i)] = v;
  }
  return z;
}

namespace {

void finish_loop(Loop& loop) {
  const PhaseSpace& space = loop.space;
  const int count = loop.count();
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const Eigen::VectorXd& a = loop.samples[k];
    const Eigen::VectorXd& b = loop.samples[(k + 1) % count];
    for (int s : space.angular_slots())
      worst = std::max(worst, std::abs(arc_delta(a[s], b[s])));
  }
  loop.max_angular_step = worst;
  loop.adequate = worst < 0.5 * kPi;
}

}  // namespace

Loop make_loop(const PhaseSpace& space, const LoopShape& shape, int count) {
  if (count < 8) throw DomainError("make_loop: at least 8 samples required");
  if (int(shape.slots.size()) != space.dim())
    throw DomainError("make_loop: shape slot count mismatch");
  for (size_t i = 0; i < shape.slots.size(); ++i)
    if (shape.slots[i].winding != 0 && !space.angular(int(i)))
      throw DomainError("make_loop: winding on a non-angular slot");

  Loop loop{space, {}, shape, false, 0.0};
  loop.samples.reserve(count);
  for (int k = 0; k < count; ++k)
    loop.samples.push_back(wrap_coords(space, shape.at(double(k) / double(count))));
  finish_loop(loop);
  return loop;
}

Loop loop_from_samples(const PhaseSpace& space, std::vector<Eigen::VectorXd> samples) {
  if (samples.size() < 8) throw DomainError("loop_from_samples: at least 8 samples required");
  Loop loop{space, std::move(samples), std::nullopt, false, 0.0};
  for (Eigen::VectorXd& z : loop.samples) z = wrap_coords(space, std::move(z));
  finish_loop(loop);
  return loop;
}

int winding_number(std::span<const double> angles) {
  if (angles.size() < 2) throw DomainError("winding_number: need at least two angles");
  const size_t n = angles.size();
  double total = 0.0;
  for (size_t k = 0; k < n; ++k) {
    double d = arc_delta(angles[k], angles[(k + 1) % n]);
    if (std::abs(d) >= kPi - 1e-9) {
      std::ostringstream msg;
      msg << "winding_number: ambiguous angular step of " << d << " at index " << k;
      throw ResolutionError(msg.str());
    }
    total += d;
  }
  double turns = total / kTwoPi;
  int w = int(std::llround(turns));
  if (std::abs(turns - double(w)) >= 0.05) {
    std::ostringstream msg;
    msg << "winding_number: accumulated " << turns << " turns, not close to an integer";
    throw ConsistencyError(msg.str());
  }
  return w;
}

Eigen::VectorXi winding_vector(const Loop& loop) {
  if (!loop.adequate)
    throw ResolutionError("winding_vector: loop sampling is too coarse (adequacy failed)");
  const std::vector<int>& slots = loop.space.angular_slots();
  Eigen::VectorXi w(int(slots.size()));
  std::vector<double> angles(loop.samples.size());
  for (size_t i = 0; i < slots.size(); ++i) {
    for (size_t k = 0; k < loop.samples.size(); ++k) angles[k] = loop.samples[k][slots[i]];
    w[int(i)] = winding_number(angles);
  }
  return w;
}

Loop transport_loop(const Isotopy& iso, const Loop& loop, double step, int max_doublings) {
  if (loop.space != iso.space())
    throw DomainError("transport_loop: loop and isotopy spaces differ");
  const int count = loop.count();
  std::vector<double> params(count);
  std::vector<Eigen::VectorXd> image(count);
  for (int k = 0; k < count; ++k) {
    params[k] = double(k) / double(count);
    image[k] = transport(iso, PhasePoint{loop.samples[k]}, step).coords;
  }

  // Bisect only the source segments whose image steps are too wide; the total
  // sample ceiling matches max_doublings rounds of uniform doubling, but the
  // points go where a stage sheared the loop instead of everywhere.
  const std::vector<int>& ang = loop.space.angular_slots();
  auto too_wide = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (int s : ang)
      if (std::abs(arc_delta(a[s], b[s])) >= 0.5 * kPi) return true;
    return false;
  };
  long budget = (long(count) << max_doublings) - count;
  for (;;) {
    std::vector<std::pair<size_t, double>> splits;  // insert before index, at param
    const size_t n = params.size();
    for (size_t k = 0; k < n; ++k) {
      const size_t j = (k + 1) % n;
      if (!too_wide(image[k], image[j])) continue;
      const double next = j == 0 ? params[0] + 1.0 : params[j];
      splits.emplace_back(k + 1, 0.5 * (params[k] + next));
    }
    if (splits.empty()) break;
    if (!loop.shape)
      throw ResolutionError("transport_loop: transported loop inadequate and no shape to refine");
    if (long(splits.size()) > budget) {
      double worst = 0.0;
      for (size_t k = 0; k < n; ++k)
        for (int s : ang)
          worst = std::max(worst, std::abs(arc_delta(image[k][s], image[(k + 1) % n][s])));
      std::ostringstream msg;
      msg << "transport_loop: image still inadequate at the resolution cap of " << n
          << " samples (max angular step " << worst << ")";
      throw ResolutionError(msg.str());
    }
    budget -= long(splits.size());
    for (size_t i = splits.size(); i-- > 0;) {
      const auto& [at, s] = splits[i];
      const Eigen::VectorXd src = wrap_coords(loop.space, loop.shape->at(s));
      params.insert(params.begin() + long(at), s);
      image.insert(image.begin() + long(at),
                   transport(iso, PhasePoint{src}, step).coords);
    }
  }
  return loop_from_samples(loop.space, std::move(image));
}

const char* to_string(Verdict v) {
  return v == Verdict::Obstructed ? "OBSTRUCTED" : "CONSISTENT";
}

Loop lift_probe(const CloneSetup& setup, const Loop& probe) {
  if (probe.space != setup.sys) throw DomainError("lift_probe: probe is not on the system space");
  TripleSpace triple(setup.sys, setup.machine);
  const int m = setup.sys.dim();
  const int n = setup.machine.dim();

  std::optional<LoopShape> lifted_shape;
  if (probe.shape) {
    LoopShape shape;
    shape.slots = probe.shape->slots;
    for (int s = 0; s < m; ++s) {
      LoopShape::Slot slot;
      slot.offset = setup.blank.coords[s];
      shape.slots.push_back(slot);
    }
    for (int s = 0; s < n; ++s) {
      LoopShape::Slot slot;
      slot.offset = setup.machine_start.coords[s];
      shape.slots.push_back(slot);
    }
    lifted_shape = std::move(shape);
  }

  std::vector<Eigen::VectorXd> samples;
  samples.reserve(probe.samples.size());
  for (const Eigen::VectorXd& x : probe.samples)
    samples.push_back(triple.embed(x, setup.blank.coords, setup.machine_start.coords));

  Loop lifted = loop_from_samples(triple.product, std::move(samples));
  lifted.shape = std::move(lifted_shape);
  return lifted;
}

namespace {

NoGoCertificate assemble_certificate(const CloneSetup& setup, const Loop& lifted,
                                     const Loop& transported, const std::string& id,
                                     double step) {
  NoGoCertificate cert;
  cert.input_windings = winding_vector(lifted);
  cert.transported_windings = winding_vector(transported);
  cert.witness_id = id;
  cert.probe_samples = lifted.count();
  cert.transported_samples = transported.count();
  cert.step = step;

  const int sys_ang = int(setup.sys.angular_slots().size());
  cert.required_windings = cert.transported_windings;  // machine slots unconstrained
  for (int i = 0; i < sys_ang; ++i) {
    cert.required_windings[i] = cert.input_windings[i];
    cert.required_windings[sys_ang + i] = cert.input_windings[i];
    cert.compared_slots.push_back(i);
    cert.compared_slots.push_back(sys_ang + i);
  }
  cert.verdict = Verdict::Consistent;
  for (int slot : cert.compared_slots)
    if (cert.transported_windings[slot] != cert.required_windings[slot])
      cert.verdict = Verdict::Obstructed;
  return cert;
}

}  // namespace

NoGoCertificate no_go_certificate(const CloneSetup& setup, const Loop& probe, double step,
                                  const std::string& witness_id, int max_doublings) {
  const Isotopy* iso = std::get_if<Isotopy>(&setup.witness);
  if (!iso) throw DomainError("no_go_certificate: setup witness must be an isotopy");
  Loop lifted = lift_probe(setup, probe);
  Loop transported = transport_loop(*iso, lifted, step, max_doublings);
  return assemble_certificate(setup, lifted, transported, witness_id, step);
}

NoGoCertificate pointwise_duplication_certificate(const CloneSetup& setup,
                                                  const Loop& probe) {
  Loop lifted = lift_probe(setup, probe);
  TripleSpace triple(setup.sys, setup.machine);
  std::vector<Eigen::VectorXd> out;
  out.reserve(lifted.samples.size());
  for (const Eigen::VectorXd& w : lifted.samples) {
    std::array<Eigen::VectorXd, 3> parts = triple.split(w);
    out.push_back(triple.embed(parts[0], parts[0], parts[2]));
  }
  Loop image = loop_from_samples(triple.product, std::move(out));
  return assemble_certificate(setup, lifted, image, "pointwise-duplication", 0.0);
}

}  // namespace clonelab
