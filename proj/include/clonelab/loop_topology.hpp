#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clonelab/cloning_linear.hpp"
#include "clonelab/dynamics.hpp"
#include "clonelab/phase_space.hpp"

namespace clonelab {

// Parametric description of a closed loop over s in [0, 1): per slot a linear
// winding part (angular slots only), a constant offset, and a finite Fourier
// tail.  Evaluation returns unwrapped chart values.
struct LoopShape {
  struct Slot {
    int winding = 0;
    double offset = 0.0;
    // Harmonic k entry (a, b) contributes a*cos(2 pi k s) + b*sin(2 pi k s).
    std::vector<std::pair<double, double>> harmonics;
  };
  std::vector<Slot> slots;

  Eigen::VectorXd at(double s) const;
};

// A sampled closed loop.  `adequate` certifies that every consecutive (and
// closing) angular step is below pi/2, the margin winding extraction needs.
struct Loop {
  PhaseSpace space;
  std::vector<Eigen::VectorXd> samples;  // wrapped; closing edge implied
  std::optional<LoopShape> shape;        // present when analytically generated
  bool adequate = false;
  double max_angular_step = 0.0;

  int count() const { return int(samples.size()); }
};

// Sample a shape at `count` >= 8 uniform parameters.
Loop make_loop(const PhaseSpace& space, const LoopShape& shape, int count);

// Build a loop directly from sample points (shape unknown).
Loop loop_from_samples(const PhaseSpace& space, std::vector<Eigen::VectorXd> samples);

// Winding of a cyclic angle sequence: principal-value increments summed and
// divided by 2 pi.  Requires every step below pi (ResolutionError otherwise);
// the rounded total must sit within 0.05 of an integer (ConsistencyError).
int winding_number(std::span<const double> angles);

// Winding per angular slot, ordered by slot index.  Requires adequacy.
Eigen::VectorXi winding_vector(const Loop& loop);

// Transport every sample through the isotopy.  If the image fails adequacy
// and the loop carries a shape, the sampling is doubled (at most `max_doublings`
// times) and retried; otherwise ResolutionError.
Loop transport_loop(const Isotopy& iso, const Loop& loop, double step,
                    int max_doublings = 4);

enum class Verdict { Obstructed, Consistent };
const char* to_string(Verdict v);

// Outcome of probing a candidate isotopy with a loop: the loop is lifted to
// (x(s), b, r) in the product space, transported, and the copy-slot windings
// are compared against what exact cloning would require.
struct NoGoCertificate {
  Eigen::VectorXi input_windings;        // product-space windings of the lifted probe
  Eigen::VectorXi transported_windings;  // after transport
  Eigen::VectorXi required_windings;     // exact cloning target on both system copies
  std::vector<int> compared_slots;       // indices into the winding vectors
  Verdict verdict = Verdict::Consistent;
  std::string witness_id;
  int probe_samples = 0;
  int transported_samples = 0;
  double step = 0.0;
};

// Lift a probe loop on the system space to the product space (blank/machine
// slots constant) and return it with the lifting triple layout.
Loop lift_probe(const CloneSetup& setup, const Loop& probe);

// Certificate for an isotopy witness.  The setup's witness must be an Isotopy
// on the product space.
NoGoCertificate no_go_certificate(const CloneSetup& setup, const Loop& probe,
                                  double step, const std::string& witness_id = "",
                                  int max_doublings = 4);

// Certificate for the pointwise duplication assignment (x, b, r) -> (x, x, r):
// not an isotopy, evaluated sample by sample.
NoGoCertificate pointwise_duplication_certificate(const CloneSetup& setup,
                                                  const Loop& probe);

}  // namespace clonelab
