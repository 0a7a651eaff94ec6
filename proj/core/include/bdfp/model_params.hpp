#pragma once

#include <cstddef>

namespace bdfp {

struct FixedPointOptions {
  double tolerance = 1e-11;
  int max_iterations = 200;
  double damping = 1.0;  // in (0, 1]; 1 = undamped Picard
};

// Physical and numerical parameters of the dressed-vacuum model. Units are
// relativistic: bare electron mass = c = hbar = 1, momenta in units of the
// bare mass.
struct ModelParams {
  double alpha = 0.0;        // fine-structure coupling, >= 0
  double cutoff = 30.0;      // momentum cutoff Lambda, > 0
  std::size_t radial_points = 1024;
  FixedPointOptions fixed_point;

  void validate() const;  // throws invalid_parameter
};

}  // namespace bdfp
