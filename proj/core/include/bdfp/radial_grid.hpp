#pragma once

#include <cstddef>
#include <vector>

namespace bdfp {

// Radial momentum grid on [0, cutoff] with quadrature weights for ∫₀^Λ dp.
// Nodes are graded toward p = 0 (algebraic stretching) so that slopes at the
// origin can be read off accurately.
struct RadialGrid {
  std::vector<double> nodes;               // strictly increasing, nodes[0]=0, nodes[n-1]=cutoff
  std::vector<double> quadrature_weights;  // positive, sum = cutoff

  std::size_t size() const { return nodes.size(); }
  double cutoff() const { return nodes.back(); }
  void validate() const;  // throws invalid_parameter on broken invariants
};

// grading = 1 gives a uniform grid; grading = 2 (default) packs nodes near 0.
RadialGrid build_radial_grid(std::size_t n, double cutoff, double grading = 2.0);

}  // namespace bdfp
