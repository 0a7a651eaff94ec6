#pragma once

#include <cstddef>
#include <vector>

#include "bdfp/pchip.hpp"

namespace bdfp {

// Real radial function φ(r) on an increasing grid of positive radii, with 1D
// quadrature weights for ∫₀^{R_max} dr (the 4πr² measure is applied by the
// functionals). values may also hold a radial density, depending on use.
struct RadialProfile {
  std::vector<double> radii;
  std::vector<double> weights;
  std::vector<double> values;

  std::size_t size() const { return radii.size(); }
  double r_max() const { return radii.back(); }
  double norm_squared() const;  // ∫ 4πr² φ² dr
  void normalize();
  void validate() const;
};

// Uniform grid r_i = i·h, i = 1..nodes, h = r_max/nodes (values zeroed).
RadialProfile make_radial_grid(std::size_t nodes, double r_max);

// L²-normalized Gaussian exp(-r²/(2 width²)) on the given grid layout.
RadialProfile make_gaussian_profile(const RadialProfile& grid_layout, double width);

// Interpolant with an even extension through r = 0 (φ'(0) = 0) and zero
// beyond r_max; used to sample profiles onto 3D grids.
PchipInterpolant profile_interpolant(const RadialProfile& profile);

}  // namespace bdfp
