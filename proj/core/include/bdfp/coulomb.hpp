#pragma once

#include "bdfp/spinor_field.hpp"

namespace bdfp {

// Coulomb bilinear form D(f,g) = 4π Σ_{k≠0} conj(f̂(k)) ĝ(k) / |k|²·(2π/L)³.
// The k=0 mode is excluded: exact for neutral densities, periodic-jellium
// convention otherwise. Inputs in position representation on the same grid.
cplx coulomb_energy(const ScalarField& f, const ScalarField& g);

// Coulomb form with the minimum-image lattice kernel: the real-space double
// sum Σ_{x,y} conj(f(x)) g(y) v(x−y) h⁶ with v(z) = 1/|z| at the minimum
// image and the z=0 cell replaced by its cell average, evaluated by FFT.
// For densities supported well inside a half box this reproduces the
// free-space Coulomb interaction; it is the kernel shared with the direct
// exchange oracle.
cplx lattice_coulomb_energy(const ScalarField& f, const ScalarField& g);

// Minimum-image kernel value at a lattice displacement index (mx,my,mz),
// exposed for the direct-sum oracle. h = grid spacing.
double lattice_coulomb_kernel(const CartesianGrid& grid, int mx, int my, int mz);

// Average of 1/|z| over the unit cube centered at the origin.
inline constexpr double kUnitCellCoulombAverage = 2.3800773639795539;

}  // namespace bdfp
