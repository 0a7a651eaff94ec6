#pragma once

#include "bdfp/dispersion.hpp"
#include "bdfp/spinor_field.hpp"

namespace bdfp {

enum class SpectralSign { plus, minus };

// Spectral projectors of the dressed Dirac operator: Fourier multiplier
// (1 ± D̂⁰(k)/e(k))/2 with D̂⁰(k) = g0(|k|)β + g1(|k|) α·(k/|k|). The table is
// interpolated radially (monotone cubic). Requires the table to cover the
// full momentum lattice: throws table-range otherwise.
SpinorField apply_free_projector(const SpinorField& f, const DispersionTable& table,
                                 SpectralSign sign);

// Multiplication by e(|k|) = sqrt(g0² + g1²) in momentum space.
SpinorField apply_abs_D0(const SpinorField& f, const DispersionTable& table);

// Multiplication by |k| (used for the kinetic sanity floor).
SpinorField apply_abs_momentum(const SpinorField& f);

}  // namespace bdfp
