#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "bdfp/cartesian_grid.hpp"

namespace bdfp {

using cplx = std::complex<double>;

enum class Representation { position, momentum };

// Complex scalar field on the periodic grid; densities and pair densities.
struct ScalarField {
  CartesianGrid grid;
  Representation representation = Representation::position;
  std::vector<cplx> data;
};

// Real density is a ScalarField whose imaginary parts are zero by
// construction (see pair_density / state densities).
using DensityField = ScalarField;

// 4-component spinor field. Position samples live at x = (L/N)·(ix,iy,iz);
// momentum modes are stored in DFT order (wrap indices >= N/2 to negative k).
struct SpinorField {
  CartesianGrid grid;
  Representation representation = Representation::position;
  std::array<std::vector<cplx>, 4> data;

  static SpinorField zero(const CartesianGrid& grid, Representation rep);
};

// Discrete transforms consistent with the continuum convention
// f̂(k) = (2π)^{-3/2} ∫ f(x) e^{-ikx} dx; unitary with the cell measures
// (L/N)³ in position and (2π/L)³ in momentum.
SpinorField fourier_forward(const SpinorField& f);   // position -> momentum
SpinorField fourier_inverse(const SpinorField& f);   // momentum -> position
ScalarField fourier_forward(const ScalarField& f);
ScalarField fourier_inverse(const ScalarField& f);

// Charge conjugation Cψ = iβα₂ψ̄, componentwise (ψ̄₄, -ψ̄₃, -ψ̄₂, ψ̄₁) in
// position space. Antilinear involution with |Cψ(x)|² = |ψ(x)|². A field in
// momentum representation is conjugated through the transform.
SpinorField charge_conjugate(const SpinorField& f);

// Sharp momentum ball cutoff Π_Λ. Identity when Λ >= max lattice |k|; the
// stricter coverage contract lives in validate_cutoff_coverage.
SpinorField apply_cutoff(const SpinorField& f, double cutoff);

double norm(const SpinorField& f);
cplx inner_product(const SpinorField& a, const SpinorField& b);  // conjugate-linear in a

// Pointwise C⁴ inner product ψa(x)*·ψb(x); position representation only.
ScalarField pair_density(const SpinorField& a, const SpinorField& b);

// Binary field dump: little-endian, header {magic "BDFSPNR1", u32 N,
// u32 representation flag, f64 L}, then 4 component arrays of complex
// doubles in row-major (x,y,z) order.
void save_spinor(const SpinorField& f, const std::string& path);
SpinorField load_spinor(const std::string& path);

}  // namespace bdfp
