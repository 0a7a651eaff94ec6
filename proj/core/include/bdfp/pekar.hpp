#pragma once

#include <string>
#include <vector>

#include "bdfp/radial_profile.hpp"

namespace bdfp {

// Energy split of the Choquard-Pekar functional E(φ) = ‖∇φ‖² − D(|φ|²,|φ|²)
// on unit-norm radial φ.
struct PekarEnergy {
  double kinetic = 0.0;
  double potential = 0.0;
  double energy = 0.0;  // kinetic - potential
};

// Hartree potential of a radial density (values = ρ(r)):
// W(r) = 4π [ (1/r) ∫₀^r ρ s² ds + ∫_r^∞ ρ s ds ]. The exterior tail beyond
// r_max is the exact monopole (zero residual density assumed).
std::vector<double> hartree_potential(const RadialProfile& rho);

// Throws unnormalized-input when |‖φ‖² − 1| > 1e-8.
PekarEnergy pekar_energy(const RadialProfile& phi);
// Same functional without the normalization gate (used by the gradient
// check, which perturbs off the sphere).
PekarEnergy pekar_energy_raw(const RadialProfile& phi);

// Exact gradient of the discrete functional with respect to u = rφ
// (Dirichlet ends); pairs with finite differences of pekar_energy_raw.
std::vector<double> pekar_energy_gradient_u(const RadialProfile& phi);

struct PekarResult {
  RadialProfile profile;  // normalized positive minimizer
  double kinetic = 0.0;
  double potential = 0.0;
  double energy = 0.0;
  double mu = 0.0;        // Euler-Lagrange multiplier, ⟨EL map φ, φ⟩
  double residual = 0.0;  // sup-norm of -Δφ - 2Wφ - μφ on the grid
  int iterations = 0;
  std::vector<double> energy_history;
};

struct PekarOptions {
  double tolerance = 1e-8;
  int max_iterations = 200000;
  double time_step = 0.5;
};

// Normalized semi-implicit gradient flow (imaginary time) on the radial
// Euler-Lagrange map -u'' - 2W[φ²]u acting on u = rφ, initialized from a
// Gaussian of the given width.
PekarResult minimize_pekar(const RadialProfile& grid_layout, double init_width,
                           const PekarOptions& opts = {});

// Profile export: header `# E=<v> T=<v> V=<v> mu=<v> residual=<v>`,
// rows `r,phi`.
void save_pekar_csv(const PekarResult& result, const std::string& path);
PekarResult load_pekar_csv(const std::string& path);

}  // namespace bdfp
