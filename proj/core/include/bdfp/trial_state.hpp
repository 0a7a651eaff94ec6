#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "bdfp/dirac_projectors.hpp"
#include "bdfp/dispersion.hpp"
#include "bdfp/pekar.hpp"
#include "bdfp/radial_profile.hpp"
#include "bdfp/spinor_field.hpp"

namespace bdfp {

// C-symmetric rank-2 excitation of the dressed vacuum:
//   Q = |ψ₊⟩⟨ψ₊| − |ψ₋⟩⟨ψ₋|,  ψ₊ ∈ Ran 𝒫⁰₊ unit,  ψ₋ = Cψ₊ ∈ Ran 𝒫⁰₋.
// Built from a radial profile φ placed in the first spinor component,
// dilated by λ, band-limited, and projected to the positive sector.
struct TrialState {
  SpinorField psi_plus;   // position representation, unit norm
  SpinorField psi_minus;  // = C psi_plus
  double lambda = 0.0;
  double norm_cutoff = 0.0;  // ‖Π_Λ φ_λ‖ with φ_λ grid-normalized
  double norm_plus = 0.0;    // ‖𝒫⁰₊ Π_Λ φ_λ‖
};

TrialState build_trial_state(const RadialProfile& profile, double lambda,
                             const CartesianGrid& grid, const DispersionTable& table);

// Energy of the rank-2 state: kinetic 2⟨|𝒟⁰|ψ₊,ψ₊⟩ minus α times the
// exchange pair (Hartree-like minus overlap), both Coulomb forms evaluated
// with the minimum-image lattice kernel (the exchange oracle's kernel).
struct EnergyBreakdown {
  double kinetic = 0.0;
  double exchange_hartree = 0.0;   // D(|ψ₊|², |ψ₋|²)
  double exchange_overlap = 0.0;   // Re D(ψ₊*ψ₋, ψ₊*ψ₋)
  double total = 0.0;              // kinetic − α(exchange_hartree − exchange_overlap)
  double alpha = 0.0;
  double lambda = 0.0;
};

EnergyBreakdown rank2_energy(const TrialState& state, double alpha, const DispersionTable& table);

// Direct O(N⁶) double sum of Tr_{C⁴}|Q(x,y)|² v(x−y) h⁶ with the shared
// minimum-image kernel; N ≤ 12 per axis (too-large-grid otherwise). ψ₋ may
// be any field of the same shape (rank-1 checks pass ψ₋ = 0).
double exchange_oracle(const TrialState& state);

// ρ(x) = |ψ₊(x)|² − |ψ₋(x)|²; identically ~0 for conjugate pairs.
DensityField state_density(const TrialState& state);

// Tr(Q^{++}) + Tr(Q^{--}) relative to the table's spectral split.
double state_p0_trace(const TrialState& state, const DispersionTable& table);

// ⟨|∇|ψ₊, ψ₊⟩, used by the Kato-type sanity floor.
double kinetic_momentum_expectation(const TrialState& state);

struct ScanResult {
  std::vector<double> lambdas;            // sorted ascending
  std::vector<EnergyBreakdown> energies;  // aligned with lambdas
  std::size_t best = 0;                   // argmin of total
  double lambda_star = 0.0;               // g₁'(0)²/(αm)
};

// Geometric λ grid over [span_lo·λ*, span_hi·λ*].
std::vector<double> make_lambda_grid(double lambda_star, std::size_t points, double span_lo = 0.3,
                                     double span_hi = 3.0);

// Evaluates the trial energy over the λ list and refines once around the
// argmin (10 extra geometric points between its neighbors).
ScanResult lambda_scan(const RadialProfile& profile, double alpha, const DispersionTable& table,
                       const CartesianGrid& grid, const std::vector<double>& lambdas,
                       bool refine = true);

// Box auto-sizing rule: L = max(scale·λ*, min_length).
double auto_box_length(double lambda_star, double scale = 40.0, double min_length = 12.0);

struct SweepRow {
  double alpha = 0.0;
  double e_min = 0.0;
  double two_m = 0.0;
  double slope = 0.0;            // (E_min − 2m)/α²; NaN for α = 0
  double reference_slope = 0.0;  // m·E_CP/g₁'(0)²; NaN for α = 0
  double lambda_star = 0.0;
  double argmin_lambda = 0.0;
};

struct SweepConfig {
  int cartesian_points = 64;
  double box_scale = 40.0;
  double min_box = 12.0;
  std::size_t scan_points = 21;
  double span_lo = 0.3;
  double span_hi = 3.0;
};

using TableProvider = std::function<DispersionTable(const ModelParams&)>;

// Per-α scan minima and slopes against the reference m·E_CP/g₁'(0)². The
// provider lets callers cache dispersion solves; pass {} to solve directly.
std::vector<SweepRow> alpha_sweep(const std::vector<double>& alphas, const ModelParams& base,
                                  const PekarResult& pekar, const SweepConfig& config = {},
                                  const TableProvider& tables = {});

}  // namespace bdfp
