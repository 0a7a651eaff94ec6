#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bdfp/model_params.hpp"
#include "bdfp/radial_grid.hpp"

namespace bdfp {

// Sampled dressed dispersion (g0, g1) of the vacuum Dirac operator
//   D0 = g0(-i∇)β - i α·(∇/|∇|) g1(-i∇),     e(p) = sqrt(g0² + g1²).
// The free operator has g0 ≡ 1, g1(p) = p. The dressed pair solves the
// vacuum self-consistency equation, reduced to two radial integral
// equations (see dispersion.cpp for the kernel derivation):
//   g0(p) = 1 + (α/2π) ∫₀^Λ (q/p) Q0(z) g0(q)/e(q) dq
//   g1(p) = p + (α/2π) ∫₀^Λ (q/p) Q1(z) g1(q)/e(q) dq,  z = (p²+q²)/(2pq),
// with Q0, Q1 the Legendre functions of the second kind. The momentum-space
// Coulomb kernel constant behind the (α/2π) prefactor is 1/(2π²) under the
// unitary Fourier convention; it is cross-checked numerically against a
// direct 3D quadrature in the test suite.
struct DispersionTable {
  RadialGrid grid;
  std::vector<double> g0;
  std::vector<double> g1;
  double residual = 0.0;   // sup-norm distance moved by one more map application
  double alpha = 0.0;      // provenance
  double cutoff = 0.0;     // provenance
  double tolerance = 0.0;  // provenance (0 for free tables)
  int iterations = 0;
  std::vector<double> residual_history;  // one entry per iteration

  double e(std::size_t i) const;
  void validate() const;  // node-wise bounds: g0 >= 1, p <= g1 <= p*g0
};

DispersionTable free_dispersion(const RadialGrid& grid);

// Damped Picard iteration from the free dispersion. Throws no_convergence
// (with the residual history in the message) when max_iterations is hit.
DispersionTable solve_dressed_dispersion(const ModelParams& params, const RadialGrid& grid);

// One application of the self-consistency map; exposed so tests can verify
// the returned tables are genuine fixed points.
void apply_dispersion_map(const ModelParams& params, const DispersionTable& in,
                          std::vector<double>& g0_out, std::vector<double>& g1_out);

struct DispersionDiagnostics {
  double m = 0.0;                    // g0(0); also min over nodes of e(p)
  double g1_slope_at_0 = 0.0;        // one-sided second-order difference
  double g0_slope_at_0 = 0.0;
  double sup_g1_slope_minus_1 = 0.0;
  std::size_t argmin_e = 0;          // node index of min e(p)
};

DispersionDiagnostics dispersion_diagnostics(const DispersionTable& table);

// Cache format: UTF-8 CSV, one header line
//   # alpha=<v> cutoff=<v> n=<v> tol=<v> residual=<v>
// followed by rows p,g0,g1 at 17 significant digits.
void save_dispersion_csv(const DispersionTable& table, const std::string& path);
DispersionTable load_dispersion_csv(const std::string& path);

// Loads and rejects (invalid_parameter) any file whose alpha, cutoff or n
// differ from the request.
DispersionTable load_dispersion_csv_checked(const std::string& path, double alpha, double cutoff,
                                            std::size_t n);

}  // namespace bdfp
