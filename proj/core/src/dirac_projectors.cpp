#include "bdfp/dirac_projectors.hpp"

#include <cmath>

#include "bdfp/errors.hpp"
#include "bdfp/pchip.hpp"

namespace bdfp {
namespace {

struct RadialSymbol {
  PchipInterpolant g0, g1;
};

RadialSymbol make_symbol(const DispersionTable& table) {
  return {PchipInterpolant(table.grid.nodes, table.g0),
          PchipInterpolant(table.grid.nodes, table.g1)};
}

void require_table_covers(const DispersionTable& table, const CartesianGrid& grid) {
  if (grid.max_lattice_momentum() > table.cutoff * (1.0 + 1e-9))
    throw Error(Errc::table_range, "grid momenta exceed the dispersion table domain");
}

// Applies fn(field, idx, kx, ky, kz) at every momentum mode, transforming
// from/back to position space when needed.
template <typename ModeFn>
SpinorField momentum_pointwise(const SpinorField& f, ModeFn&& fn) {
  const bool from_position = f.representation == Representation::position;
  SpinorField k = from_position ? fourier_forward(f) : f;
  const int n = k.grid.points_per_axis;
  std::size_t idx = 0;
  for (int ix = 0; ix < n; ++ix) {
    const double kx = k.grid.momentum_component(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = k.grid.momentum_component(iy);
      for (int iz = 0; iz < n; ++iz, ++idx) {
        const double kz = k.grid.momentum_component(iz);
        fn(k, idx, kx, ky, kz);
      }
    }
  }
  return from_position ? fourier_inverse(k) : k;
}

// v -> (σ·ω) v on a 2-spinor.
inline void sigma_dot(const double w[3], const cplx& a, const cplx& b, cplx& oa, cplx& ob) {
  oa = w[2] * a + cplx(w[0], -w[1]) * b;
  ob = cplx(w[0], w[1]) * a - w[2] * b;
}

}  // namespace

SpinorField apply_free_projector(const SpinorField& f, const DispersionTable& table,
                                 SpectralSign sign) {
  const RadialSymbol sym = make_symbol(table);
  const double s = sign == SpectralSign::plus ? 1.0 : -1.0;
  const double band = table.cutoff * (1.0 + 1e-12);
  return momentum_pointwise(f, [&](SpinorField& k, std::size_t idx, double kx, double ky,
                                   double kz) {
    const double kk = std::sqrt(kx * kx + ky * ky + kz * kz);
    if (kk > band) {
      // The spectral projectors live inside the cutoff space, so
      // 𝒫⁰₊ + 𝒫⁰₋ = Π_Λ holds identically.
      for (int c = 0; c < 4; ++c) k.data[c][idx] = cplx(0.0, 0.0);
      return;
    }
    const double g0 = sym.g0(kk);
    const double g1 = sym.g1(kk);
    const double e = std::hypot(g0, g1);
    double w[3] = {0.0, 0.0, 0.0};
    if (kk > 0.0) {
      w[0] = kx / kk;
      w[1] = ky / kk;
      w[2] = kz / kk;
    }
    const cplx v0 = k.data[0][idx], v1 = k.data[1][idx];
    const cplx v2 = k.data[2][idx], v3 = k.data[3][idx];
    // (α·ω)v swaps the 2-spinor blocks through σ·ω; β flips the lower block.
    cplx a0, a1, a2, a3;
    sigma_dot(w, v2, v3, a0, a1);
    sigma_dot(w, v0, v1, a2, a3);
    const double cb = s * g0 / e;
    const double ca = s * g1 / e;
    k.data[0][idx] = 0.5 * (v0 + cb * v0 + ca * a0);
    k.data[1][idx] = 0.5 * (v1 + cb * v1 + ca * a1);
    k.data[2][idx] = 0.5 * (v2 - cb * v2 + ca * a2);
    k.data[3][idx] = 0.5 * (v3 - cb * v3 + ca * a3);
  });
}

SpinorField apply_abs_D0(const SpinorField& f, const DispersionTable& table) {
  require_table_covers(table, f.grid);
  const RadialSymbol sym = make_symbol(table);
  return momentum_pointwise(
      f, [&](SpinorField& k, std::size_t idx, double kx, double ky, double kz) {
        const double kk = std::sqrt(kx * kx + ky * ky + kz * kz);
        const double e = std::hypot(sym.g0(kk), sym.g1(kk));
        for (int c = 0; c < 4; ++c) k.data[c][idx] *= e;
      });
}

SpinorField apply_abs_momentum(const SpinorField& f) {
  return momentum_pointwise(
      f, [&](SpinorField& k, std::size_t idx, double kx, double ky, double kz) {
        const double kk = std::sqrt(kx * kx + ky * ky + kz * kz);
        for (int c = 0; c < 4; ++c) k.data[c][idx] *= kk;
      });
}

}  // namespace bdfp
