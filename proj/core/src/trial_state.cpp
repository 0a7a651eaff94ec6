#include "bdfp/trial_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bdfp/coulomb.hpp"
#include "bdfp/errors.hpp"

namespace bdfp {
namespace {

// ⟨|𝒟⁰|ψ, ψ⟩ over the table's band. Trial states are 𝒫⁰₊-projected, hence
// band-limited, so skipping |k| > Λ is exact and keeps sub-lattice cutoffs
// usable on grids whose lattice extends beyond the table.
double band_kinetic(const SpinorField& psi, const DispersionTable& table) {
  const SpinorField k = psi.representation == Representation::momentum ? psi
                                                                       : fourier_forward(psi);
  const PchipInterpolant g0(table.grid.nodes, table.g0);
  const PchipInterpolant g1(table.grid.nodes, table.g1);
  const int n = k.grid.points_per_axis;
  const double band = table.cutoff * (1.0 + 1e-12);
  double sum = 0.0;
  std::size_t idx = 0;
  for (int ix = 0; ix < n; ++ix) {
    const double kx = k.grid.momentum_component(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = k.grid.momentum_component(iy);
      for (int iz = 0; iz < n; ++iz, ++idx) {
        const double kz = k.grid.momentum_component(iz);
        const double kk = std::sqrt(kx * kx + ky * ky + kz * kz);
        if (kk > band) continue;
        const double e = std::hypot(g0(kk), g1(kk));
        double mag = 0.0;
        for (int c = 0; c < 4; ++c) mag += std::norm(k.data[c][idx]);
        sum += e * mag;
      }
    }
  }
  return sum * k.grid.momentum_cell_volume();
}

}  // namespace

TrialState build_trial_state(const RadialProfile& profile, double lambda,
                             const CartesianGrid& grid, const DispersionTable& table) {
  if (!(lambda > 0.0)) throw Error(Errc::invalid_parameter, "lambda must be > 0");
  grid.validate();
  const PchipInterpolant phi = profile_interpolant(profile);

  SpinorField field = SpinorField::zero(grid, Representation::position);
  const int n = grid.points_per_axis;
  const double h = grid.spacing();
  const double c = 0.5 * grid.box_length;
  const double amp = std::pow(lambda, -1.5);
  const double r_max = profile.r_max();
  std::size_t idx = 0;
  for (int ix = 0; ix < n; ++ix) {
    const double dx = ix * h - c;
    for (int iy = 0; iy < n; ++iy) {
      const double dy = iy * h - c;
      for (int iz = 0; iz < n; ++iz, ++idx) {
        const double dz = iz * h - c;
        const double r = std::sqrt(dx * dx + dy * dy + dz * dz) / lambda;
        field.data[0][idx] = r <= r_max ? amp * phi(r) : 0.0;
      }
    }
  }
  const double n0 = norm(field);
  if (!(n0 > 0.0)) throw Error(Errc::resolution_insufficient, "profile vanished on the grid");
  for (auto& v : field.data[0]) v /= n0;

  // Band-limit to the symmetric part of the lattice as well: Nyquist planes
  // (index -N/2, no +N/2 partner) break the k -> -k pairing that makes
  // psi_minus = C psi_plus exactly orthogonal to the positive sector.
  const double band = std::min(table.cutoff, grid.max_axis_momentum());
  SpinorField cut = apply_cutoff(field, band);
  TrialState state;
  state.lambda = lambda;
  state.norm_cutoff = norm(cut);
  if (state.norm_cutoff * state.norm_cutoff < 0.99)
    throw Error(Errc::resolution_insufficient,
                "cutoff removes more than 1% of the profile norm (lambda too small "
                "for this box/cutoff)");

  SpinorField plus = apply_free_projector(cut, table, SpectralSign::plus);
  state.norm_plus = norm(plus);
  for (auto& comp : plus.data)
    for (auto& v : comp) v /= state.norm_plus;
  state.psi_plus = std::move(plus);
  state.psi_minus = charge_conjugate(state.psi_plus);
  return state;
}

EnergyBreakdown rank2_energy(const TrialState& state, double alpha,
                             const DispersionTable& table) {
  if (!(state.psi_plus.grid == state.psi_minus.grid))
    throw Error(Errc::grid_mismatch, "trial state fields live on different grids");
  EnergyBreakdown e;
  e.alpha = alpha;
  e.lambda = state.lambda;
  e.kinetic = 2.0 * band_kinetic(state.psi_plus, table);
  const ScalarField rho_p = pair_density(state.psi_plus, state.psi_plus);
  const ScalarField rho_m = pair_density(state.psi_minus, state.psi_minus);
  const ScalarField rho_pm = pair_density(state.psi_plus, state.psi_minus);
  e.exchange_hartree = lattice_coulomb_energy(rho_p, rho_m).real();
  e.exchange_overlap = lattice_coulomb_energy(rho_pm, rho_pm).real();
  e.total = e.kinetic - alpha * (e.exchange_hartree - e.exchange_overlap);
  return e;
}

double exchange_oracle(const TrialState& state) {
  const CartesianGrid& grid = state.psi_plus.grid;
  if (grid.points_per_axis > 12)
    throw Error(Errc::too_large_grid, "exchange oracle is O(N^6); N must be <= 12");
  if (state.psi_plus.representation != Representation::position ||
      state.psi_minus.representation != Representation::position)
    throw Error(Errc::representation_mismatch, "oracle needs position-space fields");

  const int n = grid.points_per_axis;
  const std::size_t total = grid.total_points();
  const double h6 = grid.cell_volume() * grid.cell_volume();
  const auto& p = state.psi_plus.data;
  const auto& m = state.psi_minus.data;

  double sum = 0.0;
  for (std::size_t x = 0; x < total; ++x) {
    const int xi = static_cast<int>(x) / (n * n);
    const int xj = (static_cast<int>(x) / n) % n;
    const int xk = static_cast<int>(x) % n;
    for (std::size_t y = 0; y < total; ++y) {
      const int yi = static_cast<int>(y) / (n * n);
      const int yj = (static_cast<int>(y) / n) % n;
      const int yk = static_cast<int>(y) % n;
      const double v = lattice_coulomb_kernel(grid, xi - yi, xj - yj, xk - yk);
      double tr = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const cplx q = p[a][x] * std::conj(p[b][y]) - m[a][x] * std::conj(m[b][y]);
          tr += std::norm(q);
        }
      sum += tr * v;
    }
  }
  return sum * h6;
}

DensityField state_density(const TrialState& state) {
  const ScalarField rho_p = pair_density(state.psi_plus, state.psi_plus);
  const ScalarField rho_m = pair_density(state.psi_minus, state.psi_minus);
  DensityField out = rho_p;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = cplx((rho_p.data[i] - rho_m.data[i]).real(), 0.0);
  return out;
}

double state_p0_trace(const TrialState& state, const DispersionTable& table) {
  const SpinorField pp = apply_free_projector(state.psi_plus, table, SpectralSign::plus);
  const SpinorField pm = apply_free_projector(state.psi_minus, table, SpectralSign::plus);
  const SpinorField mp = apply_free_projector(state.psi_plus, table, SpectralSign::minus);
  const SpinorField mm = apply_free_projector(state.psi_minus, table, SpectralSign::minus);
  const double npp = norm(pp), npm = norm(pm), nmp = norm(mp), nmm = norm(mm);
  return (npp * npp - npm * npm) + (nmp * nmp - nmm * nmm);
}

double kinetic_momentum_expectation(const TrialState& state) {
  return inner_product(state.psi_plus, apply_abs_momentum(state.psi_plus)).real();
}

std::vector<double> make_lambda_grid(double lambda_star, std::size_t points, double span_lo,
                                     double span_hi) {
  if (!(lambda_star > 0.0) || points < 2 || !(span_lo > 0.0) || !(span_hi > span_lo))
    throw Error(Errc::invalid_parameter, "bad lambda grid request");
  std::vector<double> out(points);
  const double lo = span_lo * lambda_star, hi = span_hi * lambda_star;
  const double ratio = std::pow(hi / lo, 1.0 / static_cast<double>(points - 1));
  double v = lo;
  for (std::size_t i = 0; i < points; ++i, v *= ratio) out[i] = v;
  out.back() = hi;
  return out;
}

ScanResult lambda_scan(const RadialProfile& profile, double alpha, const DispersionTable& table,
                       const CartesianGrid& grid, const std::vector<double>& lambdas,
                       bool refine) {
  if (lambdas.size() < 2) throw Error(Errc::invalid_parameter, "lambda scan needs >= 2 points");
  const DispersionDiagnostics diag = dispersion_diagnostics(table);
  ScanResult scan;
  scan.lambda_star = alpha > 0.0
                         ? diag.g1_slope_at_0 * diag.g1_slope_at_0 / (alpha * diag.m)
                         : std::numeric_limits<double>::infinity();

  auto evaluate = [&](double lambda) {
    const TrialState state = build_trial_state(profile, lambda, grid, table);
    return rank2_energy(state, alpha, table);
  };

  std::vector<double> ls = lambdas;
  std::sort(ls.begin(), ls.end());
  std::vector<EnergyBreakdown> es;
  es.reserve(ls.size());
  for (const double l : ls) es.push_back(evaluate(l));

  auto argmin = [](const std::vector<EnergyBreakdown>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i].total < v[best].total) best = i;
    return best;
  };

  if (refine) {
    const std::size_t b = argmin(es);
    const double lo = b == 0 ? ls[0] : ls[b - 1];
    const double hi = b + 1 == ls.size() ? ls.back() : ls[b + 1];
    const std::size_t extra = 10;
    const double ratio = std::pow(hi / lo, 1.0 / static_cast<double>(extra + 1));
    double v = lo * ratio;
    for (std::size_t i = 0; i < extra; ++i, v *= ratio) {
      ls.push_back(v);
      es.push_back(evaluate(v));
    }
    // Keep lambdas sorted with energies aligned.
    std::vector<std::size_t> order(ls.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b2) {
      return ls[a] < ls[b2];
    });
    std::vector<double> ls2(ls.size());
    std::vector<EnergyBreakdown> es2(es.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      ls2[i] = ls[order[i]];
      es2[i] = es[order[i]];
    }
    ls.swap(ls2);
    es.swap(es2);
  }

  scan.lambdas = std::move(ls);
  scan.energies = std::move(es);
  scan.best = argmin(scan.energies);
  return scan;
}

double auto_box_length(double lambda_star, double scale, double min_length) {
  return std::max(scale * lambda_star, min_length);
}

std::vector<SweepRow> alpha_sweep(const std::vector<double>& alphas, const ModelParams& base,
                                  const PekarResult& pekar, const SweepConfig& config,
                                  const TableProvider& tables) {
  for (std::size_t i = 0; i + 1 < alphas.size(); ++i)
    if (!(alphas[i] < alphas[i + 1]))
      throw Error(Errc::invalid_parameter, "alphas must be sorted ascending");

  const TableProvider solve = tables ? tables : [](const ModelParams& p) {
    return solve_dressed_dispersion(p, build_radial_grid(p.radial_points, p.cutoff));
  };

  std::vector<SweepRow> rows;
  rows.reserve(alphas.size());
  for (const double alpha : alphas) {
    ModelParams params = base;
    params.alpha = alpha;
    const DispersionTable table = solve(params);
    const DispersionDiagnostics diag = dispersion_diagnostics(table);

    SweepRow row;
    row.alpha = alpha;
    row.two_m = 2.0 * diag.m;
    if (alpha == 0.0) {
      // Kinetic-only family: the infimum over λ is 2m, attained as λ → ∞.
      row.e_min = row.two_m;
      row.slope = std::numeric_limits<double>::quiet_NaN();
      row.reference_slope = std::numeric_limits<double>::quiet_NaN();
      row.lambda_star = std::numeric_limits<double>::infinity();
      row.argmin_lambda = std::numeric_limits<double>::quiet_NaN();
      rows.push_back(row);
      continue;
    }

    const double g1p = diag.g1_slope_at_0;
    row.lambda_star = g1p * g1p / (alpha * diag.m);
    const CartesianGrid grid = make_grid(
        config.cartesian_points, auto_box_length(row.lambda_star, config.box_scale, config.min_box));
    const std::vector<double> ls =
        make_lambda_grid(row.lambda_star, config.scan_points, config.span_lo, config.span_hi);
    const ScanResult scan = lambda_scan(pekar.profile, alpha, table, grid, ls);
    row.e_min = scan.energies[scan.best].total;
    row.argmin_lambda = scan.lambdas[scan.best];
    row.slope = (row.e_min - row.two_m) / (alpha * alpha);
    row.reference_slope = diag.m * pekar.energy / (g1p * g1p);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bdfp
