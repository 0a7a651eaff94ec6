// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code = number of fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bdfp/coulomb.hpp"
#include "bdfp/pekar.hpp"
#include "bdfp/runner.hpp"
#include "bdfp/trial_state.hpp"
#include "test_support.hpp"

using namespace bdfp;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int number, const char* name) : number_(number), name_(name) {
    start_ = std::chrono::steady_clock::now();
  }

  void require(bool ok, const std::string& what) {
    if (!ok) issues_.push_back(what);
  }

  void finish(double time_budget_seconds) {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
    if (dt.count() >= time_budget_seconds)
      issues_.push_back("runtime " + std::to_string(dt.count()) + "s exceeds budget " +
                        std::to_string(time_budget_seconds) + "s");
    if (issues_.empty()) {
      std::printf("ACCEPTANCE %d [%s]: PASS (%.2f s)\n", number_, name_, dt.count());
    } else {
      ++g_failures;
      std::printf("ACCEPTANCE %d [%s]: FAIL (%.2f s)\n", number_, name_, dt.count());
      for (const auto& issue : issues_) std::printf("    - %s\n", issue.c_str());
    }
    std::fflush(stdout);
  }

 private:
  int number_;
  const char* name_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> issues_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

double sup_abs(const DensityField& d) {
  double s = 0.0;
  for (const auto& v : d.data) s = std::max(s, std::abs(v));
  return s;
}

void criterion_1_free_limit() {
  Criterion c(1, "free-limit exactness");
  ModelParams params;
  params.alpha = 0.0;
  params.cutoff = 30.0;
  params.radial_points = 1024;
  const DispersionTable t =
      solve_dressed_dispersion(params, build_radial_grid(params.radial_points, params.cutoff));
  double sup = 0.0;
  for (std::size_t i = 0; i < t.grid.size(); ++i) {
    sup = std::max(sup, std::abs(t.g0[i] - 1.0));
    sup = std::max(sup, std::abs(t.g1[i] - t.grid.nodes[i]));
  }
  c.require(sup <= 1e-12, "sup error " + fmt(sup) + " > 1e-12");
  c.finish(1.0);
}

void criterion_2_dressed_invariants() {
  Criterion c(2, "dressed dispersion invariants");
  ModelParams params;
  params.alpha = 0.05;
  params.cutoff = 30.0;
  params.radial_points = 1024;
  const DispersionTable t =
      solve_dressed_dispersion(params, build_radial_grid(params.radial_points, params.cutoff));
  bool bounds = true;
  for (std::size_t i = 0; i < t.grid.size(); ++i) {
    const double p = t.grid.nodes[i];
    bounds = bounds && t.g0[i] >= 1.0 && t.g1[i] >= p - 1e-12 &&
             t.g1[i] <= p * t.g0[i] + 1e-12;
  }
  c.require(bounds, "nodewise bounds 1<=g0, p<=g1<=p*g0 violated");
  const DispersionDiagnostics d = dispersion_diagnostics(t);
  c.require(std::abs(d.g0_slope_at_0) <= 1e-4,
            "|g0'(0)| = " + fmt(std::abs(d.g0_slope_at_0)) + " > 1e-4");
  c.require(d.sup_g1_slope_minus_1 <= 0.5,
            "sup|g1'-1| = " + fmt(d.sup_g1_slope_minus_1) + " > 0.5");
  c.require(d.argmin_e <= 1, "argmin e(p) at node " + std::to_string(d.argmin_e) +
                                 " (more than one cell from 0)");
  c.require(d.m == t.g0[0], "m != g0(0)");
  c.require(t.residual <= 1e-10, "fixed-point residual " + fmt(t.residual) + " > 1e-10");
  c.finish(60.0);
}

void criterion_3_pekar() {
  Criterion c(3, "Choquard-Pekar solver");
  const RadialProfile layout = make_radial_grid(4000, 40.0);
  const PekarResult r = minimize_pekar(layout, 3.0);
  const double bound = -1.0 / (3.0 * M_PI) + 1e-3;
  c.require(r.energy <= bound, "E = " + fmt(r.energy) + " above Gaussian bound " + fmt(bound));
  const double virial = std::abs(r.potential - 2.0 * r.kinetic) / r.kinetic;
  c.require(virial <= 1e-3, "virial deviation " + fmt(virial) + " > 1e-3");

  const PekarResult r2 = minimize_pekar(layout, 2.0);
  const PekarResult r5 = minimize_pekar(layout, 5.0);
  c.require(std::abs(r2.energy - r5.energy) <= 1e-6,
            "initializations disagree by " + fmt(std::abs(r2.energy - r5.energy)));

  // Finite-difference directional derivative against the assembled gradient.
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  RadialProfile phi = make_gaussian_profile(layout, 2.5);
  phi.normalize();
  const std::vector<double> grad = pekar_energy_gradient_u(phi);
  std::vector<double> dir(phi.size());
  for (auto& v : dir) v = g(rng);
  const double eps = 1e-6;
  auto shifted = [&](double tstep) {
    RadialProfile p = phi;
    for (std::size_t i = 0; i < p.size(); ++i) p.values[i] += tstep * dir[i] / p.radii[i];
    return pekar_energy_raw(p).energy;
  };
  const double fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
  double dot = 0.0;
  for (std::size_t i = 0; i < dir.size(); ++i) dot += grad[i] * dir[i];
  c.require(std::abs(fd - dot) <= 1e-6 * std::abs(dot),
            "gradient check relative error " + fmt(std::abs(fd - dot) / std::abs(dot)));
  c.finish(30.0);
}

void criterion_4_exchange_routes(std::vector<TrialState>& states, DispersionTable& table) {
  Criterion c(4, "exchange-route equivalence");
  const CartesianGrid grid = make_grid(10, 10.0);
  table = test::covering_free_table(grid);
  std::mt19937_64 rng(20240817);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const SpinorField raw = test::random_cutoff_field(rng, grid, 0.9 * grid.max_axis_momentum());
    SpinorField plus = apply_free_projector(raw, table, SpectralSign::plus);
    const double n = norm(plus);
    for (auto& comp : plus.data)
      for (auto& v : comp) v /= n;
    TrialState s;
    s.lambda = 1.0;
    s.norm_cutoff = 1.0;
    s.norm_plus = n;
    s.psi_plus = std::move(plus);
    s.psi_minus = charge_conjugate(s.psi_plus);

    const EnergyBreakdown e = rank2_energy(s, 0.1, table);
    const double wedge = 2.0 * (e.exchange_hartree - e.exchange_overlap);
    const double oracle = exchange_oracle(s);
    worst = std::max(worst, std::abs(wedge - oracle) / std::abs(oracle));
    states.push_back(std::move(s));
  }
  c.require(worst <= 1e-9, "worst relative route deviation " + fmt(worst) + " > 1e-9");
  c.finish(300.0);
}

void criterion_5_headline(std::vector<TrialState>& states,
                          std::vector<const DispersionTable*>& state_tables,
                          std::vector<DispersionTable>& storage) {
  Criterion c(5, "headline expansion");
  ModelParams base;
  base.cutoff = 30.0;
  base.radial_points = 1024;
  const PekarResult pekar = minimize_pekar(make_radial_grid(4000, 40.0), 3.0);
  SweepConfig cfg;  // defaults: N = 64, 21 geometric points over [0.3, 3]·λ*
  const std::vector<double> alphas = {0.03, 0.06, 0.12};
  const std::vector<SweepRow> rows = alpha_sweep(alphas, base, pekar, cfg);

  for (const SweepRow& r : rows) {
    c.require(r.e_min < r.two_m, "alpha=" + fmt(r.alpha) + ": E_min " + fmt(r.e_min) +
                                     " not below 2m " + fmt(r.two_m));
    c.require(r.argmin_lambda >= 0.75 * r.lambda_star &&
                  r.argmin_lambda <= 1.25 * r.lambda_star,
              "alpha=" + fmt(r.alpha) + ": argmin lambda " + fmt(r.argmin_lambda) +
                  " outside 25% of lambda* " + fmt(r.lambda_star));
  }
  const double err03 = std::abs(rows[0].slope - rows[0].reference_slope);
  const double err06 = std::abs(rows[1].slope - rows[1].reference_slope);
  const double err12 = std::abs(rows[2].slope - rows[2].reference_slope);
  c.require(err03 <= 0.15 * std::abs(rows[0].reference_slope),
            "slope error at alpha=0.03 is " + fmt(err03 / std::abs(rows[0].reference_slope)) +
                " relative (> 15%)");
  c.require(err03 < err06 && err06 < err12,
            "absolute slope error not monotone along 0.12 -> 0.06 -> 0.03: " + fmt(err12) +
                ", " + fmt(err06) + ", " + fmt(err03));

  // Rebuild the argmin state per alpha for the trial-state invariant battery.
  storage.reserve(storage.size() + rows.size());
  for (const SweepRow& r : rows) {
    ModelParams p = base;
    p.alpha = r.alpha;
    storage.push_back(
        solve_dressed_dispersion(p, build_radial_grid(p.radial_points, p.cutoff)));
    const CartesianGrid grid = make_grid(
        cfg.cartesian_points, auto_box_length(r.lambda_star, cfg.box_scale, cfg.min_box));
    states.push_back(build_trial_state(pekar.profile, r.argmin_lambda, grid, storage.back()));
    state_tables.push_back(&storage.back());
  }
  c.finish(1800.0);
}

void criterion_6_trial_state_invariants(const std::vector<TrialState>& states,
                                        const std::vector<const DispersionTable*>& tables) {
  Criterion c(6, "trial-state invariants");
  double worst_density = 0.0, worst_overlap = 0.0, worst_trace = 0.0, worst_involution = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const TrialState& s = states[i];
    worst_density = std::max(worst_density, sup_abs(state_density(s)));
    worst_overlap = std::max(worst_overlap, std::abs(inner_product(s.psi_minus, s.psi_plus)));
    worst_trace = std::max(worst_trace, std::abs(state_p0_trace(s, *tables[i])));
    const SpinorField back = charge_conjugate(charge_conjugate(s.psi_plus));
    double dist = 0.0;
    for (int comp = 0; comp < 4; ++comp)
      for (std::size_t j = 0; j < back.data[comp].size(); ++j)
        dist = std::max(dist, std::abs(back.data[comp][j] - s.psi_plus.data[comp][j]));
    worst_involution = std::max(worst_involution, dist);
  }
  c.require(worst_density <= 1e-12, "sup |rho_Q| = " + fmt(worst_density) + " > 1e-12");
  c.require(worst_overlap <= 1e-10, "|<psi-,psi+>| = " + fmt(worst_overlap) + " > 1e-10");
  c.require(worst_trace <= 1e-10, "P0-trace = " + fmt(worst_trace) + " > 1e-10");
  c.require(worst_involution <= 1e-14, "CoC deviation " + fmt(worst_involution) + " > 1e-14");
  c.finish(600.0);
}

void criterion_7_projector_suite() {
  Criterion c(7, "projector-algebra suite");
  const StructureCheckReport r = structure_check_suite(20240817, 200, 64);
  c.require(r.max_reconstruct_residual <= 1e-10,
            "reconstruct residual " + fmt(r.max_reconstruct_residual));
  c.require(r.max_roundtrip_residual <= 1e-9,
            "log/chart round trip " + fmt(r.max_roundtrip_residual));
  c.require(r.max_full_flip_roundtrip_residual <= 1e-9,
            "full-flip round trip " + fmt(r.max_full_flip_roundtrip_residual));
  c.require(r.max_eqq_residual <= 1e-10, "block identity " + fmt(r.max_eqq_residual));
  c.require(r.max_trace_integer_deviation <= 1e-9,
            "trace integrality " + fmt(r.max_trace_integer_deviation));
  c.require(r.vacuum_classified_e1, "vacuum not classified E1");
  c.require(r.pair_classified_e_minus_1, "conjugate pair not classified E-1");
  c.require(r.classification_stable, "classification not constant along exponential paths");
  c.require(r.mod4_ok, "C-symmetric spectral dimensions not divisible by 4");
  c.finish(120.0);
}

void criterion_8_reproducibility() {
  Criterion c(8, "reproducibility");
  const fs::path dir = fs::temp_directory_path() / "bdfp-acceptance-repro";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const std::vector<std::pair<std::string, std::string>> flags = {
      {"alpha", "0.05"},   {"cutoff", "30"},        {"grid", "256"},
      {"cartesian", "32"}, {"pekar_nodes", "1500"}, {"scan_points", "5"},
      {"scan_lo", "0.6"},  {"scan_hi", "1.8"},      {"seed", "7"},
      {"cache_dir", (dir / "cache").string()},      {"out", (dir / "scan.json").string()}};
  const RunConfig cfg = build_config("energy", {}, flags);
  run(cfg);
  const std::string first = slurp((dir / "scan.json").string());
  run(cfg);
  const std::string second = slurp((dir / "scan.json").string());
  c.require(!first.empty() && first == second, "energy outputs differ between runs");

  const RunConfig sc = build_config(
      "structure-check", {},
      {{"seed", "7"}, {"structure_instances", "12"}, {"structure_max_dim", "24"},
       {"out", (dir / "structure.json").string()}});
  run(sc);
  const std::string s1 = slurp((dir / "structure.json").string());
  run(sc);
  const std::string s2 = slurp((dir / "structure.json").string());
  c.require(!s1.empty() && s1 == s2, "structure-check outputs differ between runs");

  fs::remove_all(dir);
  c.finish(300.0);
}

}  // namespace

int main() {
  std::printf("BDF positronium acceptance suite\n");
  criterion_1_free_limit();
  criterion_2_dressed_invariants();
  criterion_3_pekar();

  std::vector<TrialState> states;
  DispersionTable oracle_table;
  criterion_4_exchange_routes(states, oracle_table);
  std::vector<const DispersionTable*> state_tables(states.size(), &oracle_table);

  std::vector<DispersionTable> sweep_tables;
  criterion_5_headline(states, state_tables, sweep_tables);
  criterion_6_trial_state_invariants(states, state_tables);
  criterion_7_projector_suite();
  criterion_8_reproducibility();

  if (g_failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  return g_failures;
}
