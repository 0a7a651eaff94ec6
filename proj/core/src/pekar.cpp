#include "bdfp/pekar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bdfp/errors.hpp"

namespace bdfp {
namespace {

// All internals work on u = rφ with Dirichlet ghosts u(0) = 0 and
// u(r_max + h_last) = 0; this regularizes the origin and makes the kinetic
// term a clean quadratic form: T = 4π ∫ u'² dr.

std::vector<double> to_u(const RadialProfile& phi) {
  std::vector<double> u(phi.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = phi.values[i] * phi.radii[i];
  return u;
}

double metric_norm_squared(const RadialProfile& layout, const std::vector<double>& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * u[i] * layout.weights[i];
  return 4.0 * M_PI * s;
}

double kinetic_u(const RadialProfile& layout, const std::vector<double>& u) {
  const std::size_t n = u.size();
  double s = u[0] * u[0] / layout.radii[0];  // segment from the r=0 ghost
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double du = u[i + 1] - u[i];
    s += du * du / (layout.radii[i + 1] - layout.radii[i]);
  }
  const double h_last = layout.radii[n - 1] - layout.radii[n - 2];
  s += u[n - 1] * u[n - 1] / h_last;  // outer Dirichlet ghost
  return 4.0 * M_PI * s;
}

// W_i = 4π Σ_j ρ_j r_j² w_j / max(r_i, r_j) via prefix sums; symmetric in
// (i,j), so V = 4π Σ_i W_i u_i² w_i is an exact quadratic form in ρ.
std::vector<double> hartree_from_u(const RadialProfile& layout, const std::vector<double>& u) {
  const std::size_t n = u.size();
  std::vector<double> w(n);
  double inner = 0.0;  // Σ_{j<=i} ρ_j r_j² w_j = Σ u_j² w_j
  std::vector<double> outer(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;)
    outer[i] = outer[i + 1] + u[i] * u[i] * layout.weights[i] / layout.radii[i];
  for (std::size_t i = 0; i < n; ++i) {
    inner += u[i] * u[i] * layout.weights[i];
    w[i] = 4.0 * M_PI * (inner / layout.radii[i] + outer[i + 1]);
  }
  return w;
}

double potential_u(const RadialProfile& layout, const std::vector<double>& u,
                   const std::vector<double>& hartree) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += hartree[i] * u[i] * u[i] * layout.weights[i];
  return 4.0 * M_PI * s;
}

// Discrete EL map (−u'' − 2Wu) with Dirichlet ghosts; uniform spacing assumed
// by the flow (the public functionals accept any increasing grid).
void el_map(const RadialProfile& layout, const std::vector<double>& u,
            const std::vector<double>& hartree, std::vector<double>& out) {
  const std::size_t n = u.size();
  const double h = layout.radii[0];
  const double inv_h2 = 1.0 / (h * h);
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i == 0 ? 0.0 : u[i - 1];
    const double right = i + 1 == n ? 0.0 : u[i + 1];
    out[i] = (2.0 * u[i] - left - right) * inv_h2 - 2.0 * hartree[i] * u[i];
  }
}

}  // namespace

std::vector<double> hartree_potential(const RadialProfile& rho) {
  rho.validate();
  const std::size_t n = rho.size();
  std::vector<double> w(n);
  double inner = 0.0;
  std::vector<double> outer(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;)
    outer[i] = outer[i + 1] + rho.values[i] * rho.radii[i] * rho.weights[i];
  for (std::size_t i = 0; i < n; ++i) {
    inner += rho.values[i] * rho.radii[i] * rho.radii[i] * rho.weights[i];
    w[i] = 4.0 * M_PI * (inner / rho.radii[i] + outer[i + 1]);
  }
  return w;
}

PekarEnergy pekar_energy_raw(const RadialProfile& phi) {
  phi.validate();
  const std::vector<double> u = to_u(phi);
  PekarEnergy e;
  e.kinetic = kinetic_u(phi, u);
  e.potential = potential_u(phi, u, hartree_from_u(phi, u));
  e.energy = e.kinetic - e.potential;
  return e;
}

PekarEnergy pekar_energy(const RadialProfile& phi) {
  if (std::abs(phi.norm_squared() - 1.0) > 1e-8)
    throw Error(Errc::unnormalized_input, "pekar_energy expects a unit-norm profile");
  return pekar_energy_raw(phi);
}

std::vector<double> pekar_energy_gradient_u(const RadialProfile& phi) {
  phi.validate();
  const std::vector<double> u = to_u(phi);
  const std::vector<double> hartree = hartree_from_u(phi, u);
  const std::size_t n = u.size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h_left = i == 0 ? phi.radii[0] : phi.radii[i] - phi.radii[i - 1];
    const double h_right = i + 1 == n ? phi.radii[n - 1] - phi.radii[n - 2]
                                      : phi.radii[i + 1] - phi.radii[i];
    const double u_left = i == 0 ? 0.0 : u[i - 1];
    const double u_right = i + 1 == n ? 0.0 : u[i + 1];
    g[i] = 8.0 * M_PI * ((u[i] - u_left) / h_left - (u_right - u[i]) / h_right) -
           16.0 * M_PI * phi.weights[i] * hartree[i] * u[i];
  }
  return g;
}

PekarResult minimize_pekar(const RadialProfile& grid_layout, double init_width,
                           const PekarOptions& opts) {
  grid_layout.validate();
  if (!(opts.tolerance > 0.0)) throw Error(Errc::invalid_parameter, "tolerance must be > 0");
  const std::size_t n = grid_layout.size();
  const double h = grid_layout.radii[0];
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (std::abs((grid_layout.radii[i + 1] - grid_layout.radii[i]) - h) > 1e-9 * h)
      throw Error(Errc::invalid_parameter, "minimize_pekar needs a uniform radial grid");

  for (int attempt = 0; attempt < 5; ++attempt) {
    const double tau0 = opts.time_step / static_cast<double>(1 << attempt);
    double tau = tau0;

    RadialProfile phi = make_gaussian_profile(grid_layout, init_width);
    phi.normalize();
    std::vector<double> u = to_u(phi);
    {
      const double s = 1.0 / std::sqrt(metric_norm_squared(grid_layout, u));
      for (auto& v : u) v *= s;
    }

    PekarResult result;
    result.profile = grid_layout;
    std::vector<double> hartree = hartree_from_u(grid_layout, u);
    double energy = kinetic_u(grid_layout, u) - potential_u(grid_layout, u, hartree);
    result.energy_history.push_back(energy);

    std::vector<double> rhs(n), unew(n), lower(n), diag(n), work(n), el(n);
    bool flipped = false;
    int smooth_steps = 0;

    for (int it = 1; it <= opts.max_iterations; ++it) {
      // Fully implicit linearized step (I + τ(-D₂ - 2W)) u* = u with W frozen
      // at the current iterate, then renormalize: a damped inverse iteration
      // on the Euler-Lagrange operator.
      const double a = tau / (h * h);
      bool indefinite = false;
      for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = u[i];
        diag[i] = 1.0 + 2.0 * a - 2.0 * tau * hartree[i];
        lower[i] = -a;
      }
      // Thomas algorithm; a non-positive pivot means τ crossed the inverse
      // of the lowest EL eigenvalue.
      work[0] = lower[0] / diag[0];
      rhs[0] /= diag[0];
      for (std::size_t i = 1; i < n && !indefinite; ++i) {
        const double m = diag[i] - lower[i] * work[i - 1];
        if (m <= 0.0) {
          indefinite = true;
          break;
        }
        work[i] = lower[i] / m;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / m;
      }
      if (indefinite || diag[0] <= 0.0) {
        tau *= 0.5;
        smooth_steps = 0;
        if (tau < 1e-6 * tau0)
          throw Error(Errc::no_convergence, "pekar step control collapsed the time step");
        continue;
      }
      unew[n - 1] = rhs[n - 1];
      for (std::size_t i = n - 1; i-- > 0;) unew[i] = rhs[i] - work[i] * unew[i + 1];

      const double s = 1.0 / std::sqrt(metric_norm_squared(grid_layout, unew));
      for (auto& v : unew) v *= s;

      double umax = 0.0, umin = 0.0;
      for (const double v : unew) {
        umax = std::max(umax, v);
        umin = std::min(umin, v);
      }
      if (umin < -1e-12 * umax) {
        flipped = true;
        break;  // restart with a smaller step
      }

      std::vector<double> hartree_new = hartree_from_u(grid_layout, unew);
      const double energy_new =
          kinetic_u(grid_layout, unew) - potential_u(grid_layout, unew, hartree_new);
      if (energy_new > energy + 1e-12 * std::abs(energy) + 1e-15) {
        tau *= 0.5;  // backtrack without accepting the step
        smooth_steps = 0;
        if (tau < 1e-6 * tau0)
          throw Error(Errc::no_convergence, "pekar step control collapsed the time step");
        continue;
      }
      u.swap(unew);
      hartree.swap(hartree_new);
      energy = energy_new;
      result.energy_history.push_back(energy);
      if (++smooth_steps >= 10 && tau < 2.5) {
        tau = std::min(2.5, tau * 1.3);
        smooth_steps = 0;
      }

      // Euler-Lagrange residual.
      el_map(grid_layout, u, hartree, el);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        num += el[i] * u[i] * grid_layout.weights[i];
        den += u[i] * u[i] * grid_layout.weights[i];
      }
      const double mu = num / den;
      double res = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        res = std::max(res, std::abs(el[i] - mu * u[i]) / grid_layout.radii[i]);

      if (res <= opts.tolerance) {
        result.iterations = it;
        result.mu = mu;
        result.residual = res;
        for (std::size_t i = 0; i < n; ++i)
          result.profile.values[i] = u[i] / grid_layout.radii[i];
        const PekarEnergy split = pekar_energy_raw(result.profile);
        result.kinetic = split.kinetic;
        result.potential = split.potential;
        result.energy = split.energy;
        return result;
      }
    }
    if (!flipped) {
      std::ostringstream os;
      os << "pekar flow not converged after " << opts.max_iterations
         << " iterations (last E=" << energy << ")";
      throw Error(Errc::no_convergence, os.str());
    }
  }
  throw Error(Errc::sign_flip, "pekar iterate lost positivity at every retried step size");
}

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

void save_pekar_csv(const PekarResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot open " + path + " for writing");
  out << "# E=" << fmt(result.energy) << " T=" << fmt(result.kinetic)
      << " V=" << fmt(result.potential) << " mu=" << fmt(result.mu)
      << " residual=" << fmt(result.residual) << "\n";
  for (std::size_t i = 0; i < result.profile.size(); ++i)
    out << fmt(result.profile.radii[i]) << "," << fmt(result.profile.values[i]) << "\n";
  if (!out) throw Error(Errc::io_error, "write failed: " + path);
}

PekarResult load_pekar_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  std::string header;
  if (!std::getline(in, header) || header.rfind("# ", 0) != 0)
    throw Error(Errc::parse_error, "missing profile header in " + path);
  PekarResult r;
  {
    std::istringstream hs(header.substr(2));
    std::string kv;
    while (hs >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(Errc::parse_error, "bad header field: " + kv);
      const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "E")
        r.energy = std::stod(val);
      else if (key == "T")
        r.kinetic = std::stod(val);
      else if (key == "V")
        r.potential = std::stod(val);
      else if (key == "mu")
        r.mu = std::stod(val);
      else if (key == "residual")
        r.residual = std::stod(val);
      else
        throw Error(Errc::parse_error, "unknown header field: " + key);
    }
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double rad, val;
    if (std::sscanf(line.c_str(), "%lg,%lg", &rad, &val) != 2)
      throw Error(Errc::parse_error, "bad profile row in " + path);
    r.profile.radii.push_back(rad);
    r.profile.values.push_back(val);
  }
  const std::size_t n = r.profile.size();
  if (n < 3) throw Error(Errc::parse_error, "profile too short in " + path);
  const double h = r.profile.radii[0];
  r.profile.weights.assign(n, h);
  r.profile.weights.back() = 0.5 * h;
  r.profile.validate();
  return r;
}

}  // namespace bdfp
