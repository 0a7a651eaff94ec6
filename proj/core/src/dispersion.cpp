#include "bdfp/dispersion.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bdfp/errors.hpp"

namespace bdfp {
namespace {

// Angular reduction of the momentum-space Coulomb kernel 1/|p-q|^2 against 1
// and cos(p,q) gives (2π/pq)·Q0(z) and (2π/pq)·Q1(z), z = (p²+q²)/(2pq),
// where Q0(z) = atanh(1/z) and Q1(z) = z·Q0(z) - 1 are Legendre functions of
// the second kind. Combined with the kernel constant 1/(2π²) and the radial
// measure q²dq this yields the (α/2π)·∫ (q/p)·Q_i(z) ... dq form used below.

double legendre_q1(double z) {
  if (z > 30.0) {
    // zQ0 - 1 cancels badly for large z; use the tail series.
    const double w = 1.0 / (z * z);
    double term = w, sum = 0.0;
    for (int k = 1; k <= 7; ++k) {
      sum += term / (2 * k + 1);
      term *= w;
    }
    return sum;
  }
  return z * std::atanh(1.0 / z) - 1.0;
}

// kernel0(p,q) = (q/p)·ln((p+q)/|p-q|);  limits: 2 at p=0, 0 at q=0.
double kernel0(double p, double q) {
  if (q == 0.0) return 0.0;
  if (p == 0.0) return 2.0;
  return (q / p) * std::log((p + q) / std::abs(p - q));
}

// kernel1(p,q) = (q/p)·Q1(z);  limits: 0 at p=0 and at q=0.
double kernel1(double p, double q) {
  if (q == 0.0 || p == 0.0) return 0.0;
  const double z = (p * p + q * q) / (2.0 * p * q);
  return (q / p) * legendre_q1(z);
}

// Closed forms of ∫₀^Λ kernel_i(p,q) dq, used to integrate the logarithmic
// singularity at q = p analytically (singularity subtraction).
double kernel0_integral(double p, double lambda) {
  if (p == 0.0) return 2.0 * lambda;
  if (p >= lambda) return lambda;
  const double x = p / lambda;
  const double lp = std::log1p(x) - std::log1p(-x);  // ln((Λ+p)/(Λ-p))
  return (lambda - p) * (lambda + p) / (2.0 * p) * lp + lambda;
}

double kernel1_integral(double p, double lambda) {
  if (p == 0.0) return 0.0;
  double log_term = 0.0;
  if (p < lambda) {
    const double x = p / lambda;
    const double lp = std::log1p(x) - std::log1p(-x);
    log_term = (lambda - p) * (4.0 * p * p + lambda * p + lambda * lambda) / 3.0 * lp;
  }
  const double cd = log_term + (8.0 / 3.0) * p * p * p * std::log((lambda + p) / p) +
                    p * lambda * lambda / 3.0;
  return cd / (2.0 * p * p) - lambda * lambda / (2.0 * p);
}

struct MapMatrices {
  Eigen::MatrixXd k0, k1;        // w_j * kernel_i(p_i, q_j), zero diagonal
  Eigen::VectorXd i0, i1;        // analytic ∫₀^Λ kernel_i(p_i, q) dq
  Eigen::VectorXd s0, s1;        // row sums of k0, k1
};

MapMatrices assemble(const RadialGrid& grid) {
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  const double lambda = grid.cutoff();
  MapMatrices m;
  m.k0.resize(n, n);
  m.k1.resize(n, n);
  m.i0.resize(n);
  m.i1.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = grid.nodes[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) {
        m.k0(i, j) = 0.0;
        m.k1(i, j) = 0.0;
        continue;
      }
      const double q = grid.nodes[static_cast<std::size_t>(j)];
      const double w = grid.quadrature_weights[static_cast<std::size_t>(j)];
      m.k0(i, j) = w * kernel0(p, q);
      m.k1(i, j) = w * kernel1(p, q);
    }
    m.i0(i) = kernel0_integral(p, lambda);
    m.i1(i) = kernel1_integral(p, lambda);
  }
  m.s0 = m.k0.rowwise().sum();
  m.s1 = m.k1.rowwise().sum();
  return m;
}

void apply_map(const MapMatrices& m, const RadialGrid& grid, double alpha,
               const Eigen::VectorXd& g0, const Eigen::VectorXd& g1, Eigen::VectorXd& g0_out,
               Eigen::VectorXd& g1_out) {
  const Eigen::Index n = g0.size();
  Eigen::VectorXd e = (g0.array().square() + g1.array().square()).sqrt();
  Eigen::VectorXd f0 = g0.array() / e.array();
  Eigen::VectorXd f1 = g1.array() / e.array();
  const double c = alpha / (2.0 * M_PI);
  g0_out = (m.k0 * f0).array() + f0.array() * (m.i0 - m.s0).array();
  g1_out = (m.k1 * f1).array() + f1.array() * (m.i1 - m.s1).array();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = grid.nodes[static_cast<std::size_t>(i)];
    g0_out(i) = 1.0 + c * g0_out(i);
    g1_out(i) = p + c * g1_out(i);
  }
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Second-order derivative at x[i0] from the three nodes x[i0], x[i1], x[i2].
double three_point_slope(const std::vector<double>& x, const std::vector<double>& f,
                         std::size_t i0, std::size_t i1, std::size_t i2) {
  const double x0 = x[i0], x1 = x[i1], x2 = x[i2];
  return f[i0] * (2 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
         f[i1] * (x0 - x2) / ((x1 - x0) * (x1 - x2)) +
         f[i2] * (x0 - x1) / ((x2 - x0) * (x2 - x1));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double DispersionTable::e(std::size_t i) const { return std::hypot(g0[i], g1[i]); }

void DispersionTable::validate() const {
  grid.validate();
  if (g0.size() != grid.size() || g1.size() != grid.size())
    throw Error(Errc::invalid_parameter, "table arrays do not match the grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = grid.nodes[i];
    if (!(g0[i] >= 1.0 - 1e-12))
      throw Error(Errc::invalid_parameter, "g0 < 1 at node " + std::to_string(i));
    if (!(g1[i] >= p - 1e-12 * std::max(1.0, p)))
      throw Error(Errc::invalid_parameter, "g1 < p at node " + std::to_string(i));
    if (!(g1[i] <= p * g0[i] + 1e-12 * std::max(1.0, p)))
      throw Error(Errc::invalid_parameter, "g1 > p*g0 at node " + std::to_string(i));
  }
}

DispersionTable free_dispersion(const RadialGrid& grid) {
  grid.validate();
  DispersionTable t;
  t.grid = grid;
  t.g0.assign(grid.size(), 1.0);
  t.g1 = grid.nodes;
  t.residual = 0.0;
  t.alpha = 0.0;
  t.cutoff = grid.cutoff();
  t.tolerance = 0.0;
  t.iterations = 0;
  return t;
}

void apply_dispersion_map(const ModelParams& params, const DispersionTable& in,
                          std::vector<double>& g0_out, std::vector<double>& g1_out) {
  const MapMatrices m = assemble(in.grid);
  Eigen::VectorXd a, b;
  apply_map(m, in.grid, params.alpha, to_eigen(in.g0), to_eigen(in.g1), a, b);
  g0_out = to_std(a);
  g1_out = to_std(b);
}

DispersionTable solve_dressed_dispersion(const ModelParams& params, const RadialGrid& grid) {
  params.validate();
  grid.validate();
  if (std::abs(grid.cutoff() - params.cutoff) > 1e-12 * params.cutoff)
    throw Error(Errc::invalid_parameter, "grid cutoff does not match params.cutoff");

  const MapMatrices m = assemble(grid);
  DispersionTable t = free_dispersion(grid);
  t.alpha = params.alpha;
  t.tolerance = params.fixed_point.tolerance;

  Eigen::VectorXd g0 = to_eigen(t.g0), g1 = to_eigen(t.g1), mg0, mg1;
  const double d = params.fixed_point.damping;
  for (int it = 1; it <= params.fixed_point.max_iterations; ++it) {
    apply_map(m, grid, params.alpha, g0, g1, mg0, mg1);
    const double res =
        std::max((mg0 - g0).cwiseAbs().maxCoeff(), (mg1 - g1).cwiseAbs().maxCoeff());
    t.residual_history.push_back(res);
    g0 = (1.0 - d) * g0 + d * mg0;
    g1 = (1.0 - d) * g1 + d * mg1;
    if (res <= params.fixed_point.tolerance) {
      t.g0 = to_std(g0);
      t.g1 = to_std(g1);
      t.residual = res;
      t.iterations = it;
      return t;
    }
  }
  std::ostringstream os;
  os << "fixed point not converged after " << params.fixed_point.max_iterations
     << " iterations; residual history tail:";
  const std::size_t h = t.residual_history.size();
  for (std::size_t i = h > 5 ? h - 5 : 0; i < h; ++i) os << " " << t.residual_history[i];
  throw Error(Errc::no_convergence, os.str());
}

DispersionDiagnostics dispersion_diagnostics(const DispersionTable& table) {
  const std::size_t n = table.grid.size();
  if (n < 3) throw Error(Errc::degenerate_grid, "diagnostics need >= 3 nodes");
  const auto& p = table.grid.nodes;

  DispersionDiagnostics d;
  d.m = table.g0[0];
  d.g0_slope_at_0 = three_point_slope(p, table.g0, 0, 1, 2);
  d.g1_slope_at_0 = three_point_slope(p, table.g1, 0, 1, 2);

  double emin = table.e(0);
  d.argmin_e = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const double ei = table.e(i);
    if (ei < emin) {
      emin = ei;
      d.argmin_e = i;
    }
  }

  double sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s;
    if (i == 0)
      s = three_point_slope(p, table.g1, 0, 1, 2);
    else if (i + 1 == n)
      s = three_point_slope(p, table.g1, n - 1, n - 2, n - 3);
    else
      s = three_point_slope(p, table.g1, i, i - 1, i + 1);
    sup = std::max(sup, std::abs(s - 1.0));
  }
  d.sup_g1_slope_minus_1 = sup;
  return d;
}

void save_dispersion_csv(const DispersionTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot open " + path + " for writing");
  out << "# alpha=" << format_double(table.alpha) << " cutoff=" << format_double(table.cutoff)
      << " n=" << table.grid.size() << " tol=" << format_double(table.tolerance)
      << " residual=" << format_double(table.residual) << "\n";
  for (std::size_t i = 0; i < table.grid.size(); ++i)
    out << format_double(table.grid.nodes[i]) << "," << format_double(table.g0[i]) << ","
        << format_double(table.g1[i]) << "\n";
  if (!out) throw Error(Errc::io_error, "write failed: " + path);
}

DispersionTable load_dispersion_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  std::string header;
  if (!std::getline(in, header) || header.rfind("# ", 0) != 0)
    throw Error(Errc::parse_error, "missing cache header in " + path);

  DispersionTable t;
  std::size_t n = 0;
  {
    std::istringstream hs(header.substr(2));
    std::string kv;
    while (hs >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(Errc::parse_error, "bad header field: " + kv);
      const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "alpha")
        t.alpha = std::stod(val);
      else if (key == "cutoff")
        t.cutoff = std::stod(val);
      else if (key == "n")
        n = static_cast<std::size_t>(std::stoull(val));
      else if (key == "tol")
        t.tolerance = std::stod(val);
      else if (key == "residual")
        t.residual = std::stod(val);
      else
        throw Error(Errc::parse_error, "unknown header field: " + key);
    }
  }
  if (n < 2) throw Error(Errc::parse_error, "header n < 2 in " + path);

  t.grid.nodes.reserve(n);
  t.g0.reserve(n);
  t.g1.reserve(n);
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double p, a, b;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &p, &a, &b) != 3)
      throw Error(Errc::parse_error, path + ":" + std::to_string(lineno) + ": bad row");
    t.grid.nodes.push_back(p);
    t.g0.push_back(a);
    t.g1.push_back(b);
  }
  if (t.grid.nodes.size() != n)
    throw Error(Errc::parse_error, "row count does not match header n in " + path);

  // Weights are not persisted; rebuild the trapezoid rule on the loaded nodes.
  t.grid.quadrature_weights.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = t.grid.nodes[i + 1] - t.grid.nodes[i];
    t.grid.quadrature_weights[i] += 0.5 * h;
    t.grid.quadrature_weights[i + 1] += 0.5 * h;
  }
  t.grid.validate();
  return t;
}

DispersionTable load_dispersion_csv_checked(const std::string& path, double alpha, double cutoff,
                                            std::size_t n) {
  DispersionTable t = load_dispersion_csv(path);
  if (t.alpha != alpha || t.cutoff != cutoff || t.grid.size() != n)
    throw Error(Errc::invalid_parameter,
                "cache header mismatch for " + path + " (alpha/cutoff/n differ from request)");
  return t;
}

}  // namespace bdfp
