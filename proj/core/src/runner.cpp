#include "bdfp/runner.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"

#include "bdfp/errors.hpp"
#include "bdfp/pekar.hpp"
#include "bdfp/projector_algebra.hpp"
#include "bdfp/trial_state.hpp"

namespace bdfp {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::validation_error, "field `" + key + "`: not a number: " + value);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::validation_error, "field `" + key + "`: not an integer: " + value);
  }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw Error(Errc::validation_error, "field `" + key + "`: empty list");
  return out;
}

void apply_kv(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "alpha")
    c.model.alpha = parse_double(key, value);
  else if (key == "cutoff")
    c.model.cutoff = parse_double(key, value);
  else if (key == "grid")
    c.model.radial_points = static_cast<std::size_t>(parse_int(key, value));
  else if (key == "fp_tol")
    c.model.fixed_point.tolerance = parse_double(key, value);
  else if (key == "fp_max_iter")
    c.model.fixed_point.max_iterations = static_cast<int>(parse_int(key, value));
  else if (key == "fp_damping")
    c.model.fixed_point.damping = parse_double(key, value);
  else if (key == "cartesian")
    c.cartesian_points = static_cast<int>(parse_int(key, value));
  else if (key == "box")
    c.box_length = parse_double(key, value);
  else if (key == "box_scale")
    c.box_scale = parse_double(key, value);
  else if (key == "min_box")
    c.min_box = parse_double(key, value);
  else if (key == "pekar_rmax")
    c.pekar_r_max = parse_double(key, value);
  else if (key == "pekar_nodes")
    c.pekar_nodes = static_cast<std::size_t>(parse_int(key, value));
  else if (key == "pekar_tol")
    c.pekar_tol = parse_double(key, value);
  else if (key == "pekar_init_width")
    c.pekar_init_width = parse_double(key, value);
  else if (key == "scan_lo")
    c.scan_span_lo = parse_double(key, value);
  else if (key == "scan_hi")
    c.scan_span_hi = parse_double(key, value);
  else if (key == "scan_points")
    c.scan_points = static_cast<std::size_t>(parse_int(key, value));
  else if (key == "alphas")
    c.sweep_alphas = parse_double_list(key, value);
  else if (key == "cache_dir")
    c.cache_dir = value;
  else if (key == "out")
    c.output_path = value;
  else if (key == "format")
    c.format = value;
  else if (key == "seed")
    c.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "structure_instances")
    c.structure_instances = static_cast<int>(parse_int(key, value));
  else if (key == "structure_max_dim")
    c.structure_max_dim = static_cast<int>(parse_int(key, value));
  else
    throw Error(Errc::validation_error, "unknown field `" + key + "`");
}

void atomic_write(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot open " + tmp + " for writing");
    out << contents;
    if (!out) throw Error(Errc::io_error, "write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

ordered_json config_echo(const RunConfig& c) {
  ordered_json j;
  j["command"] = c.command;
  j["alpha"] = c.model.alpha;
  j["cutoff"] = c.model.cutoff;
  j["grid"] = c.model.radial_points;
  j["fp_tol"] = c.model.fixed_point.tolerance;
  j["fp_max_iter"] = c.model.fixed_point.max_iterations;
  j["fp_damping"] = c.model.fixed_point.damping;
  j["cartesian"] = c.cartesian_points;
  j["box"] = c.box_length;
  j["box_scale"] = c.box_scale;
  j["min_box"] = c.min_box;
  j["pekar_rmax"] = c.pekar_r_max;
  j["pekar_nodes"] = c.pekar_nodes;
  j["pekar_tol"] = c.pekar_tol;
  j["pekar_init_width"] = c.pekar_init_width;
  j["scan_lo"] = c.scan_span_lo;
  j["scan_hi"] = c.scan_span_hi;
  j["scan_points"] = c.scan_points;
  j["alphas"] = c.sweep_alphas;
  j["cache_dir"] = c.cache_dir;
  j["format"] = c.format;
  j["seed"] = c.seed;
  j["structure_instances"] = c.structure_instances;
  j["structure_max_dim"] = c.structure_max_dim;
  return j;
}

class StageTimer {
 public:
  explicit StageTimer(RunReport& report) : report_(report) {}
  template <typename F>
  auto time(const std::string& stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record(stage, t0);
    } else {
      auto result = f();
      record(stage, t0);
      return result;
    }
  }

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point t0) {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    report_.timings.emplace_back(stage, dt.count());
  }
  RunReport& report_;
};

void add_model_warnings(const RunConfig& c, RunReport& report) {
  const double smallness = c.model.alpha * std::log(c.model.cutoff);
  if (smallness > 0.1)
    report.warnings.emplace_back(
        "alpha-log-cutoff-large",
        "alpha*log(cutoff) = " + fmt(smallness) + " exceeds the smallness regime 0.1");
}

void add_grid_warnings(const RunConfig& c, const CartesianGrid& grid, double lambda_star,
                       RunReport& report) {
  if (c.model.cutoff > grid.max_axis_momentum())
    report.warnings.emplace_back(
        "cutoff-exceeds-grid",
        "momentum lattice covers |k| <= " + fmt(grid.max_axis_momentum()) + " < cutoff " +
            fmt(c.model.cutoff) + "; the band limit is the grid itself");
  if (std::isfinite(lambda_star) && grid.box_length < 25.0 * lambda_star)
    report.warnings.emplace_back("box-below-recommended",
                                 "box " + fmt(grid.box_length) + " < 25*lambda_star = " +
                                     fmt(25.0 * lambda_star) + "; the state may be clipped");
  const double gib = static_cast<double>(grid.total_points()) * 4.0 * 16.0 * 8.0 /
                     (1024.0 * 1024.0 * 1024.0);
  if (gib > 4.0)
    report.warnings.emplace_back("memory-budget",
                                 "estimated working set " + fmt(gib) + " GiB exceeds 4 GiB");
}

ordered_json warnings_json(const RunReport& report) {
  ordered_json arr = ordered_json::array();
  for (const auto& [code, message] : report.warnings) {
    ordered_json w;
    w["code"] = code;
    w["message"] = message;
    arr.push_back(w);
  }
  return arr;
}

std::string csv_energy_rows(double alpha, const ScanResult& scan) {
  std::string out = "alpha,lambda,kinetic,exchange_hartree,exchange_overlap,total\n";
  for (std::size_t i = 0; i < scan.lambdas.size(); ++i) {
    const EnergyBreakdown& e = scan.energies[i];
    out += fmt(alpha) + "," + fmt(scan.lambdas[i]) + "," + fmt(e.kinetic) + "," +
           fmt(e.exchange_hartree) + "," + fmt(e.exchange_overlap) + "," + fmt(e.total) + "\n";
  }
  return out;
}

ordered_json scan_records(double alpha, const ScanResult& scan) {
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < scan.lambdas.size(); ++i) {
    const EnergyBreakdown& e = scan.energies[i];
    ordered_json r;
    r["alpha"] = alpha;
    r["lambda"] = scan.lambdas[i];
    r["kinetic"] = e.kinetic;
    r["exchange_hartree"] = e.exchange_hartree;
    r["exchange_overlap"] = e.exchange_overlap;
    r["total"] = e.total;
    arr.push_back(r);
  }
  return arr;
}

std::string csv_sweep_rows(const std::vector<SweepRow>& rows) {
  std::string out = "alpha,E_min,two_m,slope,reference_slope\n";
  for (const SweepRow& r : rows) {
    out += fmt(r.alpha) + "," + fmt(r.e_min) + "," + fmt(r.two_m) + ",";
    out += std::isnan(r.slope) ? "" : fmt(r.slope);
    out += ",";
    out += std::isnan(r.reference_slope) ? "" : fmt(r.reference_slope);
    out += "\n";
  }
  return out;
}

ordered_json sweep_records(const std::vector<SweepRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const SweepRow& r : rows) {
    ordered_json j;
    j["alpha"] = r.alpha;
    j["E_min"] = r.e_min;
    j["two_m"] = r.two_m;
    j["slope"] = r.slope;                      // NaN serializes as null
    j["reference_slope"] = r.reference_slope;  // NaN serializes as null
    j["lambda_star"] = r.lambda_star;
    j["argmin_lambda"] = r.argmin_lambda;
    arr.push_back(j);
  }
  return arr;
}

}  // namespace

void RunConfig::validate() const {
  if (command != "dispersion" && command != "pekar" && command != "energy" &&
      command != "sweep" && command != "structure-check")
    throw Error(Errc::validation_error, "field `command`: unknown command `" + command + "`");
  try {
    model.validate();
  } catch (const Error& e) {
    throw Error(Errc::validation_error, std::string("model: ") + e.what());
  }
  if (cartesian_points < 4 || cartesian_points % 2 != 0)
    throw Error(Errc::validation_error, "field `cartesian`: must be even and >= 4");
  if (box_length < 0.0) throw Error(Errc::validation_error, "field `box`: must be >= 0");
  if (!(box_scale > 0.0)) throw Error(Errc::validation_error, "field `box_scale`: must be > 0");
  if (!(min_box > 0.0)) throw Error(Errc::validation_error, "field `min_box`: must be > 0");
  if (!(pekar_r_max > 0.0)) throw Error(Errc::validation_error, "field `pekar_rmax`: must be > 0");
  if (pekar_nodes < 3) throw Error(Errc::validation_error, "field `pekar_nodes`: must be >= 3");
  if (!(pekar_tol > 0.0)) throw Error(Errc::validation_error, "field `pekar_tol`: must be > 0");
  if (!(pekar_init_width > 0.0))
    throw Error(Errc::validation_error, "field `pekar_init_width`: must be > 0");
  if (!(scan_span_lo > 0.0) || !(scan_span_hi > scan_span_lo))
    throw Error(Errc::validation_error, "field `scan_lo`/`scan_hi`: need 0 < lo < hi");
  if (scan_points < 2) throw Error(Errc::validation_error, "field `scan_points`: must be >= 2");
  for (std::size_t i = 0; i + 1 < sweep_alphas.size(); ++i)
    if (!(sweep_alphas[i] < sweep_alphas[i + 1]))
      throw Error(Errc::validation_error, "field `alphas`: must be sorted ascending");
  for (const double a : sweep_alphas)
    if (a < 0.0) throw Error(Errc::validation_error, "field `alphas`: must be >= 0");
  if (format != "json" && format != "csv")
    throw Error(Errc::validation_error, "field `format`: must be json or csv");
  if (structure_instances < 1)
    throw Error(Errc::validation_error, "field `structure_instances`: must be >= 1");
  if (structure_max_dim < 4 || structure_max_dim % 2 != 0)
    throw Error(Errc::validation_error, "field `structure_max_dim`: must be even and >= 4");
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // Trim.
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::parse_error, path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto kend = key.find_last_not_of(" \t");
    key = key.substr(0, kend == std::string::npos ? 0 : kend + 1);
    const auto vstart = value.find_first_not_of(" \t");
    value = vstart == std::string::npos ? "" : value.substr(vstart);
    if (key.empty())
      throw Error(Errc::parse_error, path + ":" + std::to_string(lineno) + ": empty key");
    kv.emplace_back(key, value);
  }
  return kv;
}

RunConfig build_config(const std::string& command,
                       const std::vector<std::pair<std::string, std::string>>& file_kv,
                       const std::vector<std::pair<std::string, std::string>>& flag_kv) {
  RunConfig c;
  c.command = command;
  for (const auto& [k, v] : file_kv) apply_kv(c, k, v);
  if (const char* env = std::getenv("BDFP_CACHE_DIR"); env != nullptr && *env != '\0')
    c.cache_dir = env;
  for (const auto& [k, v] : flag_kv) apply_kv(c, k, v);
  c.validate();
  return c;
}

std::string dispersion_cache_path(const std::string& cache_dir, const ModelParams& params) {
  std::string name = "dispersion_a" + fmt(params.alpha) + "_L" + fmt(params.cutoff) + "_n" +
                     std::to_string(params.radial_points) + "_t" +
                     fmt(params.fixed_point.tolerance) + ".csv";
  return (std::filesystem::path(cache_dir) / name).string();
}

DispersionTable load_or_solve_dispersion(const ModelParams& params, const std::string& cache_dir,
                                         bool* was_cached) {
  std::filesystem::create_directories(cache_dir);
  const std::string path = dispersion_cache_path(cache_dir, params);
  if (std::filesystem::exists(path)) {
    if (was_cached != nullptr) *was_cached = true;
    return load_dispersion_csv_checked(path, params.alpha, params.cutoff, params.radial_points);
  }
  const DispersionTable table =
      solve_dressed_dispersion(params, build_radial_grid(params.radial_points, params.cutoff));
  // Atomic write-then-rename so concurrent runs never see partial files.
  std::ostringstream buffer;
  {
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    save_dispersion_csv(table, tmp);
    std::filesystem::rename(tmp, path);
  }
  if (was_cached != nullptr) *was_cached = false;
  return table;
}

namespace {

using proj::Matrix;
using proj::Vector;

Matrix random_gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = std::complex<double>(g(rng), g(rng));
  return m;
}

Matrix haar_unitary(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix g = random_gaussian(rng, n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> d = r(i, i);
    q.col(i) *= std::abs(d) > 0 ? d / std::abs(d) : 1.0;
  }
  return q;
}

proj::ProjectorMatrix random_projector(std::mt19937_64& rng, Eigen::Index n, Eigen::Index rank) {
  const Matrix u = haar_unitary(rng, n);
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < rank; ++i) p += u.col(i) * u.col(i).adjoint();
  return proj::ProjectorMatrix::from((p + p.adjoint()) / 2.0);
}

// Random anti-Hermitian block-off-diagonal direction at p, scaled to norm s.
Matrix random_tangent_direction(std::mt19937_64& rng, const proj::ProjectorMatrix& p, double s) {
  const Eigen::Index n = p.dim();
  const Matrix x = random_gaussian(rng, n, n);
  const Matrix comp = Matrix::Identity(n, n) - p.entries;
  const Matrix b = p.entries * x * comp;
  Matrix a = b - b.adjoint();
  const double nrm = a.norm();
  if (nrm > 0) a *= s / nrm;
  return a;
}

}  // namespace

StructureCheckReport structure_check_suite(std::uint64_t seed, int instances, int max_dim) {
  std::mt19937_64 rng(seed);
  StructureCheckReport rep;
  rep.instances = instances;
  rep.vacuum_classified_e1 = true;
  rep.pair_classified_e_minus_1 = true;
  rep.classification_stable = true;
  rep.mod4_ok = true;

  for (int inst = 0; inst < instances; ++inst) {
    const Eigen::Index n_half =
        2 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(max_dim / 2 - 1));
    const Eigen::Index n = 2 * n_half;

    // Plain projector pair: structure + round trips + traces.
    {
      const Eigen::Index rank = 1 + static_cast<Eigen::Index>(rng() % (n - 1));
      const proj::ProjectorMatrix p0 = random_projector(rng, n, rank);
      const Matrix a = random_tangent_direction(rng, p0, 0.3 + 1.2 * (rng() % 1000) / 1000.0);
      const proj::ProjectorMatrix p1 = proj::exp_chart(p0, a);

      const Matrix q = p1.entries - p0.entries;
      const proj::StructureDecomposition dec = proj::decompose_difference(p1, p0);
      rep.max_reconstruct_residual =
          std::max(rep.max_reconstruct_residual, (proj::reconstruct(dec) - q).norm());

      const Matrix log = proj::canonical_log(p0, p1);
      rep.max_roundtrip_residual = std::max(
          rep.max_roundtrip_residual, (proj::exp_chart(p0, log).entries - p1.entries).norm());

      const Matrix comp = Matrix::Identity(n, n) - p0.entries;
      const Matrix eqq = q * q - (comp * q * comp - p0.entries * q * p0.entries);
      rep.max_eqq_residual = std::max(rep.max_eqq_residual, eqq.norm());

      const double tr = proj::p0_trace(q, p0);
      rep.max_trace_integer_deviation =
          std::max(rep.max_trace_integer_deviation, std::abs(tr - std::round(tr)));

      // Full flip (‖P2−P1‖ = 1): swap one occupied direction for an empty one.
      const auto es0 = Eigen::SelfAdjointEigenSolver<Matrix>(p0.entries);
      Vector occupied, empty;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (es0.eigenvalues()(i) > 0.5)
          occupied = es0.eigenvectors().col(i);
        else
          empty = es0.eigenvectors().col(i);
      }
      if (occupied.size() == n && empty.size() == n) {
        const Matrix flip = p0.entries - occupied * occupied.adjoint() + empty * empty.adjoint();
        const proj::ProjectorMatrix p2 = proj::ProjectorMatrix::from((flip + flip.adjoint()) / 2.0);
        const Matrix log2 = proj::canonical_log(p0, p2);
        rep.max_full_flip_roundtrip_residual =
            std::max(rep.max_full_flip_roundtrip_residual,
                     (proj::exp_chart(p0, log2).entries - p2.entries).norm());
      }
    }

    // C-symmetric sector: classification and mod-4 spectra.
    {
      const proj::AntiunitaryMap c = proj::standard_conjugation(n_half);
      const proj::ProjectorMatrix p0 = proj::swap_vacuum_projector(n_half);
      if (proj::component_classify(p0, p0, c).component != proj::Component::e1)
        rep.vacuum_classified_e1 = false;

      // Conjugate rank-2 excitation lands in the other component.
      Vector psi = Vector::Zero(n);
      {
        const Matrix g = random_gaussian(rng, n_half, 1);
        psi.head(n_half) = g.col(0) / g.col(0).norm();
      }
      const Vector cpsi = c.apply(psi);
      const Matrix pair =
          p0.entries + psi * psi.adjoint() - cpsi * cpsi.adjoint();
      const proj::ProjectorMatrix p_pair =
          proj::ProjectorMatrix::from((pair + pair.adjoint()) / 2.0);
      if (proj::component_classify(p_pair, p0, c).component != proj::Component::e_minus_1)
        rep.pair_classified_e_minus_1 = false;

      // C-commuting chart direction; classification must be constant along
      // the path, and the difference spectra come in groups of 4.
      Matrix a = random_tangent_direction(rng, p0, 1.0);
      a = (a + c.conjugate_operator(a)) / 2.0;
      if (a.norm() > 0) a *= 1.2 / a.norm();
      for (int step = 0; step <= 4; ++step) {
        const double t = step / 4.0;
        const proj::ProjectorMatrix pt = proj::exp_chart(p0, Matrix(t * a));
        if (proj::component_classify(pt, p0, c).component != proj::Component::e1)
          rep.classification_stable = false;
      }
      const proj::ProjectorMatrix p_gamma = proj::exp_chart(p0, a);
      const Matrix gamma = p_gamma.entries - p0.entries;
      try {
        const proj::SpectrumCheckReport spec = proj::c_symmetric_spectrum_check(gamma, c);
        if (!spec.pass) rep.mod4_ok = false;
      } catch (const Error& e) {
        if (e.code() != Errc::cluster_ambiguous) throw;
        // Random θ's occasionally collide; skip the degenerate draw.
      }
    }
  }

  rep.pass = rep.max_reconstruct_residual <= 1e-10 && rep.max_roundtrip_residual <= 1e-9 &&
             rep.max_eqq_residual <= 1e-10 && rep.max_trace_integer_deviation <= 1e-9 &&
             rep.max_full_flip_roundtrip_residual <= 1e-9 && rep.vacuum_classified_e1 &&
             rep.pair_classified_e_minus_1 && rep.classification_stable && rep.mod4_ok;
  return rep;
}

RunReport run(const RunConfig& config) {
  config.validate();
  RunReport report;
  StageTimer timer(report);

  ordered_json payload;
  payload["command"] = config.command;
  payload["config"] = config_echo(config);
  ordered_json results;
  std::string external;  // declared external format for --out, when distinct

  if (config.command == "dispersion") {
    add_model_warnings(config, report);
    const DispersionTable table = timer.time("dispersion", [&] {
      return load_or_solve_dispersion(config.model, config.cache_dir);
    });
    const DispersionDiagnostics diag = dispersion_diagnostics(table);
    results["cache_path"] = dispersion_cache_path(config.cache_dir, config.model);
    results["residual"] = table.residual;
    results["m"] = diag.m;
    results["g0_slope_at_0"] = diag.g0_slope_at_0;
    results["g1_slope_at_0"] = diag.g1_slope_at_0;
    results["sup_g1_slope_minus_1"] = diag.sup_g1_slope_minus_1;
    results["argmin_e"] = diag.argmin_e;
  } else if (config.command == "pekar") {
    PekarOptions opts;
    opts.tolerance = config.pekar_tol;
    const PekarResult pekar = timer.time("pekar", [&] {
      return minimize_pekar(make_radial_grid(config.pekar_nodes, config.pekar_r_max),
                            config.pekar_init_width, opts);
    });
    results["E"] = pekar.energy;
    results["T"] = pekar.kinetic;
    results["V"] = pekar.potential;
    results["mu"] = pekar.mu;
    results["residual"] = pekar.residual;
    results["iterations"] = pekar.iterations;
    if (config.format == "csv" && !config.output_path.empty()) {
      std::ostringstream csv;
      csv << "# E=" << fmt(pekar.energy) << " T=" << fmt(pekar.kinetic)
          << " V=" << fmt(pekar.potential) << " mu=" << fmt(pekar.mu)
          << " residual=" << fmt(pekar.residual) << "\n";
      for (std::size_t i = 0; i < pekar.profile.size(); ++i)
        csv << fmt(pekar.profile.radii[i]) << "," << fmt(pekar.profile.values[i]) << "\n";
      external = csv.str();
    }
  } else if (config.command == "energy" || config.command == "sweep") {
    add_model_warnings(config, report);
    PekarOptions popts;
    popts.tolerance = config.pekar_tol;
    const PekarResult pekar = timer.time("pekar", [&] {
      return minimize_pekar(make_radial_grid(config.pekar_nodes, config.pekar_r_max),
                            config.pekar_init_width, popts);
    });

    if (config.command == "energy") {
      const DispersionTable table = timer.time("dispersion", [&] {
        return load_or_solve_dispersion(config.model, config.cache_dir);
      });
      const DispersionDiagnostics diag = dispersion_diagnostics(table);
      const double g1p = diag.g1_slope_at_0;
      // λ* is undefined at α = 0; fall back to a fixed scan scale.
      const double lambda_star =
          config.model.alpha > 0.0 ? g1p * g1p / (config.model.alpha * diag.m) : 20.0;
      const double box = config.box_length > 0.0
                             ? config.box_length
                             : auto_box_length(lambda_star, config.box_scale, config.min_box);
      const CartesianGrid grid = make_grid(config.cartesian_points, box);
      add_grid_warnings(config, grid, lambda_star, report);
      const ScanResult scan = timer.time("scan", [&] {
        return lambda_scan(pekar.profile, config.model.alpha, table, grid,
                           make_lambda_grid(lambda_star, config.scan_points, config.scan_span_lo,
                                            config.scan_span_hi));
      });
      results = scan_records(config.model.alpha, scan);
      if (!config.output_path.empty())
        external = config.format == "json" ? results.dump(2) + "\n"
                                           : csv_energy_rows(config.model.alpha, scan);
    } else {
      SweepConfig sc;
      sc.cartesian_points = config.cartesian_points;
      sc.box_scale = config.box_scale;
      sc.min_box = config.min_box;
      sc.scan_points = config.scan_points;
      sc.span_lo = config.scan_span_lo;
      sc.span_hi = config.scan_span_hi;
      if (config.sweep_alphas.empty())
        throw Error(Errc::validation_error, "field `alphas`: required for sweep");
      const TableProvider provider = [&](const ModelParams& p) {
        return load_or_solve_dispersion(p, config.cache_dir);
      };
      const std::vector<SweepRow> rows = timer.time("sweep", [&] {
        return alpha_sweep(config.sweep_alphas, config.model, pekar, sc, provider);
      });
      results = sweep_records(rows);
      if (!config.output_path.empty())
        external = config.format == "json" ? results.dump(2) + "\n" : csv_sweep_rows(rows);
    }
  } else {  // structure-check
    const StructureCheckReport sr = timer.time("structure-check", [&] {
      return structure_check_suite(config.seed, config.structure_instances,
                                   config.structure_max_dim);
    });
    results["instances"] = sr.instances;
    results["max_reconstruct_residual"] = sr.max_reconstruct_residual;
    results["max_roundtrip_residual"] = sr.max_roundtrip_residual;
    results["max_eqq_residual"] = sr.max_eqq_residual;
    results["max_trace_integer_deviation"] = sr.max_trace_integer_deviation;
    results["max_full_flip_roundtrip_residual"] = sr.max_full_flip_roundtrip_residual;
    results["vacuum_classified_e1"] = sr.vacuum_classified_e1;
    results["pair_classified_e_minus_1"] = sr.pair_classified_e_minus_1;
    results["classification_stable"] = sr.classification_stable;
    results["mod4_ok"] = sr.mod4_ok;
    results["pass"] = sr.pass;
  }

  payload["warnings"] = warnings_json(report);
  payload["results"] = results;
  report.payload_json = payload.dump(2) + "\n";

  if (!config.output_path.empty()) {
    atomic_write(config.output_path, external.empty() ? report.payload_json : external);
    report.output_path = config.output_path;
  }
  return report;
}

}  // namespace bdfp
