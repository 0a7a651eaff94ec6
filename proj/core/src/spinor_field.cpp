#include "bdfp/spinor_field.hpp"

#include <fftw3.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>

#include "bdfp/errors.hpp"

namespace bdfp {
namespace {

// One FFTW plan per (N, direction), created with FFTW_UNALIGNED so it can be
// re-executed on any buffer via fftw_execute_dft. Plan creation is serialized;
// execution is thread-safe.
fftw_plan get_plan(int n, int sign) {
  static std::map<std::pair<int, int>, fftw_plan> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<cplx> a(static_cast<std::size_t>(n) * n * n), b(a.size());
  fftw_plan p = fftw_plan_dft_3d(n, n, n, reinterpret_cast<fftw_complex*>(a.data()),
                                 reinterpret_cast<fftw_complex*>(b.data()), sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, p);
  return p;
}

void run_dft(const CartesianGrid& grid, const std::vector<cplx>& in, std::vector<cplx>& out,
             int sign, double scale) {
  out.resize(in.size());
  fftw_plan plan = get_plan(grid.points_per_axis, sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  for (auto& v : out) v *= scale;
}

double forward_scale(const CartesianGrid& g) {
  return std::pow(2.0 * M_PI, -1.5) * g.cell_volume();
}
double inverse_scale(const CartesianGrid& g) {
  return std::pow(2.0 * M_PI, -1.5) * g.momentum_cell_volume();
}

void require(bool ok, Errc code, const char* msg) {
  if (!ok) throw Error(code, msg);
}

}  // namespace

SpinorField SpinorField::zero(const CartesianGrid& grid, Representation rep) {
  SpinorField f;
  f.grid = grid;
  f.representation = rep;
  for (auto& c : f.data) c.assign(grid.total_points(), cplx(0.0, 0.0));
  return f;
}

SpinorField fourier_forward(const SpinorField& f) {
  require(f.representation == Representation::position, Errc::representation_mismatch,
          "fourier_forward expects a position-space field");
  SpinorField out;
  out.grid = f.grid;
  out.representation = Representation::momentum;
  const double s = forward_scale(f.grid);
  for (int c = 0; c < 4; ++c) run_dft(f.grid, f.data[c], out.data[c], FFTW_FORWARD, s);
  return out;
}

SpinorField fourier_inverse(const SpinorField& f) {
  require(f.representation == Representation::momentum, Errc::representation_mismatch,
          "fourier_inverse expects a momentum-space field");
  SpinorField out;
  out.grid = f.grid;
  out.representation = Representation::position;
  const double s = inverse_scale(f.grid);
  for (int c = 0; c < 4; ++c) run_dft(f.grid, f.data[c], out.data[c], FFTW_BACKWARD, s);
  return out;
}

ScalarField fourier_forward(const ScalarField& f) {
  require(f.representation == Representation::position, Errc::representation_mismatch,
          "fourier_forward expects a position-space field");
  ScalarField out;
  out.grid = f.grid;
  out.representation = Representation::momentum;
  run_dft(f.grid, f.data, out.data, FFTW_FORWARD, forward_scale(f.grid));
  return out;
}

ScalarField fourier_inverse(const ScalarField& f) {
  require(f.representation == Representation::momentum, Errc::representation_mismatch,
          "fourier_inverse expects a momentum-space field");
  ScalarField out;
  out.grid = f.grid;
  out.representation = Representation::position;
  run_dft(f.grid, f.data, out.data, FFTW_BACKWARD, inverse_scale(f.grid));
  return out;
}

SpinorField charge_conjugate(const SpinorField& f) {
  if (f.representation == Representation::momentum)
    return fourier_forward(charge_conjugate(fourier_inverse(f)));
  SpinorField out;
  out.grid = f.grid;
  out.representation = f.representation;
  const std::size_t n = f.grid.total_points();
  for (auto& c : out.data) c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.data[0][i] = std::conj(f.data[3][i]);
    out.data[1][i] = -std::conj(f.data[2][i]);
    out.data[2][i] = -std::conj(f.data[1][i]);
    out.data[3][i] = std::conj(f.data[0][i]);
  }
  return out;
}

SpinorField apply_cutoff(const SpinorField& f, double cutoff) {
  require(cutoff >= 0.0, Errc::invalid_parameter, "cutoff must be >= 0");
  if (cutoff >= f.grid.max_lattice_momentum()) return f;  // full band

  const bool from_position = f.representation == Representation::position;
  SpinorField k = from_position ? fourier_forward(f) : f;
  const int n = k.grid.points_per_axis;
  const double c2 = cutoff * cutoff;
  std::size_t idx = 0;
  for (int ix = 0; ix < n; ++ix) {
    const double kx = k.grid.momentum_component(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = k.grid.momentum_component(iy);
      for (int iz = 0; iz < n; ++iz, ++idx) {
        const double kz = k.grid.momentum_component(iz);
        if (kx * kx + ky * ky + kz * kz > c2)
          for (int c = 0; c < 4; ++c) k.data[c][idx] = cplx(0.0, 0.0);
      }
    }
  }
  return from_position ? fourier_inverse(k) : k;
}

double norm(const SpinorField& f) {
  double s = 0.0;
  for (const auto& c : f.data)
    for (const auto& v : c) s += std::norm(v);
  const double measure = f.representation == Representation::position
                             ? f.grid.cell_volume()
                             : f.grid.momentum_cell_volume();
  return std::sqrt(s * measure);
}

cplx inner_product(const SpinorField& a, const SpinorField& b) {
  require(a.grid == b.grid, Errc::grid_mismatch, "inner_product: grids differ");
  require(a.representation == b.representation, Errc::representation_mismatch,
          "inner_product: representations differ");
  cplx s(0.0, 0.0);
  for (int c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < a.data[c].size(); ++i) s += std::conj(a.data[c][i]) * b.data[c][i];
  const double measure = a.representation == Representation::position
                             ? a.grid.cell_volume()
                             : a.grid.momentum_cell_volume();
  return s * measure;
}

ScalarField pair_density(const SpinorField& a, const SpinorField& b) {
  require(a.grid == b.grid, Errc::grid_mismatch, "pair_density: grids differ");
  require(a.representation == Representation::position &&
              b.representation == Representation::position,
          Errc::representation_mismatch, "pair_density needs position-space fields");
  ScalarField out;
  out.grid = a.grid;
  out.representation = Representation::position;
  const std::size_t n = a.grid.total_points();
  out.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx s(0.0, 0.0);
    for (int c = 0; c < 4; ++c) s += std::conj(a.data[c][i]) * b.data[c][i];
    out.data[i] = s;
  }
  return out;
}

void save_spinor(const SpinorField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot open " + path + " for writing");
  const char magic[8] = {'B', 'D', 'F', 'S', 'P', 'N', 'R', '1'};
  out.write(magic, 8);
  const std::uint32_t n = static_cast<std::uint32_t>(f.grid.points_per_axis);
  const std::uint32_t rep = f.representation == Representation::momentum ? 1u : 0u;
  const double len = f.grid.box_length;
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&rep), 4);
  out.write(reinterpret_cast<const char*>(&len), 8);
  for (const auto& c : f.data)
    out.write(reinterpret_cast<const char*>(c.data()),
              static_cast<std::streamsize>(c.size() * sizeof(cplx)));
  if (!out) throw Error(Errc::io_error, "write failed: " + path);
}

SpinorField load_spinor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "BDFSPNR1", 8) != 0)
    throw Error(Errc::parse_error, "bad magic in " + path);
  std::uint32_t n = 0, rep = 0;
  double len = 0.0;
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&rep), 4);
  in.read(reinterpret_cast<char*>(&len), 8);
  if (!in || rep > 1) throw Error(Errc::parse_error, "bad header in " + path);
  SpinorField f = SpinorField::zero(make_grid(static_cast<int>(n), len),
                                    rep ? Representation::momentum : Representation::position);
  for (auto& c : f.data) {
    in.read(reinterpret_cast<char*>(c.data()),
            static_cast<std::streamsize>(c.size() * sizeof(cplx)));
    if (!in) throw Error(Errc::parse_error, "truncated field data in " + path);
  }
  return f;
}

}  // namespace bdfp
