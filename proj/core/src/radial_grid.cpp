#include "bdfp/radial_grid.hpp"

#include <cmath>

#include "bdfp/errors.hpp"
#include "bdfp/model_params.hpp"

namespace bdfp {

void ModelParams::validate() const {
  if (!(alpha >= 0.0)) throw Error(Errc::invalid_parameter, "alpha must be >= 0");
  if (!(cutoff > 0.0)) throw Error(Errc::invalid_parameter, "cutoff must be > 0");
  if (radial_points < 2) throw Error(Errc::invalid_parameter, "radial_points must be >= 2");
  if (!(fixed_point.tolerance > 0.0)) throw Error(Errc::invalid_parameter, "tolerance must be > 0");
  if (fixed_point.max_iterations < 1)
    throw Error(Errc::invalid_parameter, "max_iterations must be >= 1");
  if (!(fixed_point.damping > 0.0 && fixed_point.damping <= 1.0))
    throw Error(Errc::invalid_parameter, "damping must be in (0, 1]");
}

void RadialGrid::validate() const {
  const std::size_t n = nodes.size();
  if (n < 2 || quadrature_weights.size() != n)
    throw Error(Errc::invalid_parameter, "radial grid needs >= 2 nodes with matching weights");
  if (nodes.front() != 0.0) throw Error(Errc::invalid_parameter, "first node must be 0");
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n && !(nodes[i] < nodes[i + 1]))
      throw Error(Errc::invalid_parameter, "nodes not strictly increasing");
    if (!(quadrature_weights[i] > 0.0))
      throw Error(Errc::invalid_parameter, "weights must be positive");
    wsum += quadrature_weights[i];
  }
  if (std::abs(wsum - cutoff()) > 1e-12 * std::max(1.0, cutoff()))
    throw Error(Errc::invalid_parameter, "weights do not reproduce the interval length");
}

RadialGrid build_radial_grid(std::size_t n, double cutoff, double grading) {
  if (n < 2) throw Error(Errc::invalid_parameter, "radial grid needs n >= 2");
  if (!(cutoff > 0.0)) throw Error(Errc::invalid_parameter, "cutoff must be > 0");
  if (!(grading >= 1.0)) throw Error(Errc::invalid_parameter, "grading must be >= 1");

  RadialGrid grid;
  grid.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    grid.nodes[i] = cutoff * std::pow(t, grading);
  }
  grid.nodes[0] = 0.0;
  grid.nodes[n - 1] = cutoff;

  // Composite trapezoid weights on the graded nodes.
  grid.quadrature_weights.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = grid.nodes[i + 1] - grid.nodes[i];
    grid.quadrature_weights[i] += 0.5 * h;
    grid.quadrature_weights[i + 1] += 0.5 * h;
  }
  grid.validate();
  return grid;
}

}  // namespace bdfp
