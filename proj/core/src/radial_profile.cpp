#include "bdfp/radial_profile.hpp"

#include <cmath>

#include "bdfp/errors.hpp"

namespace bdfp {

double RadialProfile::norm_squared() const {
  double s = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i)
    s += values[i] * values[i] * radii[i] * radii[i] * weights[i];
  return 4.0 * M_PI * s;
}

void RadialProfile::normalize() {
  const double n2 = norm_squared();
  if (!(n2 > 0.0)) throw Error(Errc::invalid_parameter, "cannot normalize a zero profile");
  const double s = 1.0 / std::sqrt(n2);
  for (auto& v : values) v *= s;
}

void RadialProfile::validate() const {
  const std::size_t n = radii.size();
  if (n < 3 || weights.size() != n || values.size() != n)
    throw Error(Errc::invalid_parameter, "radial profile arrays inconsistent");
  if (!(radii.front() > 0.0)) throw Error(Errc::invalid_parameter, "radii must be positive");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(radii[i] < radii[i + 1]))
      throw Error(Errc::invalid_parameter, "radii not strictly increasing");
}

RadialProfile make_radial_grid(std::size_t nodes, double r_max) {
  if (nodes < 3) throw Error(Errc::invalid_parameter, "radial grid needs >= 3 nodes");
  if (!(r_max > 0.0)) throw Error(Errc::invalid_parameter, "r_max must be > 0");
  RadialProfile p;
  const double h = r_max / static_cast<double>(nodes);
  p.radii.resize(nodes);
  p.weights.assign(nodes, h);
  p.values.assign(nodes, 0.0);
  for (std::size_t i = 0; i < nodes; ++i) p.radii[i] = h * static_cast<double>(i + 1);
  p.weights.back() = 0.5 * h;  // trapezoid end; the r=0 ghost node carries no mass
  return p;
}

RadialProfile make_gaussian_profile(const RadialProfile& grid_layout, double width) {
  if (!(width > 0.0)) throw Error(Errc::invalid_parameter, "width must be > 0");
  RadialProfile p = grid_layout;
  const double a = std::pow(M_PI * width * width, -0.75);
  for (std::size_t i = 0; i < p.size(); ++i)
    p.values[i] = a * std::exp(-p.radii[i] * p.radii[i] / (2.0 * width * width));
  return p;
}

PchipInterpolant profile_interpolant(const RadialProfile& profile) {
  profile.validate();
  // Even extension: φ(0) from the first two nodes with φ'(0) = 0; beyond
  // r_max the profile has decayed, clamp handles it (values ~ 0 there).
  const double r1 = profile.radii[0], r2 = profile.radii[1];
  const double f1 = profile.values[0], f2 = profile.values[1];
  const double f0 = (f1 * r2 * r2 - f2 * r1 * r1) / (r2 * r2 - r1 * r1);
  std::vector<double> x, y;
  x.reserve(profile.size() + 1);
  y.reserve(profile.size() + 1);
  x.push_back(0.0);
  y.push_back(f0);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    x.push_back(profile.radii[i]);
    y.push_back(profile.values[i]);
  }
  return PchipInterpolant(std::move(x), std::move(y));
}

}  // namespace bdfp
