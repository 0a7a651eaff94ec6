#pragma once

#include <cmath>
#include <cstddef>

namespace bdfp {

// Periodic cubic grid: N points per axis on [0, L)³, momentum lattice
// (2π/L)·{-N/2, ..., N/2-1}³. Storage is row-major with x slowest:
// index = (ix*N + iy)*N + iz.
struct CartesianGrid {
  int points_per_axis = 0;  // even
  double box_length = 0.0;

  void validate() const;

  std::size_t total_points() const {
    const std::size_t n = static_cast<std::size_t>(points_per_axis);
    return n * n * n;
  }
  double spacing() const { return box_length / points_per_axis; }
  double cell_volume() const { return spacing() * spacing() * spacing(); }
  double momentum_spacing() const { return 2.0 * M_PI / box_length; }
  double momentum_cell_volume() const {
    const double dk = momentum_spacing();
    return dk * dk * dk;
  }

  // Signed momentum component for a storage index along one axis.
  double momentum_component(int idx) const {
    const int m = idx < points_per_axis / 2 ? idx : idx - points_per_axis;
    return momentum_spacing() * m;
  }
  // Storage index of the negated momentum along one axis.
  int conjugate_index(int idx) const { return idx == 0 ? 0 : points_per_axis - idx; }

  // Largest symmetric per-axis momentum, (2π/L)(N/2 - 1): the lattice covers
  // B(0, Λ) iff Λ <= this.
  double max_axis_momentum() const { return momentum_spacing() * (points_per_axis / 2 - 1); }
  // Largest |k| present on the lattice (corner mode).
  double max_lattice_momentum() const {
    return momentum_spacing() * (points_per_axis / 2) * std::sqrt(3.0);
  }

  bool operator==(const CartesianGrid& o) const {
    return points_per_axis == o.points_per_axis && box_length == o.box_length;
  }
};

CartesianGrid make_grid(int points_per_axis, double box_length);

// Throws cutoff-exceeds-grid when B(0, cutoff) is not covered by the
// momentum lattice. The CLI surfaces this as a warning for production boxes.
void validate_cutoff_coverage(const CartesianGrid& grid, double cutoff);

}  // namespace bdfp
