#include "bdfp/cartesian_grid.hpp"

#include "bdfp/errors.hpp"

namespace bdfp {

void CartesianGrid::validate() const {
  if (points_per_axis < 4 || points_per_axis % 2 != 0)
    throw Error(Errc::invalid_parameter, "points_per_axis must be even and >= 4");
  if (!(box_length > 0.0)) throw Error(Errc::invalid_parameter, "box_length must be > 0");
}

CartesianGrid make_grid(int points_per_axis, double box_length) {
  CartesianGrid g{points_per_axis, box_length};
  g.validate();
  return g;
}

void validate_cutoff_coverage(const CartesianGrid& grid, double cutoff) {
  if (cutoff > grid.max_axis_momentum())
    throw Error(Errc::cutoff_exceeds_grid,
                "momentum lattice does not cover the cutoff ball (max axis momentum " +
                    std::to_string(grid.max_axis_momentum()) + " < cutoff " +
                    std::to_string(cutoff) + ")");
}

}  // namespace bdfp
