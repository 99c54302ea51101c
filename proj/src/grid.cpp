#include "tailfield/grid.hpp"

#include <cmath>
#include <string>

namespace tailfield {

Grid Grid::uniform(int intervals) {
  if (intervals < 1) throw validation_error("Grid::uniform: need at least one interval");
  std::vector<double> locs(intervals + 1);
  for (int r = 0; r <= intervals; ++r) locs[r] = static_cast<double>(r) / intervals;
  return Grid(std::move(locs));
}

bool Grid::is_uniform(double tol) const {
  const int np = points();
  if (np < 2) return true;
  const int n_int = np - 1;
  for (int r = 0; r < np; ++r)
    if (std::fabs(locations[r] - static_cast<double>(r) / n_int) > tol) return false;
  return true;
}

void Grid::check_valid() const {
  if (locations.empty()) throw validation_error("Grid: empty location vector");
  double prev = -1.0;
  for (double t : locations) {
    if (!std::isfinite(t) || t < 0.0 || t > 1.0)
      throw validation_error("Grid: locations must lie in [0,1]");
    if (t <= prev) throw validation_error("Grid: locations must be strictly increasing");
    prev = t;
  }
}

double distortion_map(double t, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw validation_error("distortion_map: theta must lie in [0,1]");
  const double num = (2.0 - theta * t) * t;
  if (num == 0.0) return 0.0;  // theta = 1, t = 0 is a 0/0 form with limit 0
  const double den = 1.0 - theta + std::sqrt((2.0 - theta * t) * theta * t +
                                             (1.0 - theta) * (1.0 - theta));
  return num / den;
}

Grid distort_grid(const Grid& grid, double theta) {
  grid.check_valid();
  std::vector<double> locs(grid.locations.size());
  for (std::size_t i = 0; i < locs.size(); ++i) locs[i] = distortion_map(grid.locations[i], theta);
  return Grid(std::move(locs));
}

}  // namespace tailfield
