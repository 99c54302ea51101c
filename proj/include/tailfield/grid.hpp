#pragma once

#include <vector>

#include "tailfield/common.hpp"

namespace tailfield {

// Finite observation grid on [0,1]: strictly increasing locations.
struct Grid {
  std::vector<double> locations;

  Grid() = default;
  explicit Grid(std::vector<double> locs) : locations(std::move(locs)) { check_valid(); }

  // Uniform grid {r/N : r = 0,...,N} with N intervals.
  static Grid uniform(int intervals);

  int points() const { return static_cast<int>(locations.size()); }
  int intervals() const { return points() - 1; }

  bool is_uniform(double tol = 1e-9) const;

  void check_valid() const;
};

// Distortion family f_theta mapping [0,1] onto itself; f_0 is the identity
// and f_1 traces the quarter circle sqrt((2-t)t).
double distortion_map(double t, double theta);

Grid distort_grid(const Grid& grid, double theta);

}  // namespace tailfield
