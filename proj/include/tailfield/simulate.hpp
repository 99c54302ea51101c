#pragma once

#include <cstdint>
#include <string>

#include "tailfield/common.hpp"
#include "tailfield/grid.hpp"

namespace tailfield {

// n trajectories observed on a grid, row i = trajectory i.
struct FunctionalSample {
  Matrix values;  // n x grid.points()
  Grid grid;
  std::uint64_t seed = 0;
  std::string model_tag;

  int n() const { return static_cast<int>(values.rows()); }

  void check_valid() const;
};

// Pareto-type process Y * exp{W'(t) - t/2} with Y standard Pareto and W' a
// standard Wiener path built from exact Gaussian increments between grid
// locations. Trajectories use independent streams, so the result does not
// depend on the worker count.
FunctionalSample simulate_pareto(int n, const Grid& grid, std::uint64_t seed);

// Gaussian moving-maximum process (Smith model, r = 1, sigma^2 = 1) with
// unit-Fréchet margins. Poisson points are restricted to the window
// [-A, 1+A]; the construction uses the exact-threshold stopping rule, so the
// truncation window is the only approximation.
FunctionalSample simulate_smith(int n, const Grid& grid, double window_halfwidth,
                                std::uint64_t seed);

inline FunctionalSample simulate_smith(int n, const Grid& grid, std::uint64_t seed) {
  return simulate_smith(n, grid, 5.0, seed);
}

}  // namespace tailfield
