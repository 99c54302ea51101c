#include "tailfield/simulate.hpp"

#include <cmath>
#include <limits>

#include "tailfield/normal.hpp"
#include "tailfield/rng.hpp"

namespace tailfield {

void FunctionalSample::check_valid() const {
  grid.check_valid();
  if (n() < 1) throw validation_error("FunctionalSample: need n >= 1 trajectories");
  if (values.cols() != static_cast<std::size_t>(grid.points()))
    throw validation_error("FunctionalSample: column count must match grid");
  for (double v : values.data())
    if (!std::isfinite(v)) throw validation_error("FunctionalSample: non-finite value");
}

FunctionalSample simulate_pareto(int n, const Grid& grid, std::uint64_t seed) {
  grid.check_valid();
  if (n < 1) throw validation_error("simulate_pareto: need n >= 1");
  const int m = grid.points();
  FunctionalSample sample;
  sample.values = Matrix(n, m);
  sample.grid = grid;
  sample.seed = seed;
  sample.model_tag = "pareto";

  parallel_for(n, [&](std::int64_t i) {
    RandomStream rng = make_stream(seed, static_cast<std::uint64_t>(i));
    const double y = rng.pareto();
    double w = 0.0;    // Wiener path value
    double prev = 0.0; // time of the last increment
    double* row = sample.values.row(i);
    for (int j = 0; j < m; ++j) {
      const double t = grid.locations[j];
      const double dt = t - prev;
      if (dt > 0.0) w += std::sqrt(dt) * rng.normal();
      prev = t;
      row[j] = y * std::exp(w - 0.5 * t);
    }
  });
  return sample;
}

FunctionalSample simulate_smith(int n, const Grid& grid, double window_halfwidth,
                                std::uint64_t seed) {
  grid.check_valid();
  if (n < 1) throw validation_error("simulate_smith: need n >= 1");
  if (!(window_halfwidth >= 4.0))
    throw validation_error("simulate_smith: window_halfwidth must be >= 4 (truncation bias)");
  const int m = grid.points();
  const double width = 2.0 * window_halfwidth + 1.0;  // |[-A, 1+A]|
  const double sup_kernel = norm_pdf(0.0);
  constexpr long kMaxPoints = 100000000L;

  FunctionalSample sample;
  sample.values = Matrix(n, m);
  sample.grid = grid;
  sample.seed = seed;
  sample.model_tag = "smith";

  parallel_for(n, [&](std::int64_t i) {
    RandomStream rng = make_stream(seed, static_cast<std::uint64_t>(i));
    double* row = sample.values.row(i);
    double gamma = 0.0;
    double floor_max = 0.0;  // min over the grid of the running maximum
    for (long pts = 0; pts < kMaxPoints; ++pts) {
      gamma += rng.exponential();
      // No later point can exceed this bound anywhere.
      if (width * sup_kernel / gamma < floor_max) break;
      const double s = -window_halfwidth + width * rng.uniform();
      double new_floor = std::numeric_limits<double>::infinity();
      for (int j = 0; j < m; ++j) {
        const double v = width * norm_pdf(s - grid.locations[j]) / gamma;
        if (v > row[j]) row[j] = v;
        if (row[j] < new_floor) new_floor = row[j];
      }
      floor_max = new_floor;
    }
  });
  return sample;
}

}  // namespace tailfield
