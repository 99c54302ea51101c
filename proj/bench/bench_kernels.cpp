// Timing comparison of the OpenMP-parallel kernels against the serial
// reference implementations. Usage: bench_kernels [n] [grid_n]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "tailfield/mvn.hpp"
#include "tailfield/reference.hpp"
#include "tailfield/stattest.hpp"

using namespace tailfield;

namespace {

template <class F>
double time_ms(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 2000;
  const int grid_n = argc > 2 ? std::atoi(argv[2]) : 60;
  std::printf("n = %d, grid intervals = %d, threads = %d\n\n", n, grid_n, max_threads());

  const Grid grid = Grid::uniform(grid_n);

  FunctionalSample sample;
  double t_serial = time_ms([&] { sample = reference::simulate_pareto(n, grid, 42); });
  FunctionalSample sample_par;
  double t_par = time_ms([&] { sample_par = simulate_pareto(n, grid, 42); });
  report("simulate_pareto", t_serial, t_par);
  if (!(sample.values == sample_par.values)) {
    std::fprintf(stderr, "FAIL: parallel pareto sample differs from serial reference\n");
    return 1;
  }

  FunctionalSample smith_serial, smith_par;
  t_serial = time_ms([&] { smith_serial = reference::simulate_smith(n / 4, grid, 5.0, 42); });
  t_par = time_ms([&] { smith_par = simulate_smith(n / 4, grid, 5.0, 42); });
  report("simulate_smith", t_serial, t_par);
  if (!(smith_serial.values == smith_par.values)) {
    std::fprintf(stderr, "FAIL: parallel smith sample differs from serial reference\n");
    return 1;
  }

  const RankMatrix ranks = compute_ranks(sample);
  const double k = n / 10.0;

  Matrix tdc_serial, tdc_par;
  t_serial = time_ms([&] { tdc_serial = reference::pairwise_tdc_matrix(ranks, k); });
  t_par = time_ms([&] { tdc_par = pairwise_tdc_matrix(ranks, k); });
  report("pairwise_tdc_matrix", t_serial, t_par);
  if (!(tdc_serial == tdc_par)) {
    std::fprintf(stderr, "FAIL: parallel pairwise matrix differs from serial reference\n");
    return 1;
  }

  TestConfig config;
  config.k = k;
  config.Delta = 2;
  CovMatrix cov_serial, cov_par;
  t_serial = time_ms([&] { cov_serial = reference::estimate_VN_covariance(ranks, config); });
  t_par = time_ms([&] { cov_par = estimate_VN_covariance(ranks, config); });
  report("estimate_VN_covariance", t_serial, t_par);
  double max_diff = 0.0;
  for (int i = 0; i < cov_serial.dim; ++i)
    for (int j = 0; j < cov_serial.dim; ++j)
      max_diff = std::max(max_diff, std::fabs(cov_serial.at(i, j) - cov_par.at(i, j)));
  std::printf("  covariance max |diff| = %.3e\n", max_diff);
  if (max_diff > 1e-10) {
    std::fprintf(stderr, "FAIL: covariance assembly mismatch\n");
    return 1;
  }

  const CovMatrix sigma = theoretical_VN_covariance(ModelSpec::smith(), 20, 2);
  MvnOptions mvn;
  double f_val = 0.0;
  const double t_range = time_ms([&] { f_val = range_cdf(1.0, sigma, mvn); });
  std::printf("%-28s %9.2f ms   (F(1) = %.6f)\n", "range_cdf dim 17", t_range, f_val);

  std::printf("\nall kernel outputs match the serial reference\n");
  return 0;
}
