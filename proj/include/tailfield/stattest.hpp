#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tailfield/linalg.hpp"
#include "tailfield/models.hpp"
#include "tailfield/mvn.hpp"
#include "tailfield/simulate.hpp"
#include "tailfield/tail_copula.hpp"

namespace tailfield {

struct TestConfig {
  double k = 0.0;
  int Delta = 0;
  double eta = 0.0;  // 0 selects the default bandwidth k^{-1/4}
  MvnOptions mvn;

  double effective_eta() const { return eta > 0.0 ? eta : default_derivative_bandwidth(k); }
  void check(int n, int grid_intervals) const;
};

struct TestDiagnostics {
  long tie_count = 0;
  bool ridge_applied = false;       // Toeplitz projection broke PSD
  double toeplitz_deviation = 0.0;  // pre-projection deviation of Sigma_hat
  bool mvn_budget_exceeded = false;
  bool mvn_ridged = false;
  long mvn_points = 0;
};

struct TestResult {
  double D = 0.0;
  std::vector<double> I_hat;          // r0 in {Delta,...,N-Delta}
  CovMatrix Sigma_hat;                // covariance of V^(N)
  double p_value = 1.0;
  long count_range = 0;               // 2*Delta*sqrt(k)*D, an exact integer
  TestDiagnostics diagnostics;
};

// Window sums of joint tail-exceedance counts, S(r0) = sum over the window
// of the pairwise counts at x = (1,1); I_hat = S / (2*Delta*k).
std::vector<long> integral_counts(const RankMatrix& ranks, double k, int Delta);

// Local integral statistic I_hat(r0/N) over a uniform grid.
std::vector<double> integral_statistic(const RankMatrix& ranks, double k, int Delta);

// Range statistic sqrt(k) * (max I_hat - min I_hat).
double test_statistic(std::span<const double> I_hat, double k);

// Covariance of V^(N) estimated from ranks: Gram matrix of tail-exceedance
// indicators, linear transform with lag-averaged finite-difference partials,
// Toeplitz projection by subdiagonal averaging, and a diagonal ridge when
// the projection breaks positive semidefiniteness.
CovMatrix estimate_VN_covariance(const RankMatrix& ranks, const TestConfig& config,
                                 TestDiagnostics* diagnostics = nullptr);

// Same linear assembly with the exact model coefficients and partials.
CovMatrix theoretical_VN_covariance(const ModelSpec& model, int grid_intervals, int Delta,
                                    const MvnOptions& options = {});

// Lag-averaged, clamped finite-difference estimates of the partial
// derivative at (1,1); index signed lag ell in [-Delta, Delta], ell != 0.
struct LagPartials {
  int Delta = 0;
  std::vector<double> values;  // size 2*Delta+1, entry Delta unused

  double at(int ell) const { return values[ell + Delta]; }
};

LagPartials estimate_lag_partials(const RankMatrix& ranks, double k, double eta, int Delta);

// Full test: ranks -> I_hat -> D, Sigma_hat, p = 1 - F(D; Sigma_hat).
TestResult stationarity_test(const FunctionalSample& sample, const TestConfig& config);

// Monte Carlo size/power harness over the grid-distortion family.
struct McConfig {
  ModelSpec model;
  std::vector<double> thetas;
  int n = 0;
  int grid_intervals = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  TestConfig test;
  double window_halfwidth = 5.0;
};

struct McThetaResult {
  double theta = 0.0;
  std::vector<double> p_values;
  std::vector<double> d_values;
  std::vector<long> scaled_stats;  // 2*Delta*sqrt(k)*D, integers
};

struct McSummaryRow {
  double theta = 0.0;
  double alpha = 0.0;
  double reject_rate = 0.0;
  double se = 0.0;
};

inline constexpr double kMcAlphas[] = {0.01, 0.05, 0.10};

struct McExperiment {
  std::vector<McThetaResult> per_theta;
  std::vector<McSummaryRow> summary;
};

McExperiment monte_carlo_experiment(const McConfig& config);

// Deterministic per-replication seed derivation.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace tailfield
