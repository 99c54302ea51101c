#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "tailfield/linalg.hpp"

namespace tailfield {

struct MvnOptions {
  double tol = 1e-4;
  long max_points = 200000;  // total integrand evaluations per call
  int shifts = 12;           // randomization shifts
  std::uint64_t seed = 0x5DEECE66DULL;
};

struct MvnResult {
  double value = 0.0;
  double error_estimate = 0.0;  // 3x standard error across shifts
  long points_used = 0;
  bool budget_exceeded = false;
  bool ridged = false;  // covariance was ridge-regularized
};

// Rectangle probability P(lower <= X <= upper) for X ~ N(0, gamma), by the
// separation-of-variables transform of Genz (1992): Cholesky with variable
// reordering (smallest conditional interval first) and a randomized
// quasi-Monte Carlo rule over the unit cube. Infinite bounds are allowed.
MvnResult mvn_cdf(std::span<const double> lower, std::span<const double> upper,
                  const CovMatrix& gamma, const MvnOptions& options = {});

// Distribution function of max(U) - min(U) for U ~ N(0, gamma), dim >= 2:
//   F(q) = sum_i Phi_{m-1}([-q,0]^{m-1}; cov((U_j - U_i)_{j != i})).
double range_cdf(double q, const CovMatrix& gamma, const MvnOptions& options = {},
                 MvnResult* diagnostics = nullptr);

// Density of the range by central differencing of range_cdf.
double range_pdf(double q, const CovMatrix& gamma, double step,
                 const MvnOptions& options = {});

// Step with discretization error balanced against the integration tolerance.
inline double default_range_pdf_step(double tol) { return std::sqrt(tol); }

}  // namespace tailfield
