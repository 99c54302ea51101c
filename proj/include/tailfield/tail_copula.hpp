#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "tailfield/common.hpp"
#include "tailfield/ranks.hpp"

namespace tailfield {

// Evaluation point of the empirical tail copula / stdf: d distinct grid
// indices, a nonnegative d-vector x, and the threshold parameter k.
struct TailCopulaQuery {
  std::vector<int> t_indices;
  std::vector<double> x;
  double k = 0.0;

  void check(const RankMatrix& ranks) const;
};

// Rank-based counting estimator:
//   (1/k) #{i : for all j, rank_i(t_j) > n - k*x_j + 1}.
// x is real-valued; counts compare integer ranks against the exact real
// threshold.
double empirical_tail_copula(const RankMatrix& ranks, const TailCopulaQuery& q);

// Union-event counterpart:
//   (1/k) #{i : exists j with rank_i(t_j) > n - k*x_j + 1}.
double empirical_stdf(const RankMatrix& ranks, const TailCopulaQuery& q);

// Known-margins tail empirical distribution function
//   (1/k) #{i : for all j, U_i(t_j) < (k/n) x_j}   (strict inequality).
// `uniforms` must have entries in the open interval (0,1).
double tail_empirical_df(const Matrix& uniforms, double k, std::span<const int> t_indices,
                         std::span<const double> x);

// Central finite difference of the empirical tail copula at (1,1) in
// coordinate j (1 or 2), clamped into [0,1].
double estimate_partial_derivative(const RankMatrix& ranks, double k, int s_index, int t_index,
                                   int j, double eta);

// Bandwidth k^{-1/4}: vanishes while sqrt(k)*eta grows.
inline double default_derivative_bandwidth(double k) { return std::pow(k, -0.25); }

// Symmetric matrix of pairwise tail dependence coefficients R(1,1); diagonal
// holds the univariate value at x = 1. OpenMP-parallel over rows.
Matrix pairwise_tdc_matrix(const RankMatrix& ranks, double k);

// Bitmask of rows whose rank at a location exceeds a real threshold; the
// counting core behind the covariance assembly (AND + popcount).
struct ExceedanceMask {
  std::vector<std::uint64_t> words;
  int bits = 0;

  int count() const;
  static int count_and(const ExceedanceMask& a, const ExceedanceMask& b);
  static int count_and(const ExceedanceMask& a, const ExceedanceMask& b,
                       const ExceedanceMask& c, const ExceedanceMask& d);
};

ExceedanceMask exceedance_mask(const RankMatrix& ranks, int t_index, double threshold);

}  // namespace tailfield
