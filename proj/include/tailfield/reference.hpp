#pragma once

#include "tailfield/ranks.hpp"
#include "tailfield/simulate.hpp"
#include "tailfield/stattest.hpp"
#include "tailfield/tail_copula.hpp"

// Serial reference implementations: straightforward transcriptions of the
// defining formulas, kept for testing the optimized kernels and for the
// benchmark target. No bitmask counting, no Gram-matrix shortcut, no OpenMP.

namespace tailfield::reference {

double empirical_tail_copula(const RankMatrix& ranks, const TailCopulaQuery& q);

Matrix pairwise_tdc_matrix(const RankMatrix& ranks, double k);

std::vector<double> integral_statistic(const RankMatrix& ranks, double k, int Delta);

// Per-entry nine-term covariance expansion through hatW_covariance with
// empirical providers, then the same Toeplitz projection and ridge policy.
CovMatrix estimate_VN_covariance(const RankMatrix& ranks, const TestConfig& config);

FunctionalSample simulate_pareto(int n, const Grid& grid, std::uint64_t seed);

FunctionalSample simulate_smith(int n, const Grid& grid, double window_halfwidth,
                                std::uint64_t seed);

}  // namespace tailfield::reference
