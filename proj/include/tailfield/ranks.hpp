#pragma once

#include <cstdint>
#include <vector>

#include "tailfield/grid.hpp"
#include "tailfield/simulate.hpp"

namespace tailfield {

// Per-location ranks of the sample; the sole input to the rank-based
// estimators. Each column is a permutation of {1,...,n}.
struct RankMatrix {
  std::vector<std::int32_t> ranks;  // n x m row-major
  int n = 0;
  int m = 0;
  Grid grid;
  long tie_count = 0;  // exact value collisions, broken by observation index

  std::int32_t at(int i, int t) const {
    return ranks[static_cast<std::size_t>(i) * m + t];
  }
  std::int32_t& at(int i, int t) { return ranks[static_cast<std::size_t>(i) * m + t]; }
};

// rank_i(t) = #{alpha : value[alpha][t] <= value[i][t]}; ties are broken by
// observation index (smaller index gets the smaller rank).
RankMatrix compute_ranks(const FunctionalSample& sample);

}  // namespace tailfield
