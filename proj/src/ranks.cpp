#include "tailfield/ranks.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

namespace tailfield {

RankMatrix compute_ranks(const FunctionalSample& sample) {
  sample.check_valid();
  const int n = sample.n();
  const int m = sample.grid.points();

  RankMatrix rm;
  rm.n = n;
  rm.m = m;
  rm.grid = sample.grid;
  rm.ranks.resize(static_cast<std::size_t>(n) * m);

  std::atomic<long> ties{0};
  parallel_for(m, [&](std::int64_t t) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double va = sample.values(a, t);
      const double vb = sample.values(b, t);
      if (va != vb) return va < vb;
      return a < b;
    });
    long col_ties = 0;
    for (int pos = 0; pos < n; ++pos) {
      rm.at(order[pos], static_cast<int>(t)) = pos + 1;
      if (pos > 0 && sample.values(order[pos], t) == sample.values(order[pos - 1], t))
        ++col_ties;
    }
    ties += col_ties;
  });
  rm.tie_count = ties.load();
  return rm;
}

}  // namespace tailfield
