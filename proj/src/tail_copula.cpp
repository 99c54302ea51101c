#include "tailfield/tail_copula.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace tailfield {

void TailCopulaQuery::check(const RankMatrix& ranks) const {
  if (t_indices.empty()) throw validation_error("TailCopulaQuery: empty index tuple");
  if (t_indices.size() != x.size())
    throw validation_error("TailCopulaQuery: index/argument length mismatch");
  if (!(k > 0.0 && k <= ranks.n))
    throw validation_error("TailCopulaQuery: k must lie in (0, n]");
  for (std::size_t a = 0; a < t_indices.size(); ++a) {
    if (t_indices[a] < 0 || t_indices[a] >= ranks.m)
      throw validation_error("TailCopulaQuery: grid index out of range");
    if (!(x[a] >= 0.0) || !std::isfinite(x[a]))
      throw validation_error("TailCopulaQuery: x must be finite and nonnegative");
    for (std::size_t b = a + 1; b < t_indices.size(); ++b)
      if (t_indices[a] == t_indices[b])
        throw validation_error("TailCopulaQuery: indices must be pairwise distinct");
  }
}

double empirical_tail_copula(const RankMatrix& ranks, const TailCopulaQuery& q) {
  q.check(ranks);
  const int d = static_cast<int>(q.t_indices.size());
  const int n = ranks.n;
  std::vector<double> thresholds(d);
  for (int j = 0; j < d; ++j) thresholds[j] = n - q.k * q.x[j] + 1.0;
  long count = 0;
  for (int i = 0; i < n; ++i) {
    bool all = true;
    for (int j = 0; j < d; ++j) {
      if (!(ranks.at(i, q.t_indices[j]) > thresholds[j])) {
        all = false;
        break;
      }
    }
    count += all;
  }
  return count / q.k;
}

double empirical_stdf(const RankMatrix& ranks, const TailCopulaQuery& q) {
  q.check(ranks);
  const int d = static_cast<int>(q.t_indices.size());
  const int n = ranks.n;
  std::vector<double> thresholds(d);
  for (int j = 0; j < d; ++j) thresholds[j] = n - q.k * q.x[j] + 1.0;
  long count = 0;
  for (int i = 0; i < n; ++i) {
    bool any = false;
    for (int j = 0; j < d; ++j) {
      if (ranks.at(i, q.t_indices[j]) > thresholds[j]) {
        any = true;
        break;
      }
    }
    count += any;
  }
  return count / q.k;
}

double tail_empirical_df(const Matrix& uniforms, double k, std::span<const int> t_indices,
                         std::span<const double> x) {
  const int n = static_cast<int>(uniforms.rows());
  if (n < 1) throw validation_error("tail_empirical_df: empty sample");
  if (!(k > 0.0 && k <= n)) throw validation_error("tail_empirical_df: k must lie in (0, n]");
  if (t_indices.size() != x.size() || t_indices.empty())
    throw validation_error("tail_empirical_df: index/argument length mismatch");
  for (double v : uniforms.data())
    if (!(v > 0.0 && v < 1.0))
      throw validation_error("tail_empirical_df: entries must lie in (0,1)");
  const double ratio = k / n;
  long count = 0;
  for (int i = 0; i < n; ++i) {
    bool all = true;
    for (std::size_t j = 0; j < t_indices.size(); ++j) {
      const int t = t_indices[j];
      if (t < 0 || t >= static_cast<int>(uniforms.cols()))
        throw validation_error("tail_empirical_df: index out of range");
      if (!(uniforms(i, t) < ratio * x[j])) {
        all = false;
        break;
      }
    }
    count += all;
  }
  return count / k;
}

double estimate_partial_derivative(const RankMatrix& ranks, double k, int s_index, int t_index,
                                   int j, double eta) {
  if (!(eta > 0.0)) throw validation_error("estimate_partial_derivative: eta must be positive");
  if (s_index == t_index)
    throw validation_error("estimate_partial_derivative: locations must differ");
  if (j != 1 && j != 2) throw validation_error("estimate_partial_derivative: j must be 1 or 2");
  TailCopulaQuery hi{{s_index, t_index}, {1.0, 1.0}, k};
  TailCopulaQuery lo = hi;
  const int coord = j - 1;
  hi.x[coord] = 1.0 + eta;
  lo.x[coord] = std::max(0.0, 1.0 - eta);
  const double diff =
      (empirical_tail_copula(ranks, hi) - empirical_tail_copula(ranks, lo)) / (2.0 * eta);
  return std::clamp(diff, 0.0, 1.0);
}

Matrix pairwise_tdc_matrix(const RankMatrix& ranks, double k) {
  if (!(k > 0.0 && k <= ranks.n)) throw validation_error("pairwise_tdc_matrix: k must lie in (0, n]");
  const int m = ranks.m;
  const double threshold = ranks.n - k + 1.0;
  std::vector<ExceedanceMask> masks(m);
  parallel_for(m, [&](std::int64_t t) {
    masks[t] = exceedance_mask(ranks, static_cast<int>(t), threshold);
  });
  Matrix out(m, m);
  parallel_for(m, [&](std::int64_t s) {
    out(s, s) = masks[s].count() / k;
    for (int t = static_cast<int>(s) + 1; t < m; ++t) {
      const double v = ExceedanceMask::count_and(masks[s], masks[t]) / k;
      out(s, t) = v;
    }
  });
  for (int s = 0; s < m; ++s)
    for (int t = 0; t < s; ++t) out(s, t) = out(t, s);
  return out;
}

int ExceedanceMask::count() const {
  int c = 0;
  for (std::uint64_t w : words) c += std::popcount(w);
  return c;
}

int ExceedanceMask::count_and(const ExceedanceMask& a, const ExceedanceMask& b) {
  int c = 0;
  for (std::size_t i = 0; i < a.words.size(); ++i) c += std::popcount(a.words[i] & b.words[i]);
  return c;
}

int ExceedanceMask::count_and(const ExceedanceMask& a, const ExceedanceMask& b,
                              const ExceedanceMask& c, const ExceedanceMask& d) {
  int cnt = 0;
  for (std::size_t i = 0; i < a.words.size(); ++i)
    cnt += std::popcount(a.words[i] & b.words[i] & c.words[i] & d.words[i]);
  return cnt;
}

ExceedanceMask exceedance_mask(const RankMatrix& ranks, int t_index, double threshold) {
  ExceedanceMask mask;
  mask.bits = ranks.n;
  mask.words.assign((ranks.n + 63) / 64, 0);
  for (int i = 0; i < ranks.n; ++i)
    if (ranks.at(i, t_index) > threshold)
      mask.words[i >> 6] |= (std::uint64_t{1} << (i & 63));
  return mask;
}

}  // namespace tailfield
