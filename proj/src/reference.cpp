#include "tailfield/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tailfield/models.hpp"
#include "tailfield/normal.hpp"
#include "tailfield/rng.hpp"

namespace tailfield::reference {

double empirical_tail_copula(const RankMatrix& ranks, const TailCopulaQuery& q) {
  q.check(ranks);
  long count = 0;
  for (int i = 0; i < ranks.n; ++i) {
    bool all = true;
    for (std::size_t j = 0; j < q.t_indices.size(); ++j)
      all = all && (ranks.at(i, q.t_indices[j]) > ranks.n - q.k * q.x[j] + 1.0);
    count += all;
  }
  return count / q.k;
}

Matrix pairwise_tdc_matrix(const RankMatrix& ranks, double k) {
  const int m = ranks.m;
  Matrix out(m, m);
  for (int s = 0; s < m; ++s) {
    for (int t = 0; t < m; ++t) {
      long count = 0;
      for (int i = 0; i < ranks.n; ++i) {
        const bool a = ranks.at(i, s) > ranks.n - k + 1.0;
        const bool b = ranks.at(i, t) > ranks.n - k + 1.0;
        count += (a && b);
      }
      out(s, t) = count / k;
    }
  }
  return out;
}

std::vector<double> integral_statistic(const RankMatrix& ranks, double k, int Delta) {
  if (!ranks.grid.is_uniform())
    throw validation_error("reference::integral_statistic: requires the uniform grid");
  const int N = ranks.grid.intervals();
  const Matrix tdc = reference::pairwise_tdc_matrix(ranks, k);
  std::vector<double> I;
  for (int r0 = Delta; r0 <= N - Delta; ++r0) {
    double sum = 0.0;
    for (int r = r0 - Delta; r <= r0 + Delta; ++r) {
      if (r == r0) continue;
      sum += tdc(r, r0);
    }
    I.push_back(sum / (2.0 * Delta));
  }
  return I;
}

CovMatrix estimate_VN_covariance(const RankMatrix& ranks, const TestConfig& config) {
  if (!ranks.grid.is_uniform())
    throw validation_error("reference::estimate_VN_covariance: requires the uniform grid");
  const int N = ranks.grid.intervals();
  config.check(ranks.n, N);
  const double k = config.k;
  const int Delta = config.Delta;

  // lag-averaged finite-difference partials
  const double eta = config.effective_eta();
  LagPartials lp;
  lp.Delta = Delta;
  lp.values.assign(2 * Delta + 1, 0.0);
  for (int ell = -Delta; ell <= Delta; ++ell) {
    if (ell == 0) continue;
    double sum = 0.0;
    int cnt = 0;
    for (int r = 0; r <= N; ++r) {
      const int t = r + ell;
      if (t < 0 || t > N) continue;
      sum += estimate_partial_derivative(ranks, k, r, t, 1, eta);
      ++cnt;
    }
    lp.values[ell + Delta] = sum / cnt;
  }

  TailDependenceProvider provider;
  provider.coefficient = [&](std::span<const double> locs) {
    long count = 0;
    for (int i = 0; i < ranks.n; ++i) {
      bool all = true;
      for (double loc : locs) {
        const int t = static_cast<int>(std::lround(loc * N));
        all = all && (ranks.at(i, t) > ranks.n - k + 1.0);
      }
      count += all;
    }
    return count / k;
  };
  provider.partial = [&, lp](double s, double t, int j) {
    const double gap = (j == 1) ? (t - s) : (s - t);
    return lp.at(static_cast<int>(std::lround(gap * N)));
  };

  const int m_v = N - 2 * Delta + 1;
  const double w = 1.0 / (2.0 * Delta);
  CovMatrix sigma(m_v);
  for (int a = 0; a < m_v; ++a) {
    const int r0a = Delta + a;
    for (int b = a; b < m_v; ++b) {
      const int r0b = Delta + b;
      double sum = 0.0;
      for (int r = r0a - Delta; r <= r0a + Delta; ++r) {
        if (r == r0a) continue;
        for (int rp = r0b - Delta; rp <= r0b + Delta; ++rp) {
          if (rp == r0b) continue;
          sum += hatW_covariance(static_cast<double>(r) / N, static_cast<double>(r0a) / N,
                                 static_cast<double>(rp) / N, static_cast<double>(r0b) / N,
                                 provider);
        }
      }
      sigma.at(a, b) = w * w * sum;
      sigma.at(b, a) = sigma.at(a, b);
    }
  }

  sigma = toeplitz_average(sigma);
  const double min_eig = min_eigenvalue(sigma);
  if (min_eig <= 0.0) sigma.add_diagonal(std::fabs(min_eig) + 1e-8);
  return sigma;
}

FunctionalSample simulate_pareto(int n, const Grid& grid, std::uint64_t seed) {
  grid.check_valid();
  if (n < 1) throw validation_error("reference::simulate_pareto: need n >= 1");
  const int m = grid.points();
  FunctionalSample sample;
  sample.values = Matrix(n, m);
  sample.grid = grid;
  sample.seed = seed;
  sample.model_tag = "pareto";
  for (int i = 0; i < n; ++i) {
    RandomStream rng = make_stream(seed, static_cast<std::uint64_t>(i));
    const double y = rng.pareto();
    double w = 0.0;
    double prev = 0.0;
    for (int j = 0; j < m; ++j) {
      const double t = grid.locations[j];
      if (t > prev) w += std::sqrt(t - prev) * rng.normal();
      prev = t;
      sample.values(i, j) = y * std::exp(w - 0.5 * t);
    }
  }
  return sample;
}

FunctionalSample simulate_smith(int n, const Grid& grid, double window_halfwidth,
                                std::uint64_t seed) {
  grid.check_valid();
  if (n < 1) throw validation_error("reference::simulate_smith: need n >= 1");
  if (!(window_halfwidth >= 4.0))
    throw validation_error("reference::simulate_smith: window_halfwidth must be >= 4");
  const int m = grid.points();
  const double width = 2.0 * window_halfwidth + 1.0;
  FunctionalSample sample;
  sample.values = Matrix(n, m);
  sample.grid = grid;
  sample.seed = seed;
  sample.model_tag = "smith";
  for (int i = 0; i < n; ++i) {
    RandomStream rng = make_stream(seed, static_cast<std::uint64_t>(i));
    double gamma = 0.0;
    double floor_max = 0.0;
    while (true) {
      gamma += rng.exponential();
      if (width * norm_pdf(0.0) / gamma < floor_max) break;
      const double s = -window_halfwidth + width * rng.uniform();
      double new_floor = std::numeric_limits<double>::infinity();
      for (int j = 0; j < m; ++j) {
        const double v = width * norm_pdf(s - grid.locations[j]) / gamma;
        if (v > sample.values(i, j)) sample.values(i, j) = v;
        new_floor = std::min(new_floor, sample.values(i, j));
      }
      floor_max = new_floor;
    }
  }
  return sample;
}

}  // namespace tailfield::reference
