#include "tailfield/stattest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tailfield/rng.hpp"

namespace tailfield {

void TestConfig::check(int n, int grid_intervals) const {
  if (!(k > 0.0 && k <= n)) throw validation_error("TestConfig: k must lie in (0, n]");
  if (!(Delta >= 1 && 2 * Delta < grid_intervals))
    throw validation_error("TestConfig: need 1 <= Delta < N/2");
  if (eta < 0.0) throw validation_error("TestConfig: eta must be nonnegative");
}

namespace {

void require_uniform(const Grid& grid) {
  if (!grid.is_uniform())
    throw validation_error("stattest: requires the uniform grid {r/N : r = 0..N}");
}

// Index layout of the joint Gaussian vector behind V^(N): first the ordered
// pairs (r, r0) appearing in the windows, then the N+1 single locations.
struct VnLayout {
  int N = 0;
  int Delta = 0;
  int m_v = 0;  // N - 2*Delta + 1
  std::vector<std::pair<int, int>> pairs;
  int P = 0;
  int J = 0;

  static VnLayout make(int N, int Delta) {
    VnLayout lay;
    lay.N = N;
    lay.Delta = Delta;
    lay.m_v = N - 2 * Delta + 1;
    for (int a = 0; a < lay.m_v; ++a) {
      const int r0 = Delta + a;
      for (int r = r0 - Delta; r <= r0 + Delta; ++r) {
        if (r == r0) continue;
        lay.pairs.emplace_back(r, r0);
      }
    }
    lay.P = static_cast<int>(lay.pairs.size());
    lay.J = lay.P + N + 1;
    return lay;
  }

  // Grid indices of item p (a pair or a single location).
  void item_indices(int p, int out[2], int& count) const {
    if (p < P) {
      out[0] = pairs[p].first;
      out[1] = pairs[p].second;
      count = 2;
    } else {
      out[0] = p - P;
      count = 1;
    }
  }
};

// Sigma_V = M G M' with G the Gram matrix of the layout items and M the
// window/linear-transform coefficients built from the lag partials.
CovMatrix assemble_vn(const VnLayout& lay, const std::function<double(int, int)>& gram_entry,
                      const std::function<double(int)>& lag_partial) {
  Matrix gram(lay.J, lay.J);
  parallel_for(lay.J, [&](std::int64_t p) {
    for (int q = static_cast<int>(p); q < lay.J; ++q)
      gram(p, q) = gram_entry(static_cast<int>(p), q);
  });
  for (int p = 0; p < lay.J; ++p)
    for (int q = 0; q < p; ++q) gram(p, q) = gram(q, p);

  Matrix coeff(lay.m_v, lay.J);
  const double w = 1.0 / (2.0 * lay.Delta);
  for (int a = 0; a < lay.m_v; ++a) {
    const int r0 = lay.Delta + a;
    int p = a * 2 * lay.Delta;
    for (int r = r0 - lay.Delta; r <= r0 + lay.Delta; ++r) {
      if (r == r0) continue;
      coeff(a, p) += w;
      coeff(a, lay.P + r) -= w * lag_partial(r0 - r);
      coeff(a, lay.P + r0) -= w * lag_partial(r - r0);
      ++p;
    }
  }

  // Sigma = coeff * gram * coeff'
  Matrix tmp(lay.m_v, lay.J);
  for (int a = 0; a < lay.m_v; ++a)
    for (int q = 0; q < lay.J; ++q) {
      double s = 0.0;
      for (int p = 0; p < lay.J; ++p) s += coeff(a, p) * gram(p, q);
      tmp(a, q) = s;
    }
  CovMatrix sigma(lay.m_v);
  for (int a = 0; a < lay.m_v; ++a)
    for (int b = a; b < lay.m_v; ++b) {
      double s = 0.0;
      for (int q = 0; q < lay.J; ++q) s += tmp(a, q) * coeff(b, q);
      sigma.at(a, b) = s;
      sigma.at(b, a) = s;
    }
  return sigma;
}

}  // namespace

std::vector<long> integral_counts(const RankMatrix& ranks, double k, int Delta) {
  require_uniform(ranks.grid);
  const int N = ranks.grid.intervals();
  if (!(k > 0.0 && k <= ranks.n)) throw validation_error("integral_counts: k must lie in (0, n]");
  if (!(Delta >= 1 && 2 * Delta < N))
    throw validation_error("integral_counts: need 1 <= Delta < N/2");
  const double threshold = ranks.n - k + 1.0;
  std::vector<ExceedanceMask> masks(N + 1);
  for (int r = 0; r <= N; ++r) masks[r] = exceedance_mask(ranks, r, threshold);
  std::vector<long> sums(N - 2 * Delta + 1, 0);
  for (int r0 = Delta; r0 <= N - Delta; ++r0) {
    long s = 0;
    for (int r = r0 - Delta; r <= r0 + Delta; ++r) {
      if (r == r0) continue;
      s += ExceedanceMask::count_and(masks[r], masks[r0]);
    }
    sums[r0 - Delta] = s;
  }
  return sums;
}

std::vector<double> integral_statistic(const RankMatrix& ranks, double k, int Delta) {
  const std::vector<long> sums = integral_counts(ranks, k, Delta);
  std::vector<double> I(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) I[i] = sums[i] / (2.0 * Delta * k);
  return I;
}

double test_statistic(std::span<const double> I_hat, double k) {
  if (I_hat.empty()) throw validation_error("test_statistic: empty statistic vector");
  const auto [lo, hi] = std::minmax_element(I_hat.begin(), I_hat.end());
  return std::sqrt(k) * (*hi - *lo);
}

LagPartials estimate_lag_partials(const RankMatrix& ranks, double k, double eta, int Delta) {
  if (!(eta > 0.0)) throw validation_error("estimate_lag_partials: eta must be positive");
  const int N = ranks.grid.intervals();
  const double thr0 = ranks.n - k + 1.0;
  const double thr_hi = ranks.n - k * (1.0 + eta) + 1.0;
  const double thr_lo = ranks.n - k * std::max(0.0, 1.0 - eta) + 1.0;
  std::vector<ExceedanceMask> m0(N + 1), mhi(N + 1), mlo(N + 1);
  for (int r = 0; r <= N; ++r) {
    m0[r] = exceedance_mask(ranks, r, thr0);
    mhi[r] = exceedance_mask(ranks, r, thr_hi);
    mlo[r] = exceedance_mask(ranks, r, thr_lo);
  }
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
      // d/dx1 R(r/N, t/N) at (1,1): the first coordinate is location r
      const double hi = ExceedanceMask::count_and(mhi[r], m0[t]) / k;
      const double lo = ExceedanceMask::count_and(mlo[r], m0[t]) / k;
      sum += std::clamp((hi - lo) / (2.0 * eta), 0.0, 1.0);
      ++cnt;
    }
    lp.values[ell + Delta] = sum / cnt;
  }
  return lp;
}

CovMatrix estimate_VN_covariance(const RankMatrix& ranks, const TestConfig& config,
                                 TestDiagnostics* diagnostics) {
  require_uniform(ranks.grid);
  const int N = ranks.grid.intervals();
  config.check(ranks.n, N);
  const double k = config.k;
  const VnLayout lay = VnLayout::make(N, config.Delta);

  const double threshold = ranks.n - k + 1.0;
  std::vector<ExceedanceMask> masks(N + 1);
  int max_count = 0;
  for (int r = 0; r <= N; ++r) {
    masks[r] = exceedance_mask(ranks, r, threshold);
    max_count = std::max(max_count, masks[r].count());
  }
  if (max_count == 0)
    throw degenerate_data_error("estimate_VN_covariance: no tail exceedances at threshold k");

  std::vector<ExceedanceMask> item_masks(lay.J);
  for (int p = 0; p < lay.J; ++p) {
    int idx[2];
    int cnt;
    lay.item_indices(p, idx, cnt);
    if (cnt == 1) {
      item_masks[p] = masks[idx[0]];
    } else {
      item_masks[p] = masks[idx[0]];
      for (std::size_t wd = 0; wd < item_masks[p].words.size(); ++wd)
        item_masks[p].words[wd] &= masks[idx[1]].words[wd];
    }
  }

  const LagPartials lp = estimate_lag_partials(ranks, k, config.effective_eta(), config.Delta);
  CovMatrix sigma = assemble_vn(
      lay,
      [&](int p, int q) { return ExceedanceMask::count_and(item_masks[p], item_masks[q]) / k; },
      [&](int ell) { return lp.at(ell); });

  const double deviation = toeplitz_deviation(sigma);
  sigma = toeplitz_average(sigma);
  bool ridged = false;
  const double min_eig = min_eigenvalue(sigma);
  if (min_eig <= 0.0) {
    sigma.add_diagonal(std::fabs(min_eig) + 1e-8);
    ridged = true;
  }
  if (diagnostics) {
    diagnostics->tie_count = ranks.tie_count;
    diagnostics->ridge_applied = ridged;
    diagnostics->toeplitz_deviation = deviation;
  }
  return sigma;
}

CovMatrix theoretical_VN_covariance(const ModelSpec& model, int grid_intervals, int Delta,
                                    const MvnOptions& options) {
  const int N = grid_intervals;
  if (!(Delta >= 1 && 2 * Delta < N))
    throw validation_error("theoretical_VN_covariance: need 1 <= Delta < N/2");
  const VnLayout lay = VnLayout::make(N, Delta);
  const TailDependenceProvider provider = model_provider(model, options);

  CovMatrix sigma = assemble_vn(
      lay,
      [&](int p, int q) {
        int ip[2], iq[2];
        int np, nq;
        lay.item_indices(p, ip, np);
        lay.item_indices(q, iq, nq);
        std::vector<double> locs;
        locs.reserve(4);
        for (int a = 0; a < np; ++a) locs.push_back(static_cast<double>(ip[a]) / N);
        for (int a = 0; a < nq; ++a) locs.push_back(static_cast<double>(iq[a]) / N);
        std::sort(locs.begin(), locs.end());
        locs.erase(std::unique(locs.begin(), locs.end()), locs.end());
        return provider.coefficient(locs);
      },
      [&](int ell) {
        return provider.partial(0.0, static_cast<double>(ell) / N, 1);
      });

  const double min_eig = min_eigenvalue(sigma);
  if (min_eig <= 0.0) sigma.add_diagonal(std::fabs(min_eig) + 1e-8);
  return sigma;
}

TestResult stationarity_test(const FunctionalSample& sample, const TestConfig& config) {
  sample.check_valid();
  require_uniform(sample.grid);
  const int N = sample.grid.intervals();
  config.check(sample.n(), N);

  const RankMatrix ranks = compute_ranks(sample);
  const std::vector<long> counts = integral_counts(ranks, config.k, config.Delta);

  TestResult result;
  result.I_hat.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    result.I_hat[i] = counts[i] / (2.0 * config.Delta * config.k);
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  result.count_range = *hi - *lo;
  result.D = result.count_range / (2.0 * config.Delta * std::sqrt(config.k));

  result.Sigma_hat = estimate_VN_covariance(ranks, config, &result.diagnostics);

  MvnResult mvn_diag;
  const double F = range_cdf(result.D, result.Sigma_hat, config.mvn, &mvn_diag);
  result.p_value = std::clamp(1.0 - F, 0.0, 1.0);
  result.diagnostics.mvn_budget_exceeded = mvn_diag.budget_exceeded;
  result.diagnostics.mvn_ridged = mvn_diag.ridged;
  result.diagnostics.mvn_points = mvn_diag.points_used;
  return result;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  s = h ^ (a * 0xA24BAED4963EE407ULL + 0x9FB21C651E98DF25ULL);
  h = splitmix64(s);
  s = h ^ (b * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL);
  return splitmix64(s);
}

McExperiment monte_carlo_experiment(const McConfig& config) {
  if (config.reps < 1) throw validation_error("monte_carlo_experiment: reps must be >= 1");
  if (config.thetas.empty()) throw validation_error("monte_carlo_experiment: empty theta list");
  const Grid base = Grid::uniform(config.grid_intervals);

  McExperiment experiment;
  experiment.per_theta.resize(config.thetas.size());
  for (std::size_t ti = 0; ti < config.thetas.size(); ++ti) {
    const double theta = config.thetas[ti];
    const Grid sim_grid = distort_grid(base, theta);
    McThetaResult& out = experiment.per_theta[ti];
    out.theta = theta;
    out.p_values.resize(config.reps);
    out.d_values.resize(config.reps);
    out.scaled_stats.resize(config.reps);

    parallel_for_dynamic(config.reps, [&](std::int64_t rep) {
      const std::uint64_t rep_seed =
          derive_seed(config.seed, static_cast<std::uint64_t>(ti), static_cast<std::uint64_t>(rep));
      FunctionalSample sample =
          config.model.kind == ModelKind::Smith
              ? simulate_smith(config.n, sim_grid, config.window_halfwidth, rep_seed)
              : simulate_pareto(config.n, sim_grid, rep_seed);
      // The tester sees nominal positions r/N; the distortion only moves the
      // locations the process was sampled at.
      sample.grid = base;
      const TestResult tr = stationarity_test(sample, config.test);
      out.p_values[rep] = tr.p_value;
      out.d_values[rep] = tr.D;
      out.scaled_stats[rep] = tr.count_range;
    });

    for (double alpha : kMcAlphas) {
      long rejections = 0;
      for (double p : out.p_values) rejections += (p <= alpha);
      const double rate = static_cast<double>(rejections) / config.reps;
      experiment.summary.push_back(
          {theta, alpha, rate, std::sqrt(rate * (1.0 - rate) / config.reps)});
    }
  }
  return experiment;
}

}  // namespace tailfield
