#include "tailfield/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "tailfield/normal.hpp"

namespace tailfield {

double dependence_scale(const ModelSpec& model, double s, double t) {
  const double gap = std::fabs(s - t);
  return model.kind == ModelKind::Smith ? gap : std::sqrt(gap);
}

double husler_reiss_R(double a, double x, double y) {
  if (!(x >= 0.0) || !(y >= 0.0))
    throw validation_error("husler_reiss_R: arguments must be nonnegative");
  if (!(a >= 0.0)) throw validation_error("husler_reiss_R: scale must be nonnegative");
  const double lo = std::min(x, y);
  if (lo == 0.0) return 0.0;
  if (a == 0.0) return lo;  // comonotone limit
  const double log_ratio = std::log(x / y);
  return x * norm_sf(0.5 * a + log_ratio / a) + y * norm_sf(0.5 * a - log_ratio / a);
}

double bivariate_R(const ModelSpec& model, double s, double t, double x, double y) {
  return husler_reiss_R(dependence_scale(model, s, t), x, y);
}

double husler_reiss_partial(const ModelSpec& model, double s, double t, int j, double x,
                            double y) {
  if (j != 1 && j != 2) throw validation_error("husler_reiss_partial: j must be 1 or 2");
  if (j == 2) std::swap(x, y);
  if (!(x > 0.0)) throw validation_error("husler_reiss_partial: x_j must be positive");
  if (!(y >= 0.0)) throw validation_error("husler_reiss_partial: arguments must be nonnegative");
  const double a = dependence_scale(model, s, t);
  if (a == 0.0) return x < y ? 1.0 : (x > y ? 0.0 : 0.5);  // subgradient at the kink
  if (y == 0.0) return 0.0;
  return norm_sf(0.5 * a + std::log(x / y) / a);
}

double smith_dvariate_R(std::span<const double> t) {
  if (t.empty()) throw validation_error("smith_dvariate_R: empty location tuple");
  const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
  return 2.0 * norm_sf(0.5 * (*hi - *lo));
}

double pareto_dvariate_R(std::span<const double> t, const MvnOptions& options) {
  const int d = static_cast<int>(t.size());
  if (d == 0) throw validation_error("pareto_dvariate_R: empty location tuple");
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (t[i] == t[j]) throw validation_error("pareto_dvariate_R: duplicate locations");
  if (d == 1) return 1.0;
  // Shift so that min(t) > 0 keeps the Wiener covariance positive definite;
  // the value is shift-invariant.
  double shift = 0.0;
  for (double v : t) shift = std::min(shift, v);
  shift = (shift <= 0.0) ? 1.0 - shift : 0.0;
  CovMatrix gamma(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) gamma.at(i, j) = std::min(t[i] + shift, t[j] + shift);
  return gaussian_min_exp(gamma, options);
}

double gaussian_min_exp(const CovMatrix& gamma, const MvnOptions& options,
                        MvnResult* diagnostics) {
  const int d = gamma.dim;
  if (d < 2) throw validation_error("gaussian_min_exp: dimension must be >= 2");
  if (diagnostics) *diagnostics = MvnResult{};
  CovMatrix g = gamma;
  if (min_eigenvalue(g) <= 1e-14 * std::max(g.trace(), 1.0)) {
    g.add_diagonal(1e-10 * std::max(g.trace(), 1.0));
    if (diagnostics) diagnostics->ridged = true;
  }

  double total = 0.0;
  double err = 0.0;
  for (int j = 0; j < d; ++j) {
    CovMatrix c(d - 1);
    std::vector<double> upper(d - 1);
    int row = 0;
    for (int k = 0; k < d; ++k) {
      if (k == j) continue;
      upper[row] = -0.5 * (g.at(j, j) - 2.0 * g.at(j, k) + g.at(k, k));
      int col = 0;
      for (int l = 0; l < d; ++l) {
        if (l == j) continue;
        c.at(row, col) = g.at(j, j) - g.at(j, l) - g.at(k, j) + g.at(k, l);
        ++col;
      }
      ++row;
    }
    const std::vector<double> lower(d - 1, -std::numeric_limits<double>::infinity());
    const MvnResult r = mvn_cdf(lower, upper, c, options);
    total += r.value;
    err += r.error_estimate;
    if (diagnostics) {
      diagnostics->points_used += r.points_used;
      diagnostics->budget_exceeded = diagnostics->budget_exceeded || r.budget_exceeded;
      diagnostics->ridged = diagnostics->ridged || r.ridged;
    }
  }
  if (diagnostics) {
    diagnostics->value = total;
    diagnostics->error_estimate = err;
  }
  return total;
}

double rho2(const ModelSpec& model, double s, double x, double t, double y) {
  if (!(x >= 0.0) || !(y >= 0.0)) throw validation_error("rho2: arguments must be nonnegative");
  const double radicand = x - 2.0 * bivariate_R(model, s, t, x, y) + y;
  if (radicand < -1e-12) throw numerical_error("rho2: negative radicand");
  return std::sqrt(std::max(radicand, 0.0));
}

namespace {

std::vector<double> distinct_sorted(std::initializer_list<double> values) {
  std::vector<double> v(values);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

double hatW_covariance(double s, double t, double sp, double tp,
                       const TailDependenceProvider& provider) {
  if (s == t || sp == tp) throw validation_error("hatW_covariance: pair locations must differ");
  const auto R = [&](std::initializer_list<double> locs) {
    const std::vector<double> u = distinct_sorted(locs);
    return provider.coefficient(u);
  };
  const double d1 = provider.partial(s, t, 1);
  const double d2 = provider.partial(s, t, 2);
  const double e1 = provider.partial(sp, tp, 1);
  const double e2 = provider.partial(sp, tp, 2);

  return R({s, t, sp, tp})
       - e1 * R({s, t, sp})
       - e2 * R({s, t, tp})
       - d1 * R({s, sp, tp})
       + d1 * e1 * R({s, sp})
       + d1 * e2 * R({s, tp})
       - d2 * R({t, sp, tp})
       + d2 * e1 * R({t, sp})
       + d2 * e2 * R({t, tp});
}

TailDependenceProvider model_provider(const ModelSpec& model, const MvnOptions& options) {
  TailDependenceProvider provider;
  provider.partial = [model](double s, double t, int j) {
    return husler_reiss_partial(model, s, t, j, 1.0, 1.0);
  };
  if (model.kind == ModelKind::Smith) {
    provider.coefficient = [](std::span<const double> t) { return smith_dvariate_R(t); };
  } else {
    // Memoize on inter-point gaps; exact by stationarity of the increments.
    auto cache = std::make_shared<std::map<std::vector<double>, double>>();
    auto mutex = std::make_shared<std::mutex>();
    provider.coefficient = [cache, mutex, options](std::span<const double> t) {
      std::vector<double> sorted(t.begin(), t.end());
      std::sort(sorted.begin(), sorted.end());
      std::vector<double> gaps(sorted.size());
      gaps[0] = 0.0;
      for (std::size_t i = 1; i < sorted.size(); ++i) gaps[i] = sorted[i] - sorted[0];
      {
        std::lock_guard<std::mutex> lock(*mutex);
        auto it = cache->find(gaps);
        if (it != cache->end()) return it->second;
      }
      const double value = pareto_dvariate_R(gaps, options);
      std::lock_guard<std::mutex> lock(*mutex);
      (*cache)[gaps] = value;
      return value;
    };
  }
  return provider;
}

}  // namespace tailfield
