#include "tailfield/mvn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "tailfield/normal.hpp"
#include "tailfield/rng.hpp"

namespace tailfield {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sqrt of the first 100 primes; generators of the Richtmyer sequence.
std::vector<double> richtmyer_generators(int dims) {
  std::vector<double> q;
  q.reserve(dims);
  int candidate = 1;
  while (static_cast<int>(q.size()) < dims) {
    ++candidate;
    bool prime = candidate >= 2;
    for (int f = 2; f * f <= candidate; ++f)
      if (candidate % f == 0) {
        prime = false;
        break;
      }
    if (prime) q.push_back(std::sqrt(static_cast<double>(candidate)));
  }
  return q;
}

double phi_interval(double a, double b) {
  const double ca = (a == -kInf) ? 0.0 : norm_cdf(a);
  const double cb = (b == kInf) ? 1.0 : norm_cdf(b);
  return std::max(0.0, cb - ca);
}

struct Transformed {
  int m = 0;
  std::vector<double> lower, upper;  // reordered bounds
  std::vector<double> chol;          // lower triangular, row-major
  double first_interval = 0.0;       // d1 - c1
  double first_lower_cdf = 0.0;      // c1
};

// Cholesky interleaved with variable reordering: at each stage pick the
// remaining variable with the smallest conditional interval, conditioning on
// the truncated-normal mean of the variables already fixed.
Transformed reorder_and_factor(std::span<const double> lower, std::span<const double> upper,
                               const CovMatrix& gamma) {
  const int m = gamma.dim;
  Transformed tr;
  tr.m = m;
  tr.lower.assign(lower.begin(), lower.end());
  tr.upper.assign(upper.begin(), upper.end());
  CovMatrix c = gamma;
  tr.chol.assign(static_cast<std::size_t>(m) * m, 0.0);
  auto L = [&](int i, int j) -> double& { return tr.chol[static_cast<std::size_t>(i) * m + j]; };
  std::vector<double> y(m, 0.0);

  for (int i = 0; i < m; ++i) {
    // choose the most restrictive remaining variable
    int best = i;
    double best_width = kInf;
    for (int j = i; j < m; ++j) {
      double var = c.at(j, j);
      for (int l = 0; l < i; ++l) var -= L(j, l) * L(j, l);
      const double sd = std::sqrt(std::max(var, 0.0));
      double mu = 0.0;
      for (int l = 0; l < i; ++l) mu += L(j, l) * y[l];
      double at = -kInf, bt = kInf;
      if (sd > 0.0) {
        if (tr.lower[j] != -kInf) at = (tr.lower[j] - mu) / sd;
        if (tr.upper[j] != kInf) bt = (tr.upper[j] - mu) / sd;
      } else {
        at = (tr.lower[j] == -kInf) ? -kInf : (tr.lower[j] - mu <= 0.0 ? -kInf : kInf);
        bt = (tr.upper[j] == kInf) ? kInf : (tr.upper[j] - mu >= 0.0 ? kInf : -kInf);
      }
      const double width = phi_interval(at, bt);
      if (width < best_width) {
        best_width = width;
        best = j;
      }
    }
    if (best != i) {
      std::swap(tr.lower[best], tr.lower[i]);
      std::swap(tr.upper[best], tr.upper[i]);
      for (int l = 0; l < i; ++l) std::swap(L(best, l), L(i, l));
      for (int l = 0; l < m; ++l) std::swap(c.at(best, l), c.at(i, l));
      for (int l = 0; l < m; ++l) std::swap(c.at(l, best), c.at(l, i));
    }
    double var = c.at(i, i);
    for (int l = 0; l < i; ++l) var -= L(i, l) * L(i, l);
    const double pivot = std::sqrt(std::max(var, 0.0));
    L(i, i) = pivot;
    if (pivot > 0.0) {
      for (int j = i + 1; j < m; ++j) {
        double s = c.at(j, i);
        for (int l = 0; l < i; ++l) s -= L(j, l) * L(i, l);
        L(j, i) = s / pivot;
      }
    }
    // conditioning value: mean of the truncated standard normal
    double mu = 0.0;
    for (int l = 0; l < i; ++l) mu += L(i, l) * y[l];
    double at = -kInf, bt = kInf;
    if (pivot > 0.0) {
      if (tr.lower[i] != -kInf) at = (tr.lower[i] - mu) / pivot;
      if (tr.upper[i] != kInf) bt = (tr.upper[i] - mu) / pivot;
    }
    const double pa = (at == -kInf) ? 0.0 : norm_cdf(at);
    const double pb = (bt == kInf) ? 1.0 : norm_cdf(bt);
    if (pb - pa > 1e-12) {
      const double da = (at == -kInf) ? 0.0 : norm_pdf(at);
      const double db = (bt == kInf) ? 0.0 : norm_pdf(bt);
      y[i] = (da - db) / (pb - pa);
    } else {
      y[i] = 0.5 * (std::clamp(at, -10.0, 10.0) + std::clamp(bt, -10.0, 10.0));
    }
    if (i == 0) {
      tr.first_lower_cdf = pa;
      tr.first_interval = pb - pa;
    }
  }
  return tr;
}

// Integrand of the separation-of-variables form at one quasi-random point.
double svn_integrand(const Transformed& tr, std::span<const double> w) {
  const int m = tr.m;
  double prob = tr.first_interval;
  double c = tr.first_lower_cdf;
  double d = tr.first_lower_cdf + tr.first_interval;
  std::array<double, 64> y;
  for (int i = 1; i < m; ++i) {
    const double u = c + w[i - 1] * (d - c);
    y[i - 1] = norm_quantile(std::clamp(u, 1e-16, 1.0 - 1e-16));
    double mu = 0.0;
    const double* row = &tr.chol[static_cast<std::size_t>(i) * m];
    for (int l = 0; l < i; ++l) mu += row[l] * y[l];
    const double sd = row[i];
    double at = -kInf, bt = kInf;
    if (sd > 0.0) {
      if (tr.lower[i] != -kInf) at = (tr.lower[i] - mu) / sd;
      if (tr.upper[i] != kInf) bt = (tr.upper[i] - mu) / sd;
    } else {
      // degenerate direction: the coordinate is determined by mu
      const bool inside = (tr.lower[i] == -kInf || tr.lower[i] - mu <= 0.0) &&
                          (tr.upper[i] == kInf || tr.upper[i] - mu >= 0.0);
      if (!inside) return 0.0;
      continue;
    }
    const double ca = (at == -kInf) ? 0.0 : norm_cdf(at);
    const double cb = (bt == kInf) ? 1.0 : norm_cdf(bt);
    const double width = cb - ca;
    if (width <= 0.0) return 0.0;
    prob *= width;
    c = ca;
    d = cb;
  }
  return prob;
}

}  // namespace

MvnResult mvn_cdf(std::span<const double> lower, std::span<const double> upper,
                  const CovMatrix& gamma, const MvnOptions& options) {
  const int m = gamma.dim;
  if (m < 1) throw validation_error("mvn_cdf: dimension must be >= 1");
  if (static_cast<int>(lower.size()) != m || static_cast<int>(upper.size()) != m)
    throw validation_error("mvn_cdf: bound length must match dimension");
  if (m > 64) throw validation_error("mvn_cdf: dimension too large (max 64)");
  for (int i = 0; i < m; ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]))
      throw validation_error("mvn_cdf: NaN bound");
    if (!(lower[i] <= upper[i])) throw validation_error("mvn_cdf: inconsistent bounds");
  }

  MvnResult result;
  CovMatrix g = gamma;
  if (min_eigenvalue(g) <= 1e-14 * std::max(g.trace(), 1.0)) {
    g.add_diagonal(1e-10 * std::max(g.trace(), 1.0));
    result.ridged = true;
  }

  if (m == 1) {
    const double sd = std::sqrt(std::max(g.at(0, 0), 0.0));
    double lo = 0.0, hi = 1.0;
    if (sd > 0.0) {
      lo = (lower[0] == -kInf) ? 0.0 : norm_cdf(lower[0] / sd);
      hi = (upper[0] == kInf) ? 1.0 : norm_cdf(upper[0] / sd);
    } else {
      lo = (lower[0] <= 0.0) ? 0.0 : 1.0;
      hi = (upper[0] >= 0.0) ? 1.0 : 0.0;
    }
    result.value = std::max(0.0, hi - lo);
    return result;
  }

  const Transformed tr = reorder_and_factor(lower, upper, g);
  if (tr.first_interval <= 0.0) return result;  // empty first interval

  const int dims = m - 1;
  const std::vector<double> gens = richtmyer_generators(dims);
  const int shifts = std::max(2, options.shifts);

  struct ShiftState {
    std::vector<double> delta;  // random shift
    double mean = 0.0;
    long count = 0;
  };
  std::vector<ShiftState> shift_states(shifts);
  for (int s = 0; s < shifts; ++s) {
    RandomStream rng = make_stream(options.seed, static_cast<std::uint64_t>(s) + 1);
    shift_states[s].delta.resize(dims);
    for (double& dv : shift_states[s].delta) dv = rng.uniform();
  }

  long total_points = 0;
  long batch = std::max<long>(64, 16L * dims);
  double value = 0.0, error = kInf;
  while (true) {
    parallel_for_dynamic(shifts, [&](std::int64_t s) {
      ShiftState& st = shift_states[s];
      std::vector<double> w(dims);
      for (long step = 0; step < batch; ++step) {
        const double idx = static_cast<double>(st.count + step + 1);
        for (int j = 0; j < dims; ++j) {
          const double v = idx * gens[j] + st.delta[j];
          const double frac = v - std::floor(v);
          w[j] = std::fabs(2.0 * frac - 1.0);  // tent periodization
        }
        const double p = svn_integrand(tr, w);
        st.mean += (p - st.mean) / static_cast<double>(st.count + step + 1);
      }
      st.count += batch;
    });
    total_points += batch * shifts;

    double mean = 0.0;
    for (const auto& st : shift_states) mean += st.mean;
    mean /= shifts;
    double var = 0.0;
    for (const auto& st : shift_states) var += (st.mean - mean) * (st.mean - mean);
    var /= (shifts - 1.0);
    value = mean;
    error = 3.0 * std::sqrt(var / shifts);

    if (error <= options.tol) break;
    if (total_points >= options.max_points) {
      result.budget_exceeded = true;
      break;
    }
    batch = std::min(batch * 2, (options.max_points - total_points) / shifts + 1);
  }

  result.value = std::clamp(value, 0.0, 1.0);
  result.error_estimate = error;
  result.points_used = total_points;
  return result;
}

double range_cdf(double q, const CovMatrix& gamma, const MvnOptions& options,
                 MvnResult* diagnostics) {
  const int m = gamma.dim;
  if (m < 2) throw validation_error("range_cdf: dimension must be >= 2");
  if (!(q >= 0.0)) throw validation_error("range_cdf: q must be nonnegative");
  if (diagnostics) *diagnostics = MvnResult{};
  if (q == 0.0) return 0.0;  // differences are continuous, zero-measure event

  CovMatrix g = gamma;
  if (min_eigenvalue(g) <= 1e-14 * std::max(g.trace(), 1.0)) {
    g.add_diagonal(1e-10 * std::max(g.trace(), 1.0));
    if (diagnostics) diagnostics->ridged = true;
  }

  double total = 0.0;
  double err = 0.0;
  for (int i = 0; i < m; ++i) {
    // covariance of (U_j - U_i)_{j != i}
    CovMatrix c(m - 1);
    int row = 0;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      int col = 0;
      for (int l = 0; l < m; ++l) {
        if (l == i) continue;
        c.at(row, col) = g.at(j, l) - g.at(j, i) - g.at(i, l) + g.at(i, i);
        ++col;
      }
      ++row;
    }
    const std::vector<double> lo(m - 1, -q);
    const std::vector<double> hi(m - 1, 0.0);
    const MvnResult r = mvn_cdf(lo, hi, c, options);
    total += r.value;
    err += r.error_estimate;
    if (diagnostics) {
      diagnostics->points_used += r.points_used;
      diagnostics->budget_exceeded = diagnostics->budget_exceeded || r.budget_exceeded;
      diagnostics->ridged = diagnostics->ridged || r.ridged;
    }
  }
  if (diagnostics) {
    diagnostics->value = std::clamp(total, 0.0, 1.0);
    diagnostics->error_estimate = err;
  }
  return std::clamp(total, 0.0, 1.0);
}

double range_pdf(double q, const CovMatrix& gamma, double step, const MvnOptions& options) {
  if (!(step > 0.0)) throw validation_error("range_pdf: step must be positive");
  if (!(q > step)) throw validation_error("range_pdf: need q > step");
  const double hi = range_cdf(q + step, gamma, options);
  const double lo = range_cdf(q - step, gamma, options);
  return (hi - lo) / (2.0 * step);
}

}  // namespace tailfield
