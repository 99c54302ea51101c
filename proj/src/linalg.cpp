#include "tailfield/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace tailfield {

double CovMatrix::max_diagonal() const {
  double m = 0.0;
  for (int i = 0; i < dim; ++i) m = std::max(m, at(i, i));
  return m;
}

void CovMatrix::check_valid() const {
  if (dim <= 0) throw validation_error("CovMatrix: dimension must be positive");
  double scale = max_diagonal();
  if (scale <= 0.0) scale = 1.0;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      if (std::fabs(at(i, j) - at(j, i)) > 1e-12 * std::max(1.0, scale))
        throw validation_error("CovMatrix: not symmetric");
  if (min_eigenvalue(*this) < -1e-10 * scale)
    throw validation_error("CovMatrix: not positive semidefinite");
}

std::vector<double> sym_eigenvalues(const CovMatrix& m) {
  const int n = m.dim;
  CovMatrix w = m;
  // symmetrize to kill roundoff skew before sweeping
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (w.at(i, j) + w.at(j, i));
      w.at(i, j) = w.at(j, i) = v;
    }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += w.at(i, j) * w.at(i, j);
    if (off <= 1e-30 * std::max(1.0, w.trace() * w.trace())) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = w.at(p, q);
        if (apq == 0.0) continue;
        const double app = w.at(p, p);
        const double aqq = w.at(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double wkp = w.at(k, p);
          const double wkq = w.at(k, q);
          w.at(k, p) = c * wkp - s * wkq;
          w.at(k, q) = s * wkp + c * wkq;
        }
        for (int k = 0; k < n; ++k) {
          const double wpk = w.at(p, k);
          const double wqk = w.at(q, k);
          w.at(p, k) = c * wpk - s * wqk;
          w.at(q, k) = s * wpk + c * wqk;
        }
      }
    }
  }
  std::vector<double> eigs(n);
  for (int i = 0; i < n; ++i) eigs[i] = w.at(i, i);
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

double min_eigenvalue(const CovMatrix& m) { return sym_eigenvalues(m).front(); }

bool cholesky_lower(const CovMatrix& m, std::vector<double>& lower) {
  const int n = m.dim;
  lower.assign(static_cast<std::size_t>(n) * n, 0.0);
  auto l = [&](int i, int j) -> double& { return lower[static_cast<std::size_t>(i) * n + j]; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m.at(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0) return false;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return true;
}

CovMatrix toeplitz_average(const CovMatrix& m) {
  const int n = m.dim;
  CovMatrix out(n);
  for (int lag = 0; lag < n; ++lag) {
    double sum = 0.0;
    int cnt = 0;
    for (int i = 0; i + lag < n; ++i) {
      sum += 0.5 * (m.at(i, i + lag) + m.at(i + lag, i));
      ++cnt;
    }
    const double mean = sum / cnt;
    for (int i = 0; i + lag < n; ++i) {
      out.at(i, i + lag) = mean;
      out.at(i + lag, i) = mean;
    }
  }
  return out;
}

double toeplitz_deviation(const CovMatrix& m) {
  const CovMatrix t = toeplitz_average(m);
  double dev = 0.0;
  for (std::size_t i = 0; i < m.a.size(); ++i) dev = std::max(dev, std::fabs(m.a[i] - t.a[i]));
  return dev;
}

}  // namespace tailfield
