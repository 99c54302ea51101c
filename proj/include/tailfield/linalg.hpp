#pragma once

#include <cstddef>
#include <vector>

#include "tailfield/common.hpp"

namespace tailfield {

// Symmetric matrix with explicit dimension; carries covariance matrices
// throughout (limit-process covariances, MVN integration inputs).
struct CovMatrix {
  int dim = 0;
  std::vector<double> a;  // row-major dim*dim

  CovMatrix() = default;
  explicit CovMatrix(int d, double fill = 0.0) : dim(d), a(static_cast<std::size_t>(d) * d, fill) {}

  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * dim + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * dim + j]; }

  static CovMatrix identity(int d) {
    CovMatrix m(d);
    for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
    return m;
  }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < dim; ++i) t += at(i, i);
    return t;
  }

  double max_diagonal() const;

  void add_diagonal(double v) {
    for (int i = 0; i < dim; ++i) at(i, i) += v;
  }

  // Symmetry to 1e-12 (relative) and eigenvalues >= -1e-10 * max diagonal.
  void check_valid() const;
};

// Eigenvalues of a symmetric matrix, ascending (cyclic Jacobi).
std::vector<double> sym_eigenvalues(const CovMatrix& m);

double min_eigenvalue(const CovMatrix& m);

// Lower Cholesky factor; returns false when a pivot is nonpositive.
bool cholesky_lower(const CovMatrix& m, std::vector<double>& lower);

// Averages each subdiagonal; the projection of a symmetric matrix onto
// Toeplitz structure under the Frobenius norm.
CovMatrix toeplitz_average(const CovMatrix& m);

// Largest absolute deviation of an entry from its subdiagonal mean.
double toeplitz_deviation(const CovMatrix& m);

}  // namespace tailfield
