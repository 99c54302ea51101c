#pragma once

#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tailfield {

// Error taxonomy; the CLI maps these onto exit codes 1/2/3.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class degenerate_data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int jobs) {
#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif
}

inline bool in_parallel_region() {
#ifdef _OPENMP
  return omp_in_parallel() != 0;
#else
  return false;
#endif
}

namespace detail {

// Runs f(i) for i in [0,n). Exceptions from workers are captured and the
// first one rethrown on the calling thread.
template <class F>
void parallel_loop(std::int64_t n, F&& f, bool dynamic_schedule) {
#ifdef _OPENMP
  if (n > 1 && !in_parallel_region()) {
    std::exception_ptr err;
    if (dynamic_schedule) {
#pragma omp parallel for schedule(dynamic)
      for (std::int64_t i = 0; i < n; ++i) {
        try {
          f(i);
        } catch (...) {
#pragma omp critical(tailfield_parallel_loop_err)
          if (!err) err = std::current_exception();
        }
      }
    } else {
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < n; ++i) {
        try {
          f(i);
        } catch (...) {
#pragma omp critical(tailfield_parallel_loop_err)
          if (!err) err = std::current_exception();
        }
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#endif
  for (std::int64_t i = 0; i < n; ++i) f(i);
}

}  // namespace detail

// Uniform-cost loops (row sweeps, matrix tiles).
template <class F>
void parallel_for(std::int64_t n, F&& f) {
  detail::parallel_loop(n, std::forward<F>(f), /*dynamic_schedule=*/false);
}

// Ragged-cost loops (Monte Carlo replications, QMC shifts).
template <class F>
void parallel_for_dynamic(std::int64_t n, F&& f) {
  detail::parallel_loop(n, std::forward<F>(f), /*dynamic_schedule=*/true);
}

// Minimal dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace tailfield
