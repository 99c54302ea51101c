#pragma once

#include <functional>
#include <span>
#include <vector>

#include "tailfield/linalg.hpp"
#include "tailfield/mvn.hpp"

namespace tailfield {

// The two process models with closed-form tail dependence: the Gaussian
// moving-maximum (Smith, sigma^2 = 1, r = 1) and the Pareto-type process.
enum class ModelKind { Smith, Pareto };

struct ModelSpec {
  ModelKind kind = ModelKind::Smith;

  static ModelSpec smith() { return {ModelKind::Smith}; }
  static ModelSpec pareto() { return {ModelKind::Pareto}; }

  const char* name() const { return kind == ModelKind::Smith ? "smith" : "pareto"; }
};

// Hüsler–Reiss dependence scale: a = |s-t| (Smith) or sqrt(|s-t|) (Pareto).
double dependence_scale(const ModelSpec& model, double s, double t);

// Bivariate Hüsler–Reiss tail copula
//   x Phibar(a/2 + ln(x/y)/a) + y Phibar(a/2 + ln(y/x)/a),
// with the comonotone limit min(x,y) at a = 0 and value 0 when min(x,y) = 0.
double husler_reiss_R(double a, double x, double y);

double bivariate_R(const ModelSpec& model, double s, double t, double x, double y);

// Analytic partial derivative of the Hüsler–Reiss form in coordinate j; at
// (1,1) it equals Phibar(a/2).
double husler_reiss_partial(const ModelSpec& model, double s, double t, int j, double x,
                            double y);

// d-variate tail dependence coefficient R_t(1) for the Smith model:
// 2 Phibar((max t - min t)/2).
double smith_dvariate_R(std::span<const double> t);

// d-variate coefficient for the Pareto model through the Gaussian min-exp
// identity with Wiener covariance min(t_i, t_j); locations containing 0 are
// shifted by a constant first (stationary independent increments).
double pareto_dvariate_R(std::span<const double> t, const MvnOptions& options = {});

// E[min_j exp(X_j - gamma_jj/2)] for X ~ N(0, Gamma), Gamma positive
// definite: sum over j of Phi_{d-1} at (-var(Delta_k)/2)_k with covariance
// cov(Delta^{(j)}), Delta^{(j)}_k = X_j - X_k.
double gaussian_min_exp(const CovMatrix& gamma, const MvnOptions& options = {},
                        MvnResult* diagnostics = nullptr);

// Standard deviation semimetric sqrt(x - 2 R_{s,t}(x,y) + y).
double rho2(const ModelSpec& model, double s, double x, double t, double y);

// Providers feeding the covariance expansion of the limit process: a tail
// dependence coefficient over distinct locations at argument 1, and a
// partial derivative at (1,1).
struct TailDependenceProvider {
  std::function<double(std::span<const double>)> coefficient;
  std::function<double(double s, double t, int j)> partial;
};

// Covariance E[W^(s,t) W^(s',t')] of the rank-corrected limit process at
// argument (1,1): the nine-term expansion in the 2- to 4-variate
// coefficients and the bivariate partials. Repeated locations inside a
// coefficient collapse to the lower-dimensional one.
double hatW_covariance(double s, double t, double sp, double tp,
                       const TailDependenceProvider& provider);

// Exact providers for a model; d-variate coefficients are memoized on the
// inter-point gaps (both models are stationary, so this is exact).
TailDependenceProvider model_provider(const ModelSpec& model, const MvnOptions& options = {});

}  // namespace tailfield
