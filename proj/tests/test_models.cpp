#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tailfield/linalg.hpp"
#include "tailfield/models.hpp"
#include "tailfield/normal.hpp"
#include "tailfield/rng.hpp"

using namespace tailfield;

namespace {

// Monte Carlo oracle for E[min_j exp(X_j - gamma_jj/2)], X ~ N(0, Gamma).
struct McEstimate {
  double mean;
  double se;
};

McEstimate min_exp_monte_carlo(const CovMatrix& gamma, long draws, std::uint64_t seed) {
  std::vector<double> chol;
  CovMatrix g = gamma;
  if (!cholesky_lower(g, chol)) {
    g.add_diagonal(1e-12 * std::max(1.0, g.trace()));
    REQUIRE(cholesky_lower(g, chol));
  }
  const int d = gamma.dim;
  RandomStream rng = make_stream(seed, 0);
  double sum = 0.0, sum2 = 0.0;
  std::vector<double> z(d);
  for (long rep = 0; rep < draws; ++rep) {
    for (double& v : z) v = rng.normal();
    double lo = std::numeric_limits<double>::infinity();
    for (int j = 0; j < d; ++j) {
      double x = 0.0;
      for (int l = 0; l <= j; ++l) x += chol[static_cast<std::size_t>(j) * d + l] * z[l];
      lo = std::min(lo, std::exp(x - 0.5 * gamma.at(j, j)));
    }
    sum += lo;
    sum2 += lo * lo;
  }
  const double mean = sum / draws;
  const double var = (sum2 / draws - mean * mean) / draws;
  return {mean, std::sqrt(std::max(var, 0.0))};
}

}  // namespace

TEST_CASE("Husler-Reiss bivariate form: frozen values, limits, validation") {
  const ModelSpec smith = ModelSpec::smith();
  const ModelSpec pareto = ModelSpec::pareto();

  CHECK(bivariate_R(smith, 0.0, 1.0, 1.0, 1.0) ==
        doctest::Approx(0.6170750774519738).epsilon(1e-13));
  CHECK(bivariate_R(pareto, 0.3, 0.7, 1.0, 1.0) ==
        doctest::Approx(0.7518296340458492).epsilon(1e-13));

  // comonotone limit and zero arguments
  CHECK(bivariate_R(smith, 0.4, 0.4, 1.3, 0.8) == 0.8);
  CHECK(bivariate_R(smith, 0.1, 0.9, 0.0, 1.0) == 0.0);
  CHECK(bivariate_R(pareto, 0.1, 0.9, 1.0, 0.0) == 0.0);

  CHECK_THROWS_AS(bivariate_R(smith, 0.0, 1.0, -0.5, 1.0), validation_error);
}

TEST_CASE("Husler-Reiss form is 1-homogeneous and 1-Lipschitz") {
  RandomStream rng = make_stream(1, 0);
  const ModelSpec models[] = {ModelSpec::smith(), ModelSpec::pareto()};
  for (const ModelSpec& model : models) {
    for (int trial = 0; trial < 100; ++trial) {
      const double s = rng.uniform();
      const double t = rng.uniform();
      const double x = 2.0 * rng.uniform() + 0.01;
      const double y = 2.0 * rng.uniform() + 0.01;
      const double c = 2.0 * rng.uniform() + 0.1;
      CHECK(bivariate_R(model, s, t, c * x, c * y) ==
            doctest::Approx(c * bivariate_R(model, s, t, x, y)).epsilon(1e-12));

      const double x2 = 2.0 * rng.uniform();
      const double y2 = 2.0 * rng.uniform();
      CHECK(std::fabs(bivariate_R(model, s, t, x, y) - bivariate_R(model, s, t, x2, y2)) <=
            std::fabs(x - x2) + std::fabs(y - y2) + 1e-12);
    }
  }
}

TEST_CASE("analytic partial: frozen value, tail limit, finite-difference oracle") {
  const ModelSpec smith = ModelSpec::smith();
  // |s-t| = 2 at (1,1): Phibar(1)
  CHECK(husler_reiss_partial(smith, 0.0, 1.0, 1, 1.0, 1.0) ==
        doctest::Approx(norm_sf(0.5)).epsilon(1e-14));
  CHECK(husler_reiss_partial(smith, -1.0, 1.0, 1, 1.0, 1.0) ==
        doctest::Approx(0.15865525393145707).epsilon(1e-12));
  CHECK(husler_reiss_partial(smith, 0.0, 40.0 / 0.9, 1, 1.0, 1.0) < 1e-12);

  CHECK_THROWS_AS(husler_reiss_partial(smith, 0.0, 0.5, 1, 0.0, 1.0), validation_error);

  RandomStream rng = make_stream(2, 0);
  const ModelSpec models[] = {smith, ModelSpec::pareto()};
  for (const ModelSpec& model : models) {
    for (int trial = 0; trial < 40; ++trial) {
      const double s = rng.uniform();
      const double t = s + 0.05 + 0.9 * rng.uniform();
      const double x = 0.3 + 1.5 * rng.uniform();
      const double y = 0.3 + 1.5 * rng.uniform();
      const double h = 1e-6;
      for (int j : {1, 2}) {
        const double fd = (bivariate_R(model, s, t, x + (j == 1 ? h : 0.0), y + (j == 2 ? h : 0.0)) -
                           bivariate_R(model, s, t, x - (j == 1 ? h : 0.0), y - (j == 2 ? h : 0.0))) /
                          (2.0 * h);
        CHECK(husler_reiss_partial(model, s, t, j, x, y) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("Euler identity and derivative bounds") {
  RandomStream rng = make_stream(3, 0);
  const ModelSpec models[] = {ModelSpec::smith(), ModelSpec::pareto()};
  for (const ModelSpec& model : models) {
    for (int trial = 0; trial < 100; ++trial) {
      const double s = rng.uniform();
      double t = rng.uniform();
      if (t == s) t += 0.01;
      const double x = 0.05 + 2.0 * rng.uniform();
      const double y = 0.05 + 2.0 * rng.uniform();
      const double r = bivariate_R(model, s, t, x, y);
      const double d1 = husler_reiss_partial(model, s, t, 1, x, y);
      const double d2 = husler_reiss_partial(model, s, t, 2, x, y);
      CHECK(x * d1 + y * d2 == doctest::Approx(r).epsilon(1e-10));
      CHECK(d1 >= 0.0);
      CHECK(d1 <= 1.0);
      CHECK(x * d1 <= r + 1e-12);
      CHECK(y * d2 <= r + 1e-12);
    }
  }
}

TEST_CASE("smith d-variate coefficient") {
  const std::vector<double> single{0.4};
  CHECK(smith_dvariate_R(single) == doctest::Approx(1.0).epsilon(1e-14));

  RandomStream rng = make_stream(4, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const double s = rng.uniform();
    double t = rng.uniform();
    if (t == s) t += 0.05;
    const std::vector<double> pair{s, t};
    CHECK(smith_dvariate_R(pair) ==
          doctest::Approx(bivariate_R(ModelSpec::smith(), s, t, 1.0, 1.0)).epsilon(1e-12));
  }

  // d = 3 at (0, 0.3, 1): closed form 2 Phibar(0.5), Monte Carlo cross-check
  const std::vector<double> triple{0.0, 0.3, 1.0};
  const double closed = smith_dvariate_R(triple);
  CHECK(closed == doctest::Approx(0.6170750774519738).epsilon(1e-13));
  CovMatrix gamma(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) gamma.at(i, j) = triple[i] * triple[j];
  const McEstimate mc = min_exp_monte_carlo(gamma, 1000000, 42);
  CHECK(std::fabs(mc.mean - closed) < 3e-3);
}

TEST_CASE("pareto d-variate coefficient") {
  // d = 2 agrees with the closed form through the min-exp identity
  RandomStream rng = make_stream(5, 0);
  MvnOptions tight;
  tight.tol = 1e-11;
  tight.max_points = 4000000;
  for (int trial = 0; trial < 5; ++trial) {
    const double s = 0.05 + 0.4 * rng.uniform();
    const double t = s + 0.05 + 0.4 * rng.uniform();
    const std::vector<double> pair{s, t};
    CHECK(pareto_dvariate_R(pair, tight) ==
          doctest::Approx(bivariate_R(ModelSpec::pareto(), s, t, 1.0, 1.0)).epsilon(1e-10));
  }

  // shift handling: tuples containing location 0
  const std::vector<double> with_zero{0.0, 0.4};
  CHECK(pareto_dvariate_R(with_zero, tight) ==
        doctest::Approx(bivariate_R(ModelSpec::pareto(), 0.0, 0.4, 1.0, 1.0)).epsilon(1e-10));

  // comonotone limit as the gap closes
  const std::vector<double> tiny_gap{0.2, 0.2 + 1e-7};
  CHECK(pareto_dvariate_R(tiny_gap) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(pareto_dvariate_R(std::vector<double>{0.2, 0.2}), validation_error);

  // d = 1 is exactly 1
  CHECK(pareto_dvariate_R(std::vector<double>{0.7}) == 1.0);

  // d = 3 against the Wiener Monte Carlo oracle
  const std::vector<double> triple{0.1, 0.5, 0.9};
  MvnOptions opts;
  opts.tol = 1e-6;
  const double value = pareto_dvariate_R(triple, opts);
  RandomStream mc_rng = make_stream(6, 0);
  const long draws = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (long rep = 0; rep < draws; ++rep) {
    const double w1 = mc_rng.normal() * std::sqrt(0.1);
    const double w2 = w1 + mc_rng.normal() * std::sqrt(0.4);
    const double w3 = w2 + mc_rng.normal() * std::sqrt(0.4);
    const double v = std::min({std::exp(w1 - 0.05), std::exp(w2 - 0.25), std::exp(w3 - 0.45)});
    sum += v;
    sum2 += v * v;
  }
  const double mc_mean = sum / draws;
  CHECK(std::fabs(value - mc_mean) < 3e-3);
}

TEST_CASE("gaussian min-exp: analytic reductions") {
  // diagonal covariance: 2 Phi(-sigma/sqrt(2))
  for (double sigma : {0.5, 1.0, 1.7}) {
    CovMatrix gamma(2);
    gamma.at(0, 0) = gamma.at(1, 1) = sigma * sigma;
    CHECK(gaussian_min_exp(gamma) ==
          doctest::Approx(2.0 * norm_cdf(-sigma * kInvSqrt2)).epsilon(1e-10));
  }
  CovMatrix unit(2);
  unit.at(0, 0) = unit.at(1, 1) = 1.0;
  CHECK(gaussian_min_exp(unit) == doctest::Approx(0.4795001221869535).epsilon(1e-12));

  // rank-one covariance t_i t_j needs the ridge; the value is 2 Phibar(gap/2)
  CovMatrix rank1(2);
  const double t1 = 0.2, t2 = 0.9;
  rank1.at(0, 0) = t1 * t1;
  rank1.at(0, 1) = rank1.at(1, 0) = t1 * t2;
  rank1.at(1, 1) = t2 * t2;
  MvnResult diag;
  const double v = gaussian_min_exp(rank1, {}, &diag);
  CHECK(diag.ridged);
  CHECK(v == doctest::Approx(2.0 * norm_sf(0.5 * (t2 - t1))).epsilon(1e-4));

  CHECK_THROWS_AS(gaussian_min_exp(CovMatrix(1)), validation_error);
}

TEST_CASE("gaussian min-exp matches Monte Carlo on random PD matrices") {
  RandomStream rng = make_stream(7, 0);
  MvnOptions opts;
  opts.tol = 1e-5;
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 2 + trial % 3;
    CovMatrix gamma(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) gamma.at(i, j) = 0.0;
    // Gamma = A A' + 0.05 I with A entries uniform in (-1,1)
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = 2.0 * rng.uniform() - 1.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = (i == j) ? 0.05 : 0.0;
        for (int l = 0; l < d; ++l) s += a(i, l) * a(j, l);
        gamma.at(i, j) = s;
      }
    const double value = gaussian_min_exp(gamma, opts);
    CHECK(value > 0.0);
    CHECK(value <= 1.0 + 1e-9);
    const McEstimate mc = min_exp_monte_carlo(gamma, 200000, 1000 + trial);
    CHECK(std::fabs(value - mc.mean) < 3.0 * mc.se + opts.tol * d);
  }
}

TEST_CASE("hatW covariance: degenerate partials, swap symmetry, collapse") {
  TailDependenceProvider smith = model_provider(ModelSpec::smith());

  TailDependenceProvider no_partials = smith;
  no_partials.partial = [](double, double, int) { return 0.0; };
  const double pure = hatW_covariance(0.1, 0.4, 0.6, 0.9, no_partials);
  const std::vector<double> all{0.1, 0.4, 0.6, 0.9};
  CHECK(pure == doctest::Approx(smith_dvariate_R(all)).epsilon(1e-13));

  RandomStream rng = make_stream(8, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const double s = rng.uniform();
    const double t = s + 0.05 + 0.2 * rng.uniform();
    const double sp = rng.uniform();
    const double tp = sp + 0.05 + 0.2 * rng.uniform();
    CHECK(hatW_covariance(s, t, sp, tp, smith) ==
          doctest::Approx(hatW_covariance(sp, tp, s, t, smith)).epsilon(1e-12));
  }

  // repeated locations collapse: cov with itself uses R_{s,t} twice
  const double var = hatW_covariance(0.2, 0.5, 0.2, 0.5, smith);
  const double r = bivariate_R(ModelSpec::smith(), 0.2, 0.5, 1.0, 1.0);
  // 0.5 r (1 - r)(2 - r) after collapsing duplicates
  CHECK(var == doctest::Approx(0.5 * r * (1.0 - r) * (2.0 - r)).epsilon(1e-12));

  CHECK_THROWS_AS(hatW_covariance(0.2, 0.2, 0.4, 0.6, smith), validation_error);
}

TEST_CASE("rho2: limits, frozen form, triangle inequality") {
  const ModelSpec smith = ModelSpec::smith();
  CHECK(rho2(smith, 0.3, 1.5, 0.3, 0.7) == doctest::Approx(std::sqrt(0.8)).epsilon(1e-12));
  CHECK(rho2(smith, 0.3, 1.2, 0.3, 1.2) == 0.0);

  RandomStream rng = make_stream(9, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const double s = rng.uniform();
    const double t = rng.uniform();
    const double expected = std::sqrt(2.0 * (1.0 - bivariate_R(smith, s, t, 1.0, 1.0)));
    CHECK(rho2(smith, s, 1.0, t, 1.0) == doctest::Approx(expected).epsilon(1e-12));
  }

  const ModelSpec models[] = {smith, ModelSpec::pareto()};
  for (const ModelSpec& model : models) {
    for (int trial = 0; trial < 60; ++trial) {
      const double s1 = rng.uniform(), x1 = 2.0 * rng.uniform();
      const double s2 = rng.uniform(), x2 = 2.0 * rng.uniform();
      const double s3 = rng.uniform(), x3 = 2.0 * rng.uniform();
      const double d12 = rho2(model, s1, x1, s2, x2);
      const double d23 = rho2(model, s2, x2, s3, x3);
      const double d13 = rho2(model, s1, x1, s3, x3);
      CHECK(d13 <= d12 + d23 + 1e-10);
    }
  }
  CHECK_THROWS_AS(rho2(smith, 0.1, -1.0, 0.2, 1.0), validation_error);
}

TEST_CASE("model providers reduce to the closed bivariate forms") {
  for (const ModelSpec model : {ModelSpec::smith(), ModelSpec::pareto()}) {
    MvnOptions opts;
    opts.tol = 1e-8;
    const TailDependenceProvider provider = model_provider(model, opts);
    const std::vector<double> pair{0.25, 0.65};
    CHECK(provider.coefficient(pair) ==
          doctest::Approx(bivariate_R(model, 0.25, 0.65, 1.0, 1.0)).epsilon(1e-7));
    CHECK(provider.partial(0.25, 0.65, 1) ==
          doctest::Approx(husler_reiss_partial(model, 0.25, 0.65, 1, 1.0, 1.0)).epsilon(1e-13));
  }
}
