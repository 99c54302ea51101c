#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "tailfield/normal.hpp"
#include "tailfield/rng.hpp"

using namespace tailfield;

TEST_CASE("normal cdf and survival at reference points") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(norm_sf(0.5) == doctest::Approx(0.3085375387259869).epsilon(1e-13));
  CHECK(norm_sf(1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-13));
  CHECK(norm_sf(-norm_quantile(0.975)) == doctest::Approx(0.975).epsilon(1e-13));
  CHECK(norm_cdf(-40.0) >= 0.0);
  CHECK(norm_sf(40.0) >= 0.0);
}

TEST_CASE("normal quantile matches reference values") {
  // reference values computed with an independent implementation
  const std::vector<std::pair<double, double>> table = {
      {1e-300, -37.0470962993612},
      {1e-16, -8.222082216130435},
      {1e-10, -6.361340902404056},
      {0.0001, -3.7190164854556804},
      {0.025, -1.9599639845400545},
      {0.3, -0.5244005127080409},
      {0.5, 0.0},
      {0.6, 0.2533471031357997},
      {0.975, 1.959963984540054},
      {0.9999999999, 6.361340889697422},
  };
  for (const auto& [p, z] : table) {
    if (z == 0.0) {
      CHECK(std::fabs(norm_quantile(p)) < 1e-15);
    } else {
      CHECK(norm_quantile(p) == doctest::Approx(z).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(norm_quantile(-0.1), validation_error);
  CHECK_THROWS_AS(norm_quantile(1.5), validation_error);
}

TEST_CASE("quantile inverts the cdf") {
  for (double p : {1e-8, 1e-4, 0.01, 0.2, 0.5, 0.77, 0.999, 1.0 - 1e-9})
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-11));
}

TEST_CASE("streams are deterministic and independent of each other") {
  RandomStream a = make_stream(42, 0);
  RandomStream b = make_stream(42, 0);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RandomStream c = make_stream(42, 1);
  RandomStream d = make_stream(43, 0);
  int same_c = 0, same_d = 0;
  RandomStream e = make_stream(42, 0);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t x = e.next_u64();
    same_c += (c.next_u64() == x);
    same_d += (d.next_u64() == x);
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);
}

TEST_CASE("uniform draws stay inside the open interval") {
  RandomStream rng = make_stream(7, 0);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("normal and pareto draws have the right moments") {
  RandomStream rng = make_stream(11, 0);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::fabs(sum / n) < 0.01);
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.01));

  // P(Y > y) = 1/y for the standard Pareto
  int count5 = 0;
  for (int i = 0; i < n; ++i) count5 += (rng.pareto() > 5.0);
  CHECK(static_cast<double>(count5) / n == doctest::Approx(0.2).epsilon(0.03));
}
