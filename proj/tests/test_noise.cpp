#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <numbers>

#include "noise.hpp"
#include "rng.hpp"

using namespace polarqkd;

namespace {

// Simpson integration of an arbitrary function; independent of the library's
// quadrature path.
template <typename F>
double simpson(F f, double lo, double hi, int steps) {
  const double h = (hi - lo) / steps;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < steps; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + i * h);
  }
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("link error samples stay on the stated support") {
  RandomStream rng(11);
  const LinkNoise noise = make_link_noise(0.1);
  for (int i = 0; i < 10000; ++i) {
    const double e = sample_link_error(noise, rng);
    CHECK(e >= -0.1);
    CHECK(e <= 0.1);
  }
}

TEST_CASE("zero-width noise is degenerate at zero") {
  RandomStream rng(12);
  const LinkNoise noise = make_link_noise(0.0);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_link_error(noise, rng) == 0.0);
  }
}

TEST_CASE("link error samples match uniform moments") {
  RandomStream rng(13);
  const double x = 0.1;
  const LinkNoise noise = make_link_noise(x);
  const int n = 1000000;
  double sum = 0.0;
  double sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = sample_link_error(noise, rng);
    sum += e;
    sumsq += e * e;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::fabs(mean) <= 3.0 * (x / std::sqrt(3.0)) / std::sqrt(double(n)));
  // variance of U(-x,x) is x^2/3; var of the sample variance ~ 4/45 x^4 / n
  CHECK(std::fabs(var - x * x / 3.0) <= 3.0 * std::sqrt(4.0 / 45.0) * x * x / 1000.0);
}

TEST_CASE("make_link_noise validates the model region") {
  CHECK_THROWS_AS(make_link_noise(-0.01), std::domain_error);
  CHECK_THROWS_AS(make_link_noise(0.6), std::domain_error);
}

TEST_CASE("pdf_sum_links known values") {
  CHECK(pdf_sum_links(1, 0.1, 0.0) == doctest::Approx(5.0));
  CHECK(pdf_sum_links(2, 0.1, 0.0) == doctest::Approx(5.0));  // peak = 1/(2x)
  CHECK(pdf_sum_links(3, 0.1, 0.3) == 0.0);
  CHECK(pdf_sum_links(2, 0.1, 0.1) == doctest::Approx(2.5));  // halfway down the triangle
  CHECK(pdf_sum_links(1, 0.1, 0.2) == 0.0);
  CHECK_THROWS_AS(pdf_sum_links(1, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(pdf_sum_links(0, 0.1, 0.0), std::domain_error);
}

TEST_CASE("pdf_sum_links matches the two-link triangular integrand") {
  // (-1/(4x^2)) phi + 1/(2x) on [0, 2x]
  const double x = 0.1;
  for (double phi = 0.0; phi < 2 * x; phi += 0.013) {
    CHECK(pdf_sum_links(2, x, phi) ==
          doctest::Approx(-phi / (4 * x * x) + 1 / (2 * x)).epsilon(1e-12));
  }
}

TEST_CASE("pdf_sum_links integrates to one") {
  for (int n : {1, 2, 3, 4}) {
    for (double x : {0.01, 0.05, 0.1}) {
      const double integral = simpson(
          [&](double phi) { return pdf_sum_links(n, x, phi); }, -n * x, n * x, 20000);
      CHECK(std::fabs(integral - 1.0) <= 1e-8);
    }
  }
}

TEST_CASE("single-link closed form") {
  CHECK(error_prob_single_exact(0.0) == 0.0);
  CHECK(error_prob_single_exact(0.1) == doctest::Approx(0.0033266730).epsilon(1e-7));
  CHECK(error_prob_single_exact(std::numbers::pi / 2) == doctest::Approx(0.5));
  CHECK_THROWS_AS(error_prob_single_exact(-0.1), std::domain_error);
}

TEST_CASE("series approximations") {
  CHECK(error_prob_series(0.1, 1) == doctest::Approx(0.00332666667).epsilon(1e-9));
  CHECK(error_prob_series(0.1, 2) == doctest::Approx(0.00666666667).epsilon(1e-9));
  CHECK(error_prob_series(0.1, 3) == doctest::Approx(0.01).epsilon(1e-9));
  for (double x = 0.005; x <= 0.1; x += 0.005) {
    CHECK(std::fabs(error_prob_series(x, 1) - error_prob_single_exact(x)) <= 1e-6);
  }
}

TEST_CASE("multi-link closed form against frozen values") {
  CHECK(error_prob_exact(0.1, 1) == doctest::Approx(0.0033266730).epsilon(1e-7));
  CHECK(error_prob_exact(0.1, 2) == doctest::Approx(0.0066312).epsilon(1e-4));
  CHECK(error_prob_exact(0.1, 3) == doctest::Approx(0.0099138).epsilon(1e-4));
  CHECK(error_prob_exact(0.1, 1) == doctest::Approx(error_prob_single_exact(0.1)));
}

TEST_CASE("closed form agrees with the quadrature oracle to 1e-9") {
  for (int n : {1, 2, 3, 4}) {
    for (double x : {0.02, 0.05, 0.1}) {
      CHECK(std::fabs(error_prob_exact(x, n) - error_prob_quadrature(x, n, 10000)) <=
            1e-9);
    }
  }
}

TEST_CASE("quadrature converges under step doubling") {
  for (double x : {0.05, 0.1}) {
    for (int n : {1, 2, 3}) {
      CHECK(std::fabs(error_prob_quadrature(x, n, 20000) -
                      error_prob_quadrature(x, n, 10000)) < 1e-10);
    }
  }
  CHECK_THROWS_AS(error_prob_quadrature(0.1, 1, 99), std::domain_error);
  CHECK_THROWS_AS(error_prob_quadrature(0.1, 1, 101), std::domain_error);
  CHECK_THROWS_AS(error_prob_quadrature(0.0, 1, 1000), std::domain_error);
}

TEST_CASE("multi-link over single-link scaling ratios") {
  for (double x : {0.02, 0.05, 0.1}) {
    const double one = error_prob_exact(x, 1);
    const double two_ratio = error_prob_exact(x, 2) / one;
    const double three_ratio = error_prob_exact(x, 3) / one;
    CHECK(two_ratio >= 1.98);
    CHECK(two_ratio <= 2.00);
    CHECK(three_ratio >= 2.95);
    CHECK(three_ratio <= 3.00);
  }
}

TEST_CASE("Monte Carlo flip frequency matches the closed form") {
  RandomStream rng(14);
  const double x = 0.1;
  for (int links : {1, 2, 3}) {
    const int trials = 1000000;
    int flips = 0;
    for (int t = 0; t < trials; ++t) {
      double sum = 0.0;
      for (int j = 0; j < links; ++j) {
        sum += (2.0 * rng.next_double() - 1.0) * x;
      }
      const double s = std::sin(sum);
      if (rng.next_double() < s * s) {
        ++flips;
      }
    }
    const double p = error_prob_exact(x, links);
    const double sigma = std::sqrt(p * (1 - p) / trials);
    CHECK(std::fabs(flips / double(trials) - p) <= 3 * sigma);
  }
}

TEST_CASE("heterogeneous widths reduce to the homogeneous closed form") {
  const double widths2[] = {0.1, 0.1};
  const double widths3[] = {0.1, 0.1, 0.1};
  CHECK(error_prob_exact(widths2) == doctest::Approx(error_prob_exact(0.1, 2)));
  CHECK(error_prob_exact(widths3) == doctest::Approx(error_prob_exact(0.1, 3)));
}

TEST_CASE("heterogeneous closed form matches Monte Carlo") {
  RandomStream rng(15);
  const double widths[] = {0.02, 0.05, 0.1};
  const double p = error_prob_exact(widths);
  const int trials = 1000000;
  int flips = 0;
  for (int t = 0; t < trials; ++t) {
    double sum = 0.0;
    for (double x : widths) {
      sum += (2.0 * rng.next_double() - 1.0) * x;
    }
    const double s = std::sin(sum);
    if (rng.next_double() < s * s) {
      ++flips;
    }
  }
  const double sigma = std::sqrt(p * (1 - p) / trials);
  CHECK(std::fabs(flips / double(trials) - p) <= 3 * sigma);
  // a zero-width link contributes nothing
  const double with_zero[] = {0.0, 0.1};
  CHECK(error_prob_exact(with_zero) == doctest::Approx(error_prob_exact(0.1, 1)));
}
