#include "noise.hpp"

#include <cmath>
#include <stdexcept>

namespace polarqkd {

namespace {

double sinc2x(double x) { return x == 0.0 ? 1.0 : std::sin(2.0 * x) / (2.0 * x); }

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) {
    f *= i;
  }
  return f;
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 0; i < k; ++i) {
    b = b * (n - i) / (i + 1);
  }
  return b;
}

// Irwin-Hall density on [0, n].
double irwin_hall_pdf(int n, double u) {
  if (u <= 0.0 || u >= n) {
    return 0.0;
  }
  double sum = 0.0;
  const int kmax = static_cast<int>(std::floor(u));
  for (int k = 0; k <= kmax; ++k) {
    const double term = binomial(n, k) * std::pow(u - k, n - 1);
    sum += (k % 2 == 0) ? term : -term;
  }
  return sum / factorial(n - 1);
}

}  // namespace

LinkNoise make_link_noise(double half_width) {
  if (!(half_width >= 0.0 && half_width <= 0.5)) {
    throw std::domain_error("LinkNoise: half_width must be in [0, 0.5]");
  }
  return LinkNoise{half_width};
}

double sample_link_error(const LinkNoise& noise, RandomStream& rng) {
  if (noise.half_width == 0.0) {
    return 0.0;
  }
  return (2.0 * rng.next_double() - 1.0) * noise.half_width;
}

double pdf_sum_links(int n, double x, double phi) {
  if (n < 1) {
    throw std::domain_error("pdf_sum_links: n must be positive");
  }
  if (!(x > 0.0)) {
    throw std::domain_error("pdf_sum_links: x must be positive");
  }
  const double a = std::fabs(phi);
  if (a >= n * x) {
    return n == 1 && a <= x ? 1.0 / (2.0 * x) : 0.0;
  }
  switch (n) {
    case 1:
      return 1.0 / (2.0 * x);
    case 2:
      return (2.0 * x - a) / (4.0 * x * x);
    default:
      // sum of n uniforms on [-x, x] = 2x * (IrwinHall(n) - n/2)
      return irwin_hall_pdf(n, (phi + n * x) / (2.0 * x)) / (2.0 * x);
  }
}

double error_prob_single_exact(double x) {
  if (x < 0.0) {
    throw std::domain_error("error_prob_single_exact: x must be nonnegative");
  }
  if (x == 0.0) {
    return 0.0;
  }
  return 0.5 - std::sin(2.0 * x) / (4.0 * x);
}

double error_prob_series(double x, int n) {
  if (n < 1) {
    throw std::domain_error("error_prob_series: n must be positive");
  }
  if (!(x >= 0.0 && x <= 0.5)) {
    throw std::domain_error("error_prob_series: x must be in [0, 0.5]");
  }
  if (n == 1) {
    return x * x / 3.0 - x * x * x * x / 15.0;
  }
  return n * x * x / 3.0;
}

double error_prob_exact(double x, int n) {
  if (n < 1) {
    throw std::domain_error("error_prob_exact: n must be positive");
  }
  if (!(x > 0.0)) {
    throw std::domain_error("error_prob_exact: x must be positive");
  }
  return (1.0 - std::pow(sinc2x(x), n)) / 2.0;
}

double error_prob_exact(std::span<const double> half_widths) {
  if (half_widths.empty()) {
    throw std::domain_error("error_prob_exact: at least one link required");
  }
  double prod = 1.0;
  for (double x : half_widths) {
    if (x < 0.0) {
      throw std::domain_error("error_prob_exact: widths must be nonnegative");
    }
    prod *= sinc2x(x);
  }
  return (1.0 - prod) / 2.0;
}

double error_prob_quadrature(double x, int n, int steps) {
  if (n < 1) {
    throw std::domain_error("error_prob_quadrature: n must be positive");
  }
  if (!(x > 0.0)) {
    throw std::domain_error("error_prob_quadrature: x must be positive");
  }
  if (steps < 100 || steps % 2 != 0) {
    throw std::domain_error("error_prob_quadrature: steps must be even and >= 100");
  }
  const double lo = -n * x;
  const double hi = n * x;
  const double h = (hi - lo) / steps;
  auto f = [n, x](double phi) {
    const double s = std::sin(phi);
    return pdf_sum_links(n, x, phi) * s * s;
  };
  double sum = f(lo) + f(hi);
  for (int i = 1; i < steps; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + i * h);
  }
  return sum * h / 3.0;
}

}  // namespace polarqkd
