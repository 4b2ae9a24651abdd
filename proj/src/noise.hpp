#ifndef POLARQKD_NOISE_HPP
#define POLARQKD_NOISE_HPP

#include <span>

#include "rng.hpp"

namespace polarqkd {

// Per-link angular error, uniform on [-half_width, +half_width] radians.
// Model validity region is half_width <= 0.5.
struct LinkNoise {
  double half_width;
};

LinkNoise make_link_noise(double half_width);  // throws std::domain_error

double sample_link_error(const LinkNoise& noise, RandomStream& rng);

// Density of the sum of n independent uniforms on [-x, x] (scaled Irwin-Hall).
// n = 1 is flat 1/(2x); n = 2 the triangle (2x - |phi|)/(4x^2); zero outside
// [-nx, nx]. Requires x > 0.
double pdf_sum_links(int n, double x, double phi);

// Flip probability after one noisy traversal: 1/2 - sin(2x)/(4x).
// Continuous extension 0 at x = 0; throws for x < 0.
double error_prob_single_exact(double x);

// Small-x series: n = 1 gives x^2/3 - x^4/15, n >= 2 the leading order n x^2/3.
double error_prob_series(double x, int n);

// Closed form (1 - (sin(2x)/(2x))^n) / 2 for n noisy traversals.
double error_prob_exact(double x, int n);

// Heterogeneous per-link widths: (1 - prod_i sin(2 x_i)/(2 x_i)) / 2.
// A zero width contributes a unit factor.
double error_prob_exact(std::span<const double> half_widths);

// Composite Simpson integration of pdf_sum_links(n, x, phi) * sin^2(phi) over
// [-nx, nx]. Independent numerical route for the closed forms above.
// Requires x > 0, steps even and >= 100.
double error_prob_quadrature(double x, int n, int steps);

}  // namespace polarqkd

#endif  // POLARQKD_NOISE_HPP
