#pragma once

// Double-exponential (tanh-sinh) quadrature on a finite interval. Abscissae
// are generated as distances from the nearer endpoint, so a singularity such
// as x^{-0.9} at an endpoint equal to 0 is sampled down to ~1e-300. At a
// nonzero endpoint the resolution stops at one ulp; put singular points at 0.

#include <cmath>
#include <numbers>

namespace acf::quad {

struct Result {
  double value = 0.0;
  double error_estimate = 0.0;
  int levels = 0;
};

template <class F>
Result tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-13, int max_levels = 12) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  constexpr double t_max = 6.5;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);

  // Contribution of the symmetric node pair at +-t (or the centre, t == 0).
  auto pair = [&](double t) {
    if (t == 0.0) return half * half_pi * f(mid);
    const double u = half_pi * std::sinh(t);
    const double e = std::exp(-2.0 * u);
    const double offset = half * 2.0 * e / (1.0 + e);  // distance from endpoint
    const double w = half * half_pi * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
    if (offset <= 0.0 || w == 0.0) return 0.0;
    // Nodes that round onto an endpoint are dropped; their weight is below
    // one ulp of the interval.
    double s = 0.0;
    if (const double x = a + offset; x > a) s += f(x);
    if (const double x = b - offset; x < b) s += f(x);
    return w * s;
  };

  double h = 1.0;
  double sum = pair(0.0);
  for (double t = h; t <= t_max; t += h) sum += pair(t);
  double estimate = h * sum;
  Result r{estimate, std::abs(estimate), 0};
  for (int level = 1; level <= max_levels; ++level) {
    h *= 0.5;
    for (double t = h; t <= t_max; t += 2.0 * h) sum += pair(t);
    const double next = h * sum;
    const double diff = std::abs(next - estimate);
    estimate = next;
    r = {estimate, diff, level};
    if (level >= 3 && diff <= rel_tol * std::abs(estimate)) break;
  }
  return r;
}

}  // namespace acf::quad
