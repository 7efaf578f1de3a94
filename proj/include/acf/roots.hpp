#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "acf/errors.hpp"

namespace acf::roots {

/// Brent's method on a bracket [a, b] with f(a) f(b) <= 0.
template <class F>
double brent(F&& f, double a, double b, double x_tol = 0.0, int max_iter = 400) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw acf::no_root_error("brent: interval does not bracket a root");
  if (std::abs(fa) < std::abs(fb)) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  double c = a, fc = fa, d = b - a;
  bool bisected = true;
  for (int i = 0; i < max_iter; ++i) {
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * x_tol;
    if (fb == 0.0 || std::abs(b - a) <= tol) return b;
    double s;
    if (fa != fc && fb != fc) {
      s = a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) +
          c * fa * fb / ((fc - fa) * (fc - fb));
    } else {
      s = b - fb * (b - a) / (fb - fa);
    }
    const double lo = (3.0 * a + b) / 4.0;
    const bool outside = !((s > std::min(lo, b)) && (s < std::max(lo, b)));
    if (outside || (bisected && std::abs(s - b) >= std::abs(b - c) / 2.0) ||
        (!bisected && std::abs(s - b) >= std::abs(c - d) / 2.0) ||
        (bisected && std::abs(b - c) < tol) || (!bisected && std::abs(c - d) < tol)) {
      s = 0.5 * (a + b);
      bisected = true;
    } else {
      bisected = false;
    }
    const double fs = f(s);
    d = c;
    c = b;
    fc = fb;
    if ((fa > 0.0) == (fs > 0.0)) {
      a = s;
      fa = fs;
    } else {
      b = s;
      fb = fs;
    }
    if (std::abs(fa) < std::abs(fb)) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
  }
  return b;
}

/// First sign change of f over the ordered grid, skipping points where f
/// throws acf::pole_error or returns a non-finite value.
template <class F>
std::optional<std::pair<double, double>> first_sign_change(F&& f, const std::vector<double>& grid) {
  std::optional<std::pair<double, double>> prev;  // (x, f(x))
  for (double x : grid) {
    double v;
    try {
      v = f(x);
    } catch (const acf::pole_error&) {
      prev.reset();
      continue;
    }
    if (!std::isfinite(v)) {
      prev.reset();
      continue;
    }
    if (v == 0.0) return std::pair{x, x};
    if (prev && ((prev->second > 0.0) != (v > 0.0))) return std::pair{prev->first, x};
    prev = std::pair{x, v};
  }
  return std::nullopt;
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return v;
}

inline std::vector<double> logspace(double a, double b, int n) {
  // Interpolate the decimal exponent so that whole decades come out exact.
  auto v = linspace(std::log10(a), std::log10(b), n);
  for (double& x : v) x = std::pow(10.0, x);
  v.front() = a;
  v.back() = b;
  return v;
}

}  // namespace acf::roots
