#pragma once

// Delta-shell regularization: Ma delta(r - R) / R on a shell of radius R,
// centrifugal order |l| inside and gamma outside. Bound levels from the
// matching condition (exact and small-X closed form), an independent
// Numerov shooting oracle, the effective extension angle seen by
// scattering states, and the renormalization flow Ma(R).

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "acf/channels.hpp"
#include "acf/errors.hpp"
#include "acf/parallel.hpp"
#include "acf/roots.hpp"
#include "acf/sae_spectrum.hpp"
#include "acf/specfun.hpp"

namespace acf {

struct ShellConfig {
  double R = 1e-3;
  double ma = 0.0;
  double m = 1.0;
  int l = 0;           // interior order |l|
  double gamma = 0.5;  // exterior order
};

/// Interior solution used in the matching condition. For E < 0 the regular
/// solution of the interior equation is sqrt(r) I_|l|(kappa r); Oscillatory
/// keeps sqrt(r) J_|l| as in the published matching equation.
enum class Interior { Modified, Oscillatory };

namespace detail {

inline void check_shell(const ShellConfig& c, const char* fn) {
  if (!(c.R > 0.0) || !std::isfinite(c.R)) throw acf::domain_error(std::string(fn) + ": R must be positive");
  if (!(c.m > 0.0) || !std::isfinite(c.m)) throw acf::domain_error(std::string(fn) + ": m must be positive");
  if (!std::isfinite(c.ma)) throw acf::domain_error(std::string(fn) + ": Ma must be finite");
  check_gamma(c.gamma, fn);
}

// X K_g'(X) / K_g(X)
inline double x_dlog_k(double g, double X) {
  return -0.5 * X * (specfun::bessel_k(g - 1.0, X) + specfun::bessel_k(g + 1.0, X)) / specfun::bessel_k(g, X);
}

// X I_n'(X) / I_n(X)
inline double x_dlog_i(double n, double X) {
  return 0.5 * X * (specfun::bessel_i(n - 1.0, X) + specfun::bessel_i(n + 1.0, X)) / specfun::bessel_i(n, X);
}

// X J_n'(X) / J_n(X); pole_error at a zero of J_n.
inline double x_dlog_j(double n, double X) {
  const double j = specfun::bessel_j(n, X);
  if (j == 0.0) throw acf::pole_error("matching residual: J_|l|(X) vanishes");
  return 0.5 * X * (specfun::bessel_j(n - 1.0, X) - specfun::bessel_j(n + 1.0, X)) / j;
}

// X K'/K - X Z'/Z - Ma, the matching residual times sqrt(X).
inline double matching_defect(double X, const ShellConfig& c, Interior in) {
  const double nl = std::abs(c.l);
  const double inner = in == Interior::Modified ? x_dlog_i(nl, X) : x_dlog_j(nl, X);
  return x_dlog_k(c.gamma, X) - inner - c.ma;
}

inline double first_j_zero(int l) {
  const double n = std::abs(l);
  auto f = [&](double x) { return specfun::bessel_j(n, x); };
  const auto b = roots::first_sign_change(f, roots::linspace(0.5, n + 6.0, 400));
  return roots::brent(f, b->first, b->second);
}

}  // namespace detail

/// [sqrt(X) K_g(X)]'/K_g(X) - [sqrt(X) Z(X)]'/Z(X) - Ma/sqrt(X) with
/// X = sqrt(2 m |E|) R and Z the interior Bessel function of order |l|.
inline double matching_residual(double X, const ShellConfig& c, Interior in = Interior::Modified) {
  detail::check_shell(c, "matching_residual");
  if (!(X > 0.0)) throw acf::domain_error("matching_residual: X must be positive");
  return detail::matching_defect(X, c, in) / std::sqrt(X);
}

/// Root X* of the matching residual. The scan runs over [1e-12, 60] for the
/// modified interior and up to the first zero of J_|l| (less 1e-6) for the
/// oscillatory one.
inline double shell_root_x(const ShellConfig& c, Interior in = Interior::Modified) {
  detail::check_shell(c, "shell_bound_energy_exact");
  const double x_max = in == Interior::Modified ? 60.0 : detail::first_j_zero(c.l) - 1e-6;
  auto f = [&](double X) { return detail::matching_defect(X, c, in); };
  const auto b = roots::first_sign_change(f, roots::logspace(1e-12, x_max, 600));
  if (!b) throw acf::no_root_error("shell: matching equation has no root for X in (0, " + std::to_string(x_max) + ")");
  if (b->first == b->second) return b->first;
  return roots::brent(f, b->first, b->second);
}

inline double shell_bound_energy_exact(const ShellConfig& c, Interior in = Interior::Modified) {
  const double X = shell_root_x(c, in);
  return -X * X / (2.0 * c.m * c.R * c.R);
}

/// Small-X closed form -(2 / (m R^2)) [bracket]^{-1/g} with
/// bracket = (|l| + Ma - g) Gamma(1 - g) / ((|l| + Ma + g) Gamma(1 + g)).
inline double shell_bound_energy_closed(const ShellConfig& c) {
  detail::check_shell(c, "shell_bound_energy_closed");
  const double g = c.gamma;
  const double num = std::abs(c.l) + c.ma - g;
  const double den = std::abs(c.l) + c.ma + g;
  if (std::abs(num) < 1e-14 || std::abs(den) < 1e-14)
    throw acf::domain_error("shell closed form: degenerate configuration, |l| + Ma -+ gamma vanishes");
  const double bracket = num * gamma_ratio(g) / den;
  if (!(bracket > 0.0)) throw acf::domain_error("shell closed form: bracket must be positive");
  return -2.0 / (c.m * c.R * c.R) * std::pow(bracket, -1.0 / g);
}

struct NumerovOptions {
  double h0 = 0.02;        // initial step in ln r
  double rel_tol = 1e-6;   // stop when halving h moves E by less than this
  int max_halvings = 10;
  double start_ratio = 1e-6;  // inner start r0 = R * start_ratio
};

namespace detail {

// With r = e^x and F = sqrt(r) u the radial equation reads
// u'' = (nu^2 + kappa^2 e^{2x}) u. Numerov from x_a to x_b (either
// direction, step close to h) seeded by start(x) at the first two nodes;
// returns d ln u / dx at x_b, which equals R F'/F - 1/2 there.
template <class Start>
double numerov_log_derivative(double nu, double kappa, double x_a, double x_b, double h, Start&& start) {
  using real = long double;  // the defect near a shallow root is a small difference
  const int steps = std::max(16, static_cast<int>(std::ceil(std::abs(x_b - x_a) / h)));
  const real dx = (static_cast<real>(x_b) - x_a) / steps;
  const real c = dx * dx / 12;
  const real nu2 = static_cast<real>(nu) * nu, k2 = static_cast<real>(kappa) * kappa;
  auto g = [&](int i) { return nu2 + k2 * std::exp(2 * (x_a + i * dx)); };
  real g_prev = g(0), g_cur = g(1);
  real y_prev = start(static_cast<double>(x_a)), y_cur = start(static_cast<double>(x_a + dx));
  real y_before = y_prev, g_before = g_prev;
  for (int i = 1; i <= steps; ++i) {
    const real g_next = g(i + 1);
    const real y_next = (2 * y_cur * (1 + 5 * c * g_cur) - y_prev * (1 - c * g_prev)) / (1 - c * g_next);
    y_before = y_prev;
    g_before = g_prev;
    y_prev = y_cur;
    g_prev = g_cur;
    y_cur = y_next;
    g_cur = g_next;
    const real s = std::abs(y_cur);
    if (s > 1e250L || (s > 0 && s < 1e-250L)) {
      y_before /= s;
      y_prev /= s;
      y_cur /= s;
    }
  }
  // y_before, y_prev, y_cur sit at x_b - dx, x_b, x_b + dx.
  const real dy = (y_cur * (1 - 2 * c * g_cur) - y_before * (1 - 2 * c * g_before)) / (2 * dx);
  return static_cast<double>(dy / y_prev);
}

}  // namespace detail

/// Jump defect (d ln u/dx)_out - (d ln u/dx)_in - Ma at r = R for a trial
/// X = kappa R, from Numerov integrations of the two radial equations.
inline double numerov_defect(double X, const ShellConfig& c, double h, double start_ratio = 1e-6) {
  const double kappa = X / c.R;
  const double nl = std::abs(c.l);
  const double g = c.gamma;
  const double xr = std::log(c.R);
  auto inner_start = [&](double x) {
    const double r = std::exp(x);
    const double z = kappa * r;
    return std::pow(r / c.R, nl) * (1.0 + z * z / (4.0 * (nl + 1.0)));
  };
  const double r_inf = std::max(30.0 / kappa, 3.0 * c.R);
  auto outer_start = [&](double x) {
    const double z = kappa * std::exp(x);
    const double a = 4.0 * g * g;
    const double w = 1.0 / (8.0 * z);
    return std::exp(-(z - kappa * r_inf)) / std::sqrt(z) *
           (1.0 + (a - 1.0) * w + (a - 1.0) * (a - 9.0) * w * w / 2.0);
  };
  const double in = detail::numerov_log_derivative(nl, kappa, std::log(c.R * start_ratio), xr, h, inner_start);
  const double out = detail::numerov_log_derivative(g, kappa, std::log(r_inf), xr, h, outer_start);
  return out - in - c.ma;
}

/// Bound level from Numerov shooting: scan X on a log grid, Brent on the
/// defect, halve the step until E moves by less than opts.rel_tol.
inline double numerov_bound_energy(const ShellConfig& c, const NumerovOptions& opts = {}) {
  detail::check_shell(c, "numerov_bound_energy");
  double h = opts.h0;
  auto defect = [&](double X) { return numerov_defect(X, c, h, opts.start_ratio); };
  const auto b = roots::first_sign_change(defect, roots::logspace(1e-10, 60.0, 300));
  if (!b) throw acf::no_root_error("numerov: no eigenvalue for X in [1e-10, 60]");
  double X = roots::brent(defect, b->first, b->second);
  for (int k = 0; k < opts.max_halvings; ++k) {
    h *= 0.5;
    double lo = X * (1.0 - 1e-3), hi = X * (1.0 + 1e-3);
    while ((defect(lo) > 0.0) == (defect(hi) > 0.0)) {
      lo *= 0.9;
      hi *= 1.1;
      if (hi > 60.0) throw acf::no_root_error("numerov: eigenvalue lost under step refinement");
    }
    const double X_new = roots::brent(defect, lo, hi);
    const double change = std::abs(X_new * X_new - X * X) / (X * X);
    X = X_new;
    if (change < opts.rel_tol) return -X * X / (2.0 * c.m * c.R * c.R);
  }
  throw acf::no_root_error("numerov: step refinement did not converge");
}

struct EffectiveAngle {
  double xi = 0.0;
  double theta = 0.0;  // in [0, 2 pi)
};

/// Extension angle reproduced by the shell at momentum p = sqrt(2 m E_ref).
/// The channel (l, s) has coupling Ma = n + mu; inside the shell the order is
/// |l - s n| and the shell strength entering the derivative jump is s Ma.
/// Outside, u = N+ J_g(pr) + N- J_{-g}(pr); the ratio N-/N+ is mapped onto xi
/// through the region-2 continuum function.
inline EffectiveAngle effective_extension_parameter(const ShellConfig& c, double e_ref, int s) {
  detail::check_shell(c, "effective_extension_parameter");
  if (s != 1 && s != -1) throw acf::domain_error("effective_extension_parameter: s must be +1 or -1");
  if (!(e_ref > 0.0)) throw acf::domain_error("effective_extension_parameter: E_ref must be positive");
  const Coupling cp = decompose(c.ma);
  const double g = c.gamma;
  const double p = std::sqrt(2.0 * c.m * e_ref);
  const double X = p * c.R;
  const double k_in = std::abs(c.l - s * cp.n);
  const double strength = s * c.ma;
  using specfun::bessel_j;
  using specfun::bessel_j_prime;
  const double b = bessel_j(k_in, X), bp = X * bessel_j_prime(k_in, X);
  const double a11 = bessel_j(g, X), a12 = bessel_j(-g, X);
  const double a21 = X * bessel_j_prime(g, X), a22 = X * bessel_j_prime(-g, X);
  const double r1 = b, r2 = bp + strength * b;
  const double det = a11 * a22 - a12 * a21;
  if (det == 0.0 || !std::isfinite(det)) throw acf::no_root_error("effective_extension_parameter: singular continuity system");
  const double n_plus = (r1 * a22 - a12 * r2) / det;
  const double n_minus = (a11 * r2 - a21 * r1) / det;
  double xi;
  if (n_plus == 0.0) {
    xi = std::numeric_limits<double>::infinity();
  } else {
    xi = (n_minus / n_plus) * std::pow(2.0 * c.m / p, 2.0 * g) / gamma_ratio(g);
  }
  const auto ep = ExtensionParameter::from_xi(xi);
  return {ep.xi, ep.theta};
}

/// Shortest distance between two angles on the circle.
inline double angle_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
  return std::min(d, 2.0 * std::numbers::pi - d);
}

/// Coupling Ma(R) that places the exact shell level at E_target.
/// With gamma given, Ma follows explicitly from the matching condition at
/// X = R sqrt(2 m |E|). Without it, gamma is tied to the coupling as
/// ||l| - mu(Ma)| and Ma is solved for on the unit intervals below -|l|,
/// nearest to zero first.
inline double renormalize_coupling(double e_target, double R, int l, double m,
                                   std::optional<double> gamma = std::nullopt) {
  if (!(e_target < 0.0)) throw acf::domain_error("renormalize_coupling: E_target must be negative");
  if (!(R > 0.0)) throw acf::domain_error("renormalize_coupling: R must be positive");
  if (!(m > 0.0)) throw acf::domain_error("renormalize_coupling: m must be positive");
  const double X = R * std::sqrt(-2.0 * m * e_target);
  const double nl = std::abs(l);
  if (gamma) {
    detail::check_gamma(*gamma, "renormalize_coupling");
    return detail::x_dlog_k(*gamma, X) - detail::x_dlog_i(nl, X);
  }
  auto h = [&](double ma) {
    const double g = std::abs(nl - decompose(ma).mu);
    if (!(g > 0.0 && g < 1.0)) return std::numeric_limits<double>::quiet_NaN();
    return detail::x_dlog_k(g, X) - detail::x_dlog_i(nl, X) - ma;
  };
  for (int n = -static_cast<int>(nl) - 1; n >= -8; --n) {
    const auto b = roots::first_sign_change(h, roots::linspace(n + 1e-9, n + 1.0 - 1e-9, 400));
    if (b) return b->first == b->second ? b->first : roots::brent(h, b->first, b->second);
  }
  throw acf::no_root_error("renormalize_coupling: E_target unreachable in the attraction window");
}

struct FlowPoint {
  double R = 0.0;
  double ma = 0.0;
  double gamma = 0.0;
  double energy_check = 0.0;  // exact shell level at (Ma(R), R)
};

inline std::vector<FlowPoint> renormalization_flow(double e_target, int l, double m, const std::vector<double>& radii,
                                                   std::optional<double> gamma = std::nullopt) {
  return parallel_map(radii.size(), [&](std::size_t i) {
    FlowPoint fp;
    fp.R = radii[i];
    fp.ma = renormalize_coupling(e_target, fp.R, l, m, gamma);
    fp.gamma = gamma ? *gamma : std::abs(std::abs(l) - decompose(fp.ma).mu);
    fp.energy_check = shell_bound_energy_exact({fp.R, fp.ma, m, l, fp.gamma});
    return fp;
  });
}

inline bool attraction_window(int l, double gamma, double ma) {
  if (!(ma < 0.0)) return false;
  if (l == 0) return gamma > 0.0 && gamma < 0.5;
  if (std::abs(l) == 1) return gamma > 0.5 && gamma < 1.0;
  return false;
}

}  // namespace acf
