#pragma once

// Spin-dependent scattering off the line charge: closed-form amplitudes and
// cross sections for spin along z and x, the partial-wave field, numerical
// amplitude extraction from it, and a tabulation of the ingoing coefficient.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "acf/channels.hpp"
#include "acf/errors.hpp"
#include "acf/parallel.hpp"
#include "acf/sae_spectrum.hpp"
#include "acf/specfun.hpp"

namespace acf {

using cplx = std::complex<double>;
using Doublet = std::array<cplx, 2>;

enum class SpinAxis { Z, X };

struct SpinState {
  SpinAxis axis = SpinAxis::Z;
  int eigenvalue = 1;
  Doublet doublet{cplx{1.0}, cplx{0.0}};

  static SpinState z(int s) {
    if (s != 1 && s != -1) throw acf::domain_error("spin: eigenvalue must be +1 or -1");
    return {SpinAxis::Z, s, {cplx{0.5 * (1 + s)}, cplx{0.5 * (1 - s)}}};
  }
  static SpinState x(int s1) {
    if (s1 != 1 && s1 != -1) throw acf::domain_error("spin: eigenvalue must be +1 or -1");
    const double h = 1.0 / std::numbers::sqrt2;
    return {SpinAxis::X, s1, {cplx{h}, cplx{s1 * h}}};
  }
};

inline double doublet_norm2(const Doublet& d) { return std::norm(d[0]) + std::norm(d[1]); }

namespace detail {

inline double forward_guard(double phi, const char* fn) {
  const double sh = std::sin(0.5 * phi);
  if (std::abs(sh) < 1e-12) throw acf::domain_error(std::string(fn) + ": forward direction, sin(phi/2) = 0");
  return sh;
}

inline void check_momentum(double p, const char* fn) {
  if (!(p > 0.0) || !std::isfinite(p)) throw acf::domain_error(std::string(fn) + ": p must be positive");
}

inline Doublet scale(const Doublet& d, cplx a) { return {a * d[0], a * d[1]}; }

}  // namespace detail

/// f_s(phi) = -(s / sqrt(2 pi p)) e^{i s (|n| - 1/2) phi + i |n| pi}
///            sin(pi mu) / sin(phi/2) u_s.
inline Doublet amplitude_spin_z(double phi, double p, const Coupling& c, int s) {
  const auto spin = SpinState::z(s);
  detail::check_momentum(p, "amplitude_spin_z");
  const double sh = detail::forward_guard(phi, "amplitude_spin_z");
  const double an = std::abs(c.n);
  const cplx phase = std::exp(cplx{0.0, s * (an - 0.5) * phi + an * std::numbers::pi});
  const double mag = -s * std::sin(std::numbers::pi * c.mu) / (std::sqrt(2.0 * std::numbers::pi * p) * sh);
  return detail::scale(spin.doublet, mag * phase);
}

inline double cross_section_spin_z(double phi, double p, double mu) {
  detail::check_momentum(p, "cross_section_spin_z");
  const double sh = detail::forward_guard(phi, "cross_section_spin_z");
  const double sm = std::sin(std::numbers::pi * mu);
  return sm * sm / (2.0 * std::numbers::pi * p * sh * sh);
}

/// f_(+-)(phi) = (-1)^|n| sin(pi mu) sin[(|n| - 1/2) phi] / (sqrt(2 pi p) sin(phi/2)) u_(+-).
inline Doublet amplitude_spin_x(double phi, double p, const Coupling& c, int s1) {
  const auto spin = SpinState::x(s1);
  detail::check_momentum(p, "amplitude_spin_x");
  const double sh = detail::forward_guard(phi, "amplitude_spin_x");
  const int an = std::abs(c.n);
  const double sign = an % 2 == 0 ? 1.0 : -1.0;
  const double a = sign * std::sin(std::numbers::pi * c.mu) * std::sin((an - 0.5) * phi) /
                   (std::sqrt(2.0 * std::numbers::pi * p) * sh);
  return detail::scale(spin.doublet, a);
}

inline double cross_section_spin_x(double phi, double p, const Coupling& c) {
  detail::check_momentum(p, "cross_section_spin_x");
  const double sh = detail::forward_guard(phi, "cross_section_spin_x");
  const double sm = std::sin(std::numbers::pi * c.mu);
  const double sn = std::sin((std::abs(c.n) - 0.5) * phi);
  return sm * sm * sn * sn / (2.0 * std::numbers::pi * p * sh * sh);
}

/// Default partial-wave truncation ceil(pr + 10 (pr)^{1/3} + 40).
inline int default_l_max(double pr) { return static_cast<int>(std::ceil(pr + 10.0 * std::cbrt(pr) + 40.0)); }

/// Treatment of the k = -s n channel: General mixes J_{+mu} (weight
/// cos(theta/2), upper component) and J_{-mu} (weight sin(theta/2), lower
/// component); LimitR0 keeps J_{+mu} for s = +1 and J_{-mu} for s = -1.
struct FieldVariant {
  bool limit_r0 = true;
  double theta = 0.0;

  static FieldVariant general(double theta) { return {false, theta}; }
  static FieldVariant limit() { return {true, 0.0}; }
};

struct PartialWaveField {
  Doublet psi{};
  double tail_bound = 0.0;  // size of the first omitted Bessel term
  bool truncation_warning = false;
};

namespace detail {

// Radial data at one pr shared by every angle: J_{mu + j} and J_{1 - mu + j}
// for j = 0..L + 1, plus J_{-mu}.
struct RadialTable {
  double mu = 0.0;
  std::vector<double> a;  // J_{mu + j}
  std::vector<double> b;  // J_{1 - mu + j}
  double j_minus_mu = 0.0;
};

inline RadialTable radial_table(double mu, double z, int L) {
  RadialTable t;
  t.mu = mu;
  const std::size_t count = static_cast<std::size_t>(L) + 2;
  t.a = specfun::bessel_j_sequence(mu, z, count);
  t.b = specfun::bessel_j_sequence(1.0 - mu, z, count);
  t.j_minus_mu = mu > 0.0 ? specfun::bessel_j(-mu, z) : t.a[0];
  return t;
}

// J_{|j + s mu|}(z) for the shifted index j = k + s n, j != 0 handled too.
inline double j_abs_order(const RadialTable& t, int j, int s) {
  if (s == 1) return j >= 0 ? t.a[static_cast<std::size_t>(j)] : t.b[static_cast<std::size_t>(-j - 1)];
  return j <= 0 ? t.a[static_cast<std::size_t>(-j)] : t.b[static_cast<std::size_t>(j - 1)];
}

// Scalar series multiplying u_s, N_k = e^{-i nu pi/2} (-1)^k.
inline cplx partial_wave_scalar(const RadialTable& t, double phi, const Coupling& c, int s, int L,
                                const FieldVariant& v) {
  const double pi = std::numbers::pi;
  const double mu = c.mu;
  const int k_star = -s * c.n;
  cplx sum{0.0, 0.0};
  for (int j = -L; j <= L; ++j) {
    const int k = j - s * c.n;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const cplx ang = std::exp(cplx{0.0, k * phi});
    if (k == k_star) {
      double w;
      cplx term;
      if (s == 1) {
        w = v.limit_r0 ? 1.0 : std::cos(0.5 * v.theta);
        term = std::exp(cplx{0.0, -0.5 * pi * mu}) * t.a[0];
      } else {
        w = v.limit_r0 ? 1.0 : std::sin(0.5 * v.theta);
        term = std::exp(cplx{0.0, 0.5 * pi * mu}) * t.j_minus_mu;
      }
      sum += sign * w * term * ang;
      continue;
    }
    const double nu = std::abs(j + s * mu);
    sum += sign * std::exp(cplx{0.0, -0.5 * pi * nu}) * j_abs_order(t, j, s) * ang;
  }
  return sum;
}

}  // namespace detail

/// Partial-wave sum over the shifted index |k + s n| <= L_max.
inline PartialWaveField partial_wave_field(double r, double phi, double p, const Coupling& c, int s, int l_max,
                                           const FieldVariant& variant = FieldVariant::limit()) {
  const auto spin = SpinState::z(s);
  detail::check_momentum(p, "partial_wave_field");
  if (!(r > 0.0)) throw acf::domain_error("partial_wave_field: r must be positive");
  if (l_max < 1) throw acf::domain_error("partial_wave_field: L_max must be at least 1");
  const double z = p * r;
  const auto t = detail::radial_table(c.mu, z, l_max);
  PartialWaveField out;
  out.psi = detail::scale(spin.doublet, detail::partial_wave_scalar(t, phi, c, s, l_max, variant));
  out.tail_bound = std::max(std::abs(t.a.back()), std::abs(t.b.back()));
  out.truncation_warning = out.tail_bound > 1e-10;
  return out;
}

/// Numerical amplitude (the u_s component) from the partial-wave field.
/// At each radius r_probe * {1, 2, 4, 8} the incident wave
/// e^{ipx} e^{-i s Ma (phi - pi)} (phi in (0, 2 pi)) is removed and the
/// remainder scaled by sqrt(r) e^{-i(pr - pi/4)}; the four values are
/// extrapolated to 1/r -> 0 with a cubic in 1/r.
inline std::vector<cplx> extract_amplitude(double p, const Coupling& c, int s, const std::vector<double>& phi_grid,
                                           double r_probe, int l_max = 0) {
  SpinState::z(s);
  detail::check_momentum(p, "extract_amplitude");
  if (!(p * r_probe >= 100.0)) throw acf::domain_error("extract_amplitude: probe radius too small, need p r >= 100");
  constexpr std::array<double, 4> mult = {1.0, 2.0, 4.0, 8.0};
  const double pi = std::numbers::pi;
  std::array<std::vector<cplx>, 4> samples;
  for (std::size_t i = 0; i < mult.size(); ++i) {
    const double r = r_probe * mult[i];
    const double z = p * r;
    const int L = l_max > 0 ? std::max(l_max, default_l_max(z)) : default_l_max(z);
    const auto t = detail::radial_table(c.mu, z, L);
    samples[i] = parallel_map(phi_grid.size(), [&](std::size_t q) {
      double phi = std::fmod(phi_grid[q], 2.0 * pi);
      if (phi <= 0.0) phi += 2.0 * pi;
      const cplx psi = detail::partial_wave_scalar(t, phi, c, s, L, FieldVariant::limit());
      const cplx inc = std::exp(cplx{0.0, z * std::cos(phi) - s * c.ma * (phi - pi)});
      return (psi - inc) * std::sqrt(r) * std::exp(cplx{0.0, -(z - 0.25 * pi)});
    });
  }
  // Lagrange extrapolation to h = 1/r = 0 on nodes h_i = 1/(r_probe mult_i).
  std::array<double, 4> w{};
  for (std::size_t i = 0; i < 4; ++i) {
    double num = 1.0, den = 1.0;
    const double hi = 1.0 / mult[i];
    for (std::size_t j = 0; j < 4; ++j) {
      if (j == i) continue;
      const double hj = 1.0 / mult[j];
      num *= -hj;
      den *= hi - hj;
    }
    w[i] = num / den;
  }
  std::vector<cplx> f(phi_grid.size());
  for (std::size_t q = 0; q < f.size(); ++q)
    for (std::size_t i = 0; i < 4; ++i) f[q] += w[i] * samples[i][q];
  return f;
}

struct PolePoint {
  double energy = 0.0;
  double coefficient = 0.0;
};

inline std::vector<PolePoint> pole_scan(double xi, double gamma, double m, const std::vector<double>& e_grid) {
  std::vector<PolePoint> out;
  out.reserve(e_grid.size());
  for (double E : e_grid) out.push_back({E, ingoing_coefficient(E, xi, gamma, m)});
  return out;
}

struct ScatteringRow {
  double phi = 0.0;
  Doublet amplitude{};
  double dsigma_dphi = 0.0;
};

struct ScatteringTable {
  double p = 1.0;
  Coupling coupling;
  SpinState spin;
  std::vector<ScatteringRow> rows;
};

/// Half-width of the excluded forward cone around phi = 0.
inline constexpr double forward_cone = 0.05;

inline ScatteringTable scattering_table(double p, const Coupling& c, const SpinState& spin, double phi_min,
                                        double phi_max, int points) {
  detail::check_momentum(p, "scattering_table");
  if (points < 1) throw acf::domain_error("scattering_table: points must be positive");
  if (!(phi_min <= phi_max)) throw acf::domain_error("scattering_table: phi_min > phi_max");
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> phis;
  for (int i = 0; i < points; ++i) {
    const double phi = points == 1 ? phi_min : phi_min + (phi_max - phi_min) * i / (points - 1);
    double w = std::fmod(phi, two_pi);
    if (w < 0.0) w += two_pi;
    if (w < forward_cone || w > two_pi - forward_cone) continue;
    phis.push_back(phi);
  }
  ScatteringTable tab{p, c, spin, {}};
  tab.rows = parallel_map(phis.size(), [&](std::size_t i) {
    ScatteringRow row;
    row.phi = phis[i];
    row.amplitude = spin.axis == SpinAxis::Z ? amplitude_spin_z(row.phi, p, c, spin.eigenvalue)
                                             : amplitude_spin_x(row.phi, p, c, spin.eigenvalue);
    row.dsigma_dphi = doublet_norm2(row.amplitude);
    return row;
  });
  return tab;
}

}  // namespace acf
