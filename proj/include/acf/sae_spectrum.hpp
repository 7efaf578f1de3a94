#pragma once

// One-parameter family of self-adjoint extensions for the channels with
// 0 < (l + s mu)^2 < 1, plus the l + s mu = 0 log case: bound levels as
// closed forms and as zeros of the ingoing-wave coefficient, normalized
// bound states, continuum functions.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "acf/channels.hpp"
#include "acf/errors.hpp"
#include "acf/parallel.hpp"
#include "acf/quadrature.hpp"
#include "acf/roots.hpp"
#include "acf/specfun.hpp"

namespace acf {

/// xi = tan(theta / 2), theta in [0, 2 pi). xi = +-inf is the single point
/// theta = pi; xi = 0 is theta = 0 (equivalently 2 pi).
struct ExtensionParameter {
  double xi = 0.0;
  double theta = 0.0;

  static ExtensionParameter from_xi(double xi) {
    if (std::isnan(xi)) throw acf::domain_error("extension parameter: xi is NaN");
    double th = 2.0 * std::atan(xi);
    if (th < 0.0) th += 2.0 * std::numbers::pi;
    return {xi, th};
  }
  static ExtensionParameter from_theta(double theta) {
    if (!std::isfinite(theta)) throw acf::domain_error("extension parameter: theta must be finite");
    double th = std::fmod(theta, 2.0 * std::numbers::pi);
    if (th < 0.0) th += 2.0 * std::numbers::pi;
    const double xi = th == std::numbers::pi ? std::numeric_limits<double>::infinity() : std::tan(0.5 * th);
    return {xi, th};
  }
};

struct BoundState {
  double energy = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;  // 0 in the log case
  bool log_case = false;
  double m = 1.0;
  double norm_const = 0.0;
  std::optional<Channel> channel;
};

namespace detail {

inline void check_gamma(double gamma, const char* fn) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw acf::domain_error(std::string(fn) + ": gamma must lie in (0, 1)");
}
inline void check_mass(double m, const char* fn) {
  if (!(m > 0.0) || !std::isfinite(m)) throw acf::domain_error(std::string(fn) + ": m must be positive");
}

}  // namespace detail

/// Gamma(1 - g) / Gamma(1 + g).
inline double gamma_ratio(double g) { return specfun::gamma(1.0 - g) / specfun::gamma(1.0 + g); }

/// Coefficient of the ingoing wave for E < 0; its zero is the bound level.
inline double ingoing_coefficient(double E, double xi, double gamma, double m) {
  detail::check_gamma(gamma, "ingoing_coefficient");
  detail::check_mass(m, "ingoing_coefficient");
  if (!(E < 0.0)) throw acf::domain_error("ingoing_coefficient: E must be negative");
  if (xi == 0.0) return 1.0;
  return 1.0 + xi * gamma_ratio(gamma) * std::pow(-E / (2.0 * m), gamma);
}

inline double bound_energy_closed(double gamma, double xi, double m) {
  detail::check_gamma(gamma, "bound_energy_closed");
  detail::check_mass(m, "bound_energy_closed");
  if (!(xi < 0.0) || !std::isfinite(xi))
    throw acf::domain_error("no bound state: xi must be finite and negative");
  return -2.0 * m * std::pow(-xi * gamma_ratio(gamma), -1.0 / gamma);
}

/// Log-case level as published: -4 m exp(2 (xi - C)). Defined for every
/// finite xi; levels with xi >= 0 are outside the range where the level is
/// claimed to exist and are flagged by log_case_xi_flagged.
inline double bound_energy_log(double xi, double m) {
  detail::check_mass(m, "bound_energy_log");
  if (!std::isfinite(xi)) throw acf::domain_error("bound_energy_log: xi must be finite");
  return -4.0 * m * std::exp(2.0 * (xi - specfun::euler_gamma));
}

inline bool log_case_xi_flagged(double xi) { return xi >= 0.0; }

/// Mismatch between sqrt(r) K_0(kappa r) near r = 0 and the log boundary
/// form sqrt(r) [ln(m r) + xi]; vanishes at the log-case pole.
inline double log_case_matching_coefficient(double E, double xi, double m) {
  detail::check_mass(m, "log_case_matching_coefficient");
  if (!(E < 0.0)) throw acf::domain_error("log_case_matching_coefficient: E must be negative");
  const double kappa = std::sqrt(-2.0 * m * E);
  return xi - specfun::euler_gamma - std::log(kappa / (2.0 * m));
}

namespace detail {

// Root in u = ln(-E) of g(-exp(u)): scan [-60, 60] on 1201 points, then
// Brent on the first sign change.
template <class G>
double pole_in_log_energy(G&& g, const char* what) {
  auto f = [&](double u) { return g(-std::exp(u)); };
  const auto bracket = roots::first_sign_change(f, roots::linspace(-60.0, 60.0, 1201));
  if (!bracket) throw acf::no_root_error(std::string(what) + ": no sign change for ln(-E) in [-60, 60]");
  return -std::exp(roots::brent(f, bracket->first, bracket->second));
}

}  // namespace detail

/// Zero of ingoing_coefficient on E < 0.
inline double find_pole(double xi, double gamma, double m) {
  detail::check_gamma(gamma, "find_pole");
  detail::check_mass(m, "find_pole");
  if (!(xi < 0.0)) throw acf::no_root_error("no root of the ingoing coefficient B(E): xi must be negative");
  return detail::pole_in_log_energy([&](double E) { return ingoing_coefficient(E, xi, gamma, m); }, "find_pole");
}

/// Zero of log_case_matching_coefficient on E < 0. Equals
/// -2 m exp(2 (xi - C)), half of bound_energy_log.
inline double log_case_pole(double xi, double m) {
  detail::check_mass(m, "log_case_pole");
  if (!std::isfinite(xi)) throw acf::domain_error("log_case_pole: xi must be finite");
  return detail::pole_in_log_energy([&](double E) { return log_case_matching_coefficient(E, xi, m); },
                                    "log_case_pole");
}

/// Integral of x K_g(x)^2 over (0, inf). On (0, 1] the substitution
/// x = t^k, k = 1 / (2 - 2g), removes the x^{1-2g} endpoint singularity.
inline double macdonald_norm_integral(double g) {
  if (!(g >= 0.0 && g < 1.0)) throw acf::domain_error("macdonald_norm_integral: order must lie in [0, 1)");
  const double k = 1.0 / (2.0 - 2.0 * g);
  // Leading small-x form of (x K_g^2) x' when x underflows.
  const double lead = g > 0.0 ? k * std::pow(0.5 * specfun::gamma(g), 2) * std::pow(4.0, g) : 0.0;
  auto inner = [&](double t) {
    const double x = std::pow(t, k);
    if (x < 1e-280) return lead;
    const double sk = std::sqrt(x) * specfun::bessel_k(g, x);
    return k * (x / t) * sk * sk;
  };
  auto outer = [&](double x) {
    if (x > 690.0) return 0.0;
    const double sk = std::sqrt(x) * specfun::bessel_k(g, x);
    return sk * sk;
  };
  return quad::tanh_sinh(inner, 0.0, 1.0, 1e-14).value + quad::tanh_sinh(outer, 1.0, 8.0, 1e-14).value +
         quad::tanh_sinh(outer, 8.0, 60.0, 1e-14).value;
}

/// Closed-form normalization sqrt(-2 m E sin(pi g) / (pi g)); kappa in the
/// log case. It normalizes to 1/2, not 1.
inline double closed_norm_const(const BoundState& bs) {
  if (bs.log_case) return bs.kappa;
  const double pg = std::numbers::pi * bs.gamma;
  return bs.kappa * std::sqrt(std::sin(pg) / pg);
}

inline BoundState make_bound_state(double gamma, double xi, double m) {
  BoundState bs;
  bs.energy = bound_energy_closed(gamma, xi, m);
  bs.kappa = std::sqrt(-2.0 * m * bs.energy);
  bs.gamma = gamma;
  bs.m = m;
  bs.norm_const = bs.kappa / std::sqrt(macdonald_norm_integral(gamma));
  return bs;
}

/// Log-case bound state at the published level bound_energy_log.
inline BoundState make_log_bound_state(double xi, double m) {
  BoundState bs;
  bs.energy = bound_energy_log(xi, m);
  bs.kappa = std::sqrt(-2.0 * m * bs.energy);
  bs.log_case = true;
  bs.m = m;
  bs.norm_const = bs.kappa / std::sqrt(macdonald_norm_integral(0.0));
  return bs;
}

inline BoundState make_bound_state(const Channel& ch, double xi, double m) {
  BoundState bs;
  switch (ch.region) {
    case Region::ExtensionFamily: bs = make_bound_state(*ch.gamma, xi, m); break;
    case Region::LogCase: bs = make_log_bound_state(xi, m); break;
    default: throw acf::domain_error("make_bound_state: channel has no extension family");
  }
  bs.channel = ch;
  return bs;
}

inline double bound_wavefunction(const BoundState& bs, double r) {
  if (!(r > 0.0)) throw acf::domain_error("bound_wavefunction: r must be positive");
  const double x = bs.kappa * r;
  if (x > 700.0) return 0.0;
  return bs.norm_const * std::sqrt(r) * specfun::bessel_k(bs.gamma, x);
}

/// Scattering-state radial function F(r) for E > 0, real normalization.
/// Region 2 uses sqrt(r)[J_g(pr) + xi G (E/2m)^g J_{-g}(pr)], whose small-r
/// coefficient ratio (r^{1/2-g} over r^{1/2+g}) is xi m^{-2g}. The log case
/// uses sqrt(r)[a J_0(pr) + (pi/2) N_0(pr)] with a = xi - C - ln(p/2m), which
/// tends to sqrt(r)[ln(m r) + xi] since (pi/2) N_0(x) ~ (ln(x/2) + C) J_0(x).
inline double continuum_wavefunction(const Channel& ch, double xi, double E, double r, double m = 1.0) {
  detail::check_mass(m, "continuum_wavefunction");
  if (!(E > 0.0)) throw acf::domain_error("continuum_wavefunction: E must be positive");
  if (!(r > 0.0)) throw acf::domain_error("continuum_wavefunction: r must be positive");
  const double p = std::sqrt(2.0 * m * E);
  const double x = p * r;
  const double sr = std::sqrt(r);
  switch (ch.region) {
    case Region::EssentiallySelfAdjoint: return sr * specfun::bessel_j(ch.nu, x);
    case Region::ExtensionFamily: {
      if (!std::isfinite(xi)) throw acf::domain_error("continuum_wavefunction: xi must be finite");
      const double g = *ch.gamma;
      const double mix = xi * gamma_ratio(g) * std::pow(E / (2.0 * m), g);
      return sr * (specfun::bessel_j(g, x) + (mix == 0.0 ? 0.0 : mix * specfun::bessel_j(-g, x)));
    }
    case Region::LogCase: {
      if (!std::isfinite(xi)) throw acf::domain_error("continuum_wavefunction: xi must be finite");
      const double a = xi - specfun::euler_gamma - std::log(p / (2.0 * m));
      return sr * (a * specfun::bessel_j(0.0, x) + 0.5 * std::numbers::pi * specfun::bessel_n(0.0, x));
    }
  }
  return 0.0;
}

struct SpectrumEntry {
  Channel channel;
  std::optional<BoundState> bound;
};

struct SpectrumReport {
  Coupling coupling;
  double xi = 0.0;
  double m = 1.0;
  std::vector<SpectrumEntry> entries;  // (k, s) ascending
  std::optional<double> e0_minus;      // level of the l = 0 channels (gamma = mu)
  std::optional<double> e1_minus;      // level of the |l| = 1 channels (gamma = 1 - mu)
  std::vector<std::vector<std::size_t>> degenerate_groups;  // entry indices sharing one level
  bool log_xi_flagged = false;
};

inline SpectrumReport spectrum_report(const Coupling& c, double xi, int k_min, int k_max, double m = 1.0) {
  SpectrumReport rep;
  rep.coupling = c;
  rep.xi = xi;
  rep.m = m;
  const auto chans = enumerate_channels(c, k_min, k_max);
  const bool binds = xi < 0.0;
  auto entries = parallel_map(chans.size(), [&](std::size_t i) {
    SpectrumEntry e{chans[i], std::nullopt};
    if (binds && chans[i].region != Region::EssentiallySelfAdjoint) e.bound = make_bound_state(chans[i], xi, m);
    return e;
  });
  rep.entries = std::move(entries);
  std::vector<bool> grouped(rep.entries.size(), false);
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    const auto& ei = rep.entries[i];
    if (!ei.bound) continue;
    if (ei.channel.region == Region::LogCase) rep.log_xi_flagged = log_case_xi_flagged(xi);
    if (ei.channel.region == Region::ExtensionFamily) {
      if (ei.channel.l == 0) rep.e0_minus = ei.bound->energy;
      else rep.e1_minus = ei.bound->energy;
    }
    if (grouped[i]) continue;
    std::vector<std::size_t> group{i};
    for (std::size_t j = i + 1; j < rep.entries.size(); ++j) {
      const auto& ej = rep.entries[j];
      if (!ej.bound || grouped[j]) continue;
      const double a = ei.bound->energy, b = ej.bound->energy;
      if (std::abs(a - b) <= 1e-12 * std::abs(a)) {
        group.push_back(j);
        grouped[j] = true;
      }
    }
    grouped[i] = true;
    if (group.size() > 1) rep.degenerate_groups.push_back(std::move(group));
  }
  return rep;
}

}  // namespace acf
