#pragma once

// Gamma and real-order Bessel-family functions.
//
// Everything here is a pure function of its arguments. Ordinary and
// Neumann functions use the ascending (or logarithmic) series below a
// crossover argument and the Hankel asymptotic expansion above it. The
// McDonald function uses Temme's series for x < 2 and Steed's continued
// fraction beyond, followed by upward recurrence in the order.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "acf/errors.hpp"

namespace acf::specfun {

struct EvalPolicy {
  double rel_tol = 1e-12;
  // Crossover argument between series and asymptotic regimes. Empty means
  // the default 12 + 2|nu|.
  std::optional<double> series_cutoff;
  int max_terms = 500;

  double cutoff_for(double nu) const { return series_cutoff.value_or(12.0 + 2.0 * std::abs(nu)); }
};

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

/// Orders beyond this are rejected by the scalar Bessel routines; use
/// bessel_j_sequence for the long ladders a partial-wave sum needs.
inline constexpr double max_scalar_order = 8.0;

namespace detail {

inline constexpr double pi = std::numbers::pi;

// Within this distance an order is treated as the integer it rounds to.
inline constexpr double integer_snap = 1e-12;

inline bool near_integer(double nu) { return std::abs(nu - std::round(nu)) < integer_snap; }

inline void check_order(double nu, const char* fn) {
  if (!std::isfinite(nu) || std::abs(nu) > max_scalar_order) {
    throw acf::domain_error(std::string(fn) + ": order out of supported range |nu| <= 8");
  }
}

// Lanczos approximation, g = 7, n = 9. Valid for x >= 0.5.
inline double lanczos_gamma(double x) {
  static constexpr std::array<double, 9> c = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double g = 7.0;
  const double z = x - 1.0;
  double a = c[0];
  const double t = z + g + 0.5;
  for (std::size_t i = 1; i < c.size(); ++i) a += c[i] / (z + static_cast<double>(i));
  return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

// Taylor coefficients of 1/Gamma(z) = sum_{k>=1} c_k z^k.
inline constexpr std::array<long double, 30> rgamma_taylor = {
    1.0L,
    0.5772156649015328606065L,
    -0.655878071520253881077L,
    -0.042002635034095235529L,
    0.1665386113822914895017L,
    -0.04219773455554433674821L,
    -0.009621971527876973562115L,
    0.007218943246663099542395L,
    -0.001165167591859065112114L,
    -0.0002152416741149509728157L,
    0.0001280502823881161861532L,
    -0.00002013485478078823865569L,
    -0.000001250493482142670657345L,
    0.000001133027231981695882374L,
    -2.05633841697760710345e-7L,
    6.116095104481415817862e-9L,
    5.002007644469222930056e-9L,
    -1.181274570487020144588e-9L,
    1.043426711691100510492e-10L,
    7.78226343990507125405e-12L,
    -3.696805618642205708188e-12L,
    5.100370287454475979015e-13L,
    -2.058326053566506783222e-14L,
    -5.34812253942301798237e-15L,
    1.226778628238260790159e-15L,
    -1.181259301697458769514e-16L,
    1.18669225475160033258e-18L,
    1.412380655318031781556e-18L,
    -2.298745684435370206592e-19L,
    1.714406321927337433384e-20L};

// Temme's auxiliary functions for |mu| <= 1/2:
//   g1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu),
//   g2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2,
// together with 1/Gamma(1+mu) and 1/Gamma(1-mu).
struct TemmeGammas {
  long double g1, g2, rgamma_plus, rgamma_minus;
};

inline TemmeGammas temme_gammas(long double mu) {
  // With a_j = c_{j+1}: 1/Gamma(1+mu) = sum_j a_j mu^j.
  long double g1 = 0.0L, g2 = 0.0L, odd_part = 0.0L;
  long double pw = 1.0L;      // mu^j
  long double pw_odd = 1.0L;  // mu^{j-1} for odd j
  for (std::size_t j = 0; j < rgamma_taylor.size(); ++j) {
    if (j % 2 == 0) {
      g2 += rgamma_taylor[j] * pw;
    } else {
      g1 -= rgamma_taylor[j] * pw_odd;
      odd_part += rgamma_taylor[j] * pw;
      pw_odd *= mu * mu;
    }
    pw *= mu;
  }
  return {g1, g2, g2 + odd_part, g2 - odd_part};
}

// Ascending series sum_k (-x^2/4)^k / (k! Gamma(nu+k+1)), scaled by
// (x/2)^nu. sign = -1 gives J, sign = +1 gives I. Requires nu+1 not a
// non-positive integer.

// Hankel asymptotic amplitudes P, Q for large x.
inline void hankel_pq(double nu, double x, double& p_out, double& q_out) {
  const double mu4 = 4.0 * nu * nu;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu4 - odd * odd) / (8.0 * k * x);
    if (next == 0.0) break;  // half-integer order: series terminates
    if (std::abs(next) >= prev) break;  // past the smallest term
    prev = std::abs(next);
    term = next;
    // P = sum (-1)^j a_{2j}/x^{2j}, Q = sum (-1)^j a_{2j+1}/x^{2j+1}
    const int j = (k - 1) / 2;
    const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 1) {
      q += sgn * term;
    } else {
      p -= sgn * term;  // k = 2j+2 -> sign (-1)^{j+1}
    }
    if (std::abs(term) < 1e-17) break;
  }
  p_out = p;
  q_out = q;
}

inline void hankel_phase(double nu, double x, double& cos_w, double& sin_w) {
  // omega = x - (nu/2 + 1/4) pi, expanded to keep the large-x reduction exact
  const double phi = (0.5 * nu + 0.25) * pi;
  const double cx = std::cos(x), sx = std::sin(x);
  const double cp = std::cos(phi), sp = std::sin(phi);
  cos_w = cx * cp + sx * sp;
  sin_w = sx * cp - cx * sp;
}

inline double harmonic(int k) {
  double h = 0.0;
  for (int i = 1; i <= k; ++i) h += 1.0 / i;
  return h;
}

}  // namespace detail

/// Euler gamma function.
inline double gamma(double x) {
  if (!std::isfinite(x)) throw acf::domain_error("gamma: non-finite argument");
  if (x <= 0.0 && x == std::round(x)) {
    throw acf::domain_error("gamma: pole at non-positive integer " + std::to_string(x));
  }
  if (x > 171.6) throw acf::range_error("gamma: overflow");
  if (x < 0.5) {
    return detail::pi / (std::sin(detail::pi * x) * detail::lanczos_gamma(1.0 - x));
  }
  return detail::lanczos_gamma(x);
}

namespace detail {

inline long double ascending_series(double nu, double x, int sign, int max_terms, double gamma_nu1) {
  const long double half = static_cast<long double>(x) / 2.0L;
  const long double q = half * half;
  long double term = 1.0L;
  long double sum = 1.0L;
  const int limit = std::max(max_terms, static_cast<int>(2.0 * x) + 60);
  for (int k = 1; k < limit; ++k) {
    term *= static_cast<long double>(sign) * q / (static_cast<long double>(k) * (static_cast<long double>(nu) + k));
    sum += term;
    if (std::abs(term) <= 1e-21L * std::abs(sum)) break;
  }
  return sum * std::pow(half, static_cast<long double>(nu)) / gamma_nu1;
}

// J_nu by the ascending series, any real non-negative-integer-free nu+1.
inline long double j_series(double nu, double x, int max_terms) {
  return ascending_series(nu, x, -1, max_terms, gamma(nu + 1.0));
}

// Y_n for integer n >= 0 from the logarithmic series.
inline long double y_integer_series(int n, double x, int max_terms) {
  const long double half = static_cast<long double>(x) / 2.0L;
  const long double q = half * half;
  const long double pil = std::numbers::pi_v<long double>;
  long double finite = 0.0L;
  if (n > 0) {
    // sum_{k=0}^{n-1} (n-k-1)!/k! (x/2)^{2k-n}
    long double fac = 1.0L;  // (n-1)!
    for (int i = 2; i < n; ++i) fac *= i;
    long double kfac = 1.0L;
    long double pw = std::pow(half, -static_cast<long double>(n));
    for (int k = 0; k < n; ++k) {
      finite += fac / kfac * pw;
      if (k + 1 < n) {
        fac /= static_cast<long double>(n - k - 1);
        kfac *= static_cast<long double>(k + 1);
        pw *= q;
      }
    }
  }
  long double nfac = 1.0L;
  for (int i = 2; i <= n; ++i) nfac *= i;
  const long double cl = euler_gamma;
  long double psi_k = -cl;                     // psi(k+1)
  long double psi_nk = -cl + harmonic(n);      // psi(n+k+1)
  long double term = std::pow(half, static_cast<long double>(n)) / nfac;
  long double sum = (psi_k + psi_nk) * term;
  long double jsum = term;
  const int limit = std::max(max_terms, static_cast<int>(2.0 * x) + 60);
  for (int k = 1; k < limit; ++k) {
    term *= -q / (static_cast<long double>(k) * (n + k));
    psi_k += 1.0L / k;
    psi_nk += 1.0L / (n + k);
    const long double d = (psi_k + psi_nk) * term;
    sum += d;
    jsum += term;
    if (std::abs(term) <= 1e-21L * std::abs(jsum) && std::abs(d) <= 1e-21L * std::abs(sum)) break;
  }
  return -finite / pil + 2.0L / pil * std::log(half) * jsum - sum / pil;
}

}  // namespace detail

/// Bessel function of the first kind J_nu(x), real order |nu| <= 8, x >= 0.
inline double bessel_j(double nu, double x, const EvalPolicy& policy = {}) {
  detail::check_order(nu, "bessel_j");
  if (!(x >= 0.0) || !std::isfinite(x)) throw acf::domain_error("bessel_j: x must be >= 0");
  if (detail::near_integer(nu) && nu < 0.0) {
    const int n = static_cast<int>(std::round(-nu));
    const double v = bessel_j(static_cast<double>(n), x, policy);
    return (n % 2 == 0) ? v : -v;
  }
  if (x == 0.0) {
    if (detail::near_integer(nu)) return std::round(nu) == 0.0 ? 1.0 : 0.0;
    if (nu > 0.0) return 0.0;
    throw acf::domain_error("bessel_j: J_nu(0) is infinite for negative non-integer nu");
  }
  if (x <= policy.cutoff_for(nu)) {
    const double order = detail::near_integer(nu) ? std::round(nu) : nu;
    return static_cast<double>(detail::j_series(order, x, policy.max_terms));
  }
  double p, q, cw, sw;
  detail::hankel_pq(nu, x, p, q);
  detail::hankel_phase(nu, x, cw, sw);
  return std::sqrt(2.0 / (detail::pi * x)) * (p * cw - q * sw);
}

/// Neumann (Weber) function N_nu(x) = Y_nu(x), x > 0.
inline double bessel_n(double nu, double x, const EvalPolicy& policy = {}) {
  detail::check_order(nu, "bessel_n");
  if (!(x > 0.0) || !std::isfinite(x)) throw acf::domain_error("bessel_n: x must be > 0");
  if (x > policy.cutoff_for(nu)) {
    double p, q, cw, sw;
    detail::hankel_pq(nu, x, p, q);
    detail::hankel_phase(nu, x, cw, sw);
    return std::sqrt(2.0 / (detail::pi * x)) * (p * sw + q * cw);
  }
  if (detail::near_integer(nu)) {
    const int n = static_cast<int>(std::round(nu));
    const double v = static_cast<double>(detail::y_integer_series(std::abs(n), x, policy.max_terms));
    return (n < 0 && (-n) % 2 == 1) ? -v : v;
  }
  const long double pil = std::numbers::pi_v<long double>;
  const long double jp = detail::j_series(nu, x, policy.max_terms);
  const long double jm = detail::j_series(-nu, x, policy.max_terms);
  const long double a = pil * static_cast<long double>(nu);
  return static_cast<double>((jp * std::cos(a) - jm) / std::sin(a));
}

/// Modified Bessel function of the first kind I_nu(x), x >= 0.
inline double bessel_i(double nu, double x, const EvalPolicy& policy = {}) {
  detail::check_order(nu, "bessel_i");
  if (!(x >= 0.0) || !std::isfinite(x)) throw acf::domain_error("bessel_i: x must be >= 0");
  if (detail::near_integer(nu)) nu = std::abs(std::round(nu));  // I_{-n} = I_n
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    if (nu > 0.0) return 0.0;
    throw acf::domain_error("bessel_i: I_nu(0) is infinite for negative non-integer nu");
  }
  if (x > 700.0) throw acf::range_error("bessel_i: overflow");
  return static_cast<double>(detail::ascending_series(nu, x, +1, policy.max_terms, gamma(nu + 1.0)));
}

/// McDonald function K_nu(x), x > 0. Even in nu by construction.
inline double bessel_k(double nu, double x, const EvalPolicy& = {}) {
  detail::check_order(nu, "bessel_k");
  if (!(x > 0.0) || !std::isfinite(x)) throw acf::domain_error("bessel_k: x must be > 0");
  if (x > 700.0) throw acf::range_error("bessel_k: exp(-x) underflows for x > 700");
  const double anu = std::abs(nu);
  const int nl = static_cast<int>(anu + 0.5);
  const long double mu = static_cast<long double>(anu) - nl;  // |mu| <= 1/2
  const long double xl = x;
  const long double pil = std::numbers::pi_v<long double>;
  const long double eps = 1e-20L;
  long double k_mu, k_mu1;
  if (x < 2.0) {
    // Temme's series
    const long double x2 = 0.5L * xl;
    const long double pimu = pil * mu;
    const long double fact = std::abs(pimu) < eps ? 1.0L : pimu / std::sin(pimu);
    long double d = -std::log(x2);
    long double e = mu * d;
    const long double fact2 = std::abs(e) < eps ? 1.0L : std::sinh(e) / e;
    const auto tg = detail::temme_gammas(mu);
    long double ff = fact * (tg.g1 * std::cosh(e) + tg.g2 * fact2 * d);
    long double sum = ff;
    e = std::exp(e);
    long double p = 0.5L * e / tg.rgamma_plus;
    long double q = 0.5L / (e * tg.rgamma_minus);
    long double c = 1.0L;
    d = x2 * x2;
    long double sum1 = p;
    for (int i = 1; i < 1000; ++i) {
      const long double il = i;
      ff = (il * ff + p + q) / (il * il - mu * mu);
      c *= d / il;
      p /= (il - mu);
      q /= (il + mu);
      const long double del = c * ff;
      sum += del;
      sum1 += c * (p - il * ff);
      if (std::abs(del) < std::abs(sum) * eps) break;
    }
    k_mu = sum;
    k_mu1 = sum1 * 2.0L / xl;
  } else {
    // Steed's continued fraction (CF2) with Temme's normalization
    long double b = 2.0L * (1.0L + xl);
    long double d = 1.0L / b;
    long double h = d, delh = d;
    long double q1 = 0.0L, q2 = 1.0L;
    const long double a1 = 0.25L - mu * mu;
    long double q = a1, c = a1;
    long double a = -a1;
    long double s = 1.0L + q * delh;
    for (int i = 2; i < 100000; ++i) {
      a -= 2 * (i - 1);
      c = -a * c / i;
      const long double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0L;
      d = 1.0L / (b + a * d);
      delh = (b * d - 1.0L) * delh;
      h += delh;
      const long double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < eps) break;
    }
    h = a1 * h;
    k_mu = std::sqrt(pil / (2.0L * xl)) * std::exp(-xl) / s;
    k_mu1 = k_mu * (mu + xl + 0.5L - h) / xl;
  }
  for (int i = 1; i <= nl; ++i) {
    const long double next = (mu + i) * 2.0L / xl * k_mu1 + k_mu;
    k_mu = k_mu1;
    k_mu1 = next;
  }
  return static_cast<double>(k_mu);
}

/// dJ_nu/dx = (J_{nu-1} - J_{nu+1}) / 2.
inline double bessel_j_prime(double nu, double x, const EvalPolicy& policy = {}) {
  return 0.5 * (bessel_j(nu - 1.0, x, policy) - bessel_j(nu + 1.0, x, policy));
}

inline double bessel_n_prime(double nu, double x, const EvalPolicy& policy = {}) {
  return 0.5 * (bessel_n(nu - 1.0, x, policy) - bessel_n(nu + 1.0, x, policy));
}

inline double bessel_i_prime(double nu, double x, const EvalPolicy& policy = {}) {
  return 0.5 * (bessel_i(nu - 1.0, x, policy) + bessel_i(nu + 1.0, x, policy));
}

/// dK_nu/dx = -(K_{nu-1} + K_{nu+1}) / 2.
inline double bessel_k_prime(double nu, double x, const EvalPolicy& policy = {}) {
  return -0.5 * (bessel_k(nu - 1.0, x, policy) + bessel_k(nu + 1.0, x, policy));
}

/// J_{nu0 + j}(x) for j = 0 .. count-1, nu0 in [0, 2), by Miller's backward
/// recurrence normalized against the scalar J_{nu0} and J_{nu0+1}. Handles
/// orders far beyond max_scalar_order and arguments of several thousand.
inline std::vector<double> bessel_j_sequence(double nu0, double x, std::size_t count) {
  if (!(nu0 >= 0.0 && nu0 < 2.0)) throw acf::domain_error("bessel_j_sequence: nu0 must be in [0, 2)");
  if (!(x >= 0.0) || !std::isfinite(x)) throw acf::domain_error("bessel_j_sequence: x must be >= 0");
  std::vector<double> out(count, 0.0);
  if (count == 0) return out;
  if (x == 0.0) {
    if (nu0 == 0.0) out[0] = 1.0;
    return out;
  }
  const std::size_t top = std::max(count, static_cast<std::size_t>(x)) + 40 +
                          static_cast<std::size_t>(15.0 * std::cbrt(x));
  std::vector<long double> b(top + 2, 0.0L);
  b[top] = 1.0L;
  const long double two_over_x = 2.0L / static_cast<long double>(x);
  for (std::size_t j = top; j >= 1; --j) {
    b[j - 1] = (static_cast<long double>(nu0) + j) * two_over_x * b[j] - b[j + 1];
    if (std::abs(b[j - 1]) > 1e4000L) {
      for (std::size_t i = j - 1; i <= top; ++i) b[i] *= 1e-4000L;
    }
  }
  const double j0 = bessel_j(nu0, x);
  const double j1 = bessel_j(nu0 + 1.0, x);
  const long double scale = (j0 * b[0] + j1 * b[1]) / (b[0] * b[0] + b[1] * b[1]);
  for (std::size_t j = 0; j < count; ++j) out[j] = static_cast<double>(b[j] * scale);
  return out;
}

}  // namespace acf::specfun
