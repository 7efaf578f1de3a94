#pragma once

// Coupling decomposition Ma = n + mu and the classification of (k, s)
// channels into the three self-adjointness regions.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acf/errors.hpp"

namespace acf {

struct Coupling {
  double ma = 0.0;  // dimensionless AMM x line-charge product
  int n = 0;        // floor(ma)
  double mu = 0.0;  // fractional part, 0 <= mu < 1
};

// mu closer than this to 0 or 1 is snapped to the integer case.
inline constexpr double mu_snap = 1e-14;

inline Coupling decompose(double ma) {
  if (!std::isfinite(ma)) throw acf::domain_error("decompose: coupling Ma must be finite");
  double fl = std::floor(ma);
  double mu = ma - fl;
  if (mu < mu_snap) {
    mu = 0.0;
  } else if (mu > 1.0 - mu_snap) {
    fl += 1.0;
    mu = 0.0;
  }
  return {ma, static_cast<int>(fl), mu};
}

enum class Region { EssentiallySelfAdjoint, ExtensionFamily, LogCase };

inline std::string_view to_string(Region r) {
  switch (r) {
    case Region::EssentiallySelfAdjoint: return "essentially_self_adjoint";
    case Region::ExtensionFamily: return "extension_family";
    case Region::LogCase: return "log_case";
  }
  return "?";
}

struct Channel {
  int k = 0;
  int s = 1;  // sigma_3 eigenvalue
  int l = 0;  // k + s n
  Region region = Region::EssentiallySelfAdjoint;
  double nu = 0.0;              // |l + s mu|
  std::optional<double> gamma;  // ||l| - mu|, extension family only

  /// nu in region 1, gamma in region 2, 0 in the log case.
  double order() const { return gamma.value_or(nu); }
};

/// Region membership is decided on the integers (l, s) and on whether
/// mu vanishes, so no floating-point comparison of (l + s mu)^2 with 1 is
/// involved.
inline Channel classify(int k, int s, const Coupling& c) {
  if (s != 1 && s != -1) throw acf::domain_error("classify: spin s must be +1 or -1");
  Channel ch;
  ch.k = k;
  ch.s = s;
  ch.l = k + s * c.n;
  ch.nu = std::abs(ch.l + s * c.mu);
  if (c.mu == 0.0) {
    ch.region = ch.l == 0 ? Region::LogCase : Region::EssentiallySelfAdjoint;
  } else if (ch.l == 0 || ch.l == -s) {
    ch.region = Region::ExtensionFamily;
    ch.gamma = std::abs(std::abs(ch.l) - c.mu);
  } else {
    ch.region = Region::EssentiallySelfAdjoint;
  }
  return ch;
}

inline std::vector<Channel> enumerate_channels(const Coupling& c, int k_min, int k_max) {
  if (k_min > k_max) throw acf::domain_error("enumerate_channels: k_min > k_max");
  std::vector<Channel> out;
  out.reserve(static_cast<std::size_t>(2 * (k_max - k_min + 1)));
  for (int k = k_min; k <= k_max; ++k) {
    out.push_back(classify(k, -1, c));
    out.push_back(classify(k, +1, c));
  }
  return out;
}

}  // namespace acf
