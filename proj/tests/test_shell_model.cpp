#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "acf/shell_model.hpp"

namespace {

constexpr double pi = std::numbers::pi;

// Residual from Boost Bessel functions, interior I or J.
double boost_residual(double X, const acf::ShellConfig& c, bool oscillatory = false) {
  namespace bm = boost::math;
  const double n = std::abs(c.l), g = c.gamma;
  const double k = X * bm::cyl_bessel_k_prime(g, X) / bm::cyl_bessel_k(g, X);
  const double z = oscillatory ? X * bm::cyl_bessel_j_prime(n, X) / bm::cyl_bessel_j(n, X)
                               : X * bm::cyl_bessel_i_prime(n, X) / bm::cyl_bessel_i(n, X);
  return (k - z - c.ma) / std::sqrt(X);
}

// Independent root of the Boost residual by TOMS 748 on a bracket.
double boost_root(const acf::ShellConfig& c, double lo, double hi, bool oscillatory = false) {
  auto f = [&](double X) { return boost_residual(X, c, oscillatory); };
  boost::uintmax_t it = 200;
  const auto b = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), it);
  return 0.5 * (b.first + b.second);
}

acf::ShellConfig attractive(double g, int l, double delta, double R = 1e-3, double m = 1.0) {
  return {R, -(g + std::abs(l)) - delta, m, l, g};
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(MatchingResidual, AgreesWithBoost) {
  for (const auto& c : {attractive(0.3, 0, 0.05), attractive(0.7, 1, 0.1), acf::ShellConfig{1e-3, 1.3, 1.0, 0, 0.3}})
    for (double X : {1e-4, 0.03, 0.7, 2.5, 9.0})
      EXPECT_NEAR(acf::matching_residual(X, c), boost_residual(X, c), 1e-12 * (1 + std::abs(boost_residual(X, c))));
  const acf::ShellConfig c{1e-3, 1.3, 1.0, 0, 0.3};
  for (double X : {0.1, 1.0, 2.0})
    EXPECT_NEAR(acf::matching_residual(X, c, acf::Interior::Oscillatory), boost_residual(X, c, true), 1e-12);
}

TEST(MatchingResidual, NoCouplingNoRoot) {
  for (int l : {0, 1})
    for (double g : {0.2, 0.5, 0.9}) {
      const acf::ShellConfig c{1e-3, 0.0, 1.0, l, g};
      for (double X : acf::roots::logspace(1e-8, 50.0, 40)) EXPECT_LT(acf::matching_residual(X, c), 0.0);
      EXPECT_THROW(acf::shell_bound_energy_exact(c), acf::no_root_error);
    }
}

TEST(MatchingResidual, ZeroAtNumerovRoot) {
  const auto c = attractive(0.3, 0, 0.05);
  const double E = acf::numerov_bound_energy(c);
  const double X = c.R * std::sqrt(-2 * c.m * E);
  EXPECT_NEAR(acf::matching_residual(X, c), 0.0, 1e-9);
  EXPECT_LT(acf::matching_residual(1e-6, c) * acf::matching_residual(1.0, c), 0.0);
}

TEST(MatchingResidual, PoleAtBesselZero) {
  const acf::ShellConfig c{1e-3, 1.3, 1.0, 0, 0.3};
  const double j0 = acf::detail::first_j_zero(0);
  EXPECT_NEAR(j0, 2.404825557695773, 1e-13);
  EXPECT_THROW(acf::matching_residual(0.0, c), acf::domain_error);
}

TEST(ShellClosed, NominalBracket) {
  const acf::ShellConfig c{1e-3, 1.3, 1.0, 0, 0.3};
  const double bracket = (1.0 / 1.6) * boost::math::tgamma(0.7) / boost::math::tgamma(1.3);
  EXPECT_NEAR(bracket, 0.90397, 1e-5);
  const double E = acf::shell_bound_energy_closed(c);
  EXPECT_NEAR(E / (-2e6 * std::pow(bracket, -1 / 0.3)), 1.0, 1e-13);
  EXPECT_NEAR(E / -2.80e6, 1.0, 5e-3);
}

TEST(ShellClosed, ScalesAsInverseRSquared) {
  auto c = attractive(0.3, 0, 0.05);
  const double e1 = acf::shell_bound_energy_closed(c);
  c.R *= 0.5;
  EXPECT_NEAR(acf::shell_bound_energy_closed(c) / e1, 4.0, 1e-12);
}

TEST(ShellClosed, Errors) {
  EXPECT_THROW(acf::shell_bound_energy_closed({1e-3, -0.1, 1.0, 0, 0.3}), acf::domain_error);  // bracket < 0
  EXPECT_THROW(acf::shell_bound_energy_closed({1e-3, 0.3, 1.0, 0, 0.3}), acf::domain_error);   // numerator 0
  EXPECT_THROW(acf::shell_bound_energy_closed({1e-3, -0.3, 1.0, 0, 0.3}), acf::domain_error);  // denominator 0
  EXPECT_THROW(acf::shell_bound_energy_closed({0.0, -0.5, 1.0, 0, 0.3}), acf::domain_error);
  EXPECT_THROW(acf::shell_bound_energy_closed({1e-3, -0.5, 1.0, 0, 1.0}), acf::domain_error);
}

TEST(ShellExact, OscillatoryInteriorAtNominalCoupling) {
  const acf::ShellConfig c{1e-3, 1.3, 1.0, 0, 0.3};
  const double X = acf::shell_root_x(c, acf::Interior::Oscillatory);
  EXPECT_NEAR(X, boost_root(c, 1.0, 2.4, true), 1e-12);
  EXPECT_NEAR(X, 1.8707, 1e-4);
  EXPECT_LT(X, acf::detail::first_j_zero(0));
  // The regular interior for E < 0 has no bound level at positive coupling.
  EXPECT_THROW(acf::shell_bound_energy_exact(c), acf::no_root_error);
  EXPECT_THROW(acf::numerov_bound_energy(c), acf::no_root_error);
}

TEST(ShellExact, RootAgainstBoost) {
  for (const auto& c : {attractive(0.3, 0, 0.05), attractive(0.7, 1, 1e-3), attractive(0.2, -1, 0.4)}) {
    const double X = acf::shell_root_x(c);
    EXPECT_NEAR(X, boost_root(c, 0.5 * X, 2.0 * X), 1e-12 * X);
  }
}

TEST(ShellThreeWay, Grid) {
  struct Case {
    double g, delta;
  };
  for (const Case k : {Case{0.2, 0.05}, Case{0.3, 0.05}, Case{0.7, 1e-5}})
    for (int l : {0, 1, -1}) {
      const auto c = attractive(k.g, l, k.delta);
      const double closed = acf::shell_bound_energy_closed(c);
      const double exact = acf::shell_bound_energy_exact(c);
      const double numerov = acf::numerov_bound_energy(c);
      EXPECT_LE(rel(closed, exact), 1e-2) << k.g << " " << l;
      EXPECT_LE(rel(numerov, exact), 5e-3) << k.g << " " << l;
      EXPECT_LE(rel(numerov, exact), 1e-5) << k.g << " " << l;
    }
}

TEST(ShellThreeWay, GapShrinksTowardsThreshold) {
  for (int l : {0, 1}) {
    double prev = 1.0;
    for (double delta : {0.2, 0.1, 0.05, 0.02, 0.01}) {
      const auto c = attractive(0.3, l, delta);
      const double gap = rel(acf::shell_bound_energy_closed(c), acf::shell_bound_energy_exact(c));
      EXPECT_LT(gap, prev) << l << " " << delta;
      prev = gap;
    }
  }
}

TEST(ShellThreeWay, GapIndependentOfMR) {
  // The piecewise model is scale free: E m R^2 depends on (l, gamma, Ma) only.
  double ref = -1;
  for (double R : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const auto c = attractive(0.3, 0, 0.05, R);
    const double gap = rel(acf::shell_bound_energy_closed(c), acf::shell_bound_energy_exact(c));
    if (ref < 0) ref = gap;
    EXPECT_NEAR(gap, ref, 1e-9);
  }
}

TEST(ShellScaling, EmR2Invariant) {
  const auto base = attractive(0.3, 1, 0.05);
  const double c0 = acf::shell_bound_energy_closed(base) * base.m * base.R * base.R;
  const double x0 = acf::shell_bound_energy_exact(base) * base.m * base.R * base.R;
  for (auto [m, R] : std::vector<std::pair<double, double>>{{2.0, 1e-3 / std::sqrt(2.0)}, {0.5, 1e-2}, {3.0, 1e-5}}) {
    auto c = base;
    c.m = m;
    c.R = R;
    EXPECT_NEAR(acf::shell_bound_energy_closed(c) * m * R * R / c0, 1.0, 1e-12);
    EXPECT_NEAR(acf::shell_bound_energy_exact(c) * m * R * R / x0, 1.0, 1e-8);
  }
}

TEST(Numerov, GridHalvingConverged) {
  const auto c = attractive(0.3, 0, 0.05);
  acf::NumerovOptions fine;
  fine.h0 = 0.005;
  fine.rel_tol = 1e-9;
  EXPECT_LE(rel(acf::numerov_bound_energy(c), acf::numerov_bound_energy(c, fine)), 1e-6);
}

TEST(Numerov, NoCouplingNoEigenvalue) {
  EXPECT_THROW(acf::numerov_bound_energy({1e-3, 0.0, 1.0, 0, 0.3}), acf::no_root_error);
}

TEST(EffectiveAngle, SmallShellLimits) {
  for (double ma : {0.3, 1.3}) {
    const acf::ShellConfig c{1e-6, ma, 1.0, 0, acf::decompose(ma).mu};
    EXPECT_LE(acf::angle_distance(acf::effective_extension_parameter(c, 0.5, 1).theta, 0.0), 1e-3) << ma;
    EXPECT_LE(acf::angle_distance(acf::effective_extension_parameter(c, 0.5, -1).theta, pi), 1e-3) << ma;
  }
}

TEST(EffectiveAngle, MonotoneApproach) {
  for (double ma : {0.3, 1.3})
    for (int s : {1, -1}) {
      double prev = 10.0;
      for (double R : {1e-2, 1e-4, 1e-6}) {
        const acf::ShellConfig c{R, ma, 1.0, 0, acf::decompose(ma).mu};
        const double d = acf::angle_distance(acf::effective_extension_parameter(c, 0.5, s).theta, s == 1 ? 0.0 : pi);
        EXPECT_LT(d, prev) << ma << " " << s << " " << R;
        prev = d;
      }
    }
}

TEST(EffectiveAngle, Errors) {
  const acf::ShellConfig c{1e-3, 0.3, 1.0, 0, 0.3};
  EXPECT_THROW(acf::effective_extension_parameter(c, 0.5, 0), acf::domain_error);
  EXPECT_THROW(acf::effective_extension_parameter(c, -0.5, 1), acf::domain_error);
}

TEST(Renormalization, FlowHoldsLevel) {
  const auto radii = acf::roots::logspace(1e-6, 1e-2, 9);
  const auto flow = acf::renormalization_flow(-1.0, 0, 1.0, radii);
  ASSERT_EQ(flow.size(), radii.size());
  for (std::size_t i = 0; i < flow.size(); ++i) {
    EXPECT_EQ(flow[i].R, radii[i]);
    EXPECT_LE(rel(flow[i].energy_check, -1.0), 1e-6);
    EXPECT_GT(flow[i].ma, -1.0);
    EXPECT_LT(flow[i].ma, -0.5);
    EXPECT_NEAR(flow[i].gamma, acf::decompose(flow[i].ma).mu, 1e-14);
    if (i > 0) {  // recorded trend: Ma rises to -1/2 as R -> 0
      EXPECT_LT(flow[i].ma, flow[i - 1].ma);
    }
  }
}

TEST(Renormalization, FixedGamma) {
  for (auto [l, g] : std::vector<std::pair<int, double>>{{0, 0.3}, {1, 0.7}}) {
    for (double R : {1e-5, 1e-3}) {
      const double ma = acf::renormalize_coupling(-2.0, R, l, 0.5, g);
      EXPECT_LE(rel(acf::shell_bound_energy_exact({R, ma, 0.5, l, g}), -2.0), 1e-8) << l << " " << R;
    }
  }
}

TEST(Renormalization, UnreachableTarget) {
  EXPECT_THROW(acf::renormalize_coupling(-1.0, 1e-6, 1, 1.0), acf::no_root_error);
  EXPECT_THROW(acf::renormalize_coupling(1.0, 1e-3, 0, 1.0), acf::domain_error);
}

TEST(Renormalization, FixedCouplingDiverges) {
  const auto c = attractive(0.3, 0, 0.05, 1e-2);
  const double e = acf::shell_bound_energy_exact(c);
  for (double f : {10.0, 1000.0}) {
    auto d = c;
    d.R /= f;
    EXPECT_NEAR(acf::shell_bound_energy_exact(d) / e, f * f, 1e-8 * f * f);
  }
}

TEST(AttractionWindow, Examples) {
  EXPECT_TRUE(acf::attraction_window(0, 0.3, -0.3));
  EXPECT_FALSE(acf::attraction_window(0, 0.3, 0.3));
  EXPECT_FALSE(acf::attraction_window(2, 0.3, -0.3));
  EXPECT_TRUE(acf::attraction_window(-1, 0.7, -1.0));
  EXPECT_FALSE(acf::attraction_window(1, 0.3, -1.0));
  EXPECT_FALSE(acf::attraction_window(0, 0.7, -1.0));
}
