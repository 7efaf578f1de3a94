#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "acf/parallel.hpp"
#include "acf/quadrature.hpp"
#include "acf/roots.hpp"

constexpr double pi = std::numbers::pi;

TEST(TanhSinh, SmoothIntegrals) {
  EXPECT_NEAR(acf::quad::tanh_sinh([](double x) { return std::exp(x); }, 0.0, 1.0).value, std::exp(1.0) - 1.0, 1e-14);
  EXPECT_NEAR(acf::quad::tanh_sinh([](double x) { return std::sin(x); }, 0.0, pi).value, 2.0, 1e-14);
  EXPECT_NEAR(acf::quad::tanh_sinh([](double x) { return 1.0 / (1.0 + x * x); }, -1.0, 1.0).value, pi / 2, 1e-14);
}

TEST(TanhSinh, EndpointSingularities) {
  EXPECT_NEAR(acf::quad::tanh_sinh([](double x) { return std::log(x); }, 0.0, 1.0).value, -1.0, 1e-13);
  EXPECT_NEAR(acf::quad::tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0).value, 2.0, 1e-13);
  EXPECT_NEAR(acf::quad::tanh_sinh([](double x) { return std::pow(x, -0.8); }, 0.0, 1.0).value, 5.0, 1e-10);
  // Near b the nodes collapse onto 1 - ulp, so the last ~2 sqrt(eps) is lost.
  EXPECT_NEAR(acf::quad::tanh_sinh([](double x) { return 1.0 / std::sqrt(1.0 - x); }, 0.0, 1.0).value, 2.0, 5e-8);
}

TEST(TanhSinh, ReportsConvergence) {
  const auto r = acf::quad::tanh_sinh([](double x) { return x * x; }, 0.0, 3.0);
  EXPECT_NEAR(r.value, 9.0, 1e-13);
  EXPECT_GE(r.levels, 3);
  EXPECT_LE(r.error_estimate, 1e-10);
}

TEST(Brent, FindsRoots) {
  EXPECT_NEAR(acf::roots::brent([](double x) { return x * x - 2.0; }, 0.0, 2.0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(acf::roots::brent([](double x) { return std::cos(x) - x; }, 0.0, 1.0), 0.7390851332151607, 1e-15);
  EXPECT_EQ(acf::roots::brent([](double x) { return x; }, 0.0, 1.0), 0.0);
}

TEST(Brent, RejectsNonBracket) {
  EXPECT_THROW(acf::roots::brent([](double x) { return x * x + 1.0; }, -1.0, 1.0), acf::no_root_error);
}

TEST(SignChange, SkipsPoles) {
  auto f = [](double x) {
    if (std::abs(x - 1.0) < 1e-12) throw acf::pole_error("pole");
    return 1.0 / (x - 1.0) + 0.5;  // pole at 1, root at -1
  };
  const auto grid = acf::roots::linspace(-3.0, 3.0, 7);
  const auto b = acf::roots::first_sign_change(f, grid);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->first, -1.0);  // exact hit
  auto g = [](double x) { return x > 0.0 && x < 2.0 ? NAN : x - 2.5; };
  const auto c = acf::roots::first_sign_change(g, grid);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->first, 2.0);
  EXPECT_EQ(c->second, 3.0);
}

TEST(Grids, EndpointsExact) {
  const auto v = acf::roots::logspace(1e-6, 1e-2, 9);
  EXPECT_EQ(v.front(), 1e-6);
  EXPECT_EQ(v.back(), 1e-2);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_NEAR(v[i] / v[i - 1], std::sqrt(10.0), 1e-12);
}

TEST(ParallelMap, OrderIsIndependentOfThreads) {
  auto f = [](std::size_t i) { return std::sin(0.1 * static_cast<double>(i)); };
  const auto a = acf::parallel_map(1000, f, 1);
  const auto b = acf::parallel_map(1000, f, 4);
  ASSERT_EQ(a.size(), 1000u);
  EXPECT_EQ(a, b);
}

TEST(ParallelMap, RethrowsLowestIndexFailure) {
  auto f = [](std::size_t i) -> int {
    if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
    return static_cast<int>(i);
  };
  try {
    acf::parallel_map(50, f, 3);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "7");
  }
}

TEST(ParallelMap, EnvironmentCapsThreads) {
  ::setenv("ACF_NUM_THREADS", "3", 1);
  EXPECT_EQ(acf::thread_count(), 3u);
  ::setenv("ACF_NUM_THREADS", "junk", 1);
  EXPECT_GE(acf::thread_count(), 1u);
  ::unsetenv("ACF_NUM_THREADS");
  EXPECT_GE(acf::thread_count(), 1u);
}
