#include <gtest/gtest.h>

#include <random>

#include "pfgeo/metric.hpp"
#include "pfgeo/polyanalysis.hpp"
#include "support.hpp"

using namespace pfgeo;

TEST(Polyanalysis, CounterexampleValues) {
  auto d3 = delta_from_phi(RealPolynomial{0, 1, 0, 1}, 3);
  EXPECT_EQ(d3.coeffs(), (std::vector<double>{-2, 0, 6}));
  auto d4 = delta_from_phi(RealPolynomial{1, 0, 6, 0, 1}, 4);
  EXPECT_EQ(d4.coeffs(), (std::vector<double>{48, 0, -96, 0, 48}));
}

TEST(Polyanalysis, EqualRootsGiveZeroDelta) {
  for (double g : {-1.0, 0.0, 2.0}) {
    for (int n = 3; n <= 5; ++n) {
      RootedPolynomial phi{std::vector<double>(n, g)};
      auto d = delta_from_phi(phi.expand(), n);
      for (double c : d.coeffs()) EXPECT_LT(std::abs(c), 1e-9) << "gamma " << g << " n " << n;
      auto rep = check_lemma4(phi);
      EXPECT_TRUE(rep.all_roots_equal);
      EXPECT_TRUE(rep.delta_identically_zero);
      EXPECT_TRUE(rep.holds()) << rep.summary();
    }
  }
}

TEST(Polyanalysis, ExpandMatchesCoefficients) {
  RootedPolynomial phi{{1, -2, 0.5}};
  auto e = phi.expand();
  // (p + 1)(p - 2)(p + 0.5) = p^3 - 0.5 p^2 - 2.5 p - 1
  std::vector<double> want{-1, -2.5, -0.5, 1};
  ASSERT_EQ(e.coeffs().size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(e.coeffs()[i], want[i], 1e-12);
}

TEST(Polyanalysis, Varphi) {
  EXPECT_DOUBLE_EQ(varphi({1, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(varphi({1, -1}), 4.0);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> a(2 + t % 5);
    for (auto& v : a) v = u(rng);
    EXPECT_GE(varphi(a), 0.0);
  }
  EXPECT_GT(varphi({1, 1, 1 + 1e-6}), 0.0);
}

TEST(Polyanalysis, DoubleRootAtZero) {
  auto rep = check_lemma4(RootedPolynomial{{0, 0, -4}});
  EXPECT_TRUE(rep.holds()) << rep.summary();
  ASSERT_EQ(rep.double_roots.size(), 1u);
  const auto& d = rep.double_roots[0];
  EXPECT_NEAR(d.root, 0.0, 1e-9);
  EXPECT_EQ(d.delta_multiplicity, 2);
  EXPECT_NEAR(d.delta_second, d.expected_second, 1e-9 * std::abs(d.expected_second));
  EXPECT_NE(d.expected_second, 0.0);
}

TEST(Polyanalysis, SimpleRootsAreNotDeltaRoots) {
  RootedPolynomial phi{{1, 2, 3}};
  auto rep = check_lemma4(phi);
  EXPECT_TRUE(rep.holds()) << rep.summary();
  EXPECT_TRUE(rep.multiple_roots.empty());
  EXPECT_TRUE(rep.delta_roots.empty());
  auto d = delta_from_phi(phi.expand(), 3);
  for (double g : phi.gammas) EXPECT_GT(std::abs(d(-g)), 1e-3);
}

TEST(Polyanalysis, RandomRootTuples) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-2, 2);
  std::uniform_int_distribution<int> deg(3, 5), coin(0, 2);
  int done = 0;
  while (done < 500) {
    int n = deg(rng);
    std::vector<double> g(n);
    for (auto& v : g) v = u(rng);
    // Force repeated roots a third of the time so part (c) gets exercised.
    if (coin(rng) == 0) g[1] = g[0];
    bool distinct = false;
    for (double v : g) distinct = distinct || std::abs(v - g[0]) > 1e-3;
    if (!distinct) continue;
    bool near = false;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double d = std::abs(g[i] - g[j]);
        near = near || (d > 0 && d < 0.05);
      }
    }
    if (near) continue;
    RootedPolynomial phi{g};
    auto rep = check_lemma4(phi);
    ASSERT_TRUE(rep.holds()) << rep.summary();
    for (double r : rep.delta_roots) {
      double best = 1e300;
      for (double m : rep.multiple_roots) best = std::min(best, std::abs(r - m));
      EXPECT_LT(best, 1e-6);
    }
    for (double m : rep.multiple_roots) {
      double best = 1e300;
      for (double r : rep.delta_roots) best = std::min(best, std::abs(r - m));
      EXPECT_LT(best, 1e-6);
    }
    ++done;
  }
}

TEST(Polyanalysis, ComplexRootsRegime) {
  // Both counterexamples have complex roots and real Delta roots that are
  // not multiple roots of Phi.
  EXPECT_EQ(root_regime(RealPolynomial{0, 1, 0, 1}, 3), RootRegime::ComplexRoots);
  EXPECT_EQ(root_regime(RealPolynomial{1, 0, 6, 0, 1}, 4), RootRegime::ComplexRoots);
  auto r = real_roots(delta_from_phi(RealPolynomial{0, 1, 0, 1}, 3));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[1].value, 1 / std::sqrt(3.0), 1e-12);
  EXPECT_TRUE(real_roots(RealPolynomial{0, 1, 0, 1}).size() == 1);
  auto r4 = real_roots(delta_from_phi(RealPolynomial{1, 0, 6, 0, 1}, 4));
  ASSERT_EQ(r4.size(), 2u);
  EXPECT_EQ(r4[0].multiplicity, 2);
  EXPECT_TRUE(real_roots(RealPolynomial{1, 0, 6, 0, 1}).empty());
  EXPECT_EQ(root_regime(RootedPolynomial{{1, 2, 3}}.expand(), 3), RootRegime::FullyReal);
  // Degree deficiency counts as a real root at infinity.
  EXPECT_EQ(root_regime(RealPolynomial{-1, 0, 1}, 3), RootRegime::FullyReal);
}

TEST(Polyanalysis, AgreesWithMetricDelta) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 2; n <= 5; ++n) {
    for (int t = 0; t < 10; ++t) {
      auto m = fixtures::random_metric(rng, n, 2);
      double x = u(rng), y = u(rng);
      auto a = delta_from_phi(F_poly(m, x, y), n);
      auto b = delta_poly(m, x, y);
      for (int i = 0; i <= 2 * n - 4; ++i) {
        EXPECT_LT(fixtures::rel_err(a.coeff(i), b.coeff(i), b.max_abs_coeff()), 1e-10);
      }
    }
  }
}
