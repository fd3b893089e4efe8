#include <gtest/gtest.h>

#include <random>

#include "pfgeo/metric.hpp"
#include "support.hpp"

using namespace pfgeo;
using fixtures::rel_err;

namespace {

PseudoFinslerMetric quad_c(const std::string& c) { return PseudoFinslerMetric::parse(3, {c, "0", "1", "0"}); }
PseudoFinslerMetric tangent_pair() { return PseudoFinslerMetric::parse(3, {"0", "-4*x", "1", "0"}); }

void expect_coeffs(const RealPolynomial& p, std::vector<double> want, double tol = 1e-12) {
  for (std::size_t i = 0; i < std::max(want.size(), p.coeffs().size()); ++i) {
    double w = i < want.size() ? want[i] : 0.0;
    EXPECT_NEAR(p.coeff(static_cast<int>(i)), w, tol) << "coefficient " << i << " of " << p.str();
  }
}

}  // namespace

TEST(Metric, Validation) {
  EXPECT_THROW(PseudoFinslerMetric::parse(1, {"1", "1"}), std::invalid_argument);
  EXPECT_THROW(PseudoFinslerMetric::parse(3, {"0", "0"}), std::invalid_argument);
  EXPECT_THROW(PseudoFinslerMetric::parse(2, {"1", "0", "1", "1"}), std::invalid_argument);
  auto m = PseudoFinslerMetric::parse(3, {"-x", "0", "1"});
  EXPECT_EQ(m.coeffs().size(), 4u);
}

TEST(Metric, EvalF) {
  EXPECT_DOUBLE_EQ(eval_F(quad_c("-x"), 1, 0, 2), 3.0);
  EXPECT_DOUBLE_EQ(eval_F(tangent_pair(), 1, 0, 4), 0.0);
}

TEST(Metric, DeltaAndPClosedForms) {
  // F = p^2 + c with c = -x and c = y^2 - x
  auto m = quad_c("-x");
  expect_coeffs(delta_poly(m, 0.7, -0.2), {2 * 3 * -0.7, 0, -2});
  expect_coeffs(p_poly(m, 0.7, -0.2), {0, -4, 0});
  auto m2 = quad_c("y^2 - x");
  double x = 0.3, y = 0.7, c = y * y - x;
  expect_coeffs(delta_poly(m2, x, y), {6 * c, 0, -2});
  // The leading P coefficient is 14 alpha y, not 12 alpha y.
  expect_coeffs(p_poly(m2, x, y), {3 * c * 2 * y, -4, 7 * 2 * y});
  // F = p (p - 4x)
  auto m4 = tangent_pair();
  expect_coeffs(delta_poly(m4, 0.5, 1), {-2 * 16 * 0.25, 8 * 0.5, -2});
  expect_coeffs(p_poly(m4, 0.5, 1), {0, -16 * 0.5, -4});
}

TEST(Metric, DegreesAndConstantTerm) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 2; n <= 5; ++n) {
    for (int t = 0; t < 10; ++t) {
      auto m = fixtures::random_metric(rng, n, 2);
      double x = u(rng), y = u(rng);
      auto a = m.coeffs_at(x, y);
      auto D = delta_poly(m, x, y);
      EXPECT_LE(D.degree(), 2 * n - 4);
      EXPECT_LE(p_poly(m, x, y).degree(), 2 * n - 1);
      EXPECT_LT(rel_err(D.coeff(0), 2 * n * a[0] * a[2] - (n - 1) * a[1] * a[1]), 1e-12);
    }
  }
}

TEST(Metric, TangentBundleOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1), up(-2, 2);
  for (int n = 2; n <= 5; ++n) {
    for (int t = 0; t < 10; ++t) {
      auto m = fixtures::random_metric(rng, n, 2);
      double x = u(rng), y = u(rng), p = up(rng);
      HBar h = oracle_H(m, x, y, 1.0, p);
      EXPECT_LT(rel_err(h.H, (n - 1) * delta_poly(m, x, y)(p)), 1e-9);
      EXPECT_LT(rel_err(h.H2 - p * h.H1, (n - 1) * p_poly(m, x, y)(p)), 1e-9);
      // Homogeneity of degree 2n - 4.
      double lam = 1.7;
      HBar hl = oracle_H(m, x, y, lam, lam * p);
      EXPECT_LT(rel_err(hl.H, std::pow(lam, 2 * n - 4) * h.H), 1e-9);
    }
  }
}

TEST(Metric, IsotropicDirections) {
  auto r = isotropic_directions(quad_c("-x"), 4, 0);
  ASSERT_EQ(r.size(), 3u);
  int finite = 0;
  for (const auto& q : r) {
    if (q.at_infinity) {
      EXPECT_EQ(q.multiplicity, 1);
    } else {
      EXPECT_NEAR(std::abs(q.value), 2.0, 1e-12);
      ++finite;
    }
  }
  EXPECT_EQ(finite, 2);

  auto r4 = isotropic_directions(tangent_pair(), 0, 0.3);
  ASSERT_EQ(r4.size(), 2u);
  for (const auto& q : r4) EXPECT_EQ(q.multiplicity, q.at_infinity ? 1 : 2);

  auto r3 = isotropic_directions(PseudoFinslerMetric::parse(3, {"0", "1", "0", "1"}), 0.2, 0.1);
  ASSERT_EQ(r3.size(), 1u);
  EXPECT_NEAR(r3[0].value, 0.0, 1e-14);

  EXPECT_THROW(isotropic_directions(PseudoFinslerMetric::parse(3, {"x", "0", "x"}), 0, 1),
               DegeneratePointError);
}

TEST(Metric, Strata) {
  auto m = quad_c("-x");
  EXPECT_EQ(classify_point(m, -0.5, 0.2), Stratum::MMinus);
  EXPECT_EQ(classify_point(m, 0.5, 0.2), Stratum::MPlus);
  EXPECT_EQ(classify_point(m, 0.0, 0.2), Stratum::M01);
  auto cube = PseudoFinslerMetric::parse(3, {"0", "0", "0", "1"});
  EXPECT_EQ(classify_point(cube, 0.3, 0.4), Stratum::M00);
  // p (p - 4x) never enters M-.
  auto m4 = tangent_pair();
  for (double x = -1; x <= 1; x += 0.125) {
    for (double y = -1; y <= 1; y += 0.5) EXPECT_GE(disc_F(m4, x, y), 0.0);
  }
  EXPECT_EQ(classify_point(m4, 0.0, 0.5), Stratum::M01);
}

TEST(Metric, StrataLocallyConstant) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 20; ++t) {
    auto m = fixtures::random_metric(rng, 3, 2);
    for (int k = 0; k < 20; ++k) {
      double x = u(rng), y = u(rng);
      if (std::abs(disc_F(m, x, y)) < 1e-8) continue;
      Stratum s = classify_point(m, x, y);
      EXPECT_EQ(classify_point(m, x + 1e-6, y), s);
      EXPECT_EQ(classify_point(m, x, y - 1e-6), s);
    }
  }
}

TEST(Metric, DiscriminantFormulaAndIdentity) {
  // a p^2 + 2 b p + c with a3 = 0: D_F = 4 a^2 (b^2 - a c)
  auto m = PseudoFinslerMetric::parse(3, {"0.3", "2*0.7", "1.9", "0"});
  double a = 1.9, b = 0.7, c = 0.3;
  EXPECT_LT(rel_err(disc_F(m, 0, 0), 4 * a * a * (b * b - a * c)), 1e-12);
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 100; ++t) {
    auto r = fixtures::random_metric(rng, 3, 2);
    double x = u(rng), y = u(rng);
    double dd = disc_Delta(r, x, y), df = disc_F(r, x, y);
    EXPECT_LT(rel_err(dd, -12 * df, 1e-12), 1e-9);
  }
}

TEST(Metric, ChartCoefficients) {
  auto m = PseudoFinslerMetric::parse(3, {"x", "y", "x*y", "1 + y^2"});
  auto q = chart_coeffs(m, Chart::Q, 0.5, 2.0);
  // Q chart: reversed coefficients, partials along (y, x).
  EXPECT_DOUBLE_EQ(q.a[0], 5.0);
  EXPECT_DOUBLE_EQ(q.a[3], 0.5);
  EXPECT_DOUBLE_EQ(q.a_ind[0], 4.0);   // d/dy (1 + y^2)
  EXPECT_DOUBLE_EQ(q.a_dep[3], 1.0);   // d/dx x
  auto j = chart_coeff_jets(m, Chart::P, 0.5, 2.0);
  EXPECT_DOUBLE_EQ(j.a[2].v, 1.0);
  EXPECT_DOUBLE_EQ(j.a[2].dx, 2.0);
  EXPECT_DOUBLE_EQ(j.a[2].dy, 0.5);
}

TEST(Metric, FieldJetMatchesFiniteDifferences) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 10; ++t) {
    auto m = fixtures::random_metric(rng, 3, 2);
    for (Chart ch : {Chart::P, Chart::Q}) {
      double x = u(rng), y = u(rng), s = u(rng);
      FieldJet fj = field_jet(m, ch, x, y, s);
      auto val = [&](double xx, double yy, double ss) {
        auto polys = field_polys(3, chart_coeffs(m, ch, xx, yy));
        return std::array<double, 2>{coef::horner(polys.delta, ss), coef::horner(polys.P, ss)};
      };
      const double h = 1e-6;
      std::array<std::array<double, 3>, 2> fd{};
      for (int k = 0; k < 3; ++k) {
        double dx = k == 0 ? h : 0, dy = k == 1 ? h : 0, ds = k == 2 ? h : 0;
        auto up = val(x + dx, y + dy, s + ds), dn = val(x - dx, y - dy, s - ds);
        fd[0][k] = (up[0] - dn[0]) / (2 * h);
        fd[1][k] = (up[1] - dn[1]) / (2 * h);
      }
      for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(fj.grad_delta[k], fd[0][k], 1e-6 * (1 + std::abs(fd[0][k])));
        EXPECT_NEAR(fj.grad_P[k], fd[1][k], 1e-6 * (1 + std::abs(fd[1][k])));
      }
    }
  }
}

TEST(Metric, ScaledMetric) {
  auto m = quad_c("-x");
  auto k = m.scaled(ScalarField::parse("2 + x^2"));
  EXPECT_DOUBLE_EQ(eval_F(k, 1, 0, 2), 3.0 * 3.0);
}
