#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "pfgeo/config.hpp"
#include "pfgeo/scenario.hpp"

using namespace pfgeo;

namespace {

std::string scenario(const std::string& name) { return std::string(PFGEO_SCENARIO_DIR) + "/" + name + ".cfg"; }

ScenarioConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

int error_line(const std::string& text) {
  try {
    parse_text(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Config, CoefficientScenario) {
  auto cfg = load_config(scenario("linear_c"));
  EXPECT_EQ(cfg.name, "linear_c");
  EXPECT_EQ(cfg.n, 3);
  auto m = cfg.metric();
  EXPECT_DOUBLE_EQ(eval_F(m, 0.25, 0, 1), 0.75);
  EXPECT_EQ(cfg.seeds.size(), 5u);
  ASSERT_TRUE(cfg.family.has_value());
  EXPECT_EQ((*cfg.family)[0], 0.0);
}

TEST(Config, ImmersionScenario) {
  auto cfg = load_config(scenario("bm_surface"));
  EXPECT_EQ(cfg.mode, ScenarioMode::BerwaldMoor);
  auto m = cfg.metric();
  auto a = m.coeffs_at(0.5, 0.1);
  EXPECT_DOUBLE_EQ(a[1], -2.0);
  EXPECT_DOUBLE_EQ(a[2], 1.0);
  auto alm = cfg.adapted();
  ASSERT_TRUE(alm.has_value());
  EXPECT_EQ(cfg.puiseux_s, 3);
  EXPECT_EQ(cfg.puiseux_free.at(4), 1.0);
  EXPECT_EQ(cfg.alphas.size(), 7u);
}

TEST(Config, AllScenariosLoad) {
  for (const char* n : {"linear_c", "parabola", "s_curves_pos", "s_curves_neg", "resonant_family",
                        "bm_surface", "random_cubic"}) {
    EXPECT_NO_THROW(load_config(scenario(n)).metric()) << n;
  }
}

TEST(Config, Errors) {
  EXPECT_EQ(error_line("n = 3\na0 = x\nf1 = x\n"), 3);
  EXPECT_EQ(error_line("n = 3\nbogus = 1\n"), 2);
  EXPECT_EQ(error_line("n = 3\nn = 3\n"), 2);
  EXPECT_EQ(error_line("n = 3\nxmin = 0.5\nxmax = 0\na0 = x\n"), 2);
  EXPECT_EQ(error_line("n = 3\na0 = x +\n"), 2);
  EXPECT_EQ(error_line("n = 3\nseed = x=0, y\n"), 2);
  EXPECT_EQ(error_line("n = 3\na0 = x\n# fine\n\na2 = 1\n"), -1);
  EXPECT_THROW(load_config("/nonexistent/file.cfg"), std::exception);
}

TEST(Config, Seeds) {
  auto s = parse_seed("x=0.25, y=-1, iso=0");
  EXPECT_EQ(s.at("x"), 0.25);
  EXPECT_EQ(s.at("y"), -1.0);
  EXPECT_EQ(s.at("iso"), 0.0);
  EXPECT_THROW(parse_seed("x=1, w=2"), std::exception);

  auto cfg = parse_text("n = 3\na0 = -x\na2 = 1\n");
  auto r = resolve_seed(cfg.metric(), parse_seed("x=0.25, y=0, iso=1"));
  EXPECT_TRUE(r.isotropic);
  EXPECT_NEAR(r.start.slope, 0.5, 1e-12);
  auto inf = resolve_seed(cfg.metric(), parse_seed("x=0.25, y=0, iso=2"));
  EXPECT_EQ(inf.start.chart, Chart::Q);
  EXPECT_EQ(inf.start.slope, 0.0);
  auto q = resolve_seed(cfg.metric(), parse_seed("x=0.25, y=0, q=0.5"));
  EXPECT_EQ(q.start.chart, Chart::Q);
  EXPECT_FALSE(q.isotropic);
}

TEST(Config, SvgIsDeterministic) {
  auto cfg = load_config(scenario("linear_c"));
  auto a = render_portrait(cfg, build_portrait(cfg)).str();
  auto b = render_portrait(cfg, build_portrait(cfg)).str();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("<?xml", 0), 0u);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
}

TEST(Config, SvgSplitsLines) {
  SvgCanvas c({0, 1, 0, 1}, 100, 100);
  c.polyline({{0.1, 0.1}, {0.2, 0.2}, {5, 5}, {0.3, 0.3}, {0.4, 0.4}}, styles::kGeodesic);
  EXPECT_EQ(c.polyline_count(), 2u);
  c.polyline({{0.1, 0.1}, {0.9, 0.9}}, styles::kGeodesic, 0.25);
  EXPECT_EQ(c.polyline_count(), 2u);
  c.polyline({{0.1, 0.1}, {NAN, 0.2}, {0.3, 0.3}}, styles::kGeodesic);
  EXPECT_EQ(c.polyline_count(), 2u);
}

TEST(Config, TracesSolveGeodesicEquation) {
  // Along P-chart stretches dy/dx = p; the slope follows dp/dx = P / Delta.
  auto cfg = load_config(scenario("s_curves_pos"));
  auto m = cfg.metric();
  auto data = build_portrait(cfg);
  ASSERT_FALSE(data.geodesics.empty());
  int checked = 0;
  for (const auto& tr : data.geodesics) {
    for (std::size_t i = 1; i + 1 < tr.size(); i += 7) {
      const auto& a = tr.points[i - 1];
      const auto& b = tr.points[i + 1];
      const auto& c = tr.points[i];
      if (a.chart != Chart::P || b.chart != Chart::P || c.chart != Chart::P) continue;
      double dx = b.x - a.x;
      auto v = chart_values(m, c);
      if (std::abs(dx) < 1e-4 || std::abs(v.delta) < 1e-2) continue;
      EXPECT_NEAR((b.y - a.y) / dx, c.slope, 1e-4 * (1 + std::abs(c.slope)));
      EXPECT_NEAR((b.slope - a.slope) / dx, v.P / v.delta, 1e-3 * (1 + std::abs(v.P / v.delta)));
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(Config, VerifyPassesOnScenarios) {
  for (const char* n : {"linear_c", "s_curves_pos", "bm_surface", "random_cubic"}) {
    auto cfg = load_config(scenario(n));
    cfg.verify_samples = 60;
    for (const auto& c : run_verify(cfg)) EXPECT_TRUE(c.passed()) << n << " " << c.name << " " << c.max_residual;
  }
}

TEST(Config, StratumRaster) {
  auto cfg = parse_text("n = 3\na0 = -x\na2 = 1\nresolution = 4\n");
  std::ostringstream os;
  write_stratum_raster(os, cfg);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,y,stratum,disc_F,real_isotropic");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 25);  // grid nodes, resolution + 1 per side
}
