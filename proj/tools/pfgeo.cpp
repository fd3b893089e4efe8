// pfgeo <command> --config <path> [--out <dir>] [--seed k=v,...]

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "pfgeo/config.hpp"
#include "pfgeo/puiseux.hpp"
#include "pfgeo/scenario.hpp"

namespace fs = std::filesystem;
using namespace pfgeo;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::cout << "wrote " << path.string() << '\n';
  return out;
}

int cmd_classify(const ScenarioConfig& cfg, const fs::path& dir) {
  auto out = open_out(dir / (cfg.name + "_strata.csv"));
  write_stratum_raster(out, cfg);
  return 0;
}

int cmd_portrait(const ScenarioConfig& cfg, const fs::path& dir) {
  PortraitData d = build_portrait(cfg);
  SvgCanvas svg = render_portrait(cfg, d);
  fs::path path = dir / (cfg.name + "_portrait.svg");
  svg.write(path.string());
  std::cout << "wrote " << path.string() << " (" << svg.polyline_count() << " polylines)\n";
  return 0;
}

int cmd_integrate(const ScenarioConfig& cfg, const fs::path& dir) {
  PseudoFinslerMetric m = cfg.metric();
  IntegratorConfig ic = cfg.integrator;
  ic.domain = cfg.domain;
  int k = 0;
  for (const auto& spec : cfg.seeds) {
    if (spec.count("alpha")) continue;
    GeodesicTrace t = trace_seed(m, resolve_seed(m, spec), ic);
    auto out = open_out(dir / (cfg.name + "_trace_" + std::to_string(k++) + ".csv"));
    write_trace_csv(out, m, t);
  }
  if (k == 0) std::cerr << "no seeds with x, y and p/q/iso\n";
  return k == 0 ? 1 : 0;
}

int cmd_singular(const ScenarioConfig& cfg, const fs::path& dir) {
  PseudoFinslerMetric m = cfg.metric();
  if (m.degree() != 3) {
    std::cerr << "singular: only n = 3 is supported\n";
    return 1;
  }
  auto curves = trace_S_curves(m, cfg.domain, cfg.resolution);
  {
    auto out = open_out(dir / (cfg.name + "_S_curves.csv"));
    out << "curve,label,x,y,slope\n" << std::setprecision(12);
    for (std::size_t c = 0; c < curves.size(); ++c) {
      for (std::size_t i = 0; i < curves[c].points.size(); ++i) {
        out << c << ',' << curve_label_name(curves[c].label) << ',' << curves[c].points[i][0] << ','
            << curves[c].points[i][1] << ',' << (i < curves[c].slope.size() ? curves[c].slope[i] : NAN) << '\n';
      }
    }
  }
  auto out = open_out(dir / (cfg.name + "_singular.csv"));
  out << "x,y,slope,chart,kind,l0_re,l0_im,l1_re,l1_im,l2_re,l2_im,note\n" << std::setprecision(12);
  auto row = [&out](const SingularPoint& sp) {
    out << sp.x << ',' << sp.y << ',' << sp.slope << ',' << chart_name(sp.chart) << ','
        << singular_kind_name(sp.kind);
    for (const auto& l : sp.eigenvalues) out << ',' << l.real() << ',' << l.imag();
    out << ',' << sp.note << '\n';
  };
  for (const auto& c : curves) {
    std::size_t stride = std::max<std::size_t>(1, c.points.size() / 8);
    for (std::size_t i = 0; i < c.points.size() && i < c.slope.size(); i += stride) {
      row(classify_singular(m, {c.points[i][0], c.points[i][1], c.slope[i], Chart::P}));
    }
  }
  for (const auto& t : locate_S_tangencies(m, cfg.domain, cfg.resolution)) {
    SingularPoint sp = classify_singular(m, {t.x, t.y, t.slope, Chart::P});
    sp.note = "tangency of p_i with S_i";
    row(sp);
  }
  return 0;
}

int cmd_puiseux(const ScenarioConfig& cfg, const fs::path& dir) {
  if (cfg.puiseux_s < 1 || cfg.puiseux_seed.empty()) {
    std::cerr << "puiseux: set puiseux_s and puiseux_seed\n";
    return 1;
  }
  PseudoFinslerMetric m = cfg.metric();
  TruncatedSeries seed(cfg.puiseux_seed, static_cast<int>(cfg.puiseux_seed.size()) - 1);
  FamilyReport r = solve_geodesic_series(m, cfg.puiseux_s, seed, cfg.puiseux_order, cfg.puiseux_free);
  std::cout << "x = t^" << r.s << ", residual shift " << r.shift << ", normalization " << r.normalization << '\n';
  write_family_report(std::cout, r);
  auto out = open_out(dir / (cfg.name + "_puiseux.csv"));
  write_family_report(out, r);
  return r.consistent() ? 0 : 1;
}

int cmd_verify(const ScenarioConfig& cfg, const fs::path& dir) {
  auto checks = run_verify(cfg);
  auto out = open_out(dir / (cfg.name + "_verify.csv"));
  out << "check,count,max_residual,tolerance,status\n";
  bool ok = true;
  for (const auto& c : checks) {
    const char* status = c.passed() ? "PASS" : "FAIL";
    ok = ok && c.passed();
    out << c.name << ',' << c.count << ',' << c.max_residual << ',' << c.tolerance << ',' << status << '\n';
    std::cout << std::left << std::setw(26) << c.name << std::setw(6) << c.count << std::setw(14)
              << c.max_residual << status << '\n';
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-Finsler geodesic flows"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::vector<std::string> seeds;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"classify", "stratum raster CSV"},
      {"portrait", "SVG phase portrait"},
      {"integrate", "geodesic traces as CSV"},
      {"singular", "singular points and S_i curves"},
      {"puiseux", "series family report"},
      {"verify", "identity and oracle checks"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seeds, "seed as k=v,k=v (replaces the config seeds)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0, usage errors 1
    return app.exit(e) == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    ScenarioConfig cfg = load_config(config_path);
    if (!seeds.empty()) {
      cfg.seeds.clear();
      for (const auto& s : seeds) cfg.seeds.push_back(parse_seed(s));
    }
    fs::path dir = out_dir.empty() ? fs::path(cfg.out_dir) : fs::path(out_dir);
    fs::create_directories(dir);
    if (command == "classify") return cmd_classify(cfg, dir);
    if (command == "portrait") return cmd_portrait(cfg, dir);
    if (command == "integrate") return cmd_integrate(cfg, dir);
    if (command == "singular") return cmd_singular(cfg, dir);
    if (command == "puiseux") return cmd_puiseux(cfg, dir);
    return cmd_verify(cfg, dir);
  } catch (const std::exception& e) {
    std::cerr << "pfgeo " << command << ": " << e.what() << '\n';
    return 1;
  }
}
