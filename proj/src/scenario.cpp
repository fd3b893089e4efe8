#include "pfgeo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "pfgeo/berwald_moor.hpp"
#include "pfgeo/polyanalysis.hpp"

namespace pfgeo {

namespace {

const std::vector<double> kDefaultAlphas{-1.0, -0.5, 0.0, 0.5, 1.0};

double get(const SeedSpec& s, const char* key) {
  auto it = s.find(key);
  if (it == s.end()) throw std::invalid_argument(std::string("seed is missing ") + key);
  return it->second;
}

// Distinct real isotropic directions, finite ones ascending, infinity last.
std::vector<ProjectiveRoot> sorted_isotropic(const PseudoFinslerMetric& m, double x, double y) {
  auto roots = isotropic_directions(m, x, y);
  std::stable_sort(roots.begin(), roots.end(), [](const ProjectiveRoot& a, const ProjectiveRoot& b) {
    if (a.at_infinity != b.at_infinity) return b.at_infinity;
    return a.value < b.value;
  });
  return roots;
}

// Newton steps along the gradient of D_F.
bool polish_on_discriminant(const PseudoFinslerMetric& m, double& x, double& y) {
  for (int it = 0; it < 30; ++it) {
    double s = std::max(1.0, m.scale_at(x, y));
    double d = disc_F(m, x, y);
    if (std::abs(d) <= 1e-14 * s * s * s * s) return true;
    double h = 1e-6;
    double gx = (disc_F(m, x + h, y) - disc_F(m, x - h, y)) / (2 * h);
    double gy = (disc_F(m, x, y + h) - disc_F(m, x, y - h)) / (2 * h);
    double g2 = gx * gx + gy * gy;
    if (g2 == 0.0) return false;
    x -= d * gx / g2;
    y -= d * gy / g2;
  }
  return false;
}

std::vector<std::array<double, 2>> net_seeds(const Box& b, int k) {
  std::vector<std::array<double, 2>> out;
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) {
      out.push_back({b.xmin + (b.xmax - b.xmin) * (i + 0.5) / k,
                     b.ymin + (b.ymax - b.ymin) * (j + 0.5) / k});
    }
  }
  return out;
}

}  // namespace

ResolvedSeed resolve_seed(const PseudoFinslerMetric& m, const SeedSpec& s) {
  ResolvedSeed r;
  double x = get(s, "x"), y = get(s, "y");
  if (s.count("p")) {
    r.start = {x, y, s.at("p"), Chart::P};
  } else if (s.count("q")) {
    r.start = {x, y, s.at("q"), Chart::Q};
  } else if (s.count("iso")) {
    auto roots = sorted_isotropic(m, x, y);
    int k = static_cast<int>(s.at("iso"));
    if (k < 0 || k >= static_cast<int>(roots.size())) {
      throw std::invalid_argument("seed asks for isotropic direction " + std::to_string(k) + " but only " +
                                  std::to_string(roots.size()) + " exist at this point");
    }
    r.start = roots[k].at_infinity ? PTMPoint{x, y, 0.0, Chart::Q} : PTMPoint{x, y, roots[k].value, Chart::P};
    r.isotropic = true;
  } else {
    throw std::invalid_argument("seed needs one of p, q, iso");
  }
  return r;
}

GeodesicTrace trace_seed(const PseudoFinslerMetric& m, const ResolvedSeed& seed,
                         const IntegratorConfig& cfg) {
  return seed.isotropic ? isotropic_trace(m, seed.start, cfg) : integrate(m, seed.start, cfg);
}

PortraitData build_portrait(const ScenarioConfig& cfg) {
  PortraitData d;
  PseudoFinslerMetric m = cfg.metric();
  const Box& box = cfg.domain;
  IntegratorConfig ic = cfg.integrator;
  ic.domain = box;

  if (m.degree() == 3) {
    d.discriminant = trace_discriminant_curve(m, box, cfg.resolution);
    bool has_minus = false;
    for (const auto& p : net_seeds(box, 12)) has_minus = has_minus || classify_point(m, p[0], p[1]) == Stratum::MMinus;
    if (has_minus) {
      d.s_curves = trace_S_curves(m, box, cfg.resolution);
      d.tangencies = locate_S_tangencies(m, box, cfg.resolution);
    }
  }

  for (const auto& p : net_seeds(box, 5)) {
    std::vector<ProjectiveRoot> roots;
    try {
      roots = sorted_isotropic(m, p[0], p[1]);
    } catch (const DegeneratePointError&) {
      continue;
    }
    for (std::size_t k = 0; k < roots.size(); ++k) {
      try {
        ResolvedSeed s = resolve_seed(m, {{"x", p[0]}, {"y", p[1]}, {"iso", static_cast<double>(k)}});
        d.isotropic.push_back(isotropic_trace(m, s.start, ic));
      } catch (const std::exception&) {
        // Direction too close to a multiple root for the projection; skip it.
      }
    }
    if (m.degree() == 3 && classify_point(m, p[0], p[1]) == Stratum::MMinus) {
      for (int branch = 0; branch < 2; ++branch) {
        d.singular_lines.push_back(trace_singular_line(m, p[0], p[1], branch, box));
      }
    }
  }

  for (const auto& spec : cfg.seeds) {
    if (spec.count("alpha")) continue;
    ResolvedSeed s = resolve_seed(m, spec);
    (s.isotropic ? d.isotropic : d.geodesics).push_back(trace_seed(m, s, ic));
  }

  const std::vector<double>& alphas = cfg.alphas.empty() ? kDefaultAlphas : cfg.alphas;
  if (cfg.family) {
    auto [x, y, p0] = *cfg.family;
    d.family = shoot_family_at_M01(m, x, y, p0, alphas, ic);
  } else if (cfg.mode == ScenarioMode::BerwaldMoor) {
    if (auto alm = cfg.adapted()) d.family = bm_family_shoot(*alm, cfg.bm_y0, alphas, ic);
  }
  return d;
}

SvgCanvas render_portrait(const ScenarioConfig& cfg, const PortraitData& d) {
  SvgCanvas svg(cfg.domain);
  std::vector<StrokeStyle> used;
  auto note = [&used](const StrokeStyle& s) {
    if (std::none_of(used.begin(), used.end(), [&](const StrokeStyle& u) { return u.label == s.label; })) {
      used.push_back(s);
    }
  };
  for (const auto& c : d.singular_lines) {
    svg.polyline(c.points, styles::kSingularLine);
    note(styles::kSingularLine);
  }
  for (const auto& t : d.isotropic) {
    svg.polyline(t.planar(), styles::kIsotropic);
    note(styles::kIsotropic);
  }
  PseudoFinslerMetric m = cfg.metric();
  for (const auto& c : d.s_curves) {
    // Split each S_i curve into runs of equal eigenvalue type.
    Polyline run;
    bool run_real = true;
    for (std::size_t i = 0; i < c.points.size() && i < c.slope.size(); ++i) {
      SingularKind k = classify_singular(m, {c.points[i][0], c.points[i][1], c.slope[i], Chart::P}).kind;
      bool real = k != SingularKind::ImaginaryPair;
      if (!run.empty() && real != run_real) {
        Polyline next{run.back()};
        svg.polyline(run, run_real ? styles::kSReal : styles::kSImaginary);
        note(run_real ? styles::kSReal : styles::kSImaginary);
        run = std::move(next);
      }
      run_real = real;
      run.push_back(c.points[i]);
    }
    svg.polyline(run, run_real ? styles::kSReal : styles::kSImaginary);
    if (run.size() > 1) note(run_real ? styles::kSReal : styles::kSImaginary);
  }
  for (const auto& t : d.tangencies) svg.dot(t.x, t.y, 3.0, "#000000");
  for (const auto& t : d.geodesics) {
    svg.polyline(t.planar(), styles::kGeodesic);
    note(styles::kGeodesic);
  }
  for (const auto& f : d.family) {
    svg.polyline(f.trace.planar(), styles::kGeodesic);
    note(styles::kGeodesic);
  }
  for (const auto& c : d.discriminant) {
    svg.polyline(c.points, styles::kDiscriminant);
    note(styles::kDiscriminant);
  }
  for (const auto& t : d.geodesics) {
    for (const auto& e : t.events) {
      if (e.kind == EventKind::Cusp) svg.dot(t.points[e.index].x, t.points[e.index].y, 2.2, "#c0392b");
    }
  }
  svg.title(cfg.name);
  if (!used.empty()) svg.legend(used);
  return svg;
}

void write_stratum_raster(std::ostream& os, const ScenarioConfig& cfg) {
  PseudoFinslerMetric m = cfg.metric();
  const Box& b = cfg.domain;
  const int R = cfg.resolution;
  os << "x,y,stratum,disc_F,real_isotropic\n";
  os.precision(10);
  for (int j = 0; j <= R; ++j) {
    for (int i = 0; i <= R; ++i) {
      double x = b.xmin + (b.xmax - b.xmin) * i / R, y = b.ymin + (b.ymax - b.ymin) * j / R;
      os << x << ',' << y << ',';
      if (m.degree() == 3) {
        os << stratum_name(classify_point(m, x, y)) << ',' << disc_F(m, x, y) << ',';
      } else {
        os << "-,,";
      }
      try {
        int count = 0;
        for (const auto& r : isotropic_directions(m, x, y)) count += r.multiplicity;
        os << count << '\n';
      } catch (const DegeneratePointError&) {
        os << "degenerate\n";
      }
    }
  }
}

std::vector<VerifyCheck> run_verify(const ScenarioConfig& cfg) {
  PseudoFinslerMetric m = cfg.metric();
  const int n = m.degree();
  const Box& b = cfg.domain;
  std::mt19937 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> ux(b.xmin, b.xmax), uy(b.ymin, b.ymax), up(-2.0, 2.0),
      uabs(0.2, 5.0);
  auto mixed = [](double a, double c) { return std::abs(a - c) / std::max({1.0, std::abs(a), std::abs(c)}); };

  VerifyCheck h{"tm_identity_H", 0, 0.0, 1e-9}, hp{"tm_identity_P", 0, 0.0, 1e-9};
  VerifyCheck disc{"disc_delta_vs_disc_F", 0, 0.0, 1e-9};
  VerifyCheck chart{"chart_consistency", 0, 0.0, 1e-9};
  VerifyCheck lemma4{"multiple_roots", 0, 0.0, 0.5};
  for (int k = 0; k < cfg.verify_samples; ++k) {
    double x = ux(rng), y = uy(rng), p = up(rng);
    HBar hb = oracle_H(m, x, y, 1.0, p);
    double D = delta_poly(m, x, y)(p), P = p_poly(m, x, y)(p);
    h.max_residual = std::max(h.max_residual, mixed(hb.H, (n - 1) * D));
    hp.max_residual = std::max(hp.max_residual, mixed(hb.H2 - p * hb.H1, (n - 1) * P));
    ++h.count;
    ++hp.count;

    if (n == 3) {
      double dd = disc_Delta(m, x, y), df = -12.0 * disc_F(m, x, y);
      if (std::abs(dd) >= 1e-12 || std::abs(df) >= 1e-12) {
        disc.max_residual = std::max(disc.max_residual, std::abs(dd - df) / std::max(std::abs(dd), std::abs(df)));
      }
      ++disc.count;
    }

    double s = uabs(rng) * (up(rng) < 0 ? -1.0 : 1.0), q = 1.0 / s;
    auto vp = field_at(m, {x, y, s, Chart::P});
    auto vq = field_at(m, {x, y, q, Chart::Q});
    std::array<double, 3> t{vp[0], vp[1], -vp[2] / (s * s)};
    double f = std::pow(q, 2 * n - 3);
    double norm = std::max({1.0, std::abs(vq[0]), std::abs(vq[1]), std::abs(vq[2])});
    for (int i = 0; i < 3; ++i) chart.max_residual = std::max(chart.max_residual, std::abs(vq[i] - f * t[i]) / norm);
    ++chart.count;

    try {
      RootedPolynomial rp;
      auto poly = F_poly(m, x, y);
      for (const auto& r : real_roots(poly)) {
        for (int j = 0; j < r.multiplicity; ++j) rp.gammas.push_back(-r.value);
      }
      if (rp.degree() == n && poly.degree() == n) {
        if (!check_lemma4(rp).holds()) lemma4.max_residual = 1.0;
        ++lemma4.count;
      }
    } catch (const std::exception&) {
      lemma4.max_residual = 1.0;
    }
  }

  std::vector<VerifyCheck> out{h, hp};
  if (n == 3) out.push_back(disc);
  out.push_back(chart);
  out.push_back(lemma4);

  if (n == 3) {
    VerifyCheck spec{"m01_spectrum_3_2", 0, 0.0, 1e-6};
    std::vector<std::array<double, 2>> pts;
    for (const auto& c : trace_discriminant_curve(m, b, std::min(cfg.resolution, 120))) {
      std::size_t stride = std::max<std::size_t>(1, c.points.size() / 6);
      for (std::size_t i = 0; i < c.points.size(); i += stride) pts.push_back(c.points[i]);
    }
    if (pts.size() > 24) pts.resize(24);
    for (auto [x, y] : pts) {
      if (!polish_on_discriminant(m, x, y) || classify_point(m, x, y) != Stratum::M01) continue;
      for (const auto& r : isotropic_directions(m, x, y)) {
        if (r.at_infinity || r.multiplicity != 2) continue;
        if (std::abs(m01_transversality(m, x, y, r.value)) <= 1e-6) continue;
        SingularPoint sp = classify_singular(m, {x, y, r.value, Chart::P});
        double res = 1.0;
        if (std::abs(sp.eigenvalues[1]) > 0 && std::abs(sp.eigenvalues[2].imag()) < 1e-9 * std::abs(sp.eigenvalues[2])) {
          res = std::abs(sp.eigenvalues[2].real() / sp.eigenvalues[1].real() - 1.5);
        }
        spec.max_residual = std::max(spec.max_residual, res);
        ++spec.count;
      }
    }
    out.push_back(spec);
  }

  if (cfg.mode == ScenarioMode::BerwaldMoor) {
    if (auto alm = cfg.adapted()) {
      VerifyCheck bm{"blowup_spectrum", 0, 0.0, 1e-8};
      int dn = alm->degree();
      for (int which = 0; which < 3; ++which) {
        double expected = which == 1 ? (dn - 2.0) / dn : (dn - 2.0) / (1.0 - dn);
        auto sp = blowup_spectrum(*alm, cfg.bm_y0, which);
        bm.max_residual = std::max({bm.max_residual, std::abs(sp[1] - expected), std::abs(sp[2])});
        ++bm.count;
      }
      out.push_back(bm);
    }
  }
  return out;
}

}  // namespace pfgeo
