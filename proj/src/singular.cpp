#include "pfgeo/singular.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "pfgeo/ode.hpp"

namespace pfgeo {

std::pair<double, double> singular_roots(const PseudoFinslerMetric& m, double x, double y) {
  if (classify_point(m, x, y) != Stratum::MMinus) {
    throw WrongStratumError("singular_roots: point is not in M-");
  }
  auto roots = real_roots(delta_poly(m, x, y));
  if (roots.size() != 2 || roots[0].multiplicity != 1 || roots[1].multiplicity != 1) {
    throw WrongStratumError("singular_roots: Delta does not have two simple real roots");
  }
  return {roots[0].value, roots[1].value};
}

Eigen::Matrix3d jacobian_at(const PseudoFinslerMetric& m, double x, double y, double slope,
                            Chart chart) {
  FieldJet j = field_jet(m, chart, x, y, slope);
  Eigen::RowVector3d gd(j.grad_delta[0], j.grad_delta[1], j.grad_delta[2]);
  Eigen::RowVector3d gp(j.grad_P[0], j.grad_P[1], j.grad_P[2]);
  // Gradient of slope * Delta.
  Eigen::RowVector3d gsd = slope * gd;
  gsd[2] += j.delta;
  Eigen::Matrix3d J;
  if (chart == Chart::P) {
    J.row(0) = gd;
    J.row(1) = gsd;
  } else {
    J.row(0) = gsd;
    J.row(1) = gd;
  }
  J.row(2) = gp;
  return J;
}

const char* singular_kind_name(SingularKind k) {
  switch (k) {
    case SingularKind::RealPair: return "real_pair";
    case SingularKind::ImaginaryPair: return "imaginary_pair";
    case SingularKind::Resonant32: return "resonant_3_2";
    case SingularKind::Degenerate: return "degenerate";
    case SingularKind::NotApplicable: return "not_applicable";
  }
  return "?";
}

namespace {

template <class T>
T cubic_discriminant(const T& d, const T& c, const T& b, const T& a) {
  return T(18.0) * a * b * c * d - T(4.0) * b * b * b * d + b * b * c * c -
         T(4.0) * a * c * c * c - T(27.0) * a * a * d * d;
}

}  // namespace

double m01_transversality(const PseudoFinslerMetric& m, double x, double y, double p0) {
  if (m.degree() != 3) throw std::invalid_argument("transversality test defined for n = 3 only");
  auto c = chart_coeff_jets(m, Chart::P, x, y).a;
  Jet D = cubic_discriminant(c[0], c[1], c[2], c[3]);
  double s = std::max(1.0, m.scale_at(x, y));
  return (D.dx + p0 * D.dy) / (s * s * s * s);
}

SingularPoint classify_singular(const PseudoFinslerMetric& m, const PTMPoint& pt) {
  SingularPoint sp;
  sp.x = pt.x;
  sp.y = pt.y;
  sp.slope = pt.slope;
  sp.chart = pt.chart;
  sp.jacobian = jacobian_at(m, pt.x, pt.y, pt.slope, pt.chart);
  Eigen::EigenSolver<Eigen::Matrix3d> es(sp.jacobian, false);
  for (int i = 0; i < 3; ++i) sp.eigenvalues[i] = es.eigenvalues()[i];
  std::sort(sp.eigenvalues.begin(), sp.eigenvalues.end(),
            [](auto a, auto b) { return std::abs(a) < std::abs(b); });

  auto c = chart_coeffs(m, pt.chart, pt.x, pt.y);
  auto polys = field_polys(m.degree(), c);
  double d = coef::horner(polys.delta, pt.slope), P = coef::horner(polys.P, pt.slope);
  double s1 = 1.0 + m.scale_at(pt.x, pt.y);
  if (std::hypot(d, P) > kSingularTolerance * s1 * s1) {
    sp.kind = SingularKind::NotApplicable;
    sp.note = "field does not vanish here";
    return sp;
  }

  auto l0 = sp.eigenvalues[0], l1 = sp.eigenvalues[1], l2 = sp.eigenvalues[2];
  double big = std::abs(l2);
  if (big <= 1e-8 * s1 * s1) {
    sp.kind = SingularKind::Degenerate;
    sp.note = "all eigenvalues vanish";
    return sp;
  }
  if (std::abs(l0) > 1e-6 * big) {
    sp.kind = SingularKind::Degenerate;
    sp.note = "no zero eigenvalue";
    return sp;
  }
  bool real = std::abs(l1.imag()) < 1e-6 * std::abs(l1) && std::abs(l2.imag()) < 1e-6 * big;
  bool imaginary = std::abs(l1.real()) < 1e-6 * std::abs(l1) && std::abs(l2.real()) < 1e-6 * big;
  if (real) {
    double a = l1.real(), b = l2.real();
    if (std::abs(a + b) < 1e-6 * big) {
      sp.kind = SingularKind::RealPair;
      return sp;
    }
    if (std::abs(b / a - 1.5) < 1e-6) {
      if (m.degree() == 3 && std::abs(m01_transversality(m, pt.x, pt.y, pt.slope)) <= 1e-6) {
        sp.kind = SingularKind::Degenerate;
        sp.note = "3:2 spectrum but the direction is tangent to M01";
        return sp;
      }
      sp.kind = SingularKind::Resonant32;
      return sp;
    }
    sp.kind = SingularKind::Degenerate;
    sp.note = "real spectrum without resonance";
    return sp;
  }
  if (imaginary) {
    sp.kind = SingularKind::ImaginaryPair;
    return sp;
  }
  sp.kind = SingularKind::Degenerate;
  sp.note = "complex spectrum off the imaginary axis";
  return sp;
}

const char* curve_label_name(CurveLabel l) {
  switch (l) {
    case CurveLabel::M0: return "M0";
    case CurveLabel::S1: return "S1";
    case CurveLabel::S2: return "S2";
    case CurveLabel::SingularLineNet: return "singular_line";
    case CurveLabel::Locus: return "locus";
  }
  return "?";
}

namespace {

using Point = std::array<double, 2>;

double safe_eval(const std::function<double(double, double)>& g, double x, double y) {
  try {
    double v = g(x, y);
    return std::isfinite(v) ? v : std::nan("");
  } catch (const std::exception&) {
    return std::nan("");
  }
}

std::array<double, 2> gradient(const std::function<double(double, double)>& g, double x, double y,
                               double h) {
  return {(safe_eval(g, x + h, y) - safe_eval(g, x - h, y)) / (2 * h),
          (safe_eval(g, x, y + h) - safe_eval(g, x, y - h)) / (2 * h)};
}

// Newton steps along the gradient; fails if the point wanders off.
bool polish(const std::function<double(double, double)>& g, Point& p, double h, double tol,
            double max_move) {
  Point start = p;
  for (int it = 0; it < 30; ++it) {
    double v = safe_eval(g, p[0], p[1]);
    if (std::isnan(v)) return false;
    if (std::abs(v) < tol) return true;
    auto gr = gradient(g, p[0], p[1], h);
    double n2 = gr[0] * gr[0] + gr[1] * gr[1];
    if (!(n2 > 0) || !std::isfinite(n2)) return false;
    p[0] -= v * gr[0] / n2;
    p[1] -= v * gr[1] / n2;
    if (std::hypot(p[0] - start[0], p[1] - start[1]) > max_move) return false;
  }
  return std::abs(safe_eval(g, p[0], p[1])) < tol;
}

}  // namespace

std::vector<CurveSamples> trace_implicit_curve(const std::function<double(double, double)>& g,
                                               const Box& box, int resolution, double polish_tol,
                                               CurveLabel label) {
  const int R = std::max(2, resolution);
  const double dx = (box.xmax - box.xmin) / R, dy = (box.ymax - box.ymin) / R;
  auto X = [&](int i) { return box.xmin + i * dx; };
  auto Y = [&](int j) { return box.ymin + j * dy; };
  std::vector<double> v((R + 1) * (R + 1));
  auto at = [&](int i, int j) -> double& { return v[j * (R + 1) + i]; };
  for (int j = 0; j <= R; ++j) {
    for (int i = 0; i <= R; ++i) at(i, j) = safe_eval(g, X(i), Y(j));
  }

  // Edge ids: 2 * node for the edge towards +x, 2 * node + 1 towards +y.
  auto hedge = [&](int i, int j) { return 2L * (j * (R + 1) + i); };
  auto vedge = [&](int i, int j) { return 2L * (j * (R + 1) + i) + 1; };
  std::map<long, Point> crossing;
  auto cross = [&](long id, double x0, double y0, double v0, double x1, double y1, double v1) {
    if (!crossing.count(id)) {
      double s = v0 / (v0 - v1);
      crossing[id] = {x0 + s * (x1 - x0), y0 + s * (y1 - y0)};
    }
  };
  std::vector<std::pair<long, long>> segments;
  for (int j = 0; j < R; ++j) {
    for (int i = 0; i < R; ++i) {
      double c[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
      if (std::any_of(c, c + 4, [](double z) { return std::isnan(z); })) continue;
      bool s[4];
      for (int k = 0; k < 4; ++k) s[k] = c[k] >= 0;
      long eb = hedge(i, j), er = vedge(i + 1, j), et = hedge(i, j + 1), el = vedge(i, j);
      std::vector<long> edges;
      if (s[0] != s[1]) {
        cross(eb, X(i), Y(j), c[0], X(i + 1), Y(j), c[1]);
        edges.push_back(eb);
      }
      if (s[1] != s[2]) {
        cross(er, X(i + 1), Y(j), c[1], X(i + 1), Y(j + 1), c[2]);
        edges.push_back(er);
      }
      if (s[2] != s[3]) {
        cross(et, X(i + 1), Y(j + 1), c[2], X(i), Y(j + 1), c[3]);
        edges.push_back(et);
      }
      if (s[3] != s[0]) {
        cross(el, X(i), Y(j + 1), c[3], X(i), Y(j), c[0]);
        edges.push_back(el);
      }
      if (edges.size() == 2) {
        segments.push_back({edges[0], edges[1]});
      } else if (edges.size() == 4) {
        double centre = safe_eval(g, X(i) + 0.5 * dx, Y(j) + 0.5 * dy);
        if ((centre >= 0) == s[0]) {
          segments.push_back({eb, er});
          segments.push_back({et, el});
        } else {
          segments.push_back({eb, el});
          segments.push_back({er, et});
        }
      }
    }
  }

  // Chain segments through shared edges.
  std::map<long, std::vector<std::size_t>> by_edge;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    by_edge[segments[k].first].push_back(k);
    by_edge[segments[k].second].push_back(k);
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<std::vector<long>> chains;
  auto other = [&](std::size_t k, long e) {
    return segments[k].first == e ? segments[k].second : segments[k].first;
  };
  auto extend = [&](std::vector<long>& chain) {
    while (true) {
      long e = chain.back();
      std::size_t next = segments.size();
      for (std::size_t k : by_edge[e]) {
        if (!used[k]) {
          next = k;
          break;
        }
      }
      if (next == segments.size()) return;
      used[next] = true;
      chain.push_back(other(next, e));
    }
  };
  for (std::size_t k = 0; k < segments.size(); ++k) {
    if (used[k]) continue;
    used[k] = true;
    std::vector<long> chain{segments[k].first, segments[k].second};
    extend(chain);
    std::reverse(chain.begin(), chain.end());
    extend(chain);
    chains.push_back(chain);
  }

  double h = 1e-7 * std::max({1.0, box.xmax - box.xmin, box.ymax - box.ymin});
  double max_move = 2.0 * std::hypot(dx, dy);
  std::vector<CurveSamples> out;
  for (const auto& chain : chains) {
    CurveSamples cur;
    cur.label = label;
    for (long e : chain) {
      Point p = crossing[e];
      if (polish(g, p, h, polish_tol, max_move)) {
        cur.points.push_back(p);
      } else if (!cur.points.empty()) {
        if (cur.points.size() > 1) out.push_back(cur);
        cur.points.clear();
      }
    }
    if (cur.points.size() > 1) out.push_back(cur);
  }
  return out;
}

std::vector<CurveSamples> trace_implicit_curve(const ScalarField& g, const Box& box, int resolution,
                                               double polish_tol, CurveLabel label) {
  return trace_implicit_curve([&g](double x, double y) { return g(x, y); }, box, resolution,
                              polish_tol, label);
}

std::vector<CurveSamples> trace_discriminant_curve(const PseudoFinslerMetric& m, const Box& box,
                                                   int resolution) {
  return trace_implicit_curve([&m](double x, double y) { return disc_F(m, x, y); }, box,
                              resolution, 1e-8, CurveLabel::M0);
}

double delta_p_resultant(const PseudoFinslerMetric& m, double x, double y) {
  auto polys = field_polys(m.degree(), chart_coeffs(m, Chart::P, x, y));
  return resultant(RealPolynomial(polys.delta), RealPolynomial(polys.P));
}

std::pair<int, double> lift_to_S(const PseudoFinslerMetric& m, double x, double y) {
  auto roots = real_roots(delta_poly(m, x, y));
  if (roots.empty()) throw WrongStratumError("lift_to_S: Delta has no real root here");
  RealPolynomial P = p_poly(m, x, y);
  int best = 0;
  for (int i = 1; i < static_cast<int>(roots.size()); ++i) {
    if (std::abs(P(roots[i].value)) < std::abs(P(roots[best].value))) best = i;
  }
  return {best, roots[best].value};
}

std::vector<CurveSamples> trace_S_curves(const PseudoFinslerMetric& m, const Box& box,
                                         int resolution) {
  auto g = [&m](double x, double y) { return delta_p_resultant(m, x, y); };
  std::vector<CurveSamples> out;
  for (const auto& c : trace_implicit_curve(g, box, resolution, 1e-8, CurveLabel::Locus)) {
    CurveSamples cur;
    auto flush = [&]() {
      if (cur.points.size() > 1) out.push_back(cur);
      cur.points.clear();
      cur.slope.clear();
    };
    for (const auto& p : c.points) {
      if (classify_point(m, p[0], p[1]) != Stratum::MMinus) {
        flush();
        continue;
      }
      auto [idx, root] = lift_to_S(m, p[0], p[1]);
      CurveLabel lab = idx == 0 ? CurveLabel::S1 : CurveLabel::S2;
      double s = 1.0 + m.scale_at(p[0], p[1]);
      if (std::abs(p_poly(m, p[0], p[1])(root)) > 1e-6 * s * s * (1.0 + std::abs(root))) {
        flush();
        continue;
      }
      if (!cur.points.empty() && cur.label != lab) flush();
      cur.label = lab;
      cur.points.push_back(p);
      cur.slope.push_back(root);
    }
    flush();
  }
  return out;
}

namespace {

std::function<double(double, double)> resultant_fn(const PseudoFinslerMetric& m) {
  return [&m](double x, double y) { return delta_p_resultant(m, x, y); };
}

// Signed sine between the unit direction (1, p) and the unit tangent of S.
double signed_sine(const PseudoFinslerMetric& m, double x, double y, double p,
                   std::array<double, 2>* tangent_out = nullptr) {
  auto g = resultant_fn(m);
  auto gr = gradient(g, x, y, 1e-7 * (1.0 + std::abs(x) + std::abs(y)));
  double n = std::hypot(gr[0], gr[1]);
  std::array<double, 2> t{-gr[1] / n, gr[0] / n};
  if (tangent_out) *tangent_out = t;
  double dn = std::hypot(1.0, p);
  return (t[1] - p * t[0]) / dn;
}

}  // namespace

TangencyReport tangency_direction_on_S(const PseudoFinslerMetric& m, double x, double y) {
  auto g = resultant_fn(m);
  Point p{x, y};
  polish(g, p, 1e-7 * (1.0 + std::abs(x) + std::abs(y)), 1e-10, 1.0);
  TangencyReport r;
  r.x = p[0];
  r.y = p[1];
  auto [idx, root] = lift_to_S(m, r.x, r.y);
  r.branch = idx;
  r.slope = root;
  r.sine = signed_sine(m, r.x, r.y, root, &r.tangent);
  r.transversal = std::abs(r.sine) > 1e-6;
  Eigen::Matrix3d J = jacobian_at(m, r.x, r.y, root);
  Eigen::EigenSolver<Eigen::Matrix3d> es(J, false);
  for (int i = 0; i < 3; ++i) r.eigenvalues[i] = es.eigenvalues()[i];
  std::sort(r.eigenvalues.begin(), r.eigenvalues.end(),
            [](auto a, auto b) { return std::abs(a) < std::abs(b); });
  r.eigen_nonzero = std::abs(r.eigenvalues[1]) > 1e-6 * J.norm();
  return r;
}

std::vector<TangencyReport> locate_S_tangencies(const PseudoFinslerMetric& m, const Box& box,
                                                int resolution) {
  auto g = resultant_fn(m);
  std::vector<TangencyReport> out;
  auto sine_at = [&](const Point& p) { return signed_sine(m, p[0], p[1], lift_to_S(m, p[0], p[1]).second); };
  for (const auto& c : trace_S_curves(m, box, resolution)) {
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      Point a = c.points[i - 1], b = c.points[i];
      double sa = sine_at(a), sb = sine_at(b);
      if ((sa > 0) == (sb > 0)) continue;
      for (int it = 0; it < 60 && std::hypot(a[0] - b[0], a[1] - b[1]) > 1e-13; ++it) {
        Point mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
        polish(g, mid, 1e-7 * (1.0 + std::abs(mid[0]) + std::abs(mid[1])), 1e-12, 1.0);
        double sm = sine_at(mid);
        if ((sm > 0) == (sa > 0)) {
          a = mid;
          sa = sm;
        } else {
          b = mid;
        }
      }
      out.push_back(tangency_direction_on_S(m, 0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])));
    }
  }
  return out;
}

std::vector<double> admissible_directions_n2(const PseudoFinslerMetric& m, double x, double y) {
  if (m.degree() != 2) throw std::invalid_argument("admissible directions are defined for n = 2");
  auto a = m.coeffs_at(x, y);
  double s = m.scale_at(x, y);
  if (std::abs(discriminant_quadratic(a[0], a[1], a[2])) > 1e-8 * std::max(1.0, s * s)) {
    throw std::domain_error("point is not on the discriminant curve");
  }
  RealPolynomial P = p_poly(m, x, y).trimmed();
  if (P.is_zero() || P.max_abs_coeff() <= 1e-12 * std::max(1.0, s * s)) {
    throw DegeneratePointError("P vanishes identically at the point");
  }
  std::vector<double> out;
  for (const auto& r : real_roots(P)) out.push_back(r.value);
  return out;
}

CurveSamples trace_singular_line(const PseudoFinslerMetric& m, double x0, double y0, int branch,
                                 const Box& box, double max_length) {
  CurveSamples out;
  out.label = CurveLabel::SingularLineNet;
  auto slope = [&m, branch](double x, double y) {
    auto r = singular_roots(m, x, y);
    return branch == 0 ? r.first : r.second;
  };
  auto half = [&](double dir) {
    std::vector<Point> pts;
    auto rhs = [&](double, const State<2>& s) {
      double p = slope(s[0], s[1]);
      double n = std::hypot(1.0, p);
      return State<2>{dir / n, dir * p / n};
    };
    DormandPrince<2> dp(rhs, 1e-9, 1e-12);
    State<2> s{x0, y0};
    double t = 0.0, h = 1e-3;
    DenseStep<2> ds;
    while (t < max_length) {
      try {
        if (!dp.step(t, s, h, 1e-12, 0.02, ds)) break;
      } catch (const std::exception&) {
        break;
      }
      if (!box.contains(ds.y1[0], ds.y1[1])) break;
      t = ds.t0 + ds.h;
      s = ds.y1;
      pts.push_back({s[0], s[1]});
    }
    return pts;
  };
  try {
    slope(x0, y0);
  } catch (const WrongStratumError&) {
    return out;
  }
  auto back = half(-1.0), fwd = half(1.0);
  out.points.assign(back.rbegin(), back.rend());
  out.points.push_back({x0, y0});
  out.points.insert(out.points.end(), fwd.begin(), fwd.end());
  return out;
}

}  // namespace pfgeo
