#include "pfgeo/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pfgeo/ode.hpp"
#include "pfgeo/singular.hpp"

namespace pfgeo {

PTMPoint switch_chart(const PTMPoint& pt) {
  if (pt.slope == 0.0) throw std::domain_error("cannot switch chart at zero slope");
  return {pt.x, pt.y, 1.0 / pt.slope, pt.chart == Chart::P ? Chart::Q : Chart::P};
}

const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::Cusp: return "cusp";
    case EventKind::SingularApproach: return "singular_approach";
    case EventKind::ChartSwitch: return "chart_switch";
    case EventKind::IsotropicCross: return "isotropic_cross";
    case EventKind::DomainExit: return "domain_exit";
    case EventKind::MaxSteps: return "max_steps";
    case EventKind::StepUnderflow: return "step_underflow";
    case EventKind::EvaluationFailure: return "evaluation_failure";
    case EventKind::ProjectionFailure: return "projection_failure";
  }
  return "?";
}

bool GeodesicTrace::has_event(EventKind k) const {
  return std::any_of(events.begin(), events.end(), [k](const TraceEvent& e) { return e.kind == k; });
}

std::vector<std::array<double, 2>> GeodesicTrace::planar() const {
  std::vector<std::array<double, 2>> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back({p.x, p.y});
  return out;
}

double Box::margin(double x, double y) const {
  return std::min({x - xmin, xmax - x, y - ymin, ymax - y});
}

ChartValues chart_values(const PseudoFinslerMetric& m, const PTMPoint& pt) {
  auto c = chart_coeffs(m, pt.chart, pt.x, pt.y);
  auto polys = field_polys(m.degree(), c);
  return {coef::horner(c.a, pt.slope), coef::horner(polys.delta, pt.slope),
          coef::horner(polys.P, pt.slope)};
}

std::array<double, 3> field_at(const PseudoFinslerMetric& m, const PTMPoint& pt) {
  ChartValues v = chart_values(m, pt);
  if (pt.chart == Chart::P) return {v.delta, pt.slope * v.delta, v.P};
  return {pt.slope * v.delta, v.delta, v.P};
}

namespace {

double field_scale(const PseudoFinslerMetric& m, double x, double y) {
  double s = 1.0 + m.scale_at(x, y);
  return s * s;
}

// F and dF/dslope in the chart.
std::pair<double, double> chart_F(const PseudoFinslerMetric& m, const PTMPoint& pt) {
  auto c = chart_coeffs(m, pt.chart, pt.x, pt.y);
  return {coef::horner(c.a, pt.slope), coef::horner(coef::derive(c.a), pt.slope)};
}

// Newton steps in the slope towards F = 0.
bool project_to_isotropic(const PseudoFinslerMetric& m, PTMPoint& pt, double tol) {
  for (int it = 0; it < 8; ++it) {
    auto [F, Fs] = chart_F(m, pt);
    if (std::abs(F) < tol) return true;
    if (std::abs(Fs) < 1e-12 * (1.0 + m.scale_at(pt.x, pt.y))) return false;
    pt.slope -= F / Fs;
  }
  return std::abs(chart_F(m, pt).first) < tol;
}

class Runner {
 public:
  Runner(const PseudoFinslerMetric& m, const IntegratorConfig& cfg, bool isotropic)
      : m_(m), cfg_(cfg), isotropic_(isotropic) {}

  GeodesicTrace run(PTMPoint start, int orientation) {
    GeodesicTrace tr;
    if (std::abs(start.slope) > cfg_.chart_threshold) {
      int s = start.slope > 0 ? 1 : -1;
      start = switch_chart(start);
      orientation *= s;
    }
    chart_ = start.chart;
    sigma_ = orientation >= 0 ? 1 : -1;
    State<3> y{start.x, start.y, start.slope};
    double t = 0.0;
    push(tr, t, y);
    if (!cfg_.domain.contains(start.x, start.y)) {
      event(tr, EventKind::DomainExit);
      return tr;
    }

    auto rhs = [this](double, const State<3>& s) {
      auto v = field_at(m_, {s[0], s[1], s[2], chart_});
      double norm = std::sqrt(1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      return State<3>{sigma_ * v[0] / norm, sigma_ * v[1] / norm, sigma_ * v[2] / norm};
    };
    DormandPrince<3> dp(rhs, cfg_.rtol, cfg_.atol);
    double h = cfg_.initial_step;
    double length = 0.0;

    for (int step = 0; step < cfg_.max_steps; ++step) {
      PTMPoint here{y[0], y[1], y[2], chart_};
      double fscale = field_scale(m_, y[0], y[1]);
      ChartValues cv;
      try {
        cv = chart_values(m_, here);
      } catch (const EvalError&) {
        event(tr, EventKind::EvaluationFailure);
        return tr;
      }
      if (std::hypot(cv.delta, cv.P) < cfg_.event_tol * fscale) {
        event(tr, EventKind::SingularApproach);
        return tr;
      }

      DenseStep<3> ds;
      bool ok;
      try {
        ok = dp.step(t, y, h, 1e-14 * (1.0 + std::abs(t)), cfg_.max_step, ds);
      } catch (const EvalError&) {
        event(tr, EventKind::EvaluationFailure);
        return tr;
      }
      if (!ok) {
        event(tr, EventKind::StepUnderflow);
        return tr;
      }

      std::vector<std::pair<double, EventKind>> found;
      double theta_end = 1.0;
      bool terminal = false;
      if (cfg_.domain.margin(ds.y1[0], ds.y1[1]) < 0.0) {
        theta_end = bisect_event(ds, [this](const State<3>& s) {
          return cfg_.domain.margin(s[0], s[1]) >= 0.0 ? 1.0 : -1.0;
        }, 1e-10);
        terminal = true;
      }
      auto value_at = [this](const State<3>& s) {
        return chart_values(m_, {s[0], s[1], s[2], chart_});
      };
      try {
        ChartValues v1 = value_at(ds.at(theta_end));
        if ((cv.delta > 0) != (v1.delta > 0) && cv.delta != 0.0) {
          double th = bisect_event(ds, [&](const State<3>& s) { return value_at(s).delta; }, 1e-10);
          if (th <= theta_end && std::abs(value_at(ds.at(th)).P) > cfg_.event_tol * fscale) {
            found.push_back({th, EventKind::Cusp});
          }
        }
        double ftol = 1e3 * cfg_.isotropy_tol;
        if (!isotropic_ && (cv.F > 0) != (v1.F > 0) && std::abs(cv.F) > ftol &&
            std::abs(v1.F) > ftol) {
          double th = bisect_event(ds, [&](const State<3>& s) { return value_at(s).F; }, 1e-10);
          if (th <= theta_end) found.push_back({th, EventKind::IsotropicCross});
        }
      } catch (const EvalError&) {
        event(tr, EventKind::EvaluationFailure);
        return tr;
      }
      std::sort(found.begin(), found.end());

      // Densified samples with event points spliced in.
      State<3> yend = ds.at(theta_end);
      double dist = std::sqrt(sq(yend[0] - y[0]) + sq(yend[1] - y[1]) + sq(yend[2] - y[2]));
      int pieces = std::clamp(static_cast<int>(std::ceil(dist / cfg_.sample_spacing)), 1, 1000);
      std::size_t next = 0;
      for (int k = 1; k <= pieces; ++k) {
        double th = theta_end * k / pieces;
        while (next < found.size() && found[next].first < th) {
          push(tr, ds.t0 + found[next].first * ds.h, ds.at(found[next].first));
          event(tr, found[next].second);
          ++next;
        }
        push(tr, ds.t0 + th * ds.h, ds.at(th));
      }
      length += dist;
      y = yend;
      t = ds.t0 + theta_end * ds.h;
      if (terminal) {
        event(tr, EventKind::DomainExit);
        return tr;
      }

      if (isotropic_) {
        PTMPoint pt{y[0], y[1], y[2], chart_};
        if (std::abs(chart_F(m_, pt).first) > 10.0 * cfg_.isotropy_tol) {
          if (!project_to_isotropic(m_, pt, cfg_.isotropy_tol)) {
            event(tr, EventKind::ProjectionFailure);
            return tr;
          }
          y[2] = pt.slope;
          tr.points.back() = pt;
        }
      }

      if (std::abs(y[2]) > cfg_.chart_threshold) {
        int s = y[2] > 0 ? 1 : -1;
        PTMPoint sw = switch_chart({y[0], y[1], y[2], chart_});
        chart_ = sw.chart;
        sigma_ *= s;
        y = {sw.x, sw.y, sw.slope};
        push(tr, t, y);
        event(tr, EventKind::ChartSwitch);
      }
      if (length > cfg_.max_length) return tr;
    }
    event(tr, EventKind::MaxSteps);
    return tr;
  }

 private:
  static double sq(double v) { return v * v; }

  void push(GeodesicTrace& tr, double t, const State<3>& s) {
    PTMPoint pt{s[0], s[1], s[2], chart_};
    if (isotropic_ && std::abs(chart_F(m_, pt).first) > cfg_.isotropy_tol) {
      PTMPoint fixed = pt;
      if (project_to_isotropic(m_, fixed, cfg_.isotropy_tol)) pt = fixed;
    }
    tr.t.push_back(t);
    tr.points.push_back(pt);
  }
  static void event(GeodesicTrace& tr, EventKind k) { tr.events.push_back({tr.points.size() - 1, k}); }

  const PseudoFinslerMetric& m_;
  const IntegratorConfig& cfg_;
  bool isotropic_;
  Chart chart_ = Chart::P;
  double sigma_ = 1.0;
};

GeodesicTrace join(const GeodesicTrace& back, const GeodesicTrace& fwd, bool drop_duplicate) {
  GeodesicTrace out;
  std::size_t nb = back.points.size();
  for (std::size_t i = nb; i-- > 0;) {
    out.t.push_back(-back.t[i]);
    out.points.push_back(back.points[i]);
  }
  for (const auto& e : back.events) out.events.push_back({nb - 1 - e.index, e.kind});
  std::size_t skip = drop_duplicate ? 1 : 0;
  std::size_t offset = out.points.size() - skip;
  for (std::size_t i = skip; i < fwd.points.size(); ++i) {
    out.t.push_back(fwd.t[i]);
    out.points.push_back(fwd.points[i]);
  }
  for (const auto& e : fwd.events) out.events.push_back({offset + e.index, e.kind});
  std::sort(out.events.begin(), out.events.end(),
            [](const TraceEvent& a, const TraceEvent& b) { return a.index < b.index; });
  return out;
}

GeodesicTrace run_both(const PseudoFinslerMetric& m, const PTMPoint& start,
                       const IntegratorConfig& cfg, bool isotropic) {
  GeodesicTrace fwd = Runner(m, cfg, isotropic).run(start, 1);
  if (!cfg.bidirectional) return fwd;
  GeodesicTrace back = Runner(m, cfg, isotropic).run(start, -1);
  return join(back, fwd, true);
}

}  // namespace

GeodesicTrace integrate(const PseudoFinslerMetric& m, const PTMPoint& start,
                        const IntegratorConfig& cfg) {
  return run_both(m, start, cfg, false);
}

GeodesicTrace integrate_directed(const PseudoFinslerMetric& m, const PTMPoint& start,
                                 const IntegratorConfig& cfg, int orientation) {
  return Runner(m, cfg, false).run(start, orientation);
}

GeodesicTrace isotropic_trace(const PseudoFinslerMetric& m, const PTMPoint& start,
                              const IntegratorConfig& cfg) {
  auto [F, Fs] = chart_F(m, start);
  (void)Fs;
  if (std::abs(F) > cfg.isotropy_tol) {
    throw std::invalid_argument("isotropic_trace: start point is not on F = 0");
  }
  return run_both(m, start, cfg, true);
}

PlanarCurve tm_oracle_integrate(const PseudoFinslerMetric& m, double x, double y, double xdot,
                                double ydot, const IntegratorConfig& cfg) {
  if (xdot == 0.0 && ydot == 0.0) throw std::invalid_argument("zero initial velocity");
  HBar h0 = oracle_H(m, x, y, xdot, ydot);
  if (h0.H == 0.0) throw std::invalid_argument("degenerate Hessian at the initial velocity");

  auto half = [&](double sx, double sy, PlanarCurve& out) {
    auto rhs = [&m](double, const State<4>& s) {
      HBar hb = oracle_H(m, s[0], s[1], s[2], s[3]);
      return State<4>{s[2], s[3], hb.H1 / hb.H, hb.H2 / hb.H};
    };
    DormandPrince<4> dp(rhs, cfg.rtol, cfg.atol);
    State<4> s{x, y, sx, sy};
    double t = 0.0, h = cfg.initial_step, length = 0.0;
    double speed = std::hypot(sx, sy);
    double hmax = cfg.max_step / speed;
    double sign0 = h0.H > 0 ? 1.0 : -1.0;
    auto Hsign = [&](const State<4>& st) { return sign0 * oracle_H(m, st[0], st[1], st[2], st[3]).H; };
    for (int step = 0; step < cfg.max_steps; ++step) {
      DenseStep<4> ds;
      if (!dp.step(t, s, h, 1e-14 * (1.0 + std::abs(t)), hmax, ds)) return;
      double theta_end = 1.0;
      bool stop = false;
      if (cfg.domain.margin(ds.y1[0], ds.y1[1]) < 0.0) {
        theta_end = bisect_event(ds, [&](const State<4>& st) {
          return cfg.domain.margin(st[0], st[1]) >= 0.0 ? 1.0 : -1.0;
        }, 1e-10);
        stop = true;
      }
      if (Hsign(ds.at(theta_end)) <= 0.0) {
        theta_end = std::min(theta_end, bisect_event(ds, Hsign, 1e-10));
        // Keep the last point on the nondegenerate side.
        while (theta_end > 0 && Hsign(ds.at(theta_end)) <= 0.0) theta_end -= 1e-10 / ds.h;
        out.truncated_at_degeneracy = true;
        stop = true;
      }
      State<4> yend = ds.at(theta_end);
      double dist = std::hypot(yend[0] - s[0], yend[1] - s[1]);
      int pieces = std::clamp(static_cast<int>(std::ceil(dist / cfg.sample_spacing)), 1, 1000);
      for (int k = 1; k <= pieces; ++k) {
        double th = theta_end * k / pieces;
        State<4> p = ds.at(th);
        out.t.push_back(ds.t0 + th * ds.h);
        out.xy.push_back({p[0], p[1]});
      }
      length += dist;
      s = yend;
      t = ds.t0 + theta_end * ds.h;
      if (stop || length > cfg.max_length) return;
    }
  };

  PlanarCurve fwd, back;
  half(xdot, ydot, fwd);
  if (!cfg.bidirectional) {
    fwd.t.insert(fwd.t.begin(), 0.0);
    fwd.xy.insert(fwd.xy.begin(), {x, y});
    return fwd;
  }
  half(-xdot, -ydot, back);
  PlanarCurve out;
  for (std::size_t i = back.xy.size(); i-- > 0;) {
    out.t.push_back(-back.t[i]);
    out.xy.push_back(back.xy[i]);
  }
  out.t.push_back(0.0);
  out.xy.push_back({x, y});
  out.t.insert(out.t.end(), fwd.t.begin(), fwd.t.end());
  out.xy.insert(out.xy.end(), fwd.xy.begin(), fwd.xy.end());
  out.truncated_at_degeneracy = fwd.truncated_at_degeneracy || back.truncated_at_degeneracy;
  return out;
}

std::vector<std::vector<ArcSample>> arclength_reparam(const PseudoFinslerMetric& m,
                                                      const GeodesicTrace& trace, double tol) {
  const double inv_n = 1.0 / m.degree();
  std::vector<std::vector<ArcSample>> segments;
  std::vector<ArcSample> cur;
  double prev_w = 0.0;
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    const PTMPoint& pt = trace.points[i];
    double F = chart_F(m, pt).first;
    if (std::abs(F) < tol) {
      if (cur.size() > 1) segments.push_back(cur);
      cur.clear();
      continue;
    }
    double w = std::pow(std::abs(F), inv_n);
    if (cur.empty()) {
      cur.push_back({0.0, pt.x, pt.y});
    } else {
      const PTMPoint& q = trace.points[i - 1];
      double ds = 0.0;
      if (q.chart == pt.chart) {
        double d = pt.chart == Chart::P ? pt.x - q.x : pt.y - q.y;
        ds = 0.5 * (w + prev_w) * std::abs(d);
      }
      cur.push_back({cur.back().s + ds, pt.x, pt.y});
    }
    prev_w = w;
  }
  if (cur.size() > 1) segments.push_back(cur);
  return segments;
}

std::vector<FamilyMember> shoot_family_at_M01(const PseudoFinslerMetric& m, double x0, double y0,
                                              double p0, const std::vector<double>& alphas,
                                              const IntegratorConfig& cfg, double eps) {
  if (classify_point(m, x0, y0) != Stratum::M01) {
    throw std::domain_error("shoot_family_at_M01: point is not on the regular discriminant curve");
  }
  if (std::abs(m01_transversality(m, x0, y0, p0)) <= 1e-6) {
    throw std::domain_error("shoot_family_at_M01: isotropic direction is tangent to M01");
  }

  // Fast eigendirection of the linear part at (q; p0), scaled to unit x-component.
  Eigen::Matrix3d J = jacobian_at(m, x0, y0, p0);
  Eigen::EigenSolver<Eigen::Matrix3d> es(J);
  int fast = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(es.eigenvalues()[i]) > std::abs(es.eigenvalues()[fast])) fast = i;
  }
  Eigen::Vector3d e1 = es.eigenvectors().col(fast).real();
  if (std::abs(e1[0]) < 1e-12) throw std::domain_error("fast eigenvector has no x-component");
  e1 /= e1[0];

  // Isotropic member: F_x dx + F_y dy + F_p dp = 0 with dy = p dx, p = p0 + eta,
  // integrated in tau = |eta|.
  auto iso_signed = [&](double eta) {
    double sgn = eta >= 0 ? 1.0 : -1.0;
    auto rhs = [&m, p0, sgn](double tau, const State<2>& s) {
      double p = p0 + sgn * tau;
      auto c = chart_coeffs(m, Chart::P, s[0], s[1]);
      double Fp = coef::horner(coef::derive(c.a), p);
      double Fx = coef::horner(c.a_ind, p), Fy = coef::horner(c.a_dep, p);
      double dx = -sgn * Fp / (Fx + p * Fy);
      return State<2>{dx, p * dx};
    };
    DormandPrince<2> dp(rhs, 1e-13, 1e-16);
    State<2> s{x0, y0};
    double tau = 0.0, end = std::abs(eta), h = end / 16;
    DenseStep<2> ds;
    while (tau < end * (1 - 1e-15)) {
      if (!dp.step(tau, s, h, 1e-18, end - tau, ds)) break;
      tau = ds.t0 + ds.h;
      s = ds.y1;
    }
    return s;
  };

  auto start_for = [&](double alpha, double eta) -> PTMPoint {
    if (std::isinf(alpha)) {
      Eigen::Vector3d d = e1.normalized() * (eta > 0 ? eps : -eps);
      return {x0 + d[0], y0 + d[1], p0 + d[2], Chart::P};
    }
    State<2> iso = iso_signed(eta);
    double e = std::pow(std::abs(eta), 1.5);
    return {iso[0] + alpha * e, iso[1] + alpha * (p0 * e + 0.6 * eta * e),
            p0 + eta + alpha * e * e1[2], Chart::P};
  };
  auto outward = [&](const PTMPoint& s) {
    auto v = field_at(m, s);
    double dot = v[0] * (s.x - x0) + v[1] * (s.y - y0) + v[2] * (s.slope - p0);
    return dot >= 0 ? 1 : -1;
  };

  std::vector<FamilyMember> out;
  for (double alpha : alphas) {
    PTMPoint sn = start_for(alpha, -eps), sp = start_for(alpha, eps);
    GeodesicTrace neg = Runner(m, cfg, false).run(sn, outward(sn));
    GeodesicTrace pos = Runner(m, cfg, false).run(sp, outward(sp));
    out.push_back({alpha, join(neg, pos, false)});
  }
  return out;
}

double distance_to_polyline(const std::array<double, 2>& pt, const Polyline& line) {
  if (line.empty()) return std::numeric_limits<double>::infinity();
  double best = std::hypot(pt[0] - line[0][0], pt[1] - line[0][1]);
  for (std::size_t i = 1; i < line.size(); ++i) {
    double ax = line[i - 1][0], ay = line[i - 1][1];
    double bx = line[i][0] - ax, by = line[i][1] - ay;
    double len2 = bx * bx + by * by;
    double u = len2 > 0 ? std::clamp(((pt[0] - ax) * bx + (pt[1] - ay) * by) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, std::hypot(pt[0] - ax - u * bx, pt[1] - ay - u * by));
  }
  return best;
}

double directed_hausdorff(const Polyline& from, const Polyline& to) {
  double d = 0.0;
  for (const auto& p : from) d = std::max(d, distance_to_polyline(p, to));
  return d;
}

double hausdorff(const Polyline& a, const Polyline& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

Polyline common_arc(const Polyline& a, const Polyline& b) {
  if (a.empty() || b.empty()) return {};
  auto nearest = [&b](const std::array<double, 2>& p) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < b.size(); ++i) {
      double d = std::hypot(p[0] - b[i][0], p[1] - b[i][1]);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    return best;
  };
  std::size_t i0 = nearest(a.front()), i1 = nearest(a.back());
  if (i0 > i1) std::swap(i0, i1);
  return Polyline(b.begin() + static_cast<std::ptrdiff_t>(i0),
                  b.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
}

void write_trace_csv(std::ostream& os, const PseudoFinslerMetric& m, const GeodesicTrace& trace,
                     bool header) {
  if (header) os << "t,x,y,slope,chart,F,Delta,P,event\n";
  os.precision(12);
  std::size_t ev = 0;
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    const auto& pt = trace.points[i];
    ChartValues v = chart_values(m, pt);
    os << trace.t[i] << ',' << pt.x << ',' << pt.y << ',' << pt.slope << ','
       << chart_name(pt.chart) << ',' << v.F << ',' << v.delta << ',' << v.P << ',';
    bool first = true;
    while (ev < trace.events.size() && trace.events[ev].index == i) {
      if (!first) os << '|';
      os << event_name(trace.events[ev].kind);
      first = false;
      ++ev;
    }
    os << '\n';
  }
}

}  // namespace pfgeo
