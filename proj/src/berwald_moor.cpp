#include "pfgeo/berwald_moor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pfgeo/ode.hpp"

namespace pfgeo {

namespace {

template <class F>
void for_grid(const Box& box, int n, F&& f) {
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double x = box.xmin + (box.xmax - box.xmin) * i / (n - 1);
      double y = box.ymin + (box.ymax - box.ymin) * j / (n - 1);
      f(x, y);
    }
  }
}

PseudoFinslerMetric adapted_metric(const ScalarField& a, const ScalarField& b,
                                   const std::vector<std::pair<ScalarField, ScalarField>>& g) {
  std::vector<std::pair<Expr, Expr>> factors;
  factors.emplace_back(Expr::constant(0.0), Expr::constant(1.0));
  factors.emplace_back(Expr::variable(Var::X) * a.expr(), b.expr());
  for (const auto& [gx, gy] : g) factors.emplace_back(gx.expr(), gy.expr());
  std::vector<Expr> c = expand_linear_factors(factors);
  return PseudoFinslerMetric(static_cast<int>(factors.size()),
                             std::vector<ScalarField>(c.begin(), c.end()));
}

void guard_discriminant(const AdaptedLocalMetric& alm, double x, double y) {
  double a = alm.a()(x, y), b = alm.b()(x, y);
  double n = alm.degree();
  double D = n * (2.0 - n) * (a * b) * (a * b);
  if (!(D < -1e-12)) {
    throw std::domain_error("blow-up refused: n(2-n)(ab)^2 = " + std::to_string(D) +
                            " is not negative here");
  }
}

}  // namespace

void SurfaceImmersion::validate(const Box& probe) const {
  if (n() < 3) throw std::invalid_argument("immersion needs at least 3 components");
  for (int i = 0; i < n(); ++i) {
    const ScalarField& fx = f[i].dx();
    const ScalarField& fy = f[i].dy();
    for_grid(probe, 11, [&](double x, double y) {
      if (std::abs(fx(x, y)) + std::abs(fy(x, y)) <= 1e-10) {
        throw std::invalid_argument("df_" + std::to_string(i + 1) + " vanishes at (" +
                                    std::to_string(x) + ", " + std::to_string(y) + ")");
      }
    });
  }
}

std::vector<Expr> expand_linear_factors(const std::vector<std::pair<Expr, Expr>>& factors) {
  std::vector<Expr> c{Expr::constant(1.0)};
  for (const auto& [l0, l1] : factors) {
    std::vector<Expr> r(c.size() + 1, Expr::constant(0.0));
    for (std::size_t i = 0; i < c.size(); ++i) {
      r[i] = r[i] + c[i] * l0;
      r[i + 1] = r[i + 1] + c[i] * l1;
    }
    c = std::move(r);
  }
  return c;
}

PseudoFinslerMetric induced_metric(const SurfaceImmersion& imm) {
  std::vector<std::pair<Expr, Expr>> factors;
  for (const auto& f : imm.f) factors.emplace_back(f.dx().expr(), f.dy().expr());
  std::vector<Expr> c = expand_linear_factors(factors);
  return PseudoFinslerMetric(imm.n(), std::vector<ScalarField>(c.begin(), c.end()));
}

std::vector<CurveSamples> double_direction_locus(const SurfaceImmersion& imm, int i, int j,
                                                 const Box& box, int resolution) {
  if (i == j) throw std::invalid_argument("double_direction_locus: i == j");
  const ScalarField& fi = imm.f.at(i);
  const ScalarField& fj = imm.f.at(j);
  auto g = [&](double x, double y) {
    return fi.dx()(x, y) * fj.dy()(x, y) - fi.dy()(x, y) * fj.dx()(x, y);
  };
  return trace_implicit_curve(g, box, resolution, 1e-8, CurveLabel::Locus);
}

AdaptedLocalMetric::AdaptedLocalMetric(ScalarField a, ScalarField b,
                                       std::vector<std::pair<ScalarField, ScalarField>> g)
    : a_(std::move(a)), b_(std::move(b)), g_(std::move(g)), metric_(adapted_metric(a_, b_, g_)) {}

std::optional<AdaptedLocalMetric> adapted_from_immersion(const SurfaceImmersion& imm,
                                                         const Box& probe, std::string* why) {
  std::string reason = "no component equals y";
  const int n = imm.n();
  for (int j = 0; j < n; ++j) {
    bool is_y = true;
    for_grid(probe, 7, [&](double x, double y) {
      is_y = is_y && std::abs(imm.f[j].dx()(x, y)) < 1e-10 &&
             std::abs(imm.f[j].dy()(x, y) - 1.0) < 1e-10;
    });
    if (!is_y) continue;
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      const ScalarField& fix = imm.f[i].dx();
      ScalarField a(fix.dx());
      ScalarField b(imm.f[i].dy());
      double worst = 0.0;
      for_grid(probe, 7, [&](double x, double y) {
        double r = fix(x, y) - x * a(x, y);
        worst = std::max(worst, std::abs(r) / (1.0 + std::abs(fix(x, y))));
      });
      if (worst > 1e-9) {
        reason = "f_" + std::to_string(i + 1) + " has f_x not of the form x a(x, y)";
        continue;
      }
      std::vector<std::pair<ScalarField, ScalarField>> g;
      double g0 = 1.0;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        g.emplace_back(imm.f[k].dx(), imm.f[k].dy());
        g0 *= imm.f[k].dx()(0.0, 0.0);
      }
      if (std::abs(a(0.0, 0.0)) < 1e-10 || std::abs(b(0.0, 0.0)) < 1e-10 || std::abs(g0) < 1e-10) {
        reason = "a, b or G vanishes at the origin for pair (" + std::to_string(i + 1) + ", " +
                 std::to_string(j + 1) + ")";
        continue;
      }
      AdaptedLocalMetric alm(a, b, std::move(g));
      // The adapted product must reproduce the induced metric.
      PseudoFinslerMetric ind = induced_metric(imm);
      double res = 0.0;
      for_grid(probe, 5, [&](double x, double y) {
        for (double p : {-1.5, 0.25, 2.0}) {
          double u = eval_F(ind, x, y, p), v = eval_F(alm.metric(), x, y, p);
          res = std::max(res, std::abs(u - v) / (1.0 + std::abs(u)));
        }
      });
      if (res > 1e-9) {
        reason = "adapted product disagrees with the induced metric";
        continue;
      }
      return alm;
    }
  }
  if (why) *why = reason;
  return std::nullopt;
}

TruncatedSeries blowup_g_series(const AdaptedLocalMetric& alm, double y, double u, int order) {
  guard_discriminant(alm, 0.0, y);
  const PseudoFinslerMetric& m = alm.metric();
  const int W = order + 2;
  TruncatedSeries xs = TruncatedSeries::variable(W);
  TruncatedSeries ys(std::vector<double>{y}, W);
  auto c = chart_coeffs_generic<TruncatedSeries>(m, Chart::P, xs, ys);
  auto polys = field_polys(m.degree(), c);
  TruncatedSeries p = xs * TruncatedSeries(u);
  TruncatedSeries D = coef::horner(polys.delta, p);
  TruncatedSeries N = coef::horner(polys.P, p) - TruncatedSeries(u) * D;
  double tol = 1e-9 * std::max(1.0, m.scale_at(0.0, y));
  try {
    return N.divide_by_power(2, tol) / D.divide_by_power(2, tol);
  } catch (const SeriesError& e) {
    throw std::domain_error(std::string("blow-up series: ") + e.what());
  }
}

std::array<double, 3> blowup_field_at(const AdaptedLocalMetric& alm, double x, double y, double u) {
  guard_discriminant(alm, x, y);
  double g;
  if (std::abs(x) < 1e-2) {
    g = blowup_g_series(alm, y, u).eval(x);
  } else {
    const PseudoFinslerMetric& m = alm.metric();
    auto polys = field_polys(m.degree(), chart_coeffs(m, Chart::P, x, y));
    double p = x * u;
    double D = coef::horner(polys.delta, p);
    double P = coef::horner(polys.P, p);
    if (std::abs(D) < kZeroTolerance * x * x) throw std::domain_error("blow-up: Delta vanishes");
    g = (P - u * D) / D;
  }
  return {x, x * x * u, g};
}

std::array<double, 3> admissible_u(const AdaptedLocalMetric& alm, double x, double y) {
  double a = alm.a()(x, y), b = alm.b()(x, y);
  if (std::abs(b) < kZeroTolerance) throw std::domain_error("admissible_u: b vanishes");
  return {0.0, -a / (2.0 * b), -a / b};
}

Eigen::Matrix3d blowup_jacobian(const AdaptedLocalMetric& alm, double y0, double u) {
  auto g0 = [&](double y, double uu) { return blowup_g_series(alm, y, uu, 2)[0]; };
  auto five = [](auto&& f, double h) {
    return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
  };
  double hy = 1e-3 * std::max(1.0, std::abs(y0));
  double hu = 1e-3 * std::max(1.0, std::abs(u));
  Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
  J(0, 0) = 1.0;
  J(2, 0) = blowup_g_series(alm, y0, u, 3)[1];
  J(2, 1) = five([&](double h) { return g0(y0 + h, u); }, hy);
  J(2, 2) = five([&](double h) { return g0(y0, u + h); }, hu);
  return J;
}

std::array<double, 3> blowup_spectrum(const AdaptedLocalMetric& alm, double y0, int which) {
  if (which < 0 || which > 2) throw std::invalid_argument("blowup_spectrum: which must be 0, 1 or 2");
  double u = admissible_u(alm, 0.0, y0)[which];
  Eigen::EigenSolver<Eigen::Matrix3d> es(blowup_jacobian(alm, y0, u));
  int ix = 0, iz = 0;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(es.eigenvectors()(0, i)) > std::abs(es.eigenvectors()(0, ix))) ix = i;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (i != ix && std::abs(es.eigenvalues()[i]) < best) {
      best = std::abs(es.eigenvalues()[i]);
      iz = i;
    }
  }
  int iu = 3 - ix - iz;
  double lx = es.eigenvalues()[ix].real();
  return {1.0, es.eigenvalues()[iu].real() / lx, es.eigenvalues()[iz].real() / lx};
}

std::vector<FamilyMember> bm_family_shoot(const AdaptedLocalMetric& alm, double y0,
                                          const std::vector<double>& alphas,
                                          const IntegratorConfig& cfg, double eps) {
  double a = alm.a()(0.0, y0), b = alm.b()(0.0, y0);
  if (std::abs(a) < 1e-10 || std::abs(b) < 1e-10) {
    throw std::domain_error("bm_family_shoot: tangency of the isotropic lines is not of first order");
  }
  const int n = alm.degree();
  const double lambda = (n - 2.0) / n;
  const double u1 = -a / (2.0 * b);
  Eigen::Matrix3d J = blowup_jacobian(alm, y0, u1);
  const double c = J(2, 0) / (1.0 - J(2, 2));

  auto rhs = [&alm](double, const State<3>& s) {
    auto v = blowup_field_at(alm, s[0], s[1], s[2]);
    return State<3>{v[0], v[1], v[2]};
  };
  DormandPrince<3> dp(rhs, cfg.rtol, cfg.atol);

  auto run = [&](double alpha, double sgn) {
    GeodesicTrace tr;
    double x = sgn * eps, ax = std::abs(x);
    State<3> s{x, y0 + u1 * x * x / 2 + alpha * std::pow(ax, 2 + lambda) / (2 + lambda) + c * x * x * x / 3,
               u1 + alpha * std::pow(ax, lambda) + c * x};
    auto push = [&](double t, const State<3>& st) {
      tr.t.push_back(t);
      tr.points.push_back({st[0], st[1], st[0] * st[2], Chart::P});
    };
    double t = 0.0, h = cfg.initial_step;
    push(t, s);
    DenseStep<3> ds;
    for (int k = 0;; ++k) {
      if (k >= cfg.max_steps) {
        tr.events.push_back({tr.size() - 1, EventKind::MaxSteps});
        break;
      }
      bool ok;
      try {
        ok = dp.step(t, s, h, 1e-14, cfg.max_step, ds);
      } catch (const std::domain_error&) {
        tr.events.push_back({tr.size() - 1, EventKind::EvaluationFailure});
        break;
      }
      if (!ok) {
        tr.events.push_back({tr.size() - 1, EventKind::StepUnderflow});
        break;
      }
      double dist = std::hypot(ds.y1[0] - s[0], ds.y1[1] - s[1]);
      int sub = std::max(1, static_cast<int>(std::ceil(dist / cfg.sample_spacing)));
      bool left = false;
      for (int i = 1; i <= sub; ++i) {
        State<3> st = ds.at(static_cast<double>(i) / sub);
        if (!cfg.domain.contains(st[0], st[1])) {
          left = true;
          break;
        }
        push(ds.t0 + ds.h * i / sub, st);
      }
      if (left) {
        tr.events.push_back({tr.size() - 1, EventKind::DomainExit});
        break;
      }
      t = ds.t0 + ds.h;
      s = ds.y1;
    }
    return tr;
  };

  std::vector<FamilyMember> out;
  for (double alpha : alphas) {
    GeodesicTrace neg = run(alpha, -1.0), pos = run(alpha, 1.0);
    GeodesicTrace tr;
    std::size_t nn = neg.size();
    for (std::size_t i = nn; i-- > 0;) {
      tr.t.push_back(-neg.t[i]);
      tr.points.push_back(neg.points[i]);
    }
    for (const auto& e : neg.events) tr.events.push_back({nn - 1 - e.index, e.kind});
    for (std::size_t i = 0; i < pos.size(); ++i) {
      tr.t.push_back(pos.t[i]);
      tr.points.push_back(pos.points[i]);
    }
    for (const auto& e : pos.events) tr.events.push_back({nn + e.index, e.kind});
    std::sort(tr.events.begin(), tr.events.end(),
              [](const TraceEvent& l, const TraceEvent& r) { return l.index < r.index; });
    out.push_back({alpha, std::move(tr)});
  }
  return out;
}

}  // namespace pfgeo
