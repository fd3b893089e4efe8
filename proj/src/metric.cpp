#include "pfgeo/metric.hpp"

#include <algorithm>

namespace pfgeo {

PseudoFinslerMetric::PseudoFinslerMetric(int n, std::vector<ScalarField> coeffs)
    : n_(n), a_(std::move(coeffs)) {
  if (n_ < 2) throw std::invalid_argument("metric degree must be at least 2");
  if (a_.size() > static_cast<std::size_t>(n_) + 1) {
    throw std::invalid_argument("more than n+1 coefficients");
  }
  a_.resize(static_cast<std::size_t>(n_) + 1, ScalarField::constant(0.0));
  if (std::all_of(a_.begin(), a_.end(), [](const ScalarField& f) { return f.is_constant_zero(); })) {
    throw std::invalid_argument("all metric coefficients are identically zero");
  }
}

PseudoFinslerMetric PseudoFinslerMetric::parse(int n, const std::vector<std::string>& coeffs) {
  std::vector<ScalarField> a;
  a.reserve(coeffs.size());
  for (const auto& s : coeffs) a.push_back(ScalarField::parse(s));
  return PseudoFinslerMetric(n, std::move(a));
}

std::vector<double> PseudoFinslerMetric::coeffs_at(double x, double y) const {
  std::vector<double> v(a_.size());
  for (std::size_t i = 0; i < a_.size(); ++i) v[i] = a_[i](x, y);
  return v;
}

double PseudoFinslerMetric::scale_at(double x, double y) const {
  double s = 0.0;
  for (const auto& f : a_) s = std::max(s, std::abs(f(x, y)));
  return s;
}

PseudoFinslerMetric PseudoFinslerMetric::scaled(const ScalarField& kappa) const {
  std::vector<ScalarField> a;
  for (const auto& f : a_) a.emplace_back(kappa.expr() * f.expr());
  return PseudoFinslerMetric(n_, std::move(a));
}

ChartCoeffs<double> chart_coeffs(const PseudoFinslerMetric& m, Chart chart, double x, double y) {
  return chart_coeffs_generic<double>(m, chart, x, y);
}

ChartCoeffs<Jet> chart_coeff_jets(const PseudoFinslerMetric& m, Chart chart, double x, double y) {
  const int n = m.degree();
  auto jet = [&](const ScalarField& f) { return Jet(f(x, y), f.dx()(x, y), f.dy()(x, y)); };
  ChartCoeffs<Jet> c;
  c.a.resize(n + 1);
  c.a_ind.resize(n + 1);
  c.a_dep.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const ScalarField& f = m.coeff(chart == Chart::P ? i : n - i);
    c.a[i] = jet(f);
    c.a_ind[i] = jet(chart == Chart::P ? f.dx() : f.dy());
    c.a_dep[i] = jet(chart == Chart::P ? f.dy() : f.dx());
  }
  return c;
}

double eval_F(const PseudoFinslerMetric& m, double x, double y, double p) {
  return coef::horner(m.coeffs_at(x, y), p);
}

RealPolynomial F_poly(const PseudoFinslerMetric& m, double x, double y, Chart chart) {
  return RealPolynomial(chart_coeffs(m, chart, x, y).a);
}

RealPolynomial delta_poly(const PseudoFinslerMetric& m, double x, double y, Chart chart) {
  return RealPolynomial(field_polys(m.degree(), chart_coeffs(m, chart, x, y)).delta);
}

RealPolynomial p_poly(const PseudoFinslerMetric& m, double x, double y, Chart chart) {
  return RealPolynomial(field_polys(m.degree(), chart_coeffs(m, chart, x, y)).P);
}

FieldJet field_jet(const PseudoFinslerMetric& m, Chart chart, double x, double y, double slope) {
  auto polys = field_polys(m.degree(), chart_coeff_jets(m, chart, x, y));
  Jet d = coef::horner(polys.delta, Jet(slope));
  Jet P = coef::horner(polys.P, Jet(slope));
  auto slope_derivative = [slope](const std::vector<Jet>& c) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) r = r * slope + c[i].v * static_cast<double>(i);
    return r;
  };
  FieldJet out;
  out.delta = d.v;
  out.P = P.v;
  out.grad_delta = {d.dx, d.dy, slope_derivative(polys.delta)};
  out.grad_P = {P.dx, P.dy, slope_derivative(polys.P)};
  return out;
}

std::vector<ProjectiveRoot> isotropic_directions(const PseudoFinslerMetric& m, double x, double y) {
  RealPolynomial f = F_poly(m, x, y).trimmed();
  if (f.is_zero()) {
    throw DegeneratePointError("all metric coefficients vanish at the point");
  }
  std::vector<ProjectiveRoot> out;
  for (const auto& r : real_roots(f)) out.push_back({false, r.value, r.multiplicity});
  int deficiency = m.degree() - f.degree();
  if (deficiency > 0) out.push_back({true, 0.0, deficiency});
  return out;
}

const char* stratum_name(Stratum s) {
  switch (s) {
    case Stratum::MPlus: return "M+";
    case Stratum::MMinus: return "M-";
    case Stratum::M01: return "M01";
    case Stratum::M00: return "M00";
  }
  return "?";
}

namespace {
void require_cubic(const PseudoFinslerMetric& m) {
  if (m.degree() != 3) throw std::invalid_argument("operation defined for n = 3 only");
}
}  // namespace

double disc_F(const PseudoFinslerMetric& m, double x, double y) {
  require_cubic(m);
  auto a = m.coeffs_at(x, y);
  return discriminant_cubic(a[0], a[1], a[2], a[3]);
}

double disc_Delta(const PseudoFinslerMetric& m, double x, double y) {
  require_cubic(m);
  auto d = field_polys(3, chart_coeffs(m, Chart::P, x, y)).delta;
  d.resize(3, 0.0);
  return discriminant_quadratic(d[0], d[1], d[2]);
}

Stratum classify_point(const PseudoFinslerMetric& m, double x, double y) {
  require_cubic(m);
  double scale = m.scale_at(x, y);
  double s4 = scale * scale * scale * scale;
  double D = disc_F(m, x, y);
  if (D > kStratumTolerance * s4) return Stratum::MPlus;
  if (D < -kStratumTolerance * s4) return Stratum::MMinus;
  // On the discriminant curve: Delta vanishes identically exactly at a triple
  // root (possibly at infinity).
  RealPolynomial d = delta_poly(m, x, y);
  return d.max_abs_coeff() <= 1e-8 * scale * scale ? Stratum::M00 : Stratum::M01;
}

HBar oracle_H(const PseudoFinslerMetric& m, double x, double y, double xd, double yd) {
  const int n = m.degree();
  // sum over i of c_i * k(i) * xd^(ex(i)) * yd^(ey(i)); terms with k = 0 vanish.
  auto sum = [&](const std::vector<double>& c, auto weight, int dx_pow, int dy_pow) {
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      double w = weight(i);
      if (w == 0.0 || c[i] == 0.0) continue;
      int ex = n - i - dx_pow, ey = i - dy_pow;
      s += c[i] * w * std::pow(xd, ex) * std::pow(yd, ey);
    }
    return s;
  };
  std::vector<double> a(n + 1), ax(n + 1), ay(n + 1);
  for (int i = 0; i <= n; ++i) {
    const auto& f = m.coeff(i);
    a[i] = f(x, y);
    ax[i] = f.dx()(x, y);
    ay[i] = f.dy()(x, y);
  }
  auto one = [](int) { return 1.0; };
  auto kx = [n](int i) { return static_cast<double>(n - i); };
  auto ky = [](int i) { return static_cast<double>(i); };
  auto kxx = [n](int i) { return static_cast<double>((n - i) * (n - i - 1)); };
  auto kxy = [n](int i) { return static_cast<double>((n - i) * i); };
  auto kyy = [](int i) { return static_cast<double>(i * (i - 1)); };

  double Fx = sum(ax, one, 0, 0);
  double Fy = sum(ay, one, 0, 0);
  double Fxdxd = sum(a, kxx, 2, 0);
  double Fxdyd = sum(a, kxy, 1, 1);
  double Fydyd = sum(a, kyy, 0, 2);
  double Fxd_x = sum(ax, kx, 1, 0);
  double Fxd_y = sum(ay, kx, 1, 0);
  double Fyd_x = sum(ax, ky, 0, 1);
  double Fyd_y = sum(ay, ky, 0, 1);

  double G1 = Fx - xd * Fxd_x - yd * Fxd_y;
  double G2 = Fy - xd * Fyd_x - yd * Fyd_y;
  HBar h;
  h.H = Fxdxd * Fydyd - Fxdyd * Fxdyd;
  h.H1 = G1 * Fydyd - G2 * Fxdyd;
  h.H2 = Fxdxd * G2 - Fxdyd * G1;
  return h;
}

}  // namespace pfgeo
