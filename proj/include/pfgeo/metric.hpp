// Pseudo-Finsler metrics F(x, y; p) = sum a_i(x, y) p^i of degree n.
//
// The geodesic direction field on the projectivized tangent bundle is
//   Delta (d/dx + p d/dy) + P d/dp,
//   Delta = n F F_pp - (n-1) F_p^2,
//   P     = n F (F_y - F_xp - p F_yp) + (n-1) F_p (F_x + p F_y).
// Near vertical directions the Q-chart q = dx/dy is used; there the same
// formulas apply to the reversed coefficients a_{n-i} with x and y swapped.

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfgeo/expr.hpp"
#include "pfgeo/polynomial.hpp"

namespace pfgeo {

enum class Chart { P, Q };

inline const char* chart_name(Chart c) { return c == Chart::P ? "P" : "Q"; }

// First-order jet in the surface coordinates: value and d/dx, d/dy.
struct Jet {
  double v = 0.0, dx = 0.0, dy = 0.0;
  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  Jet(double value, double ddx, double ddy) : v(value), dx(ddx), dy(ddy) {}

  friend Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.dx + b.dx, a.dy + b.dy}; }
  friend Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.dx - b.dx, a.dy - b.dy}; }
  friend Jet operator-(const Jet& a) { return {-a.v, -a.dx, -a.dy}; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy};
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    double inv = 1.0 / b.v;
    return {a.v * inv, (a.dx - a.v * inv * b.dx) * inv, (a.dy - a.v * inv * b.dy) * inv};
  }
};

class DegeneratePointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PseudoFinslerMetric {
 public:
  PseudoFinslerMetric(int n, std::vector<ScalarField> coeffs);
  // Coefficient expressions a_0..a_n; missing trailing entries are zero.
  static PseudoFinslerMetric parse(int n, const std::vector<std::string>& coeffs);

  int degree() const noexcept { return n_; }
  const std::vector<ScalarField>& coeffs() const noexcept { return a_; }
  const ScalarField& coeff(int i) const { return a_.at(static_cast<std::size_t>(i)); }

  std::vector<double> coeffs_at(double x, double y) const;
  // Largest |a_i(x, y)|; the natural unit for the tolerances below.
  double scale_at(double x, double y) const;

  // Same metric multiplied by a positive field.
  PseudoFinslerMetric scaled(const ScalarField& kappa) const;

 private:
  int n_;
  std::vector<ScalarField> a_;
};

// Coefficients of F in a chart, with their partials along the chart's
// independent and dependent coordinates (x and y in the P-chart, y and x in
// the Q-chart).
template <class T>
struct ChartCoeffs {
  std::vector<T> a, a_ind, a_dep;
};

ChartCoeffs<double> chart_coeffs(const PseudoFinslerMetric& m, Chart chart, double x, double y);
// Jets carry d/dx and d/dy in the surface coordinates for every chart.
ChartCoeffs<Jet> chart_coeff_jets(const PseudoFinslerMetric& m, Chart chart, double x, double y);

// Evaluates the coefficient expressions on an arbitrary scalar type.
template <class T>
ChartCoeffs<T> chart_coeffs_generic(const PseudoFinslerMetric& m, Chart chart, const T& x,
                                    const T& y) {
  const int n = m.degree();
  ChartCoeffs<T> c;
  c.a.resize(n + 1, T(0.0));
  c.a_ind.resize(n + 1, T(0.0));
  c.a_dep.resize(n + 1, T(0.0));
  for (int i = 0; i <= n; ++i) {
    const ScalarField& f = m.coeff(chart == Chart::P ? i : n - i);
    c.a[i] = f.eval<T>(x, y);
    const ScalarField& fi = chart == Chart::P ? f.dx() : f.dy();
    const ScalarField& fd = chart == Chart::P ? f.dy() : f.dx();
    c.a_ind[i] = fi.eval<T>(x, y);
    c.a_dep[i] = fd.eval<T>(x, y);
  }
  return c;
}

template <class T>
struct FieldPolys {
  std::vector<T> delta;  // degree <= 2n-4
  std::vector<T> P;      // degree <= 2n-1
};

// Delta and P as polynomials in the slope, over any coefficient ring.  The
// top coefficients of the raw products cancel identically and are dropped.
template <class T>
FieldPolys<T> field_polys(int n, const ChartCoeffs<T>& c) {
  using std::vector;
  const vector<T>& F = c.a;
  vector<T> Fp = coef::derive(F);
  vector<T> Fpp = coef::derive(Fp);
  const vector<T>& Fx = c.a_ind;
  const vector<T>& Fy = c.a_dep;
  vector<T> Fxp = coef::derive(Fx);
  vector<T> Fyp = coef::derive(Fy);

  FieldPolys<T> out;
  out.delta = coef::sub(coef::scale(coef::mul(F, Fpp), n),
                        coef::scale(coef::mul(Fp, Fp), n - 1));
  vector<T> inner = coef::sub(coef::sub(Fy, Fxp), coef::shift(Fyp));
  vector<T> outer = coef::add(Fx, coef::shift(Fy));
  out.P = coef::add(coef::scale(coef::mul(F, inner), n),
                    coef::scale(coef::mul(Fp, outer), n - 1));
  std::size_t dmax = static_cast<std::size_t>(std::max(0, 2 * n - 4)) + 1;
  std::size_t pmax = static_cast<std::size_t>(2 * n - 1) + 1;
  if (out.delta.size() > dmax) out.delta.resize(dmax);
  if (out.P.size() > pmax) out.P.resize(pmax);
  return out;
}

double eval_F(const PseudoFinslerMetric& m, double x, double y, double p);
RealPolynomial F_poly(const PseudoFinslerMetric& m, double x, double y, Chart chart = Chart::P);
RealPolynomial delta_poly(const PseudoFinslerMetric& m, double x, double y, Chart chart = Chart::P);
RealPolynomial p_poly(const PseudoFinslerMetric& m, double x, double y, Chart chart = Chart::P);

// Values and gradients of Delta and P in the chart coordinates
// (x, y, slope).
struct FieldJet {
  double delta = 0.0, P = 0.0;
  std::array<double, 3> grad_delta{}, grad_P{};
};
FieldJet field_jet(const PseudoFinslerMetric& m, Chart chart, double x, double y, double slope);

struct ProjectiveRoot {
  bool at_infinity = false;
  double value = 0.0;
  int multiplicity = 1;
};

// Real roots of F(x, y; .) with multiplicity; the degree deficiency from n
// is the multiplicity at p = infinity.  Throws DegeneratePointError if all
// coefficients vanish.
std::vector<ProjectiveRoot> isotropic_directions(const PseudoFinslerMetric& m, double x, double y);

enum class Stratum { MPlus, MMinus, M01, M00 };
const char* stratum_name(Stratum s);

// n = 3 only.
double disc_F(const PseudoFinslerMetric& m, double x, double y);
double disc_Delta(const PseudoFinslerMetric& m, double x, double y);
// |D_F| <= 1e-10 scale^4 is the discriminant curve.
Stratum classify_point(const PseudoFinslerMetric& m, double x, double y);
inline constexpr double kStratumTolerance = 1e-10;

// Determinants of the tangent-bundle Euler-Lagrange system for
// Fbar(x, y; xdot, ydot) = sum a_i xdot^(n-i) ydot^i, built directly from
// second partials of Fbar.
struct HBar {
  double H = 0.0, H1 = 0.0, H2 = 0.0;
};
HBar oracle_H(const PseudoFinslerMetric& m, double x, double y, double xdot, double ydot);

}  // namespace pfgeo
