// Singular points of the geodesic direction field, their spectra, and the
// planar curves that organize them: the discriminant curve, the curves S_i
// where P vanishes along a root of Delta, and singular lines.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pfgeo/flow.hpp"
#include "pfgeo/metric.hpp"

namespace pfgeo {

class WrongStratumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The two simple real roots of Delta at a point of M-, ascending.
std::pair<double, double> singular_roots(const PseudoFinslerMetric& m, double x, double y);

// Derivative of (Delta, slope Delta, P) with respect to (x, y, slope).
Eigen::Matrix3d jacobian_at(const PseudoFinslerMetric& m, double x, double y, double slope,
                            Chart chart = Chart::P);

enum class SingularKind { RealPair, ImaginaryPair, Resonant32, Degenerate, NotApplicable };
const char* singular_kind_name(SingularKind k);

struct SingularPoint {
  double x = 0.0, y = 0.0, slope = 0.0;
  Chart chart = Chart::P;
  Eigen::Matrix3d jacobian = Eigen::Matrix3d::Zero();
  std::array<std::complex<double>, 3> eigenvalues{};  // ascending magnitude
  SingularKind kind = SingularKind::NotApplicable;
  std::string note;
};

// ||(Delta, P)|| below this times (1 + scale)^2 counts as singular.
inline constexpr double kSingularTolerance = 1e-8;

SingularPoint classify_singular(const PseudoFinslerMetric& m, const PTMPoint& pt);

// Gradient of D_F along (1, p0) relative to max(1, scale)^4; the point is
// transversal when this exceeds 1e-6.
double m01_transversality(const PseudoFinslerMetric& m, double x, double y, double p0);

enum class CurveLabel { M0, S1, S2, SingularLineNet, Locus };
const char* curve_label_name(CurveLabel l);

struct CurveSamples {
  CurveLabel label = CurveLabel::Locus;
  std::vector<std::array<double, 2>> points;
  std::vector<double> slope;  // lifted slope per point, if any
};

// Marching squares on a resolution x resolution grid, each crossing polished
// by Newton steps along the gradient; points that fail to converge to
// |g| < polish_tol are dropped.
std::vector<CurveSamples> trace_implicit_curve(const std::function<double(double, double)>& g,
                                               const Box& box, int resolution = 200,
                                               double polish_tol = 1e-8,
                                               CurveLabel label = CurveLabel::Locus);
std::vector<CurveSamples> trace_implicit_curve(const ScalarField& g, const Box& box,
                                               int resolution = 200, double polish_tol = 1e-8,
                                               CurveLabel label = CurveLabel::Locus);

// Discriminant curve D_F = 0 (n = 3).
std::vector<CurveSamples> trace_discriminant_curve(const PseudoFinslerMetric& m, const Box& box,
                                                   int resolution = 200);

// res_p(Delta, P) at a point, with Delta and P taken at their exact degrees.
double delta_p_resultant(const PseudoFinslerMetric& m, double x, double y);

// Curves S_1, S_2; each sample carries the Delta-root that annihilates P.
std::vector<CurveSamples> trace_S_curves(const PseudoFinslerMetric& m, const Box& box,
                                         int resolution = 200);

// Lifts an (x, y) point of M- to the Delta-root minimizing |P|; returns the
// root index (0 = lower) and the root.
std::pair<int, double> lift_to_S(const PseudoFinslerMetric& m, double x, double y);

struct TangencyReport {
  double x = 0.0, y = 0.0, slope = 0.0;
  int branch = 0;                              // 0 for S_1, 1 for S_2
  std::array<double, 2> tangent{};             // unit tangent of S_i
  double sine = 0.0;                           // sin of the angle between (1, p_i) and S_i
  bool transversal = false;
  bool eigen_nonzero = false;                  // both nonzero eigenvalues present
  std::array<std::complex<double>, 3> eigenvalues{};
};

// Polishes (x, y) onto S_i and reports whether p_i crosses it.
TangencyReport tangency_direction_on_S(const PseudoFinslerMetric& m, double x, double y);

// Points of S_i where p_i is tangent to S_i, found as sign changes of the
// transversality determinant along traced S_i curves, refined by Newton on
// the pair (res, det).
std::vector<TangencyReport> locate_S_tangencies(const PseudoFinslerMetric& m, const Box& box,
                                                int resolution = 200);

// Real roots of the cubic P at a point of the discriminant curve of an n = 2
// metric.  Only finite slopes are reported.
std::vector<double> admissible_directions_n2(const PseudoFinslerMetric& m, double x, double y);

// Integral curve of dy/dx = p_i(x, y) (branch 0 lower root, 1 upper root)
// through (x0, y0), followed in both directions until it leaves M- or the box.
CurveSamples trace_singular_line(const PseudoFinslerMetric& m, double x0, double y0, int branch,
                                 const Box& box, double max_length = 10.0);

}  // namespace pfgeo
