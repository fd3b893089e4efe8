// Geodesics as integral curves of the direction field on the projectivized
// tangent bundle, in the two affine charts p = dy/dx and q = dx/dy.

#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "pfgeo/metric.hpp"

namespace pfgeo {

struct PTMPoint {
  double x = 0.0, y = 0.0, slope = 0.0;
  Chart chart = Chart::P;
};

// Same direction expressed in the other chart; slope must be nonzero.
PTMPoint switch_chart(const PTMPoint& pt);

enum class EventKind {
  Cusp,
  SingularApproach,
  ChartSwitch,
  IsotropicCross,
  DomainExit,
  MaxSteps,
  StepUnderflow,
  EvaluationFailure,
  ProjectionFailure,
};
const char* event_name(EventKind k);

struct TraceEvent {
  std::size_t index;
  EventKind kind;
};

struct GeodesicTrace {
  std::vector<double> t;
  std::vector<PTMPoint> points;
  std::vector<TraceEvent> events;

  std::size_t size() const { return points.size(); }
  bool has_event(EventKind k) const;
  std::vector<std::array<double, 2>> planar() const;
};

struct Box {
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
  bool contains(double x, double y) const {
    return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
  }
  // Positive inside, zero on the boundary.
  double margin(double x, double y) const;
};

struct IntegratorConfig {
  double initial_step = 1e-3;
  double max_step = 0.05;
  double rtol = 1e-10;
  double atol = 1e-12;
  int max_steps = 20000;
  double chart_threshold = 2.0;  // switch charts when |slope| exceeds this
  double event_tol = 1e-8;
  double isotropy_tol = 1e-9;
  double sample_spacing = 1e-3;  // densify output to about this spacing
  double max_length = std::numeric_limits<double>::infinity();  // per direction, in (x, y, slope)
  Box domain;
  bool bidirectional = true;
};

// (dx, dy, dslope) of the field in the point's chart.
std::array<double, 3> field_at(const PseudoFinslerMetric& m, const PTMPoint& pt);

// F, Delta and P in the point's chart.
struct ChartValues {
  double F, delta, P;
};
ChartValues chart_values(const PseudoFinslerMetric& m, const PTMPoint& pt);

GeodesicTrace integrate(const PseudoFinslerMetric& m, const PTMPoint& start,
                        const IntegratorConfig& cfg);

// One direction only: orientation +1 follows the field, -1 runs against it.
GeodesicTrace integrate_directed(const PseudoFinslerMetric& m, const PTMPoint& start,
                                 const IntegratorConfig& cfg, int orientation);

// Integration constrained to the isotropic surface F = 0: whenever |F|
// exceeds 10 isotropy_tol the slope is pulled back by Newton steps.
GeodesicTrace isotropic_trace(const PseudoFinslerMetric& m, const PTMPoint& start,
                              const IntegratorConfig& cfg);

// Tangent-bundle geodesic from the Euler-Lagrange system of Fbar, integrated
// in both time directions.  Stops where Hbar changes sign.
struct PlanarCurve {
  std::vector<double> t;
  std::vector<std::array<double, 2>> xy;
  bool truncated_at_degeneracy = false;
};
PlanarCurve tm_oracle_integrate(const PseudoFinslerMetric& m, double x, double y, double xdot,
                                double ydot, const IntegratorConfig& cfg);

struct ArcSample {
  double s, x, y;
};
// Cumulative |F|^(1/n) |dx| (|F~|^(1/n) |dy| in the Q-chart) by the
// trapezoid rule; the trace is split into segments where |F| drops below
// tol.
std::vector<std::vector<ArcSample>> arclength_reparam(const PseudoFinslerMetric& m,
                                                      const GeodesicTrace& trace,
                                                      double tol = 1e-9);

// One-parameter family of geodesics leaving a point q of the discriminant
// curve in the double isotropic direction p0.  Member alpha starts from the
// jet x = x_iso + alpha |eta|^(3/2), eta = +-eps, and is integrated away from
// q on both sides; the two halves are joined through q.  alpha = +-infinity
// selects the smooth geodesic along the fast eigendirection.
struct FamilyMember {
  double alpha;
  GeodesicTrace trace;
};
std::vector<FamilyMember> shoot_family_at_M01(const PseudoFinslerMetric& m, double x0, double y0,
                                              double p0, const std::vector<double>& alphas,
                                              const IntegratorConfig& cfg, double eps = 1e-3);

// Planar polyline helpers.
using Polyline = std::vector<std::array<double, 2>>;
double distance_to_polyline(const std::array<double, 2>& pt, const Polyline& line);
double directed_hausdorff(const Polyline& from, const Polyline& to);
double hausdorff(const Polyline& a, const Polyline& b);
// Restricts `b` to the stretch between its points nearest to the endpoints of
// `a`.
Polyline common_arc(const Polyline& a, const Polyline& b);

void write_trace_csv(std::ostream& os, const PseudoFinslerMetric& m, const GeodesicTrace& trace,
                     bool header = true);

}  // namespace pfgeo
