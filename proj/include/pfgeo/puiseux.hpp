// Geodesic families through a degenerate point as series under x = t^s:
// p(t) is solved order by order from Delta dp/dt - P dx/dt = 0, with
// dy = p dx and y(0) = 0.

#pragma once

#include <map>
#include <ostream>
#include <vector>

#include "pfgeo/metric.hpp"
#include "pfgeo/series.hpp"

namespace pfgeo {

enum class OrderStatus { Forced, Free, Obstructed };
const char* order_status_name(OrderStatus s);

struct OrderReport {
  int order = 0;
  double linear = 0.0;   // coefficient of a_k in the residual at order k + shift
  double forcing = 0.0;  // the same residual with a_k = 0
  OrderStatus status = OrderStatus::Forced;
  double value = 0.0;
};

struct FamilyReport {
  int s = 1;
  int shift = 0;               // a_k first enters the residual at order k + shift
  double normalization = 1.0;  // residual coefficients are divided by this
  TruncatedSeries p;
  std::vector<OrderReport> orders;

  bool consistent() const;
  std::vector<int> free_orders() const;
};

// Residual Delta p' - P x' of a p-series under x = t^s.
TruncatedSeries geodesic_residual(const PseudoFinslerMetric& m, int s, const TruncatedSeries& p,
                                  int order);

// Extends `seed` (the leading balance, exact through its last nonzero
// coefficient) to order N.  Free orders take their value from free_values,
// or 0.  Throws std::invalid_argument if the seed leaves a low-order residual.
FamilyReport solve_geodesic_series(const PseudoFinslerMetric& m, int s, const TruncatedSeries& seed,
                                   int N, const std::map<int, double>& free_values = {});

struct SeriesCurve {
  TruncatedSeries x, y;
};
SeriesCurve series_to_curve(const TruncatedSeries& p, int s, int N);

// Table: order, linear, forcing, status, value.
void write_family_report(std::ostream& os, const FamilyReport& r);

}  // namespace pfgeo
