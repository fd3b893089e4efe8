#include "pfgeo/puiseux.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pfgeo {

const char* order_status_name(OrderStatus s) {
  switch (s) {
    case OrderStatus::Forced: return "FORCED";
    case OrderStatus::Free: return "FREE";
    case OrderStatus::Obstructed: return "OBSTRUCTED";
  }
  return "?";
}

bool FamilyReport::consistent() const {
  return std::none_of(orders.begin(), orders.end(),
                      [](const OrderReport& o) { return o.status == OrderStatus::Obstructed; });
}

std::vector<int> FamilyReport::free_orders() const {
  std::vector<int> out;
  for (const auto& o : orders) {
    if (o.status == OrderStatus::Free) out.push_back(o.order);
  }
  return out;
}

TruncatedSeries geodesic_residual(const PseudoFinslerMetric& m, int s, const TruncatedSeries& p,
                                  int order) {
  if (s < 1) throw std::invalid_argument("substitution exponent must be a positive integer");
  TruncatedSeries pw = p.truncated(order);
  TruncatedSeries x = TruncatedSeries::monomial(1.0, s, order);
  TruncatedSeries xd = x.derive();
  TruncatedSeries y = (pw * xd).integrate();
  auto polys = field_polys(m.degree(), chart_coeffs_generic<TruncatedSeries>(m, Chart::P, x, y));
  TruncatedSeries D = coef::horner(polys.delta, pw);
  TruncatedSeries P = coef::horner(polys.P, pw);
  return D * pw.derive() - P * xd;
}

namespace {

double leading_delta_coeff(const PseudoFinslerMetric& m) {
  auto polys = field_polys(m.degree(), chart_coeffs(m, Chart::P, 0.0, 0.0));
  double mx = 0.0;
  for (double c : polys.delta) mx = std::max(mx, std::abs(c));
  for (std::size_t i = polys.delta.size(); i-- > 0;) {
    if (std::abs(polys.delta[i]) > 1e-12 * mx) return polys.delta[i];
  }
  return 1.0;
}

TruncatedSeries with_coeff(const TruncatedSeries& p, int k, double v, int order) {
  std::vector<double> c = p.coeffs();
  if (static_cast<int>(c.size()) <= k) c.resize(k + 1, 0.0);
  c[k] = v;
  return TruncatedSeries(std::move(c), order);
}

}  // namespace

FamilyReport solve_geodesic_series(const PseudoFinslerMetric& m, int s, const TruncatedSeries& seed,
                                   int N, const std::map<int, double>& free_values) {
  const int W = N + 6 * s + 8;
  const int d = static_cast<int>(seed.coeffs().size()) - 1;
  if (d < 0) throw std::invalid_argument("seed is zero");
  if (N <= d) throw std::invalid_argument("requested order does not exceed the seed");

  FamilyReport rep;
  rep.s = s;
  rep.normalization = leading_delta_coeff(m);
  TruncatedSeries p(seed.coeffs(), W);
  const TruncatedSeries R0 = geodesic_residual(m, s, p, W);

  int shift = W;
  for (int k = d + 1; k <= d + 4; ++k) {
    TruncatedSeries diff = geodesic_residual(m, s, with_coeff(p, k, 1.0, W), W) - R0;
    for (int j = 0; j < W - 1; ++j) {
      if (std::abs(diff[j]) > 1e-12) {
        shift = std::min(shift, j - k);
        break;
      }
    }
  }
  if (shift == W) throw std::invalid_argument("higher coefficients never enter the residual");
  rep.shift = shift;

  const double tol = 1e-9 * std::max(1.0, std::abs(rep.normalization));
  for (int j = 0; j < d + 1 + shift; ++j) {
    if (std::abs(R0[j]) > tol) {
      throw std::invalid_argument("seed does not satisfy the leading balance (residual order " +
                                  std::to_string(j) + ")");
    }
  }

  for (int k = d + 1; k <= N; ++k) {
    OrderReport o;
    o.order = k;
    TruncatedSeries p0 = with_coeff(p, k, 0.0, W);
    double r0 = geodesic_residual(m, s, p0, W)[k + shift];
    // a_k enters order k + shift only against the seed, so the slope is taken
    // there; differencing the full residual loses digits to cancellation.
    const TruncatedSeries seed_w(seed.coeffs(), W);
    double r1 = geodesic_residual(m, s, with_coeff(seed_w, k, 1.0, W), W)[k + shift];
    o.forcing = r0 / rep.normalization;
    o.linear = (r1 - R0[k + shift]) / rep.normalization;
    if (std::abs(o.linear) > 1e-9) {
      o.status = OrderStatus::Forced;
      o.value = -o.forcing / o.linear;
    } else if (std::abs(o.forcing) <= 1e-9) {
      o.status = OrderStatus::Free;
      auto it = free_values.find(k);
      o.value = it == free_values.end() ? 0.0 : it->second;
    } else {
      o.status = OrderStatus::Obstructed;
      o.value = 0.0;
    }
    p = with_coeff(p, k, o.value, W);
    rep.orders.push_back(o);
  }
  rep.p = p.truncated(N);
  return rep;
}

SeriesCurve series_to_curve(const TruncatedSeries& p, int s, int N) {
  std::vector<double> y(static_cast<std::size_t>(N + s) + 1, 0.0);
  for (int i = 0; i <= N; ++i) y[i + s] = s * p[i] / (i + s);
  return {TruncatedSeries::monomial(1.0, s, N + s), TruncatedSeries(std::move(y), N + s)};
}

void write_family_report(std::ostream& os, const FamilyReport& r) {
  os << "order,linear,forcing,status,value\n";
  os.precision(15);
  for (const auto& o : r.orders) {
    // + 0.0 turns -0 into 0
    os << o.order << ',' << o.linear + 0.0 << ',' << o.forcing + 0.0 << ','
       << order_status_name(o.status) << ',' << o.value + 0.0 << '\n';
  }
}

}  // namespace pfgeo
