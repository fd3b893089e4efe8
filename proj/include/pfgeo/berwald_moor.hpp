// Metrics induced on surfaces x_i = f_i(x, y) in Berwald-Moor space, where
// F = prod_i (f_ix + f_iy p), and the blow-up p = x u of the field near a
// line of double isotropic directions.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pfgeo/expr.hpp"
#include "pfgeo/flow.hpp"
#include "pfgeo/metric.hpp"
#include "pfgeo/series.hpp"
#include "pfgeo/singular.hpp"

namespace pfgeo {

struct SurfaceImmersion {
  std::vector<ScalarField> f;

  int n() const { return static_cast<int>(f.size()); }
  // Throws std::invalid_argument if n < 3 or some df_i vanishes at a probe
  // point of an 11 x 11 grid over the box.
  void validate(const Box& probe) const;
};

// prod (l0 + l1 p) over the factors, expanded in p.
std::vector<Expr> expand_linear_factors(const std::vector<std::pair<Expr, Expr>>& factors);

PseudoFinslerMetric induced_metric(const SurfaceImmersion& imm);

// Zero set of f_ix f_jy - f_iy f_jx (0-based i, j).
std::vector<CurveSamples> double_direction_locus(const SurfaceImmersion& imm, int i, int j,
                                                 const Box& box, int resolution = 200);

// F = p (a x + b p) G with G = prod_k (g_kx + g_ky p).
class AdaptedLocalMetric {
 public:
  AdaptedLocalMetric(ScalarField a, ScalarField b,
                     std::vector<std::pair<ScalarField, ScalarField>> g);

  const ScalarField& a() const noexcept { return a_; }
  const ScalarField& b() const noexcept { return b_; }
  const std::vector<std::pair<ScalarField, ScalarField>>& g() const noexcept { return g_; }
  int degree() const noexcept { return 2 + static_cast<int>(g_.size()); }
  const PseudoFinslerMetric& metric() const noexcept { return metric_; }

 private:
  ScalarField a_, b_;
  std::vector<std::pair<ScalarField, ScalarField>> g_;
  PseudoFinslerMetric metric_;
};

// Looks for a pair with f_j = y and f_ix = x a(x, y), i.e. an immersion
// already written in the adapted chart.  On failure returns nullopt and
// fills `why`.
std::optional<AdaptedLocalMetric> adapted_from_immersion(const SurfaceImmersion& imm,
                                                         const Box& probe,
                                                         std::string* why = nullptr);

// Components of the blown-up field x (d/dx + x u d/dy) + g d/du with
// g = (P - u Delta) / Delta at p = x u.  Near x = 0 the quotient is taken
// in series in x.  Throws std::domain_error where n (2 - n) (ab)^2 >= -1e-12.
std::array<double, 3> blowup_field_at(const AdaptedLocalMetric& alm, double x, double y, double u);

// g(x, y, u) near x = 0 as a series in x.
TruncatedSeries blowup_g_series(const AdaptedLocalMetric& alm, double y, double u, int order = 10);

// u0 = 0, u1 = -a / 2b, u2 = -a / b.
std::array<double, 3> admissible_u(const AdaptedLocalMetric& alm, double x, double y);

Eigen::Matrix3d blowup_jacobian(const AdaptedLocalMetric& alm, double y0, double u);

// Eigenvalues at (0, y0, u_which) divided by the x-eigenvalue, ordered
// (x-eigenvalue, u-eigenvalue, zero).
std::array<double, 3> blowup_spectrum(const AdaptedLocalMetric& alm, double y0, int which);

// Geodesics through (0, y0) with u -> u1, the unstable node of the blown-up
// field: u = u1 + alpha |x|^lambda + ..., lambda = (n - 2) / n.  Each member
// is started at x = -eps and x = +eps and the halves are joined.
std::vector<FamilyMember> bm_family_shoot(const AdaptedLocalMetric& alm, double y0,
                                          const std::vector<double>& alphas,
                                          const IntegratorConfig& cfg, double eps = 1e-3);

}  // namespace pfgeo
