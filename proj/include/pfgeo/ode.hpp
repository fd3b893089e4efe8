// Dormand-Prince 5(4) with the Hairer continuous extension.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>

namespace pfgeo {

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct DenseStep {
  double t0 = 0.0, h = 0.0;
  State<N> y0{}, y1{};
  std::array<State<N>, 5> r{};

  // theta in [0, 1] maps to t0 + theta h.
  State<N> at(double theta) const {
    State<N> y;
    double s = 1.0 - theta;
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = r[0][i] + theta * (r[1][i] + s * (r[2][i] + theta * (r[3][i] + s * r[4][i])));
    }
    return y;
  }
};

template <std::size_t N>
class DormandPrince {
 public:
  using Rhs = std::function<State<N>(double, const State<N>&)>;

  DormandPrince(Rhs f, double rtol, double atol) : f_(std::move(f)), rtol_(rtol), atol_(atol) {}

  // Takes one accepted step from (t, y), adapting h in place.  Returns false
  // if the step size falls below hmin.
  bool step(double t, const State<N>& y, double& h, double hmin, double hmax, DenseStep<N>& out) const {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    State<N> k1 = f_(t, y);
    while (true) {
      h = std::min(h, hmax);
      if (h < hmin) return false;
      State<N> tmp, k2, k3, k4, k5, k6, k7, y1, err;
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
      k2 = f_(t + c2 * h, tmp);
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
      k3 = f_(t + c3 * h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      k4 = f_(t + c4 * h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      k5 = f_(t + c5 * h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      k6 = f_(t + h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      k7 = f_(t + h, y1);

      double norm = 0.0;
      bool finite = true;
      for (std::size_t i = 0; i < N; ++i) {
        err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        double sc = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y1[i]));
        norm += (err[i] / sc) * (err[i] / sc);
        finite = finite && std::isfinite(y1[i]);
      }
      norm = std::sqrt(norm / N);
      if (!finite || !std::isfinite(norm)) {
        h *= 0.25;
        continue;
      }
      if (norm <= 1.0) {
        out.t0 = t;
        out.h = h;
        out.y0 = y;
        out.y1 = y1;
        for (std::size_t i = 0; i < N; ++i) {
          double dy = y1[i] - y[i];
          double bspl = h * k1[i] - dy;
          out.r[0][i] = y[i];
          out.r[1][i] = dy;
          out.r[2][i] = bspl;
          out.r[3][i] = dy - h * k7[i] - bspl;
          out.r[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                             d7 * k7[i]);
        }
        double fac = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
        h *= fac;
        return true;
      }
      h *= std::max(0.2, 0.9 * std::pow(norm, -0.2));
    }
  }

 private:
  Rhs f_;
  double rtol_, atol_;
};

// Smallest theta in (0, 1] where g changes sign from its value at theta = 0,
// located by bisection until the parameter interval is below dt_tol / h.
template <std::size_t N, class G>
double bisect_event(const DenseStep<N>& s, G&& g, double dt_tol) {
  double lo = 0.0, hi = 1.0;
  double glo = g(s.at(lo));
  double tol = s.h > 0 ? dt_tol / s.h : dt_tol;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    double gm = g(s.at(mid));
    if ((gm > 0) == (glo > 0) && gm != 0.0) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace pfgeo
