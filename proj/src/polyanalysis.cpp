#include "pfgeo/polyanalysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pfgeo {

RealPolynomial RootedPolynomial::expand() const {
  std::vector<double> roots;
  for (double g : gammas) roots.push_back(-g);
  return RealPolynomial::from_roots(roots);
}

RealPolynomial delta_from_phi(const RealPolynomial& phi, int n) {
  RealPolynomial d1 = phi.derivative(), d2 = phi.derivative(2);
  return static_cast<double>(n) * (phi * d2) - static_cast<double>(n - 1) * (d1 * d1);
}

double varphi(const std::vector<double>& alpha) {
  double s = 0.0, s2 = 0.0;
  for (double a : alpha) {
    s += a;
    s2 += a * a;
  }
  return static_cast<double>(alpha.size()) * s2 - s * s;
}

RootRegime root_regime(const RealPolynomial& phi, int n) {
  int real_count = 0;
  for (const auto& r : real_roots(phi)) real_count += r.multiplicity;
  int at_infinity = n - phi.trimmed().degree();
  return real_count + at_infinity == n ? RootRegime::FullyReal : RootRegime::ComplexRoots;
}

std::string Lemma4Report::summary() const {
  std::ostringstream os;
  os << "(a) " << (part_a ? "ok" : "FAIL") << "  (b) " << (part_b ? "ok" : "FAIL") << "  (c) "
     << (part_c ? "ok" : "FAIL") << "  multiple roots:";
  for (double r : multiple_roots) os << ' ' << r;
  os << "  Delta roots:";
  for (double r : delta_roots) os << ' ' << r;
  return os.str();
}

Lemma4Report check_lemma4(const RootedPolynomial& rp, double tol) {
  const int n = rp.degree();
  RealPolynomial phi = rp.expand();
  RealPolynomial delta = delta_from_phi(phi, n);
  Lemma4Report rep;

  std::vector<double> roots;
  for (double g : rp.gammas) roots.push_back(-g);
  std::sort(roots.begin(), roots.end());
  double span = roots.empty() ? 0.0 : roots.back() - roots.front();
  double mag = 1.0;
  for (double r : roots) mag = std::max(mag, std::abs(r));
  rep.all_roots_equal = span <= 1e-9 * mag;
  double phi_scale = phi.max_abs_coeff();
  rep.delta_identically_zero =
      delta.max_abs_coeff() <= 1e-12 * std::max(1.0, n * n * phi_scale * phi_scale);
  rep.part_a = rep.all_roots_equal == rep.delta_identically_zero;

  // Group the prescribed roots; groups of size >= 2 are the multiple roots.
  std::vector<std::pair<double, int>> groups;
  for (double r : roots) {
    if (!groups.empty() && std::abs(r - groups.back().first) <= tol * (1.0 + std::abs(r))) {
      groups.back().second += 1;
    } else {
      groups.push_back({r, 1});
    }
  }
  for (const auto& g : groups) {
    if (g.second >= 2) rep.multiple_roots.push_back(g.first);
  }

  if (rep.delta_identically_zero) {
    rep.part_b = rep.all_roots_equal;
    rep.part_c = true;
    return rep;
  }

  for (const auto& r : real_roots(delta)) rep.delta_roots.push_back(r.value);
  auto near_any = [tol](double v, const std::vector<double>& set) {
    return std::any_of(set.begin(), set.end(),
                       [&](double s) { return std::abs(v - s) <= tol * (1.0 + std::abs(s)); });
  };
  rep.part_b = true;
  for (double r : rep.delta_roots) rep.part_b = rep.part_b && near_any(r, rep.multiple_roots);
  for (double r : rep.multiple_roots) rep.part_b = rep.part_b && near_any(r, rep.delta_roots);

  rep.part_c = true;
  if (n >= 3) {
    auto delta_roots_mult = real_roots(delta);
    for (const auto& g : groups) {
      if (g.second != 2) continue;
      DoubleRootCheck c;
      c.root = g.first;
      for (const auto& r : delta_roots_mult) {
        if (std::abs(r.value - g.first) <= tol * (1.0 + std::abs(g.first))) {
          c.delta_multiplicity = r.multiplicity;
        }
      }
      double phi2 = phi.derivative(2)(g.first);
      c.delta_second = delta.derivative(2)(g.first);
      c.expected_second = (2.0 - n) * phi2 * phi2;
      c.ok = c.delta_multiplicity == 2 &&
             std::abs(c.delta_second - c.expected_second) <=
                 tol * std::max(1.0, std::abs(c.expected_second));
      rep.part_c = rep.part_c && c.ok;
      rep.double_roots.push_back(c);
    }
  }
  return rep;
}

}  // namespace pfgeo
