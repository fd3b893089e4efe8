// Shared helpers for the test binaries: seeded random expressions and metrics.

#pragma once

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pfgeo/metric.hpp"

namespace pfgeo::fixtures {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  if (v < 0) os << "(" << v << ")";
  else os << v;
  return os.str();
}

// Random polynomial in x, y of total degree <= deg with coefficients in [-1, 1].
inline std::string random_poly_text(std::mt19937_64& rng, int deg) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::string s = fmt(u(rng));
  for (int i = 0; i <= deg; ++i) {
    for (int j = 0; i + j <= deg; ++j) {
      if (i + j == 0) continue;
      s += " + " + fmt(u(rng)) + "*x^" + std::to_string(i) + "*y^" + std::to_string(j);
    }
  }
  return s;
}

// Random expression tree exercising every node kind.  Denominators are kept
// away from zero on [-1, 1]^2.
inline std::string random_expr_text(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 6);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  if (depth == 0) {
    switch (pick(rng) % 3) {
      case 0: return "x";
      case 1: return "y";
      default: return fmt(u(rng));
    }
  }
  std::string a = random_expr_text(rng, depth - 1);
  std::string b = random_expr_text(rng, depth - 1);
  switch (pick(rng)) {
    case 0: return "(" + a + " + " + b + ")";
    case 1: return "(" + a + " - " + b + ")";
    case 2: return "(" + a + " * " + b + ")";
    case 3: return "(" + a + ") / (3 + (" + b + ")^2)";
    case 4: return "-(" + a + ")";
    case 5: return "(" + a + ")^" + std::to_string(pick(rng) % 3 + 1);
    default: return "(" + a + " * x - y)";
  }
}

inline PseudoFinslerMetric random_metric(std::mt19937_64& rng, int n, int deg) {
  std::vector<std::string> a;
  for (int i = 0; i <= n; ++i) a.push_back(random_poly_text(rng, deg));
  return PseudoFinslerMetric::parse(n, a);
}

inline double rel_err(double a, double b, double floor = 1.0) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace pfgeo::fixtures
