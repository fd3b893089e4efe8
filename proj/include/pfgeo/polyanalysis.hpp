// Multiple-root structure of Phi(p) = prod (p + gamma_i) and of
// Delta = n Phi Phi'' - (n-1) Phi'^2.

#pragma once

#include <string>
#include <vector>

#include "pfgeo/polynomial.hpp"

namespace pfgeo {

struct RootedPolynomial {
  std::vector<double> gammas;  // Phi(p) = prod (p + gamma_i)
  int degree() const { return static_cast<int>(gammas.size()); }
  RealPolynomial expand() const;
};

RealPolynomial delta_from_phi(const RealPolynomial& phi, int n);

// n sum a_i^2 - (sum a_i)^2; nonnegative, zero iff all a_i are equal.
double varphi(const std::vector<double>& alpha);

// The multiple-root correspondence between Phi and Delta is only claimed
// when Phi splits over the reals; with complex roots it can fail.
enum class RootRegime { FullyReal, ComplexRoots };
RootRegime root_regime(const RealPolynomial& phi, int n);

struct DoubleRootCheck {
  double root = 0.0;
  int delta_multiplicity = 0;
  double delta_second = 0.0;     // Delta''(root)
  double expected_second = 0.0;  // (2 - n) Phi''(root)^2
  bool ok = false;
};

struct Lemma4Report {
  bool all_roots_equal = false;
  bool delta_identically_zero = false;
  std::vector<double> multiple_roots;  // multiple real roots of Phi, i.e. -gamma
  std::vector<double> delta_roots;     // real roots of Delta
  std::vector<DoubleRootCheck> double_roots;
  bool part_a = false, part_b = false, part_c = false;
  bool holds() const { return part_a && part_b && part_c; }
  std::string summary() const;
};

Lemma4Report check_lemma4(const RootedPolynomial& phi, double tol = 1e-6);

}  // namespace pfgeo
