// Univariate polynomials in the slope variable.
//
// The `coef` helpers work on ascending coefficient vectors over any ring that
// provides + - * and construction from double (double, jets, truncated
// series).  RealPolynomial adds trimming, root extraction and resultants.

#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace pfgeo {

namespace coef {

template <class T>
std::vector<T> add(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> r(std::max(a.size(), b.size()), T(0.0));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = r[i] + a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = r[i] + b[i];
  return r;
}

template <class T>
std::vector<T> sub(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> r(std::max(a.size(), b.size()), T(0.0));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = r[i] + a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = r[i] - b[i];
  return r;
}

template <class T>
std::vector<T> mul(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<T> r(a.size() + b.size() - 1, T(0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
  }
  return r;
}

template <class T>
std::vector<T> scale(const std::vector<T>& a, double s) {
  std::vector<T> r(a);
  for (auto& v : r) v = v * T(s);
  return r;
}

template <class T>
std::vector<T> derive(const std::vector<T>& a) {
  if (a.size() <= 1) return {};
  std::vector<T> r(a.size() - 1, T(0.0));
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * T(static_cast<double>(i));
  return r;
}

// Multiplies by the indeterminate.
template <class T>
std::vector<T> shift(const std::vector<T>& a) {
  if (a.empty()) return {};
  std::vector<T> r;
  r.reserve(a.size() + 1);
  r.push_back(T(0.0));
  r.insert(r.end(), a.begin(), a.end());
  return r;
}

template <class T, class U>
U horner(const std::vector<T>& a, const U& p) {
  U r(0.0);
  for (std::size_t i = a.size(); i-- > 0;) r = r * p + U(a[i]);
  return r;
}

}  // namespace coef

// Coefficients whose magnitude is at most this fraction of the largest one
// are treated as zero when trimming the leading end.
inline constexpr double kTrimRelative = 1e-12;

class RealPolynomial {
 public:
  RealPolynomial() = default;
  // Trailing exact zeros are dropped; use trimmed() for the relative rule.
  explicit RealPolynomial(std::vector<double> ascending);
  RealPolynomial(std::initializer_list<double> ascending)
      : RealPolynomial(std::vector<double>(ascending)) {}

  static RealPolynomial from_roots(const std::vector<double>& roots);

  const std::vector<double>& coeffs() const noexcept { return c_; }
  // -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  double coeff(int i) const {
    return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : 0.0;
  }
  double leading() const { return c_.empty() ? 0.0 : c_.back(); }
  double max_abs_coeff() const;

  double operator()(double p) const { return coef::horner(c_, p); }
  std::complex<double> operator()(std::complex<double> p) const { return coef::horner(c_, p); }

  RealPolynomial derivative(int k = 1) const;
  RealPolynomial trimmed(double rel = kTrimRelative) const;

  friend RealPolynomial operator+(const RealPolynomial& a, const RealPolynomial& b);
  friend RealPolynomial operator-(const RealPolynomial& a, const RealPolynomial& b);
  friend RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b);
  friend RealPolynomial operator*(double s, const RealPolynomial& a);

  std::string str() const;

 private:
  std::vector<double> c_;
};

struct RealRoot {
  double value;
  int multiplicity;
};

// All complex roots (companion-matrix eigenvalues) of the trimmed polynomial.
std::vector<std::complex<double>> complex_roots(const RealPolynomial& poly);

// Real roots with multiplicities, ascending.  Roots are clustered and a
// cluster is reported as real when its centroid has a negligible imaginary
// part; each root is Newton polished on the derivative that has it as a
// simple root.
std::vector<RealRoot> real_roots(const RealPolynomial& poly);

// Sylvester-matrix determinant.  res(A, c) = c^deg A for a constant c.
double resultant(const RealPolynomial& a, const RealPolynomial& b);

// Discriminant of a quadratic or cubic, computed on the formal degree given
// (so a vanishing leading coefficient still counts as the root at infinity).
double discriminant_quadratic(double c0, double c1, double c2);
double discriminant_cubic(double c0, double c1, double c2, double c3);

}  // namespace pfgeo
