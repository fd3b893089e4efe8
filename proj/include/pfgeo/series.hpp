// Truncated power series in one parameter t.
//
// A series of order N is exact through t^N.  Constants built from a double
// are exact to every order, so they never lower the order of a result.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pfgeo {

class SeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TruncatedSeries {
 public:
  static constexpr int kExact = 1 << 20;
  // Series quotients of exact operands are cut at this order.
  static constexpr int kDefaultOrder = 32;

  TruncatedSeries() : order_(kExact) {}
  TruncatedSeries(double c) : order_(kExact), c_{c} { trim(); }  // NOLINT(google-explicit-constructor)
  TruncatedSeries(std::vector<double> coeffs, int order) : order_(order), c_(std::move(coeffs)) {
    if (order_ < 0) throw SeriesError("negative series order");
    trim();
  }
  static TruncatedSeries variable(int order) { return TruncatedSeries({0.0, 1.0}, order); }
  static TruncatedSeries monomial(double c, int k, int order) {
    std::vector<double> v(static_cast<std::size_t>(k) + 1, 0.0);
    v[k] = c;
    return TruncatedSeries(std::move(v), order);
  }

  int order() const noexcept { return order_; }
  bool exact() const noexcept { return order_ == kExact; }
  double operator[](int k) const {
    return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : 0.0;
  }
  const std::vector<double>& coeffs() const noexcept { return c_; }
  TruncatedSeries truncated(int order) const { return TruncatedSeries(c_, std::min(order, order_)); }

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    int n = std::min(a.order_, b.order_);
    std::vector<double> r(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
    return TruncatedSeries(std::move(r), n);
  }
  friend TruncatedSeries operator-(const TruncatedSeries& a) {
    TruncatedSeries r = a;
    for (auto& v : r.c_) v = -v;
    return r;
  }
  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) { return a + (-b); }
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    int n = std::min(a.order_, b.order_);
    if (a.c_.empty() || b.c_.empty()) return TruncatedSeries({}, n);
    std::size_t len = a.c_.size() + b.c_.size() - 1;
    if (n != kExact) len = std::min(len, static_cast<std::size_t>(n) + 1);
    std::vector<double> r(len, 0.0);
    for (std::size_t i = 0; i < a.c_.size() && i < len; ++i) {
      if (a.c_[i] == 0.0) continue;
      for (std::size_t j = 0; j < b.c_.size() && i + j < len; ++j) r[i + j] += a.c_[i] * b.c_[j];
    }
    return TruncatedSeries(std::move(r), n);
  }
  friend TruncatedSeries operator/(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (std::abs(b[0]) < 1e-300) throw SeriesError("series division by a series with zero constant term");
    int n = std::min(a.order_, b.order_);
    if (n == kExact) {
      if (b.c_.size() == 1) {
        TruncatedSeries r = a;
        for (auto& v : r.c_) v /= b.c_[0];
        return r;
      }
      n = kDefaultOrder;
    }
    std::vector<double> q(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
      double s = a[k];
      for (int j = 1; j <= k; ++j) s -= b[j] * q[k - j];
      q[k] = s / b[0];
    }
    return TruncatedSeries(std::move(q), n);
  }

  TruncatedSeries derive() const {
    std::vector<double> r;
    for (std::size_t i = 1; i < c_.size(); ++i) r.push_back(c_[i] * static_cast<double>(i));
    return TruncatedSeries(std::move(r), exact() ? kExact : std::max(0, order_ - 1));
  }
  // Antiderivative with zero constant term.
  TruncatedSeries integrate() const {
    std::vector<double> r(c_.size() + 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) r[i + 1] = c_[i] / static_cast<double>(i + 1);
    return TruncatedSeries(std::move(r), exact() ? kExact : order_ + 1);
  }
  // t -> lambda t.
  TruncatedSeries compose_scale(double lambda) const {
    TruncatedSeries r = *this;
    double f = 1.0;
    for (auto& v : r.c_) {
      v *= f;
      f *= lambda;
    }
    return r;
  }
  // Division by t^k; the dropped coefficients must be negligible.
  TruncatedSeries divide_by_power(int k, double tol) const {
    for (int i = 0; i < k; ++i) {
      if (std::abs((*this)[i]) > tol) throw SeriesError("series is not divisible by the requested power");
    }
    std::vector<double> r;
    for (std::size_t i = static_cast<std::size_t>(k); i < c_.size(); ++i) r.push_back(c_[i]);
    return TruncatedSeries(std::move(r), exact() ? kExact : std::max(0, order_ - k));
  }
  double eval(double t) const {
    double r = 0.0;
    for (std::size_t i = c_.size(); i-- > 0;) r = r * t + c_[i];
    return r;
  }

 private:
  void trim() {
    if (order_ != kExact && c_.size() > static_cast<std::size_t>(order_) + 1) c_.resize(order_ + 1);
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }

  int order_;
  std::vector<double> c_;
};

}  // namespace pfgeo
