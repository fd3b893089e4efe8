#include "pfgeo/polynomial.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <sstream>

namespace pfgeo {

RealPolynomial::RealPolynomial(std::vector<double> ascending) : c_(std::move(ascending)) {
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

RealPolynomial RealPolynomial::from_roots(const std::vector<double>& roots) {
  std::vector<double> c{1.0};
  for (double r : roots) c = coef::mul(c, std::vector<double>{-r, 1.0});
  return RealPolynomial(std::move(c));
}

double RealPolynomial::max_abs_coeff() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

RealPolynomial RealPolynomial::derivative(int k) const {
  std::vector<double> c = c_;
  for (int i = 0; i < k; ++i) c = coef::derive(c);
  return RealPolynomial(std::move(c));
}

RealPolynomial RealPolynomial::trimmed(double rel) const {
  double cut = rel * max_abs_coeff();
  std::vector<double> c = c_;
  while (!c.empty() && std::abs(c.back()) <= cut) c.pop_back();
  return RealPolynomial(std::move(c));
}

RealPolynomial operator+(const RealPolynomial& a, const RealPolynomial& b) {
  return RealPolynomial(coef::add(a.c_, b.c_));
}
RealPolynomial operator-(const RealPolynomial& a, const RealPolynomial& b) {
  return RealPolynomial(coef::sub(a.c_, b.c_));
}
RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b) {
  return RealPolynomial(coef::mul(a.c_, b.c_));
}
RealPolynomial operator*(double s, const RealPolynomial& a) {
  return RealPolynomial(coef::scale(a.c_, s));
}

std::string RealPolynomial::str() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (std::size_t i = c_.size(); i-- > 0;) {
    if (c_[i] == 0.0) continue;
    if (!first) os << (c_[i] < 0 ? " - " : " + ");
    else if (c_[i] < 0) os << "-";
    os << std::abs(c_[i]);
    if (i >= 1) os << "*p";
    if (i >= 2) os << "^" << i;
    first = false;
  }
  return os.str();
}

std::vector<std::complex<double>> complex_roots(const RealPolynomial& poly) {
  RealPolynomial t = poly.trimmed();
  int d = t.degree();
  if (d <= 0) return {};
  const auto& c = t.coeffs();
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) comp(i, d - 1) = -c[i] / c[d];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<std::complex<double>> out(es.eigenvalues().data(),
                                        es.eigenvalues().data() + d);
  return out;
}

namespace {

// Sum of |coefficient| * |z|^j weights, the natural magnitude of p^(k)(z).
double derivative_scale(const RealPolynomial& poly, int k, double z) {
  RealPolynomial dk = poly.derivative(k);
  double s = 0.0, zp = 1.0;
  for (double c : dk.coeffs()) {
    s += std::abs(c) * zp;
    zp *= std::abs(z);
  }
  return s;
}

struct Cluster {
  std::complex<double> sum;
  int count;
  std::complex<double> mean() const { return sum / static_cast<double>(count); }
};

std::vector<Cluster> cluster_roots(const std::vector<std::complex<double>>& roots, double radius) {
  std::vector<int> parent(roots.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (std::abs(roots[i] - roots[j]) < radius) parent[find(int(i))] = find(int(j));
    }
  }
  std::vector<Cluster> out;
  std::vector<int> slot(roots.size(), -1);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    int r = find(int(i));
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(out.size());
      out.push_back({{0.0, 0.0}, 0});
    }
    out[slot[r]].sum += roots[i];
    out[slot[r]].count += 1;
  }
  return out;
}

// A cluster of m roots is genuine when the first m-1 derivatives vanish at
// its centroid relative to their natural scale.
bool is_multiple_root(const RealPolynomial& poly, std::complex<double> z, int m) {
  for (int k = 0; k < m; ++k) {
    double scale = derivative_scale(poly, k, std::abs(z));
    if (scale == 0.0) continue;
    if (std::abs(poly.derivative(k)(z)) > 1e-8 * scale) return false;
  }
  return true;
}

}  // namespace

std::vector<RealRoot> real_roots(const RealPolynomial& poly) {
  RealPolynomial t = poly.trimmed();
  auto roots = complex_roots(t);
  if (roots.empty()) return {};
  double rho = 0.0;
  for (auto z : roots) rho = std::max(rho, std::abs(z));

  auto clusters = cluster_roots(roots, 1e-6 * (1.0 + rho));

  // Rounding splits a root of multiplicity m by roughly eps^(1/m), which
  // exceeds the first radius for m >= 3; merge such fragments when the
  // merged centroid passes the derivative test.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < clusters.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < clusters.size() && !merged; ++j) {
        if (std::abs(clusters[i].mean() - clusters[j].mean()) > 1e-3 * (1.0 + rho)) continue;
        Cluster c{clusters[i].sum + clusters[j].sum, clusters[i].count + clusters[j].count};
        if (is_multiple_root(t, c.mean(), c.count)) {
          clusters[i] = c;
          clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
        }
      }
    }
  }

  std::vector<RealRoot> out;
  for (const auto& c : clusters) {
    auto z = c.mean();
    if (std::abs(z.imag()) > 1e-8 * std::max(1.0, rho)) continue;
    double x = z.real();
    RealPolynomial f = t.derivative(c.count - 1);
    RealPolynomial df = f.derivative();
    for (int it = 0; it < 3; ++it) {
      double d = df(x);
      if (d == 0.0) break;
      double nx = x - f(x) / d;
      if (!std::isfinite(nx) || std::abs(f(nx)) > std::abs(f(x))) break;
      x = nx;
    }
    out.push_back({x, c.count});
  }
  std::sort(out.begin(), out.end(),
            [](const RealRoot& a, const RealRoot& b) { return a.value < b.value; });
  return out;
}

double resultant(const RealPolynomial& a, const RealPolynomial& b) {
  int m = a.degree(), k = b.degree();
  if (m < 0 || k < 0) return 0.0;
  if (m == 0) return std::pow(a.coeff(0), k);
  if (k == 0) return std::pow(b.coeff(0), m);
  int size = m + k;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(size, size);
  for (int r = 0; r < k; ++r) {
    for (int i = 0; i <= m; ++i) s(r, r + i) = a.coeff(m - i);
  }
  for (int r = 0; r < m; ++r) {
    for (int i = 0; i <= k; ++i) s(k + r, r + i) = b.coeff(k - i);
  }
  return s.partialPivLu().determinant();
}

double discriminant_quadratic(double c0, double c1, double c2) { return c1 * c1 - 4.0 * c0 * c2; }

double discriminant_cubic(double d, double c, double b, double a) {
  return 18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * a * c * c * c -
         27.0 * a * a * d * d;
}

}  // namespace pfgeo
