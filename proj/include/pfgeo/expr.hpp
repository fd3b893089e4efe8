// Scalar expressions in the surface coordinates (x, y).
//
// Grammar: real literals, the variables `x` and `y`, binary `+ - * /`,
// unary minus, `^` with an integer literal exponent, and parentheses.
// Derivatives are exact and symbolic; only constant folding is applied.

#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace pfgeo {

enum class Var { X, Y };

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Denominators with magnitude below this are treated as zero.
inline constexpr double kZeroTolerance = 1e-12;

namespace detail {
// Only plain doubles are checked here; series and jet types validate their
// own division.
template <class T>
bool divisor_is_zero(const T& d) {
  if constexpr (std::is_same_v<T, double>) {
    return std::abs(d) < kZeroTolerance;
  } else {
    return false;
  }
}

template <class T>
T ipow(T base, int e) {
  T result(1.0);
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}
}  // namespace detail

class Expr {
 public:
  enum class Kind { Const, Variable, Add, Mul, Div, Neg, Pow };

  Expr() : Expr(constant(0.0)) {}
  static Expr constant(double c);
  static Expr variable(Var v);

  Kind kind() const noexcept { return node_->kind; }
  bool is_constant() const noexcept { return node_->kind == Kind::Const; }
  bool is_constant(double c) const noexcept {
    return is_constant() && node_->value == c;
  }
  double constant_value() const noexcept { return node_->value; }

  template <class T>
  T eval(const T& x, const T& y) const;
  double operator()(double x, double y) const { return eval<double>(x, y); }

  Expr diff(Var v) const;
  std::string str() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& a, int exponent);

 private:
  struct Node {
    Kind kind;
    double value = 0.0;  // Const
    Var var = Var::X;    // Variable
    int exponent = 0;    // Pow
    std::shared_ptr<const Node> lhs, rhs;
  };
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Kind k, std::shared_ptr<const Node> lhs,
                   std::shared_ptr<const Node> rhs = nullptr, int exponent = 0);

  template <class T>
  static T eval_node(const Node& n, const T& x, const T& y);

  std::shared_ptr<const Node> node_;
};

Expr parse(std::string_view text);

template <class T>
T Expr::eval(const T& x, const T& y) const {
  return eval_node<T>(*node_, x, y);
}

template <class T>
T Expr::eval_node(const Node& n, const T& x, const T& y) {
  switch (n.kind) {
    case Kind::Const:
      return T(n.value);
    case Kind::Variable:
      return n.var == Var::X ? x : y;
    case Kind::Add:
      return eval_node<T>(*n.lhs, x, y) + eval_node<T>(*n.rhs, x, y);
    case Kind::Mul:
      return eval_node<T>(*n.lhs, x, y) * eval_node<T>(*n.rhs, x, y);
    case Kind::Div: {
      T den = eval_node<T>(*n.rhs, x, y);
      if (detail::divisor_is_zero(den)) {
        throw EvalError("division by zero in '" + Expr(n.rhs).str() + "'");
      }
      return eval_node<T>(*n.lhs, x, y) / den;
    }
    case Kind::Neg:
      return -eval_node<T>(*n.lhs, x, y);
    case Kind::Pow: {
      T base = eval_node<T>(*n.lhs, x, y);
      if (n.exponent >= 0) return detail::ipow(base, n.exponent);
      T den = detail::ipow(base, -n.exponent);
      if (detail::divisor_is_zero(den)) {
        throw EvalError("division by zero in '" + Expr(n.lhs).str() + "^" +
                        std::to_string(n.exponent) + "'");
      }
      return T(1.0) / den;
    }
  }
  return T(0.0);
}

// An expression with lazily cached first partials.  Copies share the cache,
// and cache population is synchronized, so a field may be evaluated and
// differentiated from several threads.
class ScalarField {
 public:
  ScalarField() : ScalarField(Expr::constant(0.0)) {}
  ScalarField(Expr e);  // NOLINT(google-explicit-constructor)
  static ScalarField constant(double c) { return ScalarField(Expr::constant(c)); }
  static ScalarField parse(std::string_view text) {
    return ScalarField(pfgeo::parse(text));
  }

  const Expr& expr() const noexcept { return expr_; }
  double operator()(double x, double y) const { return expr_(x, y); }
  template <class T>
  T eval(const T& x, const T& y) const {
    return expr_.eval<T>(x, y);
  }

  const ScalarField& dx() const;
  const ScalarField& dy() const;
  const ScalarField& d(Var v) const { return v == Var::X ? dx() : dy(); }

  bool is_constant_zero() const noexcept { return expr_.is_constant(0.0); }

 private:
  struct Cache {
    std::once_flag fx, fy;
    std::unique_ptr<ScalarField> dx, dy;
  };
  Expr expr_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace pfgeo
