#include "pfgeo/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace pfgeo {

Expr Expr::make(Kind k, std::shared_ptr<const Node> lhs,
                std::shared_ptr<const Node> rhs, int exponent) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->exponent = exponent;
  return Expr(std::move(n));
}

Expr Expr::constant(double c) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->value = c;
  return Expr(std::move(n));
}

Expr Expr::variable(Var v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->var = v;
  return Expr(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    return Expr::constant(a.constant_value() + b.constant_value());
  }
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return Expr::make(Expr::Kind::Add, a.node_, b.node_);
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.constant_value());
  if (a.kind() == Expr::Kind::Neg) return Expr(a.node_->lhs);
  return Expr::make(Expr::Kind::Neg, a.node_);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    return Expr::constant(a.constant_value() - b.constant_value());
  }
  return a + (-b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    return Expr::constant(a.constant_value() * b.constant_value());
  }
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  return Expr::make(Expr::Kind::Mul, a.node_, b.node_);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) throw EvalError("division by constant zero");
  if (a.is_constant() && b.is_constant()) {
    return Expr::constant(a.constant_value() / b.constant_value());
  }
  if (a.is_constant(0.0)) return Expr::constant(0.0);
  if (b.is_constant(1.0)) return a;
  return Expr::make(Expr::Kind::Div, a.node_, b.node_);
}

Expr pow(const Expr& a, int exponent) {
  if (exponent == 0) return Expr::constant(1.0);
  if (exponent == 1) return a;
  if (a.is_constant()) {
    if (exponent < 0 && a.constant_value() == 0.0) {
      throw EvalError("negative power of constant zero");
    }
    double v = detail::ipow(a.constant_value(), exponent < 0 ? -exponent : exponent);
    return Expr::constant(exponent < 0 ? 1.0 / v : v);
  }
  return Expr::make(Expr::Kind::Pow, a.node_, nullptr, exponent);
}

Expr Expr::diff(Var v) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Const:
      return constant(0.0);
    case Kind::Variable:
      return constant(n.var == v ? 1.0 : 0.0);
    case Kind::Add:
      return Expr(n.lhs).diff(v) + Expr(n.rhs).diff(v);
    case Kind::Mul: {
      Expr a(n.lhs), b(n.rhs);
      return a.diff(v) * b + a * b.diff(v);
    }
    case Kind::Div: {
      Expr a(n.lhs), b(n.rhs);
      return (a.diff(v) * b - a * b.diff(v)) / pow(b, 2);
    }
    case Kind::Neg:
      return -Expr(n.lhs).diff(v);
    case Kind::Pow: {
      Expr a(n.lhs);
      return constant(n.exponent) * pow(a, n.exponent - 1) * a.diff(v);
    }
  }
  return constant(0.0);
}

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string Expr::str() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Const:
      return n.value < 0 ? "(" + format_number(n.value) + ")" : format_number(n.value);
    case Kind::Variable:
      return n.var == Var::X ? "x" : "y";
    case Kind::Add: {
      Expr rhs(n.rhs);
      if (rhs.kind() == Kind::Neg) {
        return "(" + Expr(n.lhs).str() + " - " + Expr(rhs.node_->lhs).str() + ")";
      }
      return "(" + Expr(n.lhs).str() + " + " + rhs.str() + ")";
    }
    case Kind::Mul:
      return "(" + Expr(n.lhs).str() + " * " + Expr(n.rhs).str() + ")";
    case Kind::Div:
      return "(" + Expr(n.lhs).str() + " / " + Expr(n.rhs).str() + ")";
    case Kind::Neg:
      return "(-" + Expr(n.lhs).str() + ")";
    case Kind::Pow:
      return "(" + Expr(n.lhs).str() + ")^" + std::to_string(n.exponent);
  }
  return "?";
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) {
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    while (true) {
      if (peek('+')) {
        ++pos_;
        lhs = lhs + parse_product();
      } else if (peek('-')) {
        ++pos_;
        lhs = lhs - parse_product();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    while (true) {
      if (peek('*')) {
        ++pos_;
        lhs = lhs * parse_unary();
      } else if (peek('/')) {
        std::size_t at = pos_++;
        Expr rhs = parse_unary();
        if (rhs.is_constant(0.0)) throw ParseError("division by constant zero", at);
        lhs = lhs / rhs;
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (peek('-')) {
      ++pos_;
      return -parse_unary();
    }
    if (peek('+')) {
      ++pos_;
      return parse_unary();
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (!peek('^')) return base;
    ++pos_;
    skip_ws();
    std::size_t start = pos_;
    bool negative = false;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      negative = text_[pos_] == '-';
      ++pos_;
    }
    std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) throw ParseError("exponent must be an integer literal", start);
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      throw ParseError("non-integer exponent", start);
    }
    int value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, value);
    if (ec != std::errc()) throw ParseError("exponent out of range", start);
    (void)ptr;
    if (negative && base.is_constant(0.0)) throw ParseError("negative power of zero", start);
    return pow(base, negative ? -value : value);
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      if (!peek(')')) {
        throw ParseError(pos_ >= text_.size() ? "unexpected end of input" : "expected ')'", pos_);
      }
      ++pos_;
      return inner;
    }
    if (c == 'x') {
      ++pos_;
      return Expr::variable(Var::X);
    }
    if (c == 'y') {
      ++pos_;
      return Expr::variable(Var::Y);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
      if (ec != std::errc()) throw ParseError("malformed number", pos_);
      pos_ = static_cast<std::size_t>(ptr - text_.data());
      return Expr::constant(value);
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

ScalarField::ScalarField(Expr e) : expr_(std::move(e)), cache_(std::make_shared<Cache>()) {}

const ScalarField& ScalarField::dx() const {
  std::call_once(cache_->fx, [this] {
    cache_->dx = std::make_unique<ScalarField>(expr_.diff(Var::X));
  });
  return *cache_->dx;
}

const ScalarField& ScalarField::dy() const {
  std::call_once(cache_->fy, [this] {
    cache_->dy = std::make_unique<ScalarField>(expr_.diff(Var::Y));
  });
  return *cache_->dy;
}

}  // namespace pfgeo
