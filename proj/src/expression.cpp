#include "hdgqoi/expression.hpp"

#include "hdgqoi/errors.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace hdgqoi {

namespace {

// Value with its x and y derivatives.
struct Dual {
  double v = 0.0, dx = 0.0, dy = 0.0;
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.dx + b.dx, a.dy + b.dy}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.dx - b.dx, a.dy - b.dy}; }
Dual operator*(Dual a, Dual b) {
  return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy};
}
Dual operator/(Dual a, Dual b) {
  const double inv = 1.0 / b.v;
  return {a.v * inv, (a.dx - a.v * inv * b.dx) * inv, (a.dy - a.v * inv * b.dy) * inv};
}

// Chain rule for an outer function with value f and derivative df.
Dual chain(Dual a, double f, double df) { return {f, df * a.dx, df * a.dy}; }

Dual power(Dual a, Dual b) {
  const bool constant_exponent = b.dx == 0.0 && b.dy == 0.0;
  if (constant_exponent) {
    const double f = std::pow(a.v, b.v);
    const double df = b.v == 0.0 ? 0.0 : b.v * std::pow(a.v, b.v - 1.0);
    return chain(a, f, df);
  }
  const double f = std::pow(a.v, b.v);
  const double la = std::log(a.v);
  return {f, f * (b.dx * la + b.v * a.dx / a.v), f * (b.dy * la + b.v * a.dy / a.v)};
}

enum class Op { Number, X, Y, Add, Sub, Mul, Div, Pow, Neg, Call };

enum class Fn { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Log, Sqrt, Abs };

Dual apply(Fn fn, Dual a) {
  switch (fn) {
  case Fn::Sin: return chain(a, std::sin(a.v), std::cos(a.v));
  case Fn::Cos: return chain(a, std::cos(a.v), -std::sin(a.v));
  case Fn::Tan: {
    const double t = std::tan(a.v);
    return chain(a, t, 1.0 + t * t);
  }
  case Fn::Sinh: return chain(a, std::sinh(a.v), std::cosh(a.v));
  case Fn::Cosh: return chain(a, std::cosh(a.v), std::sinh(a.v));
  case Fn::Tanh: {
    const double t = std::tanh(a.v);
    return chain(a, t, 1.0 - t * t);
  }
  case Fn::Exp: {
    const double e = std::exp(a.v);
    return chain(a, e, e);
  }
  case Fn::Log: return chain(a, std::log(a.v), 1.0 / a.v);
  case Fn::Sqrt: {
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s);
  }
  case Fn::Abs: return chain(a, std::abs(a.v), a.v < 0 ? -1.0 : 1.0);
  }
  return a;
}

} // namespace

struct Expression::Node {
  Op op = Op::Number;
  Fn fn = Fn::Sin;
  double value = 0.0;
  std::shared_ptr<const Node> lhs, rhs;

  Dual eval(const Point& x) const {
    switch (op) {
    case Op::Number: return {value, 0.0, 0.0};
    case Op::X: return {x.x(), 1.0, 0.0};
    case Op::Y: return {x.y(), 0.0, 1.0};
    case Op::Add: return lhs->eval(x) + rhs->eval(x);
    case Op::Sub: return lhs->eval(x) - rhs->eval(x);
    case Op::Mul: return lhs->eval(x) * rhs->eval(x);
    case Op::Div: return lhs->eval(x) / rhs->eval(x);
    case Op::Pow: return power(lhs->eval(x), rhs->eval(x));
    case Op::Neg: {
      const Dual a = lhs->eval(x);
      return {-a.v, -a.dx, -a.dy};
    }
    case Op::Call: return apply(fn, lhs->eval(x));
    }
    return {};
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

class Parser {
public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    NodePtr n = sum();
    skip();
    if (pos_ != s_.size())
      fail("unexpected character");
    return n;
  }

private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const char* what) const {
    std::ostringstream msg;
    msg << "expression '" << s_ << "': " << what << " at position " << pos_;
    throw InputError(msg.str());
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  NodePtr sum() {
    NodePtr n = product();
    for (;;) {
      if (accept('+'))
        n = make(Op::Add, n, product());
      else if (accept('-'))
        n = make(Op::Sub, n, product());
      else
        return n;
    }
  }

  NodePtr product() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*'))
        n = make(Op::Mul, n, unary());
      else if (accept('/'))
        n = make(Op::Div, n, unary());
      else
        return n;
    }
  }

  NodePtr unary() {
    if (accept('-'))
      return make(Op::Neg, unary());
    if (accept('+'))
      return unary();
    return exponent();
  }

  NodePtr exponent() {
    NodePtr base = primary();
    if (accept('^'))
      return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size())
      fail("unexpected end");
    if (accept('(')) {
      NodePtr n = sum();
      if (!accept(')'))
        fail("expected ')'");
      return n;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin)
        fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Expression::Node>();
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "x")
        return make(Op::X);
      if (name == "y")
        return make(Op::Y);
      if (name == "pi") {
        auto n = std::make_shared<Expression::Node>();
        n->value = std::numbers::pi;
        return n;
      }
      static const std::vector<std::pair<std::string, Fn>> functions = {
          {"sin", Fn::Sin},   {"cos", Fn::Cos},   {"tan", Fn::Tan}, {"sinh", Fn::Sinh},
          {"cosh", Fn::Cosh}, {"tanh", Fn::Tanh}, {"exp", Fn::Exp}, {"log", Fn::Log},
          {"sqrt", Fn::Sqrt}, {"abs", Fn::Abs}};
      for (const auto& [fname, fn] : functions) {
        if (fname != name)
          continue;
        if (!accept('('))
          fail("expected '(' after function name");
        NodePtr arg = sum();
        if (!accept(')'))
          fail("expected ')'");
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::Call;
        n->fn = fn;
        n->lhs = std::move(arg);
        return n;
      }
      pos_ = start;
      fail("unknown identifier");
    }
    fail("unexpected character");
  }
};

} // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(text).parse();
  return e;
}

double Expression::operator()(const Point& x) const { return root_->eval(x).v; }

Vec2 Expression::grad(const Point& x) const {
  const Dual d = root_->eval(x);
  return Vec2(d.dx, d.dy);
}

ScalarField Expression::field() const {
  if (root_->op == Op::Number && root_->value == 0.0)
    return ScalarField::zero();
  auto root = root_;
  return ScalarField([root](const Point& x) { return root->eval(x).v; },
                     [root](const Point& x) {
                       const Dual d = root->eval(x);
                       return Vec2(d.dx, d.dy);
                     });
}

} // namespace hdgqoi
