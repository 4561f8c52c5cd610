#pragma once

#include "hdgqoi/fields.hpp"

#include <memory>
#include <string>

namespace hdgqoi {

/// Parsed scalar expression in x and y.
///
/// Grammar: numbers, `x`, `y`, `pi`, binary + - * / ^ (right associative),
/// unary minus, parentheses and the functions sin cos tan sinh cosh tanh exp
/// log sqrt abs. Values and gradients are evaluated together with forward
/// mode differentiation.
class Expression {
public:
  /// Throws InputError with the offending position on malformed input.
  static Expression parse(const std::string& text);

  double operator()(const Point& x) const;
  Vec2 grad(const Point& x) const;

  const std::string& text() const { return text_; }

  /// The expression as a data function with an analytic gradient. A literal
  /// zero gives the zero field.
  ScalarField field() const;

  struct Node;

private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

} // namespace hdgqoi
