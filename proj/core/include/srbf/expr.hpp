#pragma once

// A small, total calculator language for coefficient, source and boundary
// data. Grammar (lowest to highest precedence):
//
//   expr    := sum [ ('<' | '<=' | '>' | '>=') sum ]
//   sum     := product { ('+' | '-') product }
//   product := unary { ('*' | '/') unary }
//   unary   := ('-' | '+') unary | power
//   power   := primary [ '^' unary ]          (right associative)
//   primary := number | name | name '(' expr { ',' expr } ')' | '(' expr ')'
//
// Names: x y z eps eps1..eps5 pi. Functions: sin cos exp sqrt abs floor (1
// argument), mod (2), select (3). Comparisons evaluate to 1 or 0.

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "srbf/common.hpp"

namespace srbf {

/// Values of the non-coordinate names available to an expression.
struct ExprBindings {
  double epsilon = 1.0;
  std::array<double, 5> scales{};
};

class ParseError : public ConfigError {
 public:
  ParseError(const std::string& message, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Division by zero or a domain error during evaluation.
class EvalError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class Expr {
 public:
  struct Node;

  Expr() = default;
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  bool empty() const { return root_ == nullptr; }

  double operator()(std::span<const double> point, const ExprBindings& bindings) const;

  /// Fully parenthesised form; parsing it again yields an equal tree.
  std::string to_string() const;

  /// True when the tree is a single numeric literal.
  bool is_constant() const;

  const Node* root() const { return root_.get(); }

  friend bool operator==(const Expr& lhs, const Expr& rhs);

 private:
  std::shared_ptr<const Node> root_;
};

/// Parses `text`. Coordinates beyond `dimension` (y in 1D, z in 1D/2D) are
/// rejected as unknown identifiers. Errors carry the byte offset.
Expr parse(std::string_view text, int dimension = kMaxDim);

double eval_expr(const Expr& expr, std::span<const double> point, const ExprBindings& bindings);

}  // namespace srbf
