#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "gfbsde/errors.hpp"

namespace gfbsde {

/// Variable slots an expression may reference.
enum class Var : int { T = 0, X = 1, Y = 2, Z = 3 };

/// Bitmask of allowed variables, used when binding an expression to a
/// coefficient slot (b, h, sigma take (t,x,y); f, g take (t,x,y,z); phi
/// takes x only).
struct VarMask {
  unsigned bits = 0;
  static VarMask of_txy() { return {0b0111}; }
  static VarMask of_txyz() { return {0b1111}; }
  static VarMask of_x() { return {0b0010}; }
  bool allows(Var v) const { return (bits >> static_cast<int>(v)) & 1u; }
};

/// Evaluation environment: values for t, x, y, z.
struct Env {
  double t = 0.0, x = 0.0, y = 0.0, z = 0.0;
  double get(Var v) const {
    switch (v) {
      case Var::T: return t;
      case Var::X: return x;
      case Var::Y: return y;
      case Var::Z: return z;
    }
    return 0.0;
  }
};

/**
 * Immutable arithmetic expression tree over variables {t, x, y, z},
 * decimal literals, operators {+, -, *, /, ^, unary -} and functions
 * {sin, cos, exp, tanh, abs, sqrt, min, max}.
 */
class Expr {
 public:
  enum class Op {
    Num, Variable, Neg,
    Add, Sub, Mul, Div, Pow,
    Sin, Cos, ExpFn, Tanh, Abs, Sqrt, Min, Max,
  };

  using Ptr = std::shared_ptr<const Expr>;

  static Ptr number(double v);
  static Ptr variable(Var v);
  static Ptr unary(Op op, Ptr a);
  static Ptr binary(Op op, Ptr a, Ptr b);

  Op op() const { return op_; }
  double num() const { return num_; }
  Var var() const { return var_; }
  const Ptr& lhs() const { return a_; }
  const Ptr& rhs() const { return b_; }

  /// Standard real evaluation. Throws EvalDomainError for division by
  /// zero, sqrt of a negative, or a fractional power of a negative; other
  /// overflow flows through as non-finite values.
  double eval(const Env& env) const;

  /// Canonical fully-parenthesized text; parse(print(e)) is structurally
  /// equal to e.
  std::string print() const;

  /// Bitmask of variables appearing in the tree.
  unsigned free_vars() const;

  bool structurally_equal(const Expr& other) const;

 private:
  Expr() = default;
  Op op_ = Op::Num;
  double num_ = 0.0;
  Var var_ = Var::T;
  Ptr a_, b_;
};

using ExprPtr = Expr::Ptr;

/// Parse UTF-8 source into an expression tree. Grammar is standard
/// precedence-climbing arithmetic with right-associative '^' binding
/// tighter than unary minus, and function-call syntax name(args).
/// Throws ParseError (with byte offset and expected-token set) on syntax
/// errors and on identifiers outside {t, x, y, z} and the function list.
ExprPtr parse(std::string_view source);

/// Parse and restrict variables to an allowed slot mask; a disallowed
/// variable reference is a ParseError naming the offender.
ExprPtr parse_bound(std::string_view source, VarMask allowed, std::string_view slot_name);

}  // namespace gfbsde
