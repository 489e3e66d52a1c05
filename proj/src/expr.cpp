#include "gfbsde/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>
#include <vector>

namespace gfbsde {

Expr::Ptr Expr::number(double v) {
  auto e = std::shared_ptr<Expr>(new Expr());
  e->op_ = Op::Num;
  e->num_ = v;
  return e;
}

Expr::Ptr Expr::variable(Var v) {
  auto e = std::shared_ptr<Expr>(new Expr());
  e->op_ = Op::Variable;
  e->var_ = v;
  return e;
}

Expr::Ptr Expr::unary(Op op, Ptr a) {
  auto e = std::shared_ptr<Expr>(new Expr());
  e->op_ = op;
  e->a_ = std::move(a);
  return e;
}

Expr::Ptr Expr::binary(Op op, Ptr a, Ptr b) {
  auto e = std::shared_ptr<Expr>(new Expr());
  e->op_ = op;
  e->a_ = std::move(a);
  e->b_ = std::move(b);
  return e;
}

namespace {

const char* var_name(Var v) {
  switch (v) {
    case Var::T: return "t";
    case Var::X: return "x";
    case Var::Y: return "y";
    case Var::Z: return "z";
  }
  return "?";
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double Expr::eval(const Env& env) const {
  switch (op_) {
    case Op::Num: return num_;
    case Op::Variable: return env.get(var_);
    case Op::Neg: return -a_->eval(env);
    case Op::Add: return a_->eval(env) + b_->eval(env);
    case Op::Sub: return a_->eval(env) - b_->eval(env);
    case Op::Mul: return a_->eval(env) * b_->eval(env);
    case Op::Div: {
      const double den = b_->eval(env);
      if (den == 0.0) {
        throw EvalDomainError("division by zero in " + print(), print());
      }
      return a_->eval(env) / den;
    }
    case Op::Pow: {
      const double base = a_->eval(env);
      const double ex = b_->eval(env);
      const double r = std::pow(base, ex);
      if (std::isnan(r) && !std::isnan(base) && !std::isnan(ex)) {
        throw EvalDomainError("fractional power of negative in " + print(), print());
      }
      return r;
    }
    case Op::Sin: return std::sin(a_->eval(env));
    case Op::Cos: return std::cos(a_->eval(env));
    case Op::ExpFn: return std::exp(a_->eval(env));
    case Op::Tanh: return std::tanh(a_->eval(env));
    case Op::Abs: return std::fabs(a_->eval(env));
    case Op::Sqrt: {
      const double arg = a_->eval(env);
      if (arg < 0.0) {
        throw EvalDomainError("sqrt of negative in " + print(), print());
      }
      return std::sqrt(arg);
    }
    case Op::Min: return std::fmin(a_->eval(env), b_->eval(env));
    case Op::Max: return std::fmax(a_->eval(env), b_->eval(env));
  }
  return 0.0;
}

std::string Expr::print() const {
  switch (op_) {
    case Op::Num: return format_number(num_);
    case Op::Variable: return var_name(var_);
    case Op::Neg: return "(-" + a_->print() + ")";
    case Op::Add: return "(" + a_->print() + "+" + b_->print() + ")";
    case Op::Sub: return "(" + a_->print() + "-" + b_->print() + ")";
    case Op::Mul: return "(" + a_->print() + "*" + b_->print() + ")";
    case Op::Div: return "(" + a_->print() + "/" + b_->print() + ")";
    case Op::Pow: return "(" + a_->print() + "^" + b_->print() + ")";
    case Op::Sin: return "sin(" + a_->print() + ")";
    case Op::Cos: return "cos(" + a_->print() + ")";
    case Op::ExpFn: return "exp(" + a_->print() + ")";
    case Op::Tanh: return "tanh(" + a_->print() + ")";
    case Op::Abs: return "abs(" + a_->print() + ")";
    case Op::Sqrt: return "sqrt(" + a_->print() + ")";
    case Op::Min: return "min(" + a_->print() + "," + b_->print() + ")";
    case Op::Max: return "max(" + a_->print() + "," + b_->print() + ")";
  }
  return "?";
}

unsigned Expr::free_vars() const {
  switch (op_) {
    case Op::Num: return 0;
    case Op::Variable: return 1u << static_cast<int>(var_);
    default: {
      unsigned m = a_ ? a_->free_vars() : 0;
      if (b_) m |= b_->free_vars();
      return m;
    }
  }
}

bool Expr::structurally_equal(const Expr& other) const {
  if (op_ != other.op_) return false;
  switch (op_) {
    case Op::Num: return num_ == other.num_;
    case Op::Variable: return var_ == other.var_;
    default:
      if (a_ && !a_->structurally_equal(*other.a_)) return false;
      if (b_ && !b_->structurally_equal(*other.b_)) return false;
      return true;
  }
}

namespace {

// Recursive-descent parser over the byte string. Offsets in errors are
// 0-based byte positions.
class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprPtr parse_all() {
    ExprPtr e = parse_sum();
    skip_ws();
    if (pos_ != src_.size()) {
      fail("unexpected trailing input", "end of input");
    }
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg, const std::string& expected) {
    throw ParseError("syntax error at offset " + std::to_string(pos_) + ": " + msg +
                         " (expected " + expected + ")",
                     pos_, expected);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool peek_char(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool accept(char c) {
    if (peek_char(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      fail(std::string("missing '") + c + "'", std::string("\"") + c + "\"");
    }
  }

  ExprPtr parse_sum() {
    ExprPtr e = parse_term();
    for (;;) {
      if (accept('+')) {
        e = Expr::binary(Expr::Op::Add, e, parse_term());
      } else if (accept('-')) {
        e = Expr::binary(Expr::Op::Sub, e, parse_term());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    for (;;) {
      if (accept('*')) {
        e = Expr::binary(Expr::Op::Mul, e, parse_unary());
      } else if (accept('/')) {
        e = Expr::binary(Expr::Op::Div, e, parse_unary());
      } else {
        return e;
      }
    }
  }

  // Unary minus binds looser than '^': -x^2 parses as -(x^2).
  ExprPtr parse_unary() {
    if (accept('-')) {
      return Expr::unary(Expr::Op::Neg, parse_unary());
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (accept('^')) {
      // right-associative; exponent may itself be signed
      return Expr::binary(Expr::Op::Pow, base, parse_unary());
    }
    return base;
  }

  ExprPtr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) {
      fail("unexpected end of input", "number, variable, function or \"(\"");
    }
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_sum();
      skip_ws();
      if (!accept(')')) {
        fail("unbalanced parenthesis", "\")\"");
      }
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return parse_identifier();
    }
    fail(std::string("unexpected character '") + c + "'", "number, variable, function or \"(\"");
  }

  ExprPtr parse_number() {
    const char* begin = src_.data() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) {
      fail("malformed number", "number");
    }
    pos_ += static_cast<std::size_t>(end - begin);
    return Expr::number(v);
  }

  ExprPtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(src_.substr(start, pos_ - start));

    struct Fn {
      const char* name;
      Expr::Op op;
      int arity;
    };
    static const Fn kFns[] = {
        {"sin", Expr::Op::Sin, 1},   {"cos", Expr::Op::Cos, 1},  {"exp", Expr::Op::ExpFn, 1},
        {"tanh", Expr::Op::Tanh, 1}, {"abs", Expr::Op::Abs, 1},  {"sqrt", Expr::Op::Sqrt, 1},
        {"min", Expr::Op::Min, 2},   {"max", Expr::Op::Max, 2},
    };

    for (const Fn& fn : kFns) {
      if (name == fn.name) {
        expect('(');
        ExprPtr a = parse_sum();
        if (fn.arity == 2) {
          skip_ws();
          if (!accept(',')) {
            fail(name + " takes two arguments", "\",\"");
          }
          ExprPtr b = parse_sum();
          skip_ws();
          if (!accept(')')) {
            fail("unbalanced parenthesis", "\")\"");
          }
          return Expr::binary(fn.op, a, b);
        }
        skip_ws();
        if (!accept(')')) {
          fail("unbalanced parenthesis", "\")\"");
        }
        return Expr::unary(fn.op, a);
      }
    }

    if (name == "t") return Expr::variable(Var::T);
    if (name == "x") return Expr::variable(Var::X);
    if (name == "y") return Expr::variable(Var::Y);
    if (name == "z") return Expr::variable(Var::Z);

    pos_ = start;
    throw ParseError("unknown identifier \"" + name + "\" at offset " + std::to_string(start),
                     start, "one of t, x, y, z or a function name");
  }
};

}  // namespace

ExprPtr parse(std::string_view source) { return Parser(source).parse_all(); }

ExprPtr parse_bound(std::string_view source, VarMask allowed, std::string_view slot_name) {
  ExprPtr e = parse(source);
  const unsigned used = e->free_vars();
  for (int i = 0; i < 4; ++i) {
    const Var v = static_cast<Var>(i);
    if ((used >> i & 1u) && !allowed.allows(v)) {
      throw ParseError("variable \"" + std::string(var_name(v)) + "\" not allowed in coefficient " +
                           std::string(slot_name),
                       0, "variables permitted for this slot");
    }
  }
  return e;
}

}  // namespace gfbsde
