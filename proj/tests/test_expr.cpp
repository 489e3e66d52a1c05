#include <doctest.h>

#include <cmath>
#include <vector>

#include "gfbsde/expr.hpp"

using namespace gfbsde;

TEST_CASE("parse builds the expected tree shape") {
  const ExprPtr e = parse("0.5*x + sin(y)");
  REQUIRE(e->op() == Expr::Op::Add);
  CHECK(e->lhs()->op() == Expr::Op::Mul);
  CHECK(e->lhs()->lhs()->op() == Expr::Op::Num);
  CHECK(e->lhs()->lhs()->num() == 0.5);
  CHECK(e->lhs()->rhs()->op() == Expr::Op::Variable);
  CHECK(e->rhs()->op() == Expr::Op::Sin);
}

TEST_CASE("syntax errors carry byte offset and expected set") {
  try {
    parse("tanh(x");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 6);
    CHECK(e.expected() == "\")\"");
  }

  try {
    parse("q + 1");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 0);
    CHECK(std::string(e.what()).find("unknown identifier \"q\"") != std::string::npos);
  }

  CHECK_THROWS_AS(parse("1 +"), ParseError);
  CHECK_THROWS_AS(parse("(x"), ParseError);
  CHECK_THROWS_AS(parse("min(x)"), ParseError);
  CHECK_THROWS_AS(parse("x 1"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
}

TEST_CASE("evaluation") {
  CHECK(parse("x^2")->eval({0, 3, 0, 0}) == 9.0);
  CHECK(parse("exp(-1/(1-x^2))")->eval({0, 0, 0, 0}) ==
        doctest::Approx(0.36787944117144233).epsilon(1e-15));
  CHECK(parse("min(x, y) + max(x, y)")->eval({0, 2, 5, 0}) == 7.0);
  CHECK(parse("abs(-3) + sqrt(4)")->eval({}) == 5.0);
  CHECK(parse("tanh(0.5)")->eval({}) == doctest::Approx(std::tanh(0.5)));

  CHECK_THROWS_AS(parse("1/x")->eval({0, 0, 0, 0}), EvalDomainError);
  CHECK_THROWS_AS(parse("sqrt(x)")->eval({0, -1, 0, 0}), EvalDomainError);
  CHECK_THROWS_AS(parse("x^0.5")->eval({0, -2, 0, 0}), EvalDomainError);

  try {
    parse("1 + 1/(x-1)")->eval({0, 1, 0, 0});
    FAIL("expected EvalDomainError");
  } catch (const EvalDomainError& e) {
    CHECK(e.subexpr().find("(x-1)") != std::string::npos);
  }
}

TEST_CASE("precedence and associativity") {
  CHECK(parse("2*3+4")->eval({}) == 10.0);
  CHECK(parse("2+3*4")->eval({}) == 14.0);
  CHECK(parse("1-2-3")->eval({}) == -4.0);
  CHECK(parse("2^3^2")->eval({}) == 512.0);  // right-associative
  CHECK(parse("-x^2")->eval({0, 3, 0, 0}) == -9.0);
  CHECK(parse("2^-1")->eval({}) == 0.5);
  CHECK(parse("-(x+1)*2")->eval({0, 1, 0, 0}) == -4.0);
}

TEST_CASE("parse-print-parse fixpoint") {
  const std::vector<std::string> corpus = {
      "0.5*x + sin(y)",
      "-exp(-(1-t))*tanh(x)^3",
      "min(x, max(y, z)) / (1 + t^2)",
      "sqrt(abs(x)) - cos(y)*2.25228362104358101",
      "x", "-x", "1e-3*x + 2.5E2",
      "((x))",
  };
  for (const auto& src : corpus) {
    const ExprPtr first = parse(src);
    const ExprPtr second = parse(first->print());
    CHECK(first->structurally_equal(*second));
    // printing is canonical: a second round trip is textual identity
    CHECK(first->print() == second->print());
  }
}

TEST_CASE("eval is deterministic") {
  const ExprPtr e = parse("sin(x*y) + exp(t) - tanh(z)/3");
  const Env env{0.3, 1.1, -0.7, 2.2};
  const double v = e->eval(env);
  for (int i = 0; i < 10; ++i) CHECK(e->eval(env) == v);
}

TEST_CASE("slot binding rejects out-of-arity variables") {
  CHECK_NOTHROW(parse_bound("t + x*y", VarMask::of_txy(), "b"));
  CHECK_THROWS_AS(parse_bound("z", VarMask::of_txy(), "b"), ParseError);
  CHECK_THROWS_AS(parse_bound("t + x", VarMask::of_x(), "phi"), ParseError);
  CHECK_NOTHROW(parse_bound("x^2", VarMask::of_x(), "phi"));
  CHECK_NOTHROW(parse_bound("t+x+y+z", VarMask::of_txyz(), "f"));

  try {
    parse_bound("y", VarMask::of_x(), "phi");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("\"y\" not allowed in coefficient phi") !=
          std::string::npos);
  }
}

TEST_CASE("free variable tracking") {
  CHECK(parse("1.5")->free_vars() == 0u);
  CHECK(parse("x*y")->free_vars() == 0b0110u);
  CHECK(parse("t+z")->free_vars() == 0b1001u);
}
