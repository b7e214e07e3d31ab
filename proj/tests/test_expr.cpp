#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "rearr/expr.hpp"
#include "rearr/random.hpp"

using namespace rearr;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

double at(std::string_view text, double x = 0.0, double v = 0.0, double p = 0.0) {
  return parse_expr(text)(x, v, p);
}

}  // namespace

TEST(ExprParse, SubtractionOfCall) {
  const Expr e = parse_expr("1 - abs(x)");
  const ExprNode& root = e.root();
  ASSERT_EQ(root.kind, ExprNode::Kind::Binary);
  EXPECT_EQ(root.op, BinaryOp::Sub);
  EXPECT_EQ(root.children[0]->kind, ExprNode::Kind::Number);
  EXPECT_EQ(root.children[1]->kind, ExprNode::Kind::Call);
  EXPECT_EQ(root.children[1]->fn, Function::Abs);
  EXPECT_EQ(e.print(), "(1 - abs(x))");
}

TEST(ExprParse, QuadraticIntegrandShape) {
  const Expr e = parse_expr("p + 0.005*p^2");
  const ExprNode& root = e.root();
  ASSERT_EQ(root.op, BinaryOp::Add);
  EXPECT_EQ(root.children[0]->kind, ExprNode::Kind::Var);
  const ExprNode& mul = *root.children[1];
  ASSERT_EQ(mul.op, BinaryOp::Mul);
  EXPECT_DOUBLE_EQ(mul.children[0]->number, 0.005);
  EXPECT_EQ(mul.children[1]->op, BinaryOp::Pow);
  EXPECT_TRUE(e.uses(Variable::P));
  EXPECT_FALSE(e.uses(Variable::X));
}

TEST(ExprParse, SyntaxErrorOffset) {
  try {
    parse_expr("x^^2");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 2u);
  }
}

TEST(ExprParse, NoImplicitMultiplication) {
  EXPECT_EQ(code_of([] { parse_expr("2x"); }), ErrorCode::SyntaxError);
}

TEST(ExprParse, RejectsUnknownNamesAndBadArity) {
  EXPECT_EQ(code_of([] { parse_expr("foo(x)"); }), ErrorCode::UnknownIdentifier);
  EXPECT_EQ(code_of([] { parse_expr("y + 1"); }), ErrorCode::UnknownIdentifier);
  EXPECT_EQ(code_of([] { parse_expr("abs(x, v)"); }), ErrorCode::ArityError);
  EXPECT_EQ(code_of([] { parse_expr("min(x)"); }), ErrorCode::ArityError);
  EXPECT_EQ(code_of([] { parse_expr("(1 + x"); }), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { parse_expr(""); }), ErrorCode::SyntaxError);
}

TEST(ExprEval, BasicValues) {
  EXPECT_DOUBLE_EQ(at("1 - abs(x)", 0.25), 0.75);
  EXPECT_DOUBLE_EQ(at("p^1.15", 0, 0, 2.0), std::pow(2.0, 1.15));
  EXPECT_NEAR(at("p^1.15", 0, 0, 2.0), 2.2191389441356897, 1e-15);
  EXPECT_DOUBLE_EQ(at("min(1, max(0, v))", 0, -3.0), 0.0);
  EXPECT_DOUBLE_EQ(at("min(1, max(0, v))", 0, 0.4), 0.4);
  EXPECT_DOUBLE_EQ(at("max(x, v, p, 0.5)", 0.1, 0.2, 0.3), 0.5);
}

TEST(ExprEval, PrecedenceAndAssociativity) {
  EXPECT_DOUBLE_EQ(at("-2^2"), -4.0);
  EXPECT_DOUBLE_EQ(at("2^3^2"), 512.0);
  EXPECT_DOUBLE_EQ(at("8/4/2"), 1.0);
  EXPECT_DOUBLE_EQ(at("2-3-4"), -5.0);
  EXPECT_DOUBLE_EQ(at("(-2)^2"), 4.0);
  EXPECT_DOUBLE_EQ(at("2^-1"), 0.5);
}

TEST(ExprEval, DomainErrors) {
  EXPECT_EQ(code_of([] { at("log(x)", 0.0); }), ErrorCode::DomainError);
  EXPECT_EQ(code_of([] { at("sqrt(x)", -1.0); }), ErrorCode::DomainError);
  EXPECT_EQ(code_of([] { at("(-2)^0.5"); }), ErrorCode::DomainError);
  EXPECT_EQ(code_of([] { at("0^-1"); }), ErrorCode::DomainError);
  EXPECT_EQ(code_of([] { at("1/x", 0.0); }), ErrorCode::DomainError);
}

TEST(ExprEval, UnboundVariable) {
  const Expr e = parse_expr("x + p");
  EXPECT_EQ(code_of([&] { e.eval(Bindings{0.5, std::nullopt, std::nullopt}); }), ErrorCode::UnboundVariable);
}

TEST(ExprProperties, PrintParseFixpoint) {
  for (const char* text : {"1 - abs(x)", "p + 0.005*p^2", "-2^2", "2^3^2", "min(1, max(0, v))",
                           "(1+v)*p^2", "exp(v)*p^1.5", "(2+sin(v))*p^2", "-(-x)", "cos(3.14159*x/2)",
                           "1e-3*x - 2.5e2/v", "sqrt(abs(x))*log(1+v)"}) {
    const Expr a = parse_expr(text);
    const Expr b = parse_expr(a.print());
    EXPECT_TRUE(a == b) << text << " -> " << a.print();
    EXPECT_EQ(b.print(), a.print());
  }
}

TEST(ExprProperties, ProductBindsTighterThanSum) {
  SplitMix64 rng(5);
  const Expr flat = parse_expr("x+v*p");
  const Expr grouped = parse_expr("x+(v*p)");
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(-10, 10), b = rng.uniform(-10, 10), c = rng.uniform(-10, 10);
    EXPECT_EQ(flat(a, b, c), grouped(a, b, c));
    EXPECT_EQ(flat(a, b, c), a + b * c);
  }
}
