#include <gtest/gtest.h>

#include <cmath>

#include "fracherm/corpus.hpp"
#include "fracherm/expr.hpp"

using namespace fracherm;

TEST(Expression, PrecedenceAndAssociativity) {
  EXPECT_DOUBLE_EQ(Expression::parse("1 + 2 * 3", 1)(Point{0.0}), 7.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2 ^ 3 ^ 2", 1)(Point{0.0}), 512.0);
  EXPECT_DOUBLE_EQ(Expression::parse("-2 ^ 2", 1)(Point{0.0}), -4.0);
  EXPECT_DOUBLE_EQ(Expression::parse("8 / 4 / 2", 1)(Point{0.0}), 1.0);
  EXPECT_DOUBLE_EQ(Expression::parse("(1 + 2) * 3", 1)(Point{0.0}), 9.0);
}

TEST(Expression, VariablesAndFunctions) {
  const auto e = Expression::parse("exp(-x1^2 - x2^2) * sign(x2) + abs(x1)", 2);
  const Point p{0.5, -1.0};
  EXPECT_NEAR(e(p), -std::exp(-1.25) + 0.5, 1e-15);
  EXPECT_NEAR(Expression::parse("pi", 1)(Point{0.0}), M_PI, 0.0);
  EXPECT_DOUBLE_EQ(Expression::parse("cutoff(x1)", 1)(Point{1.5}), plateau_cutoff(1.5));
  EXPECT_DOUBLE_EQ(Expression::parse("1e-1 * x1", 1)(Point{2.0}), 0.2);
}

TEST(Expression, ToFieldKeepsText) {
  const auto f = Expression::parse("x1 * x1", 1).to_field();
  EXPECT_DOUBLE_EQ(f(Point{3.0}), 9.0);
  EXPECT_EQ(f.dim(), 1);
}

TEST(Expression, ErrorsCarryColumn) {
  try {
    Expression::parse("1 + * 2", 1);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 5);
  }
  EXPECT_THROW(Expression::parse("x2", 1), ParseError);
  EXPECT_THROW(Expression::parse("sin(x1)", 1), ParseError);
  EXPECT_THROW(Expression::parse("(x1", 1), ParseError);
  EXPECT_THROW(Expression::parse("x1 x1", 1), ParseError);
  EXPECT_THROW(Expression::parse("", 1), ParseError);
}
