#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fracherm/field.hpp"

namespace fracherm {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Inline field expressions:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'pi' | x1..xd | func '(' expr ')' | '(' expr ')'
///   func    := abs | sign | exp | cutoff
/// where cutoff is the smooth plateau (1 on [0,1], 0 beyond 2).
class Expression {
 public:
  struct Node;

  static Expression parse(std::string_view text, int d);
  double operator()(const Point& x) const;
  int dim() const { return d_; }
  const std::string& text() const { return text_; }
  ScalarField to_field() const;

 private:
  Expression(std::shared_ptr<const Node> root, int d, std::string text)
      : root_(std::move(root)), d_(d), text_(std::move(text)) {}
  std::shared_ptr<const Node> root_;
  int d_;
  std::string text_;
};

}  // namespace fracherm
