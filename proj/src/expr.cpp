#include "fracherm/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "fracherm/corpus.hpp"

namespace fracherm {

struct Expression::Node {
  enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Abs, Sign, Exp, Cutoff } kind;
  double number = 0.0;
  int var = 0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;

  double eval(const Point& x) const {
    switch (kind) {
      case Kind::Number:
        return number;
      case Kind::Var:
        return x[var];
      case Kind::Neg:
        return -a->eval(x);
      case Kind::Add:
        return a->eval(x) + b->eval(x);
      case Kind::Sub:
        return a->eval(x) - b->eval(x);
      case Kind::Mul:
        return a->eval(x) * b->eval(x);
      case Kind::Div:
        return a->eval(x) / b->eval(x);
      case Kind::Pow:
        return std::pow(a->eval(x), b->eval(x));
      case Kind::Abs:
        return std::fabs(a->eval(x));
      case Kind::Sign: {
        const double v = a->eval(x);
        return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
      }
      case Kind::Exp:
        return std::exp(a->eval(x));
      case Kind::Cutoff:
        return plateau_cutoff(a->eval(x));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, int d) : s_(text), d_(d) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip_space();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    int line = 1;
    int col = 1;
    for (size_t i = 0; i < pos_ && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("expression " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg, line, col);
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) {
        n = make(Kind::Add, n, term());
      } else if (accept('-')) {
        n = make(Kind::Sub, n, term());
      } else {
        return n;
      }
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) {
        n = make(Kind::Mul, n, unary());
      } else if (accept('/')) {
        n = make(Kind::Div, n, unary());
      } else {
        return n;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr n = expr();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::string rest(s_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("malformed number");
    pos_ += static_cast<size_t>(end - rest.c_str());
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::Number;
    n->number = v;
    return n;
  }

  NodePtr identifier() {
    const size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string id(s_.substr(start, pos_ - start));
    if (id == "pi") {
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Number;
      n->number = M_PI;
      return n;
    }
    if (id.size() >= 2 && id[0] == 'x' && id.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int k = std::atoi(id.c_str() + 1);
      if (k < 1 || k > d_) {
        pos_ = start;
        fail("variable " + id + " outside x1..x" + std::to_string(d_));
      }
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Var;
      n->var = k - 1;
      return n;
    }
    Kind k;
    if (id == "abs") {
      k = Kind::Abs;
    } else if (id == "sign") {
      k = Kind::Sign;
    } else if (id == "exp") {
      k = Kind::Exp;
    } else if (id == "cutoff") {
      k = Kind::Cutoff;
    } else {
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    expect('(');
    NodePtr arg = expr();
    expect(')');
    return make(k, arg);
  }

  std::string_view s_;
  int d_;
  size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text, int d) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("expression: d must be in [1, 3]");
  Parser p(text, d);
  return Expression(p.parse(), d, std::string(text));
}

double Expression::operator()(const Point& x) const {
  if (x.dim() != d_) throw std::invalid_argument("expression: dimension mismatch");
  return root_->eval(x);
}

ScalarField Expression::to_field() const {
  auto root = root_;
  return ScalarField(d_, [root](const Point& x) { return root->eval(x); }, text_);
}

}  // namespace fracherm
