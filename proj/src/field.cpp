#include "fracherm/field.hpp"

namespace fracherm {

ScalarField::ScalarField(int d, Eval eval, std::string label)
    : d_(d), eval_(std::move(eval)), label_(std::move(label)) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("ScalarField: dimension must be in [1, 3]");
  if (!eval_) throw std::invalid_argument("ScalarField: empty evaluator");
}

std::optional<double> ScalarField::special_value(const Point& x) const {
  for (const auto& [p, v] : known_) {
    if (p == x) return v;
  }
  for (const auto& p : exceptional_) {
    if (p == x) {
      throw ExceptionalPointError("field '" + label_ + "' is undefined at an exceptional point");
    }
  }
  return std::nullopt;
}

double ScalarField::operator()(const Point& x) const {
  if (!known_.empty() || !exceptional_.empty()) {
    if (auto v = special_value(x)) return *v;
  }
  return eval_(x);
}

double ScalarField::at_offset(const Point& x0, const Point& h) const {
  if (anchor_ && *anchor_ == x0) {
    if (!known_.empty() || !exceptional_.empty()) {
      bool zero = true;
      for (int i = 0; i < h.dim(); ++i) zero = zero && h[i] == 0.0;
      if (zero) {
        if (auto v = special_value(x0)) return *v;
      }
    }
    return offset_eval_(h);
  }
  return (*this)(x0 + h);
}

ScalarField& ScalarField::with_known_value(const Point& x, double value) {
  known_.emplace_back(x, value);
  return *this;
}

ScalarField& ScalarField::with_exceptional_point(const Point& x) {
  exceptional_.push_back(x);
  return *this;
}

ScalarField& ScalarField::with_gradient(Gradient g) {
  gradient_ = std::move(g);
  return *this;
}

ScalarField& ScalarField::with_anchor(const Point& anchor, Eval offset_eval) {
  anchor_ = anchor;
  offset_eval_ = std::move(offset_eval);
  return *this;
}

ScalarField& ScalarField::with_singular_point(const Point& x) {
  singular_.push_back(x);
  return *this;
}

Point ScalarField::gradient(const Point& x) const {
  if (!gradient_) throw std::logic_error("field '" + label_ + "' has no gradient");
  return gradient_(x);
}

ScalarField ScalarField::multiplied(std::function<double(const Point&)> scale,
                                    std::string label) const {
  auto base = eval_;
  ScalarField g(d_, [base, scale](const Point& x) { return scale(x) * base(x); }, std::move(label));
  for (const auto& [p, v] : known_) g.known_.emplace_back(p, scale(p) * v);
  g.exceptional_ = exceptional_;
  g.singular_ = singular_;
  if (anchor_) {
    auto off = offset_eval_;
    const Point a = *anchor_;
    g.anchor_ = a;
    g.offset_eval_ = [off, scale, a](const Point& h) { return scale(a + h) * off(h); };
  }
  return g;
}

const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::HermiteShifted:
      return "hermite";
    case OperatorKind::OrnsteinUhlenbeck:
      return "ornstein_uhlenbeck";
    case OperatorKind::ShiftedLaplacian:
      return "shifted_laplacian";
  }
  return "unknown";
}

OperatorSpec OperatorSpec::hermite(int d, double m) {
  OperatorSpec op{OperatorKind::HermiteShifted, d, m, 1.0};
  op.validate();
  return op;
}

OperatorSpec OperatorSpec::ornstein_uhlenbeck(int d) {
  OperatorSpec op{OperatorKind::OrnsteinUhlenbeck, d, 0.0, 1.0};
  op.validate();
  return op;
}

OperatorSpec OperatorSpec::shifted_laplacian(int d, double R) {
  OperatorSpec op{OperatorKind::ShiftedLaplacian, d, 0.0, R};
  op.validate();
  return op;
}

void OperatorSpec::validate() const {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("operator: d must be in [1, 3]");
  if (kind == OperatorKind::HermiteShifted && !(m >= -d)) {
    throw std::invalid_argument("operator: hermite requires m >= -d");
  }
  if (kind == OperatorKind::ShiftedLaplacian && !(R > 0.0)) {
    throw std::invalid_argument("operator: shifted laplacian requires R > 0");
  }
}

double OperatorSpec::ground_eigenvalue() const {
  switch (kind) {
    case OperatorKind::HermiteShifted:
      return m + d;
    case OperatorKind::OrnsteinUhlenbeck:
      return 0.0;
    case OperatorKind::ShiftedLaplacian:
      return R;
  }
  return 0.0;
}

}  // namespace fracherm
