#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracherm {

inline constexpr int kMaxDim = 3;

/// A point of R^d with d <= 3, stored inline.
class Point {
 public:
  Point() = default;
  explicit Point(int d) : d_(check_dim(d)) {}
  Point(std::initializer_list<double> xs) : d_(check_dim(static_cast<int>(xs.size()))) {
    int i = 0;
    for (double v : xs) c_[i++] = v;
  }
  static Point from(const std::vector<double>& xs) {
    Point p(static_cast<int>(xs.size()));
    for (int i = 0; i < p.d_; ++i) p.c_[i] = xs[i];
    return p;
  }
  static Point unit(int d, int axis) {
    Point p(d);
    p.c_[axis] = 1.0;
    return p;
  }

  int dim() const { return d_; }
  double operator[](int i) const { return c_[i]; }
  double& operator[](int i) { return c_[i]; }

  double dot(const Point& o) const {
    double s = 0.0;
    for (int i = 0; i < d_; ++i) s += c_[i] * o.c_[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }

  Point operator+(const Point& o) const {
    Point r(d_);
    for (int i = 0; i < d_; ++i) r.c_[i] = c_[i] + o.c_[i];
    return r;
  }
  Point operator-(const Point& o) const {
    Point r(d_);
    for (int i = 0; i < d_; ++i) r.c_[i] = c_[i] - o.c_[i];
    return r;
  }
  Point operator-() const { return (*this) * -1.0; }
  Point operator*(double s) const {
    Point r(d_);
    for (int i = 0; i < d_; ++i) r.c_[i] = c_[i] * s;
    return r;
  }
  bool operator==(const Point& o) const {
    if (d_ != o.d_) return false;
    for (int i = 0; i < d_; ++i) {
      if (c_[i] != o.c_[i]) return false;
    }
    return true;
  }
  std::vector<double> to_vector() const { return {c_.begin(), c_.begin() + d_}; }

 private:
  static int check_dim(int d) {
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("Point: dimension must be in [1, 3]");
    return d;
  }
  std::array<double, kMaxDim> c_{};
  int d_ = 1;
};

class ExceptionalPointError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A real function on R^d. Evaluation at a registered exceptional point
/// throws unless a conventional value was registered for it.
///
/// Fields built around a distinguished point can also register an exact
/// offset evaluator h -> f(anchor + h); difference quotients at the anchor
/// then avoid the rounding of anchor + h - anchor.
class ScalarField {
 public:
  using Eval = std::function<double(const Point&)>;
  using Gradient = std::function<Point(const Point&)>;

  ScalarField(int d, Eval eval, std::string label);

  int dim() const { return d_; }
  const std::string& label() const { return label_; }

  double operator()(const Point& x) const;
  /// f(x0 + h), exact in h when x0 is the registered anchor.
  double at_offset(const Point& x0, const Point& h) const;

  ScalarField& with_known_value(const Point& x, double value);
  ScalarField& with_exceptional_point(const Point& x);
  ScalarField& with_gradient(Gradient g);
  ScalarField& with_anchor(const Point& anchor, Eval offset_eval);
  /// Points where the field is non-smooth; integrators place breaks there.
  ScalarField& with_singular_point(const Point& x);

  const std::vector<std::pair<Point, double>>& known_values() const { return known_; }
  const std::vector<Point>& singular_points() const { return singular_; }
  bool has_gradient() const { return static_cast<bool>(gradient_); }
  Point gradient(const Point& x) const;
  const std::optional<Point>& anchor() const { return anchor_; }

  /// g(x) = scale(x) * f(x), keeping exceptional/known/singular data.
  ScalarField multiplied(std::function<double(const Point&)> scale, std::string label) const;

 private:
  std::optional<double> special_value(const Point& x) const;

  int d_;
  Eval eval_;
  std::string label_;
  std::vector<std::pair<Point, double>> known_;
  std::vector<Point> exceptional_;
  std::vector<Point> singular_;
  Gradient gradient_;
  std::optional<Point> anchor_;
  Eval offset_eval_;
};

enum class OperatorKind { HermiteShifted, OrnsteinUhlenbeck, ShiftedLaplacian };

const char* to_string(OperatorKind k);

/// L = -Laplacian + |x|^2 + m (m >= -d), the Ornstein-Uhlenbeck operator
/// -Laplacian + 2x.grad, or -Laplacian + R (R > 0), in dimension d.
struct OperatorSpec {
  OperatorKind kind = OperatorKind::HermiteShifted;
  int d = 1;
  double m = 0.0;
  double R = 1.0;

  static OperatorSpec hermite(int d, double m = 0.0);
  static OperatorSpec ornstein_uhlenbeck(int d);
  static OperatorSpec shifted_laplacian(int d, double R);

  void validate() const;
  /// Bottom of the spectrum as seen by the positive eigenvector.
  double ground_eigenvalue() const;
};

}  // namespace fracherm
