#include "fracherm/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracherm/space.hpp"

namespace fracherm {

namespace {

constexpr double kPiM4 = 0.75112554446494248286;  // pi^{-1/4}

void require_hermite(const OperatorSpec& op, const char* who) {
  if (op.kind != OperatorKind::HermiteShifted) {
    throw std::domain_error(std::string(who) + ": requires the shifted Hermite operator");
  }
}

// log sinh(u) for u > 0.
double log_sinh(double u) {
  if (u > 20.0) return u - M_LN2 + std::log1p(-std::exp(-2.0 * u));
  return std::log(std::sinh(u));
}

// log cosh(u) for u >= 0, accurate near 0.
double log_cosh(double u) {
  if (u > 20.0) return u - M_LN2 + std::log1p(std::exp(-2.0 * u));
  const double sh = std::sinh(0.5 * u);
  return std::log1p(2.0 * sh * sh);
}

double log_heat_kernel(const OperatorSpec& op, double t, const Point& x, const Point& y) {
  const double d = op.d;
  const Point diff = x - y;
  if (op.kind == OperatorKind::ShiftedLaplacian) {
    return -t * op.R - 0.5 * d * std::log(4.0 * M_PI * t) - diff.norm2() / (4.0 * t);
  }
  return -t * op.m - 0.5 * d * (std::log(2.0 * M_PI) + log_sinh(2.0 * t)) -
         diff.norm2() / (2.0 * std::tanh(2.0 * t)) - std::tanh(t) * x.dot(y);
}

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("heat kernel: t must be > 0");
}

}  // namespace

std::vector<double> hermite_functions_1d(int kmax, double x) {
  if (kmax < 0 || kmax > 200) throw std::out_of_range("hermite_function: k must be in [0, 200]");
  if (!std::isfinite(x) || std::fabs(x) > 1e3) {
    throw std::out_of_range("hermite_function: |x| outside the stable range");
  }
  // Recurrence on unscaled values with a running log-scale; the Gaussian
  // factor is applied at the end so large |x| does not underflow early.
  std::vector<double> h(kmax + 1);
  std::vector<double> log_scale(kmax + 1);
  double prev = 0.0;
  double cur = kPiM4;
  double ls = 0.0;
  h[0] = cur;
  log_scale[0] = 0.0;
  for (int k = 0; k < kmax; ++k) {
    double next = x * std::sqrt(2.0 / (k + 1)) * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
    const double mag = std::fabs(cur);
    if (mag > 1e150) {
      cur /= 1e150;
      prev /= 1e150;
      ls += std::log(1e150);
    }
    h[k + 1] = cur;
    log_scale[k + 1] = ls;
  }
  const double gauss = -0.5 * x * x;
  for (int k = 0; k <= kmax; ++k) {
    if (h[k] == 0.0) continue;
    h[k] = std::copysign(std::exp(std::log(std::fabs(h[k])) + log_scale[k] + gauss), h[k]);
  }
  return h;
}

double hermite_function_1d(int k, double x) { return hermite_functions_1d(k, x)[k]; }

double hermite_function(std::span<const int> k, const Point& x) {
  if (static_cast<int>(k.size()) != x.dim()) {
    throw std::invalid_argument("hermite_function: multi-index size must equal dimension");
  }
  int total = 0;
  for (int ki : k) {
    if (ki < 0) throw std::out_of_range("hermite_function: negative index");
    total += ki;
  }
  if (total > 200) throw std::out_of_range("hermite_function: |k| must be <= 200");
  double v = 1.0;
  for (int i = 0; i < x.dim(); ++i) v *= hermite_function_1d(k[i], x[i]);
  return v;
}

double eigenvalue(const OperatorSpec& op, std::span<const int> k) {
  require_hermite(op, "eigenvalue");
  if (static_cast<int>(k.size()) != op.d) {
    throw std::invalid_argument("eigenvalue: multi-index size must equal dimension");
  }
  int total = 0;
  for (int ki : k) total += ki;
  return 2.0 * total + op.d + op.m;
}

double mehler_kernel(const OperatorSpec& op, double t, const Point& x, const Point& y) {
  require_hermite(op, "mehler_kernel");
  check_time(t);
  return std::exp(log_heat_kernel(op, t, x, y));
}

double mehler_kernel_tanh(const OperatorSpec& op, double s, const Point& x, const Point& y) {
  require_hermite(op, "mehler_kernel_tanh");
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("mehler_kernel_tanh: s must lie in (0,1)");
  const double d = op.d;
  const double a = 0.5 * (op.m + d);
  const double b = 0.5 * (op.m - d);
  const double expo = -0.25 * ((x - y).norm2() / s + s * (x + y).norm2());
  double logv = expo - 0.5 * d * std::log(4.0 * M_PI * s) - b * std::log1p(s);
  if (a != 0.0) logv += a * std::log1p(-s);
  return std::exp(logv);
}

double heat_kernel(const OperatorSpec& op, double t, const Point& x, const Point& y) {
  if (op.kind == OperatorKind::OrnsteinUhlenbeck) {
    throw std::domain_error("heat_kernel: transfer the Ornstein-Uhlenbeck operator first");
  }
  check_time(t);
  return std::exp(log_heat_kernel(op, t, x, y));
}

double heat_mass_minus_one(const OperatorSpec& op, double t, const Point& x) {
  check_time(t);
  switch (op.kind) {
    case OperatorKind::ShiftedLaplacian:
      return std::expm1(-t * op.R);
    case OperatorKind::HermiteShifted: {
      const double th2 = std::tanh(2.0 * t);
      return std::expm1(-t * op.m - 0.5 * op.d * log_cosh(2.0 * t) - 0.5 * th2 * x.norm2());
    }
    case OperatorKind::OrnsteinUhlenbeck:
      break;
  }
  throw std::domain_error("heat_mass: transfer the Ornstein-Uhlenbeck operator first");
}

double heat_mass(const OperatorSpec& op, double t, const Point& x) {
  return 1.0 + heat_mass_minus_one(op, t, x);
}

KernelShape kernel_shape(const OperatorSpec& op, double t, const Point& x) {
  check_time(t);
  if (op.kind == OperatorKind::ShiftedLaplacian) return {x, std::sqrt(2.0 * t)};
  if (op.kind == OperatorKind::HermiteShifted) {
    const double u = 2.0 * t;
    const double inv_cosh = u > 700.0 ? 0.0 : 1.0 / std::cosh(u);
    return {x * inv_cosh, std::sqrt(std::tanh(u))};
  }
  throw std::domain_error("kernel_shape: transfer the Ornstein-Uhlenbeck operator first");
}

KernelParity heat_kernel_parity(const OperatorSpec& op, double t, const Point& x0, const Point& z) {
  check_time(t);
  if (op.kind == OperatorKind::ShiftedLaplacian) {
    return {std::exp(log_heat_kernel(op, t, x0, x0 + z)), 0.0};
  }
  require_hermite(op, "heat_kernel_parity");
  const double tau = std::tanh(t);
  const double log_g = -t * op.m - 0.5 * op.d * (std::log(2.0 * M_PI) + log_sinh(2.0 * t)) -
                       z.norm2() / (2.0 * std::tanh(2.0 * t)) - tau * x0.norm2();
  const double arg = tau * x0.dot(z);
  if (std::fabs(arg) < 1.0) {
    const double g = std::exp(log_g);
    return {g * std::cosh(arg), -g * std::sinh(arg)};
  }
  const double e_minus = std::exp(log_g - arg);
  const double e_plus = std::exp(log_g + arg);
  return {0.5 * (e_minus + e_plus), 0.5 * (e_minus - e_plus)};
}

std::vector<double> singular_radii(const ScalarField& f, const Point& center) {
  std::vector<double> r;
  for (const auto& p : f.singular_points()) r.push_back((p - center).norm());
  return r;
}

double heat_apply(const OperatorSpec& op, double t, const ScalarField& f, const Point& x,
                  const QuadratureSpec& spec) {
  if (op.kind == OperatorKind::OrnsteinUhlenbeck) {
    throw std::domain_error("heat_apply: transfer the Ornstein-Uhlenbeck operator first");
  }
  if (f.dim() != op.d || x.dim() != op.d) throw std::invalid_argument("heat_apply: dimension mismatch");
  const KernelShape shape = kernel_shape(op, t, x);
  auto radii_extra = singular_radii(f, shape.center);
  radii_extra.push_back((x - shape.center).norm());
  const auto radii = radial_breaks(shape.width, radii_extra);
  const Point c = shape.center;
  auto g = [&](const Point& z) {
    const Point y = c + z;
    const double k = std::exp(log_heat_kernel(op, t, x, y));
    if (k == 0.0) return 0.0;
    return k * f(y);
  };
  IntegralOutcome o = integrate_polar(g, op.d, radii, spec, false);
  if (!o.converged()) throw QuadratureError("heat_apply: quadrature inconclusive", o);
  return o.value;
}

IntegralOutcome heat_increment(const OperatorSpec& op, double t, const ScalarField& f,
                               const Point& x0, double f0, const QuadratureSpec& spec) {
  if (op.kind == OperatorKind::OrnsteinUhlenbeck) {
    throw std::domain_error("heat_increment: transfer the Ornstein-Uhlenbeck operator first");
  }
  const KernelShape shape = kernel_shape(op, t, x0);
  auto radii_extra = singular_radii(f, x0);
  const double shift = (shape.center - x0).norm();
  radii_extra.push_back(shift);
  radii_extra.push_back(shift + 4.0 * shape.width);
  const auto radii = radial_breaks(shape.width, radii_extra);
  auto g = [&](const Point& z) {
    const KernelParity k = heat_kernel_parity(op, t, x0, z);
    if (k.even == 0.0 && k.odd == 0.0) return 0.0;
    const double fp = f.at_offset(x0, z);
    const double fm = f.at_offset(x0, -z);
    const double d2 = fp + fm - 2.0 * f0;
    const double d1 = fp - fm;
    return 0.5 * (k.even * d2 + k.odd * d1);
  };
  IntegralOutcome o = integrate_polar(g, op.d, radii, spec, true);
  if (f0 != 0.0) o.value += f0 * heat_mass_minus_one(op, t, x0);
  return o;
}

ScalarField ou_transfer(const ScalarField& f) {
  return f.multiplied([](const Point& x) { return std::exp(-0.5 * x.norm2()); },
                      "ou_transfer(" + f.label() + ")");
}

Eigenvector eigenvector_check(const OperatorSpec& op, const QuadratureSpec& spec) {
  op.validate();
  const int d = op.d;
  std::optional<ScalarField> field;
  double lambda = 0.0;
  if (op.kind == OperatorKind::HermiteShifted) {
    field.emplace(d, [](const Point& x) { return std::exp(-0.5 * x.norm2()); }, "psi");
    lambda = op.m + d;
  } else if (op.kind == OperatorKind::ShiftedLaplacian) {
    field.emplace(d, [](const Point&) { return 1.0; }, "one");
    lambda = op.R;
  } else {
    throw std::domain_error("eigenvector_check: unsupported operator");
  }
  Point samples[3] = {Point(d), Point(d), Point(d)};
  samples[1][0] = 0.5;
  samples[2][0] = -1.2;
  if (d > 1) samples[2][1] = 0.4;
  double worst = 0.0;
  for (double t : {0.1, 0.5, 1.5}) {
    for (const auto& x : samples) {
      const double got = heat_apply(op, t, *field, x, spec);
      const double want = std::exp(-t * lambda) * (*field)(x);
      worst = std::max(worst, std::fabs(got - want) / std::fabs(want));
    }
  }
  if (!(worst <= 1e-6)) throw ValidationError("eigenvector_check: heat relation violated", worst);
  return {*field, lambda};
}

}  // namespace fracherm
