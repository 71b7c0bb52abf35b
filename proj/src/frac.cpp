#include "fracherm/frac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "fracherm/hermite.hpp"
#include "fracherm/kernel_bounds.hpp"
#include "fracherm/space.hpp"

namespace fracherm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_sigma(double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::domain_error("sigma must lie in (0,1)");
}

void check_dims(const OperatorSpec& op, const ScalarField& f, const Point& x) {
  if (f.dim() != op.d || x.dim() != op.d) throw std::invalid_argument("dimension mismatch");
}

OperatorSpec transferred(const OperatorSpec& op) { return OperatorSpec::hermite(op.d, -op.d); }

// Kernel-valued integrals need relative accuracy only.
QuadratureSpec relative_spec(const QuadratureSpec& spec) {
  QuadratureSpec s = spec;
  s.abs_tol = 1e-300;
  return s;
}

// 0 < ... < hi breaks: center * 4^k for k in [-below, above], plus extras.
std::vector<double> time_breaks(double center, int below, int above, std::initializer_list<double> extra,
                                double hi = kInf) {
  std::vector<double> b{0.0};
  if (center > 0.0) {
    for (int k = -below; k <= above; ++k) b.push_back(center * std::pow(4.0, k));
  }
  for (double e : extra) b.push_back(e);
  std::sort(b.begin(), b.end());
  std::vector<double> out;
  for (double v : b) {
    if (!(v < hi)) break;
    if (out.empty() || v > out.back() * (1.0 + 1e-12)) out.push_back(v);
  }
  out.push_back(hi);
  return out;
}

double f_at_center(const ScalarField& f, const Point& x0) {
  const double f0 = f.at_offset(x0, Point(x0.dim()));
  if (!std::isfinite(f0)) throw std::domain_error("field value at x0 is not finite");
  return f0;
}

// An increment indistinguishable from quadrature error or from rounding in
// f(x0 + z) - f(x0) is zero; dividing such noise by s^{1+sigma} would
// otherwise fabricate a singularity at s = 0.
bool below_noise(const IntegralOutcome& o, double f0) {
  return std::fabs(o.value) <= std::max(o.error_estimate, 1e-14 * std::fabs(f0));
}

// Tolerances for deciding convergence of a shell series; the verdict needs a
// stable decay rate, not a value to full precision.
QuadratureSpec verdict_spec(const QuadratureSpec& spec) {
  QuadratureSpec v = spec;
  v.abs_tol = std::max(spec.abs_tol, 1e-8);
  v.rel_tol = std::max(spec.rel_tol, 1e-6);
  return v;
}

// Sum of g over dyadic shells below `outer` plus the geometric extrapolation
// of the rest from the last contributions. Shells continue past `min_shells`
// until the extrapolation is stable to the target or stops improving (the
// innermost shells eventually see rounding noise).
IntegralOutcome signed_shell_sum(const RealFn& g, double outer, size_t min_shells, const QuadratureSpec& spec) {
  min_shells = std::max<size_t>(min_shells, 3);
  QuadratureSpec each = spec.scaled(1.0 / 64.0);
  each.max_subdivisions = 64;  // a dyadic shell of a smooth integrand needs few
  std::vector<double> c;
  double sum = 0.0;
  double quad_err = 0.0;
  IntegralOutcome best;
  best.error_estimate = kInf;
  int stale = 0;
  double hi = outer;
  for (int j = 0; j < -spec.min_shell_exponent; ++j) {
    const double lo = 0.5 * hi;
    const IntegralOutcome o = integrate_adaptive(g, lo, hi, each);
    if (!o.converged()) break;
    c.push_back(o.value);
    sum += o.value;
    quad_err += o.error_estimate;
    hi = lo;
    if (c.size() < 3) continue;
    const double c0 = c[c.size() - 3];
    const double c1 = c[c.size() - 2];
    const double c2 = c.back();
    IntegralOutcome cur;
    cur.status = Status::Converged;
    if (c2 == 0.0 && c1 == 0.0) {
      cur.value = sum;
      cur.error_estimate = quad_err;
    } else if (c1 != 0.0 && c0 != 0.0 && c2 / c1 > 0.0 && c2 / c1 < 1.0) {
      const double q = c2 / c1;
      const double tail = c2 * q / (1.0 - q);
      cur.value = sum + tail;
      cur.error_estimate = quad_err + std::fabs(tail) * std::min(1.0, std::fabs(q - c1 / c0) / (1.0 - q));
    } else {
      cur.value = sum;
      cur.error_estimate = quad_err + std::fabs(c2) * 64.0;
    }
    if (cur.error_estimate < best.error_estimate) {
      best = cur;
      stale = 0;
    } else {
      ++stale;
    }
    if (c.size() >= min_shells && (best.error_estimate <= spec.target(best.value) || stale >= 6)) break;
  }
  return best;
}

// Memoized s -> e^{-sL}f(x0) - f(x0) shared by every time integral at x0.
class IncrementCache {
 public:
  IncrementCache(const OperatorSpec& op, const ScalarField& f, const Point& x0, double f0,
                 const QuadratureSpec& inner)
      : op_(op), f_(f), x0_(x0), f0_(f0), inner_(inner) {}

  double operator()(double s) {
    auto it = memo_.find(s);
    if (it != memo_.end()) return it->second;
    const IntegralOutcome o = heat_increment(op_, s, f_, x0_, f0_, inner_);
    if (!o.converged()) failed_ = true;
    const double v = below_noise(o, f0_) ? 0.0 : o.value;
    memo_.emplace(s, v);
    return v;
  }
  bool failed() const { return failed_; }
  double f0() const { return f0_; }

 private:
  const OperatorSpec& op_;
  const ScalarField& f_;
  Point x0_;
  double f0_;
  QuadratureSpec inner_;
  std::map<double, double> memo_;
  bool failed_ = false;
};

IntegralOutcome inconclusive(std::vector<ShellSample> trace = {}) {
  IntegralOutcome o;
  o.status = Status::Inconclusive;
  o.shell_trace = std::move(trace);
  return o;
}

IntegralOutcome bochner_direct(const OperatorSpec& op, double sigma, const ScalarField& f,
                               const Point& x0, const QuadratureSpec& spec) {
  const FracParams p = FracParams::make(sigma);
  const double f0 = f_at_center(f, x0);
  const double A = spec.split_A;
  IncrementCache B(op, f, x0, f0, spec.scaled(0.01));
  try {
    // Verdict from the shells of |increment|; the value from the signed
    // shells over the same range plus their geometric tail.
    auto abs_integrand = [&](double s) { return std::fabs(B(s)) * std::pow(s, -1.0 - sigma); };
    IntegralOutcome near = diagnose_shells(abs_integrand, A, verdict_spec(spec));
    if (B.failed()) return inconclusive(near.shell_trace);
    if (!near.converged()) return near;

    auto signed_integrand = [&](double s) { return B(s) * std::pow(s, -1.0 - sigma); };
    const IntegralOutcome sgn = signed_shell_sum(signed_integrand, A, near.shell_trace.size(), spec);
    if (!sgn.converged() || B.failed()) return inconclusive(near.shell_trace);
    const double near_value = sgn.value;
    const double near_err = sgn.error_estimate;

    // (A, inf): the increment itself, in w = s^{-sigma}.
    IntegralOutcome far = integrate_power_tail(B, A, sigma, spec);
    if (!far.converged() || B.failed()) return inconclusive(near.shell_trace);
    const double far_value = far.value;

    IntegralOutcome out;
    out.status = Status::Converged;
    out.value = (near_value + far_value) / p.gamma_minus_sigma;
    out.error_estimate = (near_err + far.error_estimate) / std::fabs(p.gamma_minus_sigma);
    out.shell_trace = std::move(near.shell_trace);
    return out;
  } catch (const QuadratureError& e) {
    return inconclusive();
  }
}

// Integral of w(t,s) h_s(x,y) s^{-1-sigma} over (0, inf).
double subordinate_kernel(const OperatorSpec& op, double sigma, double t, const Point& x,
                          const Point& y, const QuadratureSpec& spec, bool derivative) {
  const double t2 = t * t;
  auto g = [&](double s) {
    const double h = heat_kernel(op, s, x, y);
    if (h == 0.0) return 0.0;
    double w = std::exp(-t2 / (4.0 * s)) * std::pow(s, -1.0 - sigma);
    if (derivative) w *= 2.0 * sigma - t2 / (2.0 * s);
    return w * h;
  };
  const double s0 = 0.25 * (t2 + (x - y).norm2());
  const double S = std::max({4.0, spec.split_A, 256.0 * s0});
  const auto breaks = time_breaks(s0, 4, 4, {spec.split_A, 1.0, 4.0}, S);
  const QuadratureSpec rel = relative_spec(spec);
  IntegralOutcome o = integrate_pieces(g, breaks, rel);
  // The kernel need not decay in s (ground eigenvalue 0); the tail goes
  // through the power substitution.
  auto H = [&](double s) {
    double w = heat_kernel(op, s, x, y) * std::exp(-t2 / (4.0 * s));
    if (derivative) w *= 2.0 * sigma - t2 / (2.0 * s);
    return w;
  };
  const IntegralOutcome tail = integrate_power_tail(H, S, sigma, rel);
  if (!tail.converged()) o.status = tail.status;
  o.value += tail.value;
  if (!o.converged()) throw QuadratureError("poisson_kernel: quadrature inconclusive", o);
  return o.value;
}

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("t must be > 0");
}

// Breaks for time integrals carrying e^{-t^2/4s}, fixed on a dyadic grid so
// nodes repeat across t values.
std::vector<double> extension_breaks(double t, double S) {
  std::vector<double> b{0.0};
  const double lo = t * t / 256.0;
  double s = S;
  std::vector<double> rev;
  while (s > lo) {
    rev.push_back(s);
    s *= 0.25;
  }
  b.insert(b.end(), rev.rbegin(), rev.rend());
  return b;
}

double spectral_1d(const OperatorSpec& op, double sigma, const ScalarField& f, const Point& x0,
                   int K, SpectralResult& r) {
  const int n = std::min(256, std::max(100, 2 * K + 60));
  const auto gh = gauss_hermite_nodes(n);
  std::vector<double> coef(K + 1, 0.0);
  for (const auto& [x, w] : gh) {
    const double fx = f(Point{x});
    if (fx == 0.0) continue;
    const auto h = hermite_functions_1d(K, x);
    const double cw = std::exp(std::log(w) + x * x) * fx;
    for (int k = 0; k <= K; ++k) coef[k] += cw * h[k];
  }
  const auto hx = hermite_functions_1d(K, x0[0]);
  double sum = 0.0;
  double tail = 0.0;
  for (int k = 0; k <= K; ++k) {
    const double lam = 2.0 * k + 1.0 + op.m;
    const double lp = lam > 0.0 ? std::pow(lam, sigma) : 0.0;
    sum += lp * coef[k] * hx[k];
    if (k > K - 5) tail = std::max(tail, lp * std::fabs(coef[k]));
  }
  r.tail_estimate = tail * 0.75112554446494248286;
  return sum;
}

double spectral_2d(const OperatorSpec& op, double sigma, const ScalarField& f, const Point& x0,
                   int K, SpectralResult& r) {
  const int n = std::min(256, std::max(80, 2 * K + 60));
  const auto gh = gauss_hermite_nodes(n);
  std::vector<std::vector<double>> H(n);
  std::vector<double> cw(n);
  for (int i = 0; i < n; ++i) {
    H[i] = hermite_functions_1d(K, gh[i].node);
    cw[i] = std::exp(std::log(gh[i].weight) + gh[i].node * gh[i].node);
  }
  // G[i][l] = sum_j cw_j f(x_i, x_j) h_l(x_j)
  std::vector<std::vector<double>> G(n, std::vector<double>(K + 1, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = f(Point{gh[i].node, gh[j].node});
      if (v == 0.0) continue;
      const double a = cw[j] * v;
      for (int l = 0; l <= K; ++l) G[i][l] += a * H[j][l];
    }
  }
  const auto h1 = hermite_functions_1d(K, x0[0]);
  const auto h2 = hermite_functions_1d(K, x0[1]);
  double sum = 0.0;
  double tail = 0.0;
  for (int k1 = 0; k1 <= K; ++k1) {
    for (int k2 = 0; k1 + k2 <= K; ++k2) {
      double c = 0.0;
      for (int i = 0; i < n; ++i) c += cw[i] * H[i][k1] * G[i][k2];
      const double lam = 2.0 * (k1 + k2) + 2.0 + op.m;
      const double lp = lam > 0.0 ? std::pow(lam, sigma) : 0.0;
      sum += lp * c * h1[k1] * h2[k2];
      if (k1 + k2 > K - 5) tail = std::max(tail, lp * std::fabs(c));
    }
  }
  r.tail_estimate = tail * 0.75112554446494248286 * 0.75112554446494248286;
  return sum;
}

// I_delta f(x0, s) = int_{|z|<delta} h_s(x0, x0+z) (f(x0+z) - f(x0)) dz.
IntegralOutcome local_increment(const OperatorSpec& op, double s, const ScalarField& f, const Point& x0,
                                double f0, double delta, const QuadratureSpec& spec) {
  const KernelShape shape = kernel_shape(op, s, x0);
  auto extra = singular_radii(f, x0);
  const double shift = (shape.center - x0).norm();
  extra.push_back(shift);
  extra.push_back(shift + 4.0 * shape.width);
  const auto radii = radial_breaks(shape.width, extra, delta);
  auto g = [&](const Point& z) {
    const KernelParity k = heat_kernel_parity(op, s, x0, z);
    if (k.even == 0.0 && k.odd == 0.0) return 0.0;
    const double fp = f.at_offset(x0, z);
    const double fm = f.at_offset(x0, -z);
    return 0.5 * (k.even * (fp + fm - 2.0 * f0) + k.odd * (fp - fm));
  };
  return integrate_polar(g, op.d, radii, spec, true);
}

Status worst_status(std::initializer_list<Status> all) {
  Status s = Status::Converged;
  for (Status x : all) {
    if (x == Status::Diverged) return Status::Diverged;
    if (x == Status::Inconclusive) s = Status::Inconclusive;
  }
  return s;
}

}  // namespace

double weight_phi(const OperatorSpec& op, double sigma, const Point& y) {
  check_sigma(sigma);
  const double r = y.norm();
  const double lg = std::log(M_E + r);
  switch (op.kind) {
    case OperatorKind::HermiteShifted:
      if (op.m > -op.d) {
        return std::exp(-0.5 * r * r) / (std::pow(1.0 + r, 0.5 * (op.d + op.m)) * std::pow(lg, 1.0 + sigma));
      }
      return std::exp(-0.5 * r * r) / std::pow(lg, sigma);
    case OperatorKind::OrnsteinUhlenbeck:
      return std::exp(-r * r) / std::pow(lg, sigma);
    case OperatorKind::ShiftedLaplacian:
      return std::exp(-std::sqrt(op.R * (1.0 + r * r))) / std::pow(1.0 + r, 0.5 * (op.d + 1) + sigma);
  }
  throw std::domain_error("weight_phi: unknown operator");
}

double poisson_kernel(const OperatorSpec& op, double sigma, double t, const Point& x, const Point& y,
                      const QuadratureSpec& spec) {
  check_sigma(sigma);
  check_time(t);
  op.validate();
  if (op.kind == OperatorKind::OrnsteinUhlenbeck) {
    return std::exp(0.5 * (x.norm2() - y.norm2())) * poisson_kernel(transferred(op), sigma, t, x, y, spec);
  }
  const FracParams p = FracParams::make(sigma);
  return p.a_sigma * std::pow(t, 2.0 * sigma) * subordinate_kernel(op, sigma, t, x, y, spec, false);
}

double poisson_kernel_dt(const OperatorSpec& op, double sigma, double t, const Point& x, const Point& y,
                         const QuadratureSpec& spec) {
  check_sigma(sigma);
  check_time(t);
  op.validate();
  if (op.kind == OperatorKind::OrnsteinUhlenbeck) {
    return std::exp(0.5 * (x.norm2() - y.norm2())) * poisson_kernel_dt(transferred(op), sigma, t, x, y, spec);
  }
  const FracParams p = FracParams::make(sigma);
  return p.a_sigma * std::pow(t, 2.0 * sigma - 1.0) * subordinate_kernel(op, sigma, t, x, y, spec, true);
}

double poisson_apply(const OperatorSpec& op, double sigma, double t, const ScalarField& f, const Point& x,
                     const QuadratureSpec& spec, IntegrationOrder order) {
  check_sigma(sigma);
  check_time(t);
  op.validate();
  check_dims(op, f, x);
  if (op.kind == OperatorKind::OrnsteinUhlenbeck) {
    return std::exp(0.5 * x.norm2()) * poisson_apply(transferred(op), sigma, t, ou_transfer(f), x, spec, order);
  }
  const FracParams p = FracParams::make(sigma);
  const double t2 = t * t;
  if (order == IntegrationOrder::TimeOuter) {
    const QuadratureSpec inner = spec.scaled(0.01);
    auto g = [&](double s) {
      const double w = std::exp(-t2 / (4.0 * s));
      if (w == 0.0) return 0.0;
      return w * heat_apply(op, s, f, x, inner) * std::pow(s, -1.0 - sigma);
    };
    const auto breaks = time_breaks(0.25 * t2, 3, 4, {spec.split_A, 1.0, 4.0});
    IntegralOutcome o = integrate_pieces(g, breaks, spec);
    if (!o.converged()) throw QuadratureError("poisson_apply: quadrature inconclusive", o);
    return p.a_sigma * std::pow(t, 2.0 * sigma) * o.value;
  }
  const QuadratureSpec inner = spec.scaled(0.01);
  auto g = [&](const Point& z) {
    const Point y = x + z;
    const double fy = f(y);
    if (fy == 0.0) return 0.0;
    return subordinate_kernel(op, sigma, t, x, y, inner, false) * fy;
  };
  auto extra = singular_radii(f, x);
  extra.push_back(1.0);
  extra.push_back(x.norm());
  const auto radii = radial_breaks(std::min(t, 1.0), extra);
  IntegralOutcome o = integrate_polar(g, op.d, radii, spec, false);
  if (!o.converged()) throw QuadratureError("poisson_apply: quadrature inconclusive", o);
  return p.a_sigma * std::pow(t, 2.0 * sigma) * o.value;
}

IntegralOutcome bochner_fractional(const OperatorSpec& op, double sigma, const ScalarField& f, const Point& x0,
                                   const QuadratureSpec& spec) {
  check_sigma(sigma);
  op.validate();
  spec.validate();
  check_dims(op, f, x0);
  if (op.kind == OperatorKind::OrnsteinUhlenbeck) {
    IntegralOutcome o = bochner_direct(transferred(op), sigma, ou_transfer(f), x0, spec);
    const double scale = std::exp(0.5 * x0.norm2());
    o.value *= scale;
    o.error_estimate *= scale;
    return o;
  }
  return bochner_direct(op, sigma, f, x0, spec);
}

double extension_approximant(const OperatorSpec& op, double sigma, const ScalarField& f, const Point& x0,
                             double t, const QuadratureSpec& spec, bool subtract_value) {
  check_sigma(sigma);
  check_time(t);
  op.validate();
  check_dims(op, f, x0);
  if (op.kind == OperatorKind::OrnsteinUhlenbeck) {
    return std::exp(0.5 * x0.norm2()) *
           extension_approximant(transferred(op), sigma, ou_transfer(f), x0, t, spec, subtract_value);
  }
  const double f0 = f_at_center(f, x0);
  IncrementCache B(op, f, x0, f0, spec.scaled(0.01));
  const FracParams p = FracParams::make(sigma);
  const double t2 = t * t;
  auto weight = [&](double s) {
    return (2.0 * sigma - t2 / (2.0 * s)) * std::exp(-t2 / (4.0 * s)) * std::pow(s, -1.0 - sigma);
  };
  const double S = std::max(spec.split_A, t2);
  const auto near_breaks = extension_breaks(t, S);
  IntegralOutcome near;
  if (subtract_value) {
    near = integrate_pieces([&](double s) { return weight(s) * B(s); }, near_breaks, spec);
  } else {
    near = integrate_pieces([&](double s) { return weight(s) * (B(s) + f0); }, near_breaks, spec);
  }
  auto far_integrand = [&](double s) {
    return (2.0 * sigma - t2 / (2.0 * s)) * std::exp(-t2 / (4.0 * s)) * (B(s) + f0);
  };
  IntegralOutcome far = integrate_power_tail(far_integrand, S, sigma, spec);
  if (!near.converged() || !far.converged() || B.failed()) {
    throw QuadratureError("extension_approximant: quadrature inconclusive", near.converged() ? far : near);
  }
  double total = near.value + far.value;
  if (subtract_value) total -= f0 * 2.0 * std::pow(S, -sigma) * std::exp(-t2 / (4.0 * S));
  return -p.c_sigma * p.a_sigma * total;
}

std::vector<double> halving_sequence(double t0, int count) {
  std::vector<double> ts;
  for (int j = 0; j < count; ++j) ts.push_back(std::ldexp(t0, -j));
  return ts;
}

ExtensionResult extension_limit(const OperatorSpec& op, double sigma, const ScalarField& f, const Point& x0,
                                std::span<const double> t_sequence, const QuadratureSpec& spec, double tol) {
  check_sigma(sigma);
  if (t_sequence.size() < 2) throw std::invalid_argument("extension_limit: need at least two t values");
  for (size_t j = 0; j < t_sequence.size(); ++j) {
    if (!(t_sequence[j] >= 1e-4)) throw std::invalid_argument("extension_limit: t values must be >= 1e-4");
    if (j > 0 && !(t_sequence[j] < t_sequence[j - 1])) {
      throw std::invalid_argument("extension_limit: t sequence must be strictly decreasing");
    }
  }
  // Known expansion exponents of the approximant in t.
  std::vector<double> powers;
  for (int k = 1; k <= 3; ++k) {
    powers.push_back(2.0 * k - 2.0 * sigma);
    powers.push_back(2.0 * k);
  }
  ExtensionResult r;
  for (size_t j = 0; j < t_sequence.size(); ++j) {
    const double t = t_sequence[j];
    r.trace.push_back({t, extension_approximant(op, sigma, f, x0, t, spec, true)});
    // Fit L + sum_k a_k t^{p_k} through the last cols+1 samples exactly.
    const size_t cols = std::min(j, powers.size());
    const size_t n = cols + 1;
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1));
    for (size_t i = 0; i < n; ++i) {
      const auto& smp = r.trace[j - cols + i];
      const double u = smp.t / t;
      A[i][0] = 1.0;
      for (size_t k = 1; k <= cols; ++k) A[i][k] = std::pow(u, powers[k - 1]);
      A[i][n] = smp.approximant;
    }
    for (size_t c = 0; c < n; ++c) {
      size_t piv = c;
      for (size_t i = c + 1; i < n; ++i) {
        if (std::fabs(A[i][c]) > std::fabs(A[piv][c])) piv = i;
      }
      std::swap(A[c], A[piv]);
      for (size_t i = 0; i < n; ++i) {
        if (i == c) continue;
        const double m = A[i][c] / A[c][c];
        for (size_t k = c; k <= n; ++k) A[i][k] -= m * A[c][k];
      }
    }
    r.extrapolants.push_back(A[0][n] / A[0][0]);
  }
  const size_t n = r.extrapolants.size();
  r.value = r.extrapolants.back();
  r.converged = std::fabs(r.extrapolants[n - 1] - r.extrapolants[n - 2]) < tol;
  if (!r.converged) throw NonConvergenceError("extension_limit: extrapolants not Cauchy within tolerance", r);
  return r;
}

double identity_I_check(double sigma, double t, const QuadratureSpec& spec) {
  check_sigma(sigma);
  check_time(t);
  const double t2 = t * t;
  auto g = [&](double s) {
    return (2.0 * sigma - t2 / (2.0 * s)) * std::exp(-t2 / (4.0 * s)) * std::pow(s, -1.0 - sigma);
  };
  const double S = 4.0 * t2;
  const QuadratureSpec inner = spec.scaled(0.01);
  const IntegralOutcome head = integrate_pieces(g, time_breaks(0.25 * t2, 4, 1, {}, S), inner);
  auto h = [&](double s) { return (2.0 * sigma - t2 / (2.0 * s)) * std::exp(-t2 / (4.0 * s)); };
  IntegralOutcome o = integrate_power_tail(h, S, sigma, inner, kInf);
  if (!head.converged()) o = head;
  o.value += head.value;
  if (!o.converged()) throw QuadratureError("identity_I_check: quadrature inconclusive", o);
  return std::fabs(o.value) * std::pow(t, 2.0 * sigma);
}

SpectralResult spectral_fractional(const OperatorSpec& op, double sigma, const ScalarField& f, const Point& x0,
                                   int K, const QuadratureSpec& spec, double tail_tol) {
  check_sigma(sigma);
  op.validate();
  check_dims(op, f, x0);
  if (op.kind != OperatorKind::HermiteShifted) {
    throw std::domain_error("spectral_fractional: requires the shifted Hermite operator");
  }
  if (K < 5 || K > 200) throw std::out_of_range("spectral_fractional: K must be in [5, 200]");
  SpectralResult r;
  r.truncation_K = K;
  if (op.d == 1) {
    r.value = spectral_1d(op, sigma, f, x0, K, r);
  } else if (op.d == 2) {
    r.value = spectral_2d(op, sigma, f, x0, K, r);
  } else {
    throw std::domain_error("spectral_fractional: d must be 1 or 2");
  }
  const double tol = tail_tol > 0.0 ? tail_tol : spec.target(r.value);
  if (r.tail_estimate > tol) throw TailDominanceError("spectral_fractional: tail dominates", r);
  return r;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Admissible:
      return "admissible";
    case Verdict::NotAdmissible:
      return "not_admissible";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

double default_delta(const OperatorSpec& op, const Point& x0) {
  const double base = std::max(x0.norm(), 1.0);
  return op.kind == OperatorKind::ShiftedLaplacian ? 3.0 * base : 11.0 * base;
}

IntegralOutcome local_admissibility(const OperatorSpec& op, double sigma, const ScalarField& f, const Point& x0,
                                    double delta, const QuadratureSpec& spec) {
  check_sigma(sigma);
  op.validate();
  check_dims(op, f, x0);
  if (!(delta > 0.0)) throw std::invalid_argument("local_admissibility: delta must be > 0");
  if (op.kind == OperatorKind::OrnsteinUhlenbeck) {
    return local_admissibility(transferred(op), sigma, ou_transfer(f), x0, delta, spec);
  }
  const double f0 = f_at_center(f, x0);
  const QuadratureSpec inner = spec.scaled(0.01);
  bool failed = false;
  std::map<double, double> memo;
  auto magnitude = [&](double s) {
    auto it = memo.find(s);
    if (it != memo.end()) return it->second;
    const IntegralOutcome o = local_increment(op, s, f, x0, f0, delta, inner);
    if (!o.converged()) failed = true;
    const double v = below_noise(o, f0) ? 0.0 : std::fabs(o.value);
    memo.emplace(s, v);
    return v;
  };
  auto integrand = [&](double s) { return magnitude(s) * std::pow(s, -1.0 - sigma); };
  IntegralOutcome near = diagnose_shells(integrand, spec.split_A, verdict_spec(spec));
  if (failed) return inconclusive(near.shell_trace);
  if (!near.converged() || op.kind != OperatorKind::ShiftedLaplacian) return near;
  IntegralOutcome far = integrate_power_tail(magnitude, spec.split_A, sigma, spec);
  if (failed || !far.converged()) return inconclusive(near.shell_trace);
  near.value += far.value;
  near.error_estimate += far.error_estimate;
  return near;
}

AdmissibilityReport admissibility_check(const OperatorSpec& op, double sigma, const ScalarField& f, const Point& x0,
                                        const QuadratureSpec& spec, std::optional<double> delta) {
  check_sigma(sigma);
  op.validate();
  check_dims(op, f, x0);
  if (op.kind == OperatorKind::OrnsteinUhlenbeck) {
    AdmissibilityReport r =
        admissibility_check(transferred(op), sigma, ou_transfer(f), x0, spec, delta ? delta : default_delta(op, x0));
    return r;
  }
  AdmissibilityReport r;
  r.delta = delta ? *delta : default_delta(op, x0);
  const int d = op.d;

  double f0 = 0.0;
  try {
    f0 = f.at_offset(x0, Point(d));
    r.pointwise_finite = std::isfinite(f0);
  } catch (const ExceptionalPointError&) {
    r.pointwise_finite = false;
  }

  // int |f| Phi: bounded region adaptively, the outside by shells in u = 1/r.
  {
    auto g = [&](const Point& y) {
      const double w = weight_phi(op, sigma, y);
      if (w == 0.0) return 0.0;
      return std::fabs(f(y)) * w;
    };
    auto extra = singular_radii(f, Point(d));
    double R0 = std::max(8.0, 2.0 * x0.norm());
    for (double e : extra) R0 = std::max(R0, 2.0 * e);
    extra.push_back(x0.norm());
    const auto radii = radial_breaks(1.0, extra, R0);
    try {
      IntegralOutcome inner = integrate_polar(g, d, radii, spec, false);
      const auto rule = sphere_rule(d, spec.angular_points, false);
      auto outer = [&](double u) {
        const double rr = 1.0 / u;
        double s = 0.0;
        for (const auto& dir : rule) s += dir.weight * g(dir.u * rr);
        return s * std::pow(rr, d - 1) / (u * u);
      };
      IntegralOutcome tail = diagnose_shells(outer, 1.0 / R0, spec);
      r.weight_integral = tail;
      r.weight_integral.status = worst_status({inner.status, tail.status});
      r.weight_integral.value = inner.value + tail.value;
      r.weight_integral.error_estimate = inner.error_estimate + tail.error_estimate;
    } catch (const ExceptionalPointError&) {
      r.weight_integral = inconclusive();
    }
  }

  if (!r.pointwise_finite) {
    r.verdict = Verdict::NotAdmissible;
    return r;
  }

  // (A, inf): e^{-sL}|f|(x0) + |f(x0)|, finite once f is in L1(Phi).
  if (r.weight_integral.converged()) {
    ScalarField af(d, [&f](const Point& y) { return std::fabs(f(y)); }, "|" + f.label() + "|");
    for (const auto& sp : f.singular_points()) af.with_singular_point(sp);
    const QuadratureSpec inner = spec.scaled(0.01);
    const double af0 = std::fabs(f0);
    auto g = [&](double s) { return heat_apply(op, s, af, x0, inner) + af0; };
    try {
      r.tail_part = integrate_power_tail(g, spec.split_A, sigma, spec);
    } catch (const QuadratureError&) {
      r.tail_part = inconclusive();
    }
  } else {
    r.tail_part = inconclusive();
    r.tail_part.status = r.weight_integral.status;
  }

  try {
    r.local_part = local_admissibility(op, sigma, f, x0, r.delta, spec);
  } catch (const QuadratureError&) {
    r.local_part = inconclusive();
  }

  // |y - x0| >= delta against K(x0, y).
  if (r.weight_integral.converged()) {
    const QuadratureSpec inner = spec.scaled(0.01);
    auto g = [&](const Point& z) {
      const double v = std::fabs(f.at_offset(x0, z) - f0);
      if (v == 0.0) return 0.0;
      const double k = kernel_K(op, sigma, x0, x0 + z, inner);
      return k == 0.0 ? 0.0 : v * k;
    };
    const double dl = r.delta;
    const double radii[] = {dl, 1.5 * dl, 2.0 * dl, 4.0 * dl, kInf};
    try {
      r.far_part = integrate_polar(g, d, radii, spec, false);
    } catch (const QuadratureError&) {
      r.far_part = inconclusive();
    }
  } else {
    r.far_part = inconclusive();
    r.far_part.status = r.weight_integral.status;
  }

  const Status s = worst_status({r.weight_integral.status, r.tail_part.status, r.local_part.status, r.far_part.status});
  r.verdict = s == Status::Converged ? Verdict::Admissible
              : s == Status::Diverged ? Verdict::NotAdmissible
                                      : Verdict::Inconclusive;
  return r;
}

double agreement_spread(const FracResult& r) {
  std::vector<double> v;
  if (r.bochner.converged()) v.push_back(r.bochner.value);
  if (r.extension && r.extension->converged) v.push_back(r.extension->value);
  if (r.spectral) v.push_back(r.spectral->value);
  double spread = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    for (size_t j = i + 1; j < v.size(); ++j) spread = std::max(spread, std::fabs(v[i] - v[j]));
  }
  return spread;
}

FracResult fractional_power(const OperatorSpec& op, double sigma, const ScalarField& f, const Point& x0,
                            const QuadratureSpec& spec, const FracRequest& request) {
  if (op.kind == OperatorKind::OrnsteinUhlenbeck) return ou_fractional(sigma, f, x0, spec, request);
  FracResult r;
  r.bochner = bochner_fractional(op, sigma, f, x0, spec);
  if (request.extension) {
    try {
      r.extension = extension_limit(op, sigma, f, x0, request.t_sequence, spec, request.extension_tol);
    } catch (const NonConvergenceError& e) {
      r.extension = e.result();
    }
  }
  if (request.spectral && op.kind == OperatorKind::HermiteShifted) {
    try {
      r.spectral = spectral_fractional(op, sigma, f, x0, request.spectral_K, spec);
    } catch (const TailDominanceError&) {
      // Reported as absent; the series did not resolve f.
    }
  }
  r.agreement_spread = agreement_spread(r);
  return r;
}

FracResult ou_fractional(double sigma, const ScalarField& f, const Point& x0, const QuadratureSpec& spec,
                         const FracRequest& request) {
  check_sigma(sigma);
  const OperatorSpec L = OperatorSpec::hermite(f.dim(), -f.dim());
  FracResult r = fractional_power(L, sigma, ou_transfer(f), x0, spec, request);
  const double scale = std::exp(0.5 * x0.norm2());
  if (r.bochner.converged()) r.transferred_value = r.bochner.value;
  r.bochner.value *= scale;
  r.bochner.error_estimate *= scale;
  if (r.extension) {
    r.extension->value *= scale;
    for (auto& e : r.extension->extrapolants) e *= scale;
    for (auto& s : r.extension->trace) s.approximant *= scale;
  }
  if (r.spectral) {
    r.spectral->value *= scale;
    r.spectral->tail_estimate *= scale;
  }
  r.agreement_spread = agreement_spread(r);
  return r;
}

}  // namespace fracherm
