#include "fracherm/quad.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace fracherm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

// 15-point Kronrod abscissae with the embedded 7-point Gauss rule
// (QUADPACK qk15 tables).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gauss_kronrod15(const RealFn& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double fv1[7];
  double fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = f(center - dx);
    fv2[j] = f(center + dx);
    const double sum = fv1[j] + fv2[j];
    resk += kWgk[j] * sum;
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  double resabs = kWgk[7] * std::fabs(fc);
  for (int j = 0; j < 7; ++j) resabs += kWgk[j] * (std::fabs(fv1[j]) + std::fabs(fv2[j]));
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::fabs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::fabs(fv1[j] - mean) + std::fabs(fv2[j] - mean));
  }
  const double value = resk * half;
  resabs *= std::fabs(half);
  resasc *= std::fabs(half);
  double err = std::fabs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * resabs, err);
  }
  return {a, b, value, err};
}

bool splittable(const Piece& p) {
  const double mid = 0.5 * (p.a + p.b);
  const double scale = std::max(std::fabs(p.a), std::fabs(p.b));
  return (p.b - p.a) > 8.0 * kEps * scale && mid > p.a && mid < p.b &&
         (p.b - p.a) > 1e3 * std::numeric_limits<double>::min();
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Converged:
      return "converged";
    case Status::Diverged:
      return "diverged";
    case Status::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

void QuadratureSpec::validate() const {
  if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0) || (abs_tol == 0.0 && rel_tol == 0.0)) {
    throw std::invalid_argument("quadrature: abs_tol and rel_tol must be >= 0 and not both zero");
  }
  if (max_subdivisions <= 0) throw std::invalid_argument("quadrature: max_subdivisions must be > 0");
  if (!(split_A > 0.0)) throw std::invalid_argument("quadrature: split_A must be > 0");
  if (!(shell_ratio > 0.0 && shell_ratio < 1.0)) {
    throw std::invalid_argument("quadrature: shell_ratio must lie in (0,1)");
  }
  if (!(divergence_threshold > 0.0)) {
    throw std::invalid_argument("quadrature: divergence_threshold must be > 0");
  }
  if (angular_points < 4) throw std::invalid_argument("quadrature: angular_points must be >= 4");
}

QuadratureSpec QuadratureSpec::scaled(double factor) const {
  QuadratureSpec s = *this;
  s.abs_tol *= factor;
  s.rel_tol = std::max(s.rel_tol * factor, 4.0 * kEps);
  return s;
}

IntegralOutcome integrate_adaptive(const RealFn& f, double a, double b,
                                   const QuadratureSpec& spec) {
  if (!(a <= b)) throw std::invalid_argument("integrate_adaptive: requires a < b");
  IntegralOutcome out;
  if (a == b) {
    out.status = Status::Converged;
    return out;
  }
  std::priority_queue<Piece> active;
  std::vector<Piece> frozen;
  Piece first = gauss_kronrod15(f, a, b);
  active.push(first);
  double total = first.value;
  double total_err = first.error;
  int count = 1;

  auto finish = [&](Status status) {
    double v = 0.0;
    double e = 0.0;
    for (const auto& p : frozen) {
      v += p.value;
      e += p.error;
    }
    while (!active.empty()) {
      v += active.top().value;
      e += active.top().error;
      active.pop();
    }
    out.value = v;
    out.error_estimate = e;
    out.status = status;
    if (!std::isfinite(v) || !std::isfinite(e)) out.status = Status::Inconclusive;
    return out;
  };

  while (true) {
    if (!std::isfinite(total) || !std::isfinite(total_err)) return finish(Status::Inconclusive);
    if (total_err <= spec.target(total)) return finish(Status::Converged);
    if (active.empty() || count >= spec.max_subdivisions) return finish(Status::Inconclusive);
    Piece worst = active.top();
    active.pop();
    if (!splittable(worst)) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Piece left = gauss_kronrod15(f, worst.a, mid);
    Piece right = gauss_kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    active.push(left);
    active.push(right);
    ++count;
  }
}

IntegralOutcome integrate_semiinfinite(const RealFn& f, double a, const QuadratureSpec& spec) {
  RealFn g = [&f, a](double u) {
    const double one_minus = 1.0 - u;
    const double t = a + u / one_minus;
    if (!std::isfinite(t)) return 0.0;
    const double v = f(t);
    if (v == 0.0) return 0.0;
    return v / (one_minus * one_minus);
  };
  return integrate_adaptive(g, 0.0, 1.0, spec);
}

IntegralOutcome integrate_pieces(const RealFn& f, std::span<const double> breaks,
                                 const QuadratureSpec& spec) {
  IntegralOutcome out;
  out.status = Status::Converged;
  if (breaks.size() < 2) return out;
  const auto pieces = static_cast<double>(breaks.size() - 1);
  QuadratureSpec piece_spec = spec;
  piece_spec.abs_tol = spec.abs_tol / pieces;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i];
    const double hi = breaks[i + 1];
    if (!(hi > lo)) continue;
    IntegralOutcome part = std::isinf(hi) ? integrate_semiinfinite(f, lo, piece_spec)
                                          : integrate_adaptive(f, lo, hi, piece_spec);
    out.value += part.value;
    out.error_estimate += part.error_estimate;
    if (!part.converged()) out.status = Status::Inconclusive;
  }
  return out;
}

IntegralOutcome integrate_power_tail(const RealFn& H, double A, double sigma, const QuadratureSpec& spec,
                                     double s_max) {
  auto g = [&](double w) {
    const double s = std::min(std::pow(w, -1.0 / sigma), s_max);
    return H(s) / sigma;
  };
  std::vector<double> breaks{0.0};
  for (int k = 8; k >= 0; --k) breaks.push_back(std::pow(A * std::pow(4.0, k), -sigma));
  return integrate_pieces(g, breaks, spec);
}

IntegralOutcome diagnose_shells(const RealFn& f, double outer, const QuadratureSpec& spec) {
  if (!(outer > 0.0)) throw std::invalid_argument("diagnose_shells: outer must be > 0");
  const double r = spec.shell_ratio;
  const double floor_scale = std::ldexp(1.0, spec.min_shell_exponent);
  QuadratureSpec shell_spec = spec.scaled(0.1);
  shell_spec.abs_tol *= (1.0 - r);

  IntegralOutcome out;
  std::vector<double> contrib;
  double sum = 0.0;
  double quad_err = 0.0;
  double hi = outer;
  constexpr double kMonotoneSlack = 1e-3;
  constexpr int kWindow = 5;
  // Rounding in the integrand can stall the extrapolation short of the target;
  // the best estimate is then accepted within this factor of it.
  constexpr double kFloorSlack = 1e3;
  IntegralOutcome best;
  best.error_estimate = kInf;
  auto settle = [&](double partial) {
    if (best.error_estimate <= kFloorSlack * spec.target(best.value)) {
      best.status = Status::Converged;
      best.shell_trace = std::move(out.shell_trace);
      return best;
    }
    out.status = Status::Inconclusive;
    out.value = partial;
    out.error_estimate = kInf;
    return out;
  };

  while (true) {
    const double lo = hi * r;
    if (lo < floor_scale) break;
    IntegralOutcome shell = integrate_adaptive(f, lo, hi, shell_spec);
    if (!std::isfinite(shell.value)) {
      out.status = Status::Diverged;
      out.value = shell.value;
      out.error_estimate = kInf;
      out.shell_trace.push_back({lo, shell.value});
      return out;
    }
    contrib.push_back(shell.value);
    sum += shell.value;
    quad_err += shell.error_estimate;
    out.shell_trace.push_back({lo, sum});
    hi = lo;

    const std::size_t n = contrib.size();
    if (n < kWindow + 1) continue;

    double max_recent = 0.0;
    bool non_decreasing = true;
    bool same_sign = true;
    double q_min = kInf;
    double q_max = 0.0;
    for (std::size_t i = n - kWindow; i < n; ++i) {
      const double cur = std::fabs(contrib[i]);
      const double prev = std::fabs(contrib[i - 1]);
      max_recent = std::max(max_recent, cur);
      if (cur < prev * (1.0 - kMonotoneSlack) || cur == 0.0) non_decreasing = false;
      if ((contrib[i] > 0) != (contrib[i - 1] > 0)) same_sign = false;
      const double q = prev > 0.0 ? cur / prev : (cur > 0.0 ? kInf : 0.0);
      q_min = std::min(q_min, q);
      q_max = std::max(q_max, q);
    }

    if (non_decreasing && std::fabs(sum) > spec.divergence_threshold) {
      out.status = Status::Diverged;
      out.value = sum;
      out.error_estimate = kInf;
      return out;
    }

    // Contributions indistinguishable from zero. A collapse from non-negligible
    // shells straight to zero is rounding in the integrand, not convergence.
    const double noise = 1e-3 * spec.abs_tol * (1.0 - r);
    if (max_recent <= noise && std::fabs(contrib[n - kWindow - 1]) > 1e3 * noise && contrib[n - 1] == 0.0) {
      return settle(sum);
    }
    if (max_recent <= noise) {
      out.status = Status::Converged;
      out.value = sum;
      out.error_estimate = quad_err + kWindow * max_recent;
      return out;
    }

    if (q_max < 1.0 - kMonotoneSlack) {
      const double last = contrib[n - 1];
      const double a_last = std::fabs(last);
      const double tail_bound = a_last * q_max / (1.0 - q_max);
      double tail = 0.0;
      double tail_err = tail_bound;
      if (same_sign) {
        // Aitken: exact for one geometric rate; successive estimates differ by
        // about the error left by the slower subleading rates.
        auto aitken_tail = [&](std::size_t k) {
          const double q = contrib[k] / contrib[k - 1];
          return contrib[k] * q / (1.0 - q);
        };
        tail = aitken_tail(n - 1);
        const double a1 = sum + tail;
        const double a2 = sum - contrib[n - 1] + aitken_tail(n - 2);
        const double a3 = sum - contrib[n - 1] - contrib[n - 2] + aitken_tail(n - 3);
        const double drift = 2.0 * std::max(std::fabs(a1 - a2), std::fabs(a2 - a3));
        tail_err = std::min({tail_bound, a_last * (q_max / (1.0 - q_max) - q_min / (1.0 - q_min)), drift});
      }
      const double err = tail_err + quad_err;
      if (err < best.error_estimate) {
        best.value = sum + tail;
        best.error_estimate = err;
      }
      if (err <= spec.target(sum + tail)) {
        out.status = Status::Converged;
        out.value = sum + tail;
        out.error_estimate = err;
        return out;
      }
    }
  }
  return settle(sum);
}

std::vector<NodeWeight> gauss_hermite_nodes(int n) {
  if (n < 1 || n > 256) throw std::invalid_argument("gauss_hermite_nodes: n must be in [1, 256]");
  constexpr double kPiM4 = 0.75112554446494248286;  // pi^{-1/4}
  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  // Eigenvalues of the Jacobi matrix below z, by Sturm sequence.
  auto count_below = [n](double z) {
    int c = 0;
    double q = -z;
    if (q < 0.0) ++c;
    for (int j = 1; j < n; ++j) {
      if (q == 0.0) q = 1e-300;
      q = -z - 0.5 * j / q;
      if (q < 0.0) ++c;
    }
    return c;
  };
  const double zmax = std::sqrt(2.0 * n + 1.0) + 1.0;
  for (int i = 0; i < m; ++i) {
    // i-th largest root lies where the count passes n-1-i.
    double lo = 0.0;
    double hi = zmax;
    if (n % 2 == 1 && i == m - 1) hi = lo;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (count_below(mid) > n - 1 - i) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    double z = 0.5 * (lo + hi);
    double pp = 0.0;
    for (int it = 0; it < 3; ++it) {
      double p1 = kPiM4;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt(static_cast<double>(j - 1) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double step = p1 / pp;
      if (it < 2 && std::fabs(step) < 1e-6) z -= step;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = std::exp(M_LN2 - 2.0 * std::log(std::fabs(pp)));
  }
  if (n % 2 == 1) x[m - 1] = 0.0;
  std::vector<NodeWeight> rule(n);
  for (int i = 0; i < n; ++i) rule[i] = {x[n - 1 - i], w[n - 1 - i]};
  return rule;
}

std::vector<NodeWeight> gauss_legendre_nodes(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_nodes: n must be >= 1");
  std::vector<NodeWeight> rule(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule[i] = {-z, w};
    rule[n - 1 - i] = {z, w};
  }
  if (n % 2 == 1) rule[m - 1].node = 0.0;
  return rule;
}

}  // namespace fracherm
