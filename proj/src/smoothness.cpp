#include "fracherm/smoothness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracherm/space.hpp"
#include "fracherm/special.hpp"

namespace fracherm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Tri tri_of(const IntegralOutcome& o) {
  switch (o.status) {
    case Status::Converged:
      return Tri::True;
    case Status::Diverged:
      return Tri::False;
    case Status::Inconclusive:
      break;
  }
  return Tri::Inconclusive;
}

Tri tri_and(Tri a, Tri b) {
  if (a == Tri::False || b == Tri::False) return Tri::False;
  if (a == Tri::True && b == Tri::True) return Tri::True;
  return Tri::Inconclusive;
}

// Shell diagnosis of int_{|h|<=outer} g(h) |h|^{-power} dh in polar form.
IntegralOutcome radial_shells(const std::function<double(const Point&)>& g, int d, double power, double outer,
                              bool even, const QuadratureSpec& qspec) {
  const auto rule = sphere_rule(d, qspec.angular_points, even);
  auto radial = [&](double r) {
    double s = 0.0;
    for (const auto& dir : rule) s += dir.weight * g(dir.u * r);
    return s * std::pow(r, d - 1 - power);
  };
  try {
    return diagnose_shells(radial, outer, qspec);
  } catch (const ExceptionalPointError&) {
    return IntegralOutcome{};
  }
}

double center_value(const ScalarField& f, const Point& x0) { return f.at_offset(x0, Point(x0.dim())); }

// int_{|h| > 1} D2_h f(x0) |h|^{-d-2sigma} dh after the tail integrability check.
IntegralOutcome pv_outer(const ScalarField& f, double sigma, const Point& x0, double f0, double inner,
                         const QuadratureSpec& qspec) {
  const int d = x0.dim();
  const double power = d + 2.0 * sigma;
  std::vector<double> radii{inner};
  for (double r = std::max(2.0 * inner, 1.0); r <= 16.0; r *= 2.0) {
    if (r > radii.back()) radii.push_back(r);
  }
  for (const auto& p : f.singular_points()) {
    const double r = (p - x0).norm();
    if (r > inner) radii.push_back(r);
  }
  std::sort(radii.begin(), radii.end());
  radii.push_back(kInf);

  auto tail = [&](const Point& h) { return std::fabs(f.at_offset(x0, h)) * std::pow(1.0 + h.norm(), -power); };
  IntegralOutcome check = integrate_polar(tail, d, radii, qspec, false);
  if (!check.converged()) {
    throw IntegrabilityError("frac_laplacian_pv: f not integrable against (1+|y|)^{-d-2sigma}", check);
  }
  auto g = [&](const Point& h) {
    const double d2 = f.at_offset(x0, h) + f.at_offset(x0, -h) - 2.0 * f0;
    return d2 * std::pow(h.norm(), -power);
  };
  radii.pop_back();
  IntegralOutcome out = integrate_polar(g, d, radii, qspec, true);
  // Beyond the last break D2 tends to -2 f0, so the radial integrand decays
  // only like r^{-1-2sigma}.
  const auto rule = sphere_rule(d, qspec.angular_points, true);
  auto shell = [&](double r) {
    double s = 0.0;
    for (const auto& dir : rule) {
      const Point h = dir.u * r;
      s += dir.weight * (f.at_offset(x0, h) + f.at_offset(x0, -h) - 2.0 * f0);
    }
    return s;
  };
  const IntegralOutcome far = integrate_power_tail(shell, radii.back(), 2.0 * sigma, qspec);
  out.value += far.value;
  out.error_estimate += far.error_estimate;
  if (!far.converged()) out.status = Status::Inconclusive;
  return out;
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::domain_error("sigma must lie in (0,1)");
}

}  // namespace

const char* to_string(Tri t) {
  switch (t) {
    case Tri::True:
      return "true";
    case Tri::False:
      return "false";
    case Tri::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

void SmoothnessSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::domain_error("smoothness: alpha must lie in (0,2)");
  if (!(delta > 0.0)) throw std::domain_error("smoothness: delta must be > 0");
}

double delta1(const ScalarField& f, const Point& x0, const Point& h) {
  return f.at_offset(x0, h) - f.at_offset(x0, -h);
}

double delta2(const ScalarField& f, const Point& x0, const Point& h) {
  return f.at_offset(x0, h) + f.at_offset(x0, -h) - 2.0 * center_value(f, x0);
}

SmoothnessReport dini_membership(const ScalarField& f, const SmoothnessSpec& spec, const QuadratureSpec& qspec) {
  spec.validate();
  qspec.validate();
  const int d = f.dim();
  if (spec.x0.dim() != d) throw std::invalid_argument("dini_membership: dimension mismatch");
  const Point& x0 = spec.x0;
  SmoothnessReport r;
  r.redundancy_note = d + spec.alpha - 3.0 <= 0.0;

  double f0 = 0.0;
  try {
    f0 = center_value(f, x0);
  } catch (const ExceptionalPointError&) {
    return r;  // every verdict stays inconclusive
  }
  const double strict_power = d + spec.alpha - 3.0;
  r.second_diff_integral = radial_shells(
      [&](const Point& h) { return std::fabs(f.at_offset(x0, h) + f.at_offset(x0, -h) - 2.0 * f0); }, d,
      d + spec.alpha, spec.delta, true, qspec);
  r.first_diff_integral = radial_shells(
      [&](const Point& h) { return std::fabs(f.at_offset(x0, h) - f.at_offset(x0, -h)); }, d, strict_power,
      spec.delta, true, qspec);
  r.centered_diff_integral = radial_shells([&](const Point& h) { return std::fabs(f.at_offset(x0, h) - f0); }, d,
                                           strict_power, spec.delta, false, qspec);

  r.in_D_alpha = tri_of(r.second_diff_integral);
  r.strict_via_centered = tri_and(r.in_D_alpha, tri_of(r.centered_diff_integral));
  if (r.redundancy_note) {
    r.in_D_alpha_strict = r.in_D_alpha;
  } else {
    const Tri first = tri_of(r.first_diff_integral);
    r.in_D_alpha_strict = first == Tri::Inconclusive ? r.strict_via_centered : tri_and(r.in_D_alpha, first);
  }
  return r;
}

double lip_estimate(const ScalarField& f, const Point& x0, std::span<const double> radii, int angular_points) {
  const int d = f.dim();
  if (x0.dim() != d) throw std::invalid_argument("lip_estimate: dimension mismatch");
  for (size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] < radii[i - 1]))) {
      throw std::invalid_argument("lip_estimate: radii must be positive and decreasing");
    }
  }
  const double f0 = center_value(f, x0);
  std::optional<Point> grad;
  if (f.has_gradient()) grad = f.gradient(x0);
  const auto rule = sphere_rule(d, angular_points, false);
  std::vector<double> lx;
  std::vector<double> ly;
  for (double r : radii) {
    double sup = 0.0;
    for (const auto& dir : rule) {
      const Point h = dir.u * r;
      double v = f.at_offset(x0, h) - f0;
      if (grad) v -= grad->dot(h);
      sup = std::max(sup, std::fabs(v));
    }
    if (sup > 0.0 && std::isfinite(sup)) {
      lx.push_back(std::log(r));
      ly.push_back(std::log(sup));
    }
  }
  if (lx.size() < 3) throw DegenerateFitError("lip_estimate: fewer than 3 radii give a finite log value");
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

std::pair<ScalarField, ScalarField> even_odd_split(const ScalarField& f, const Point& x0) {
  const int d = f.dim();
  if (x0.dim() != d) throw std::invalid_argument("even_odd_split: dimension mismatch");
  auto even_off = [f, x0](const Point& h) { return 0.5 * (f.at_offset(x0, h) + f.at_offset(x0, -h)); };
  auto odd_off = [f, x0](const Point& h) { return 0.5 * (f.at_offset(x0, h) - f.at_offset(x0, -h)); };
  ScalarField even(d, [even_off, x0](const Point& x) { return even_off(x - x0); }, "even(" + f.label() + ")");
  ScalarField odd(d, [odd_off, x0](const Point& x) { return odd_off(x - x0); }, "odd(" + f.label() + ")");
  even.with_anchor(x0, even_off);
  odd.with_anchor(x0, odd_off);
  for (const auto& p : f.singular_points()) {
    even.with_singular_point(p);
    even.with_singular_point(x0 * 2.0 - p);
    odd.with_singular_point(p);
    odd.with_singular_point(x0 * 2.0 - p);
  }
  try {
    const double f0 = center_value(f, x0);
    even.with_known_value(x0, f0);
    odd.with_known_value(x0, 0.0);
  } catch (const ExceptionalPointError&) {
    even.with_exceptional_point(x0);
    odd.with_known_value(x0, 0.0);
  }
  return {std::move(even), std::move(odd)};
}

IntegralOutcome frac_laplacian_pv(const ScalarField& f, double sigma, const Point& x0, const QuadratureSpec& qspec) {
  check_sigma(sigma);
  qspec.validate();
  const int d = f.dim();
  if (x0.dim() != d) throw std::invalid_argument("frac_laplacian_pv: dimension mismatch");
  const double c = frac_laplacian_constant(d, sigma);
  const double f0 = center_value(f, x0);
  const double power = d + 2.0 * sigma;
  IntegralOutcome far = pv_outer(f, sigma, x0, f0, 1.0, qspec);
  auto g = [&](const Point& h) {
    return -0.5 * c * (f.at_offset(x0, h) + f.at_offset(x0, -h) - 2.0 * f0);
  };
  IntegralOutcome near = radial_shells(g, d, power, 1.0, true, qspec);
  if (!near.converged()) return near;
  if (!far.converged()) {
    far.status = Status::Inconclusive;
    return far;
  }
  near.value += -0.5 * c * far.value;
  near.error_estimate += 0.5 * c * far.error_estimate;
  return near;
}

IntegralOutcome frac_laplacian_partial(const ScalarField& f, double sigma, const Point& x0, double inner_cutoff,
                                       const QuadratureSpec& qspec) {
  check_sigma(sigma);
  qspec.validate();
  if (!(inner_cutoff > 0.0)) throw std::invalid_argument("frac_laplacian_partial: cutoff must be > 0");
  const int d = f.dim();
  if (x0.dim() != d) throw std::invalid_argument("frac_laplacian_partial: dimension mismatch");
  const double c = frac_laplacian_constant(d, sigma);
  const double f0 = center_value(f, x0);
  const double power = d + 2.0 * sigma;
  const double split = std::max(1.0, inner_cutoff);
  IntegralOutcome out = pv_outer(f, sigma, x0, f0, split, qspec);
  if (inner_cutoff < 1.0) {
    std::vector<double> radii;
    for (double r = inner_cutoff; r < 1.0; r *= 2.0) radii.push_back(r);
    radii.push_back(1.0);
    auto g = [&](const Point& h) {
      return (f.at_offset(x0, h) + f.at_offset(x0, -h) - 2.0 * f0) * std::pow(h.norm(), -power);
    };
    const IntegralOutcome near = integrate_polar(g, d, radii, qspec, true);
    out.value += near.value;
    out.error_estimate += near.error_estimate;
    if (!near.converged()) out.status = Status::Inconclusive;
  }
  out.value *= -0.5 * c;
  out.error_estimate *= 0.5 * c;
  return out;
}

}  // namespace fracherm
