#include "fracherm/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracherm {

std::vector<Direction> sphere_rule(int d, int angular_points, bool half) {
  std::vector<Direction> rule;
  if (d == 1) {
    if (half) {
      rule.push_back({Point{1.0}, 2.0});
    } else {
      rule.push_back({Point{1.0}, 1.0});
      rule.push_back({Point{-1.0}, 1.0});
    }
    return rule;
  }
  if (d == 2) {
    const int n = half ? std::max(2, angular_points / 2) : angular_points;
    const double span = half ? M_PI : 2.0 * M_PI;
    const double start = half ? -0.5 * M_PI : 0.0;
    const double w = 2.0 * M_PI / n;
    for (int k = 0; k < n; ++k) {
      const double th = start + (k + 0.5) * span / n;
      rule.push_back({Point{std::cos(th), std::sin(th)}, w});
    }
    return rule;
  }
  if (d == 3) {
    const int n_mu = std::max(4, angular_points / 8);
    const int n_phi = std::max(8, angular_points / 2);
    const auto gl = gauss_legendre_nodes(n_mu);
    const double w_phi = 2.0 * M_PI / n_phi;
    for (int hemi = half ? 1 : 0; hemi < 2; ++hemi) {
      for (const auto& [node, weight] : gl) {
        // Map (-1,1) onto (-1,0) or (0,1).
        const double mu = hemi == 0 ? 0.5 * (node - 1.0) : 0.5 * (node + 1.0);
        const double w_mu = 0.5 * weight * (half ? 2.0 : 1.0);
        const double rho = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        for (int k = 0; k < n_phi; ++k) {
          const double ph = (k + 0.5) * w_phi;
          rule.push_back({Point{mu, rho * std::cos(ph), rho * std::sin(ph)}, w_mu * w_phi});
        }
      }
    }
    return rule;
  }
  throw std::invalid_argument("sphere_rule: dimension must be in [1, 3]");
}

IntegralOutcome integrate_polar(const std::function<double(const Point&)>& g, int d,
                                std::span<const double> radii, const QuadratureSpec& spec,
                                bool even) {
  const auto rule = sphere_rule(d, spec.angular_points, even);
  RealFn radial = [&](double r) {
    double s = 0.0;
    for (const auto& dir : rule) s += dir.weight * g(dir.u * r);
    if (d == 2) s *= r;
    if (d == 3) s *= r * r;
    return s;
  };
  return integrate_pieces(radial, radii, spec);
}

std::vector<double> radial_breaks(double width, std::span<const double> extra, double outer) {
  std::vector<double> b{0.0};
  for (double k : {1.0, 2.0, 4.0, 8.0, 16.0}) b.push_back(k * width);
  for (double e : extra) {
    if (e > 0.0 && std::isfinite(e)) b.push_back(e);
  }
  std::sort(b.begin(), b.end());
  std::vector<double> out;
  for (double v : b) {
    if (v > outer) break;
    if (out.empty() || v > out.back() * (1.0 + 1e-12)) out.push_back(v);
  }
  if (out.back() < outer) out.push_back(outer);
  return out;
}

}  // namespace fracherm
