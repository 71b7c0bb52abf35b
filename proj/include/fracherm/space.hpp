#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "fracherm/field.hpp"
#include "fracherm/quad.hpp"

namespace fracherm {

struct Direction {
  Point u;
  double weight;
};

/// Quadrature on the unit sphere S^{d-1} (weights sum to its area).
/// d=2 uses equally spaced midpoint angles; d=3 uses Gauss-Legendre in the
/// e1-component on each hemisphere times equally spaced azimuths, so a
/// sign(x.e1) factor is integrated exactly. With `half`, only directions with
/// positive leading angle are kept and weights are doubled (for even
/// integrands).
std::vector<Direction> sphere_rule(int d, int angular_points, bool half);

/// int_{R^d} g(z) dz in polar coordinates around 0. `radii` are the radial
/// breaks (sorted, starting at 0, optionally ending with +inf).
IntegralOutcome integrate_polar(const std::function<double(const Point&)>& g, int d,
                                std::span<const double> radii, const QuadratureSpec& spec,
                                bool even);

/// Radial breaks {0, w, 2w, 4w, 8w, 16w} merged with `extra` (positive radii)
/// and closed with +inf (or with `outer` when finite).
std::vector<double> radial_breaks(double width, std::span<const double> extra,
                                  double outer = std::numeric_limits<double>::infinity());

}  // namespace fracherm
