#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracherm/field.hpp"
#include "fracherm/quad.hpp"

namespace fracherm {

/// Outcome of a grid-sup certification of "kernel <= c * bound".
struct KernelBoundReport {
  std::string grid;
  double sup_ratio = 0.0;
  double refinement_drift = 0.0;  // |sup(fine) - sup(coarse)| / sup(coarse)
  bool pass = false;
  /// Trial exponents for the Gaussian-tail check (empty elsewhere).
  struct Trial {
    double gamma;
    double sup_ratio;
    double refinement_drift;
    bool pass;
  };
  std::vector<Trial> trials;
};

inline constexpr double kMaxRefinementDrift = 0.10;

/// K(x,y) = int_0^A h_t(x,y) dt / t^{1+sigma} with tanh(A) = tanh(split_A)
/// for the Hermite operator (integrated in s = tanh t), and with A = inf for
/// the shifted Laplacian. Requires x != y.
double kernel_K(const OperatorSpec& op, double sigma, const Point& x, const Point& y,
                const QuadratureSpec& spec);

/// The model kernel int_0^{tanh A} e^{-(|x-y|^2/s + s|x+y|^2)/4} s^{-1-sigma-d/2} ds.
double kernel_K1(const OperatorSpec& op, double sigma, const Point& x, const Point& y,
                 const QuadratureSpec& spec);

/// K'(x,y) = int_0^A |h_t(x,x+y) - h_t(x,x-y)| dt / t^{1+sigma}; the two
/// kernels are differenced before the time integration.
double kernel_K_prime(const OperatorSpec& op, double sigma, const Point& x, const Point& y,
                      const QuadratureSpec& spec);

/// Range of the pointwise factor relating the K and K1 integrands on
/// s in (0, tanh A); K/K1 must lie inside it.
struct Interval {
  double lo;
  double hi;
};
Interval kernel_K_factor_range(const OperatorSpec& op, double sigma, const QuadratureSpec& spec);

/// sup of K(x,y) |x-y|^{d+2 sigma} over |x| <= 3, 1e-3 <= |x-y| <= 1.
KernelBoundReport verify_size_bound(const OperatorSpec& op, double sigma, const QuadratureSpec& spec);

/// sup of K'(x,y) |y|^{(d+2 sigma-3)_+} / |x| over 0.1 <= |x| <= 3, 1e-3 <= |y| <= 1.
KernelBoundReport verify_smoothness_bound(const OperatorSpec& op, double sigma,
                                          const QuadratureSpec& spec);

/// Hermite: sup of K(x,y) e^{(1/2+gamma)|y|^2} over |x| <= 1, 10 <= |y| <= 14
/// for gamma in {0.01, 0.05, 0.1}. Shifted Laplacian: sup of K / Phi over
/// |y| >= 2 max(|x|,1).
KernelBoundReport verify_gaussian_tail(const OperatorSpec& op, double sigma,
                                       const QuadratureSpec& spec);

/// K(0, y) strictly decreasing along e1 for |y| in [10, 14].
bool kernel_tail_monotone(const OperatorSpec& op, double sigma, const QuadratureSpec& spec);

/// Worst ratio |e^{-|x+y|^2} - e^{-|x-y|^2}| / (4|x||y| e^{-min|x+-y|^2})
/// over random x, y in [-5,5]^d, cycling d through 1, 2, 3.
double elementary_inequality_check(int samples, std::uint64_t seed = 20240611);

/// The analytic size constant of the shifted-Laplacian kernel:
/// 4^{sigma+d/2} Gamma(sigma+d/2) / (4 pi)^{d/2}.
double shifted_laplacian_size_constant(int d, double sigma);

}  // namespace fracherm
