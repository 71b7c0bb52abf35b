#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "fracherm/field.hpp"
#include "fracherm/quad.hpp"

namespace fracherm {

/// L2-normalized 1-d Hermite function h_k(x) = (2^k k! sqrt(pi))^{-1/2} H_k(x) e^{-x^2/2}.
double hermite_function_1d(int k, double x);

/// h_0(x), ..., h_kmax(x) from one pass of the recurrence.
std::vector<double> hermite_functions_1d(int kmax, double x);

/// Tensor-product Hermite function h_k(x) on R^d; k.size() must equal x.dim().
double hermite_function(std::span<const int> k, const Point& x);

/// 2|k| + d + m for the shifted Hermite operator.
double eigenvalue(const OperatorSpec& op, std::span<const int> k);

/// Heat kernel of -Laplacian + |x|^2 + m:
///   e^{-tm} exp(-|x-y|^2/(2 tanh 2t) - tanh(t) x.y) / (2 pi sinh 2t)^{d/2}.
double mehler_kernel(const OperatorSpec& op, double t, const Point& x, const Point& y);

/// The same kernel parametrized by s = tanh t in (0,1):
///   (1-s)^{(m+d)/2} (1+s)^{-(m-d)/2} exp(-(|x-y|^2/s + s|x+y|^2)/4) / (4 pi s)^{d/2}.
double mehler_kernel_tanh(const OperatorSpec& op, double s, const Point& x, const Point& y);

/// Heat kernel of the operator: Mehler for HermiteShifted,
/// e^{-tR} (4 pi t)^{-d/2} e^{-|x-y|^2/4t} for ShiftedLaplacian.
double heat_kernel(const OperatorSpec& op, double t, const Point& x, const Point& y);

/// int h_t(x,y) dy and int h_t(x,y) dy - 1, in closed form
/// (Hermite: e^{-tm} cosh(2t)^{-d/2} e^{-tanh(2t)|x|^2/2}).
double heat_mass(const OperatorSpec& op, double t, const Point& x);
double heat_mass_minus_one(const OperatorSpec& op, double t, const Point& x);

/// Where h_t(x, .) is centred and its per-axis standard deviation.
struct KernelShape {
  Point center;
  double width;
};
KernelShape kernel_shape(const OperatorSpec& op, double t, const Point& x);

/// Even and odd parts (in z) of z -> h_t(x0, x0+z).
struct KernelParity {
  double even;
  double odd;
};
KernelParity heat_kernel_parity(const OperatorSpec& op, double t, const Point& x0, const Point& z);

/// e^{-tL} f(x) = int h_t(x,y) f(y) dy. Throws QuadratureError when the
/// engine is inconclusive; OU must be transferred first.
double heat_apply(const OperatorSpec& op, double t, const ScalarField& f, const Point& x,
                  const QuadratureSpec& spec);

/// e^{-tL} f(x0) - f(x0) without cancellation: the local difference
/// f(x0+z) - f(x0) is integrated against the kernel split into even and odd
/// parts, plus f(x0) (mass - 1). Returns the engine outcome.
IntegralOutcome heat_increment(const OperatorSpec& op, double t, const ScalarField& f,
                               const Point& x0, double f0, const QuadratureSpec& spec);

/// x -> e^{-|x|^2/2} f(x).
ScalarField ou_transfer(const ScalarField& f);

struct Eigenvector {
  ScalarField field;
  double eigenvalue;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& what, double worst) : std::runtime_error(what), worst_(worst) {}
  double worst_residual() const { return worst_; }

 private:
  double worst_;
};

/// The positive eigenvector (e^{-|x|^2/2} with m+d, or 1 with R), checked
/// numerically against heat_apply at three points and three times.
Eigenvector eigenvector_check(const OperatorSpec& op, const QuadratureSpec& spec);

/// Radial breaks of an integrand around `center` that must straddle the
/// singular points of f.
std::vector<double> singular_radii(const ScalarField& f, const Point& center);

}  // namespace fracherm
