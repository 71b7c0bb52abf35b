#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracherm {

using RealFn = std::function<double(double)>;

/// Tolerances and shell-diagnosis policy shared by every integral in the
/// library. Nested integrals derive their own (tighter) specs from this one.
struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
  /// Time-axis split point; tanh(split_A) = 1/2 by default.
  double split_A = 0.54930614433405484570;
  /// Ratio between consecutive dyadic shells, in (0,1).
  double shell_ratio = 0.5;
  /// A shell sum is declared divergent only once its magnitude exceeds this.
  double divergence_threshold = 10.0;
  /// Shells stop once their inner edge drops below 2^min_shell_exponent.
  int min_shell_exponent = -60;
  /// Directions per circle for d >= 2 radial reductions.
  int angular_points = 64;

  void validate() const;
  double target(double value) const {
    return std::max(abs_tol, rel_tol * std::fabs(value));
  }
  /// Same policy with tolerances scaled by `factor` (< 1 tightens).
  QuadratureSpec scaled(double factor) const;
};

enum class Status { Converged, Diverged, Inconclusive };

const char* to_string(Status s);

struct ShellSample {
  double scale;
  double partial_sum;
};

struct IntegralOutcome {
  Status status = Status::Inconclusive;
  double value = 0.0;  // meaningful only when converged()
  double error_estimate = 0.0;
  std::vector<ShellSample> shell_trace;

  bool converged() const { return status == Status::Converged; }
};

/// Thrown where an operation needs a number and the engine could not give one.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, IntegralOutcome outcome)
      : std::runtime_error(what), outcome_(std::move(outcome)) {}
  const IntegralOutcome& outcome() const { return outcome_; }

 private:
  IntegralOutcome outcome_;
};

/// Globally adaptive bisection with the 7/15-point Gauss-Kronrod pair.
/// Endpoint singularities are resolved by repeated bisection toward them;
/// the rule never samples the endpoints themselves.
IntegralOutcome integrate_adaptive(const RealFn& f, double a, double b,
                                   const QuadratureSpec& spec);

/// Integral over (a, inf) via t = a + u/(1-u).
IntegralOutcome integrate_semiinfinite(const RealFn& f, double a,
                                       const QuadratureSpec& spec);

/// Sum of integrate_adaptive over consecutive [breaks[i], breaks[i+1]]; a
/// final break of +inf is handled by integrate_semiinfinite. Breaks must be
/// non-decreasing; empty pieces are skipped.
IntegralOutcome integrate_pieces(const RealFn& f, std::span<const double> breaks,
                                 const QuadratureSpec& spec);

/// int_A^inf H(s) ds / s^{1+sigma} through w = s^{-sigma}, which keeps the
/// integrand bounded when H tends to a nonzero constant. H is frozen at s_max.
IntegralOutcome integrate_power_tail(const RealFn& H, double A, double sigma, const QuadratureSpec& spec,
                                     double s_max = 1e8);

/// Integrates f over (0, outer] shell by shell,
/// [outer*r^{j+1}, outer*r^j], and decides convergence or divergence of the
/// shell series.
///
/// Diverged: the last five contributions are non-decreasing in magnitude and
/// the partial sum exceeds divergence_threshold. Converged: the contribution
/// magnitudes decay geometrically and the (extrapolated) tail is within
/// tolerance, or the contributions are negligible against abs_tol.
/// Inconclusive otherwise once 2^min_shell_exponent is reached.
IntegralOutcome diagnose_shells(const RealFn& f, double outer, const QuadratureSpec& spec);

struct NodeWeight {
  double node;
  double weight;
};

/// Gauss-Hermite rule for the weight e^{-x^2}, 1 <= n <= 256, ascending nodes.
std::vector<NodeWeight> gauss_hermite_nodes(int n);

/// Gauss-Legendre rule on (-1, 1), ascending nodes.
std::vector<NodeWeight> gauss_legendre_nodes(int n);

}  // namespace fracherm
