#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracherm/field.hpp"
#include "fracherm/quad.hpp"
#include "fracherm/special.hpp"

namespace fracherm {

/// Case-matched integrability weight Phi_sigma for the operator.
double weight_phi(const OperatorSpec& op, double sigma, const Point& y);

/// Subordinated Poisson kernel
///   p_t(x,y) = (t/2)^{2 sigma}/Gamma(sigma) int_0^inf e^{-t^2/4s} h_s(x,y) ds/s^{1+sigma}.
double poisson_kernel(const OperatorSpec& op, double sigma, double t, const Point& x,
                      const Point& y, const QuadratureSpec& spec);

/// d/dt p_t(x,y) = a_sigma t^{2sigma-1} int (2sigma - t^2/2s) e^{-t^2/4s} h_s ds/s^{1+sigma}.
double poisson_kernel_dt(const OperatorSpec& op, double sigma, double t, const Point& x,
                         const Point& y, const QuadratureSpec& spec);

enum class IntegrationOrder { TimeOuter, SpaceOuter };

/// P_t f(x) = int p_t(x,y) f(y) dy.
double poisson_apply(const OperatorSpec& op, double sigma, double t, const ScalarField& f,
                     const Point& x, const QuadratureSpec& spec,
                     IntegrationOrder order = IntegrationOrder::TimeOuter);

/// L^sigma f(x0) = (1/Gamma(-sigma)) int_0^inf (e^{-sL}f(x0) - f(x0)) ds/s^{1+sigma}.
///
/// (0, split_A] is scanned shell by shell on the absolute integrand, so a
/// non-absolutely-convergent integral reports Diverged (value holds the
/// partial sum of the absolute shells). (split_A, inf) is integrated directly.
IntegralOutcome bochner_fractional(const OperatorSpec& op, double sigma, const ScalarField& f,
                                   const Point& x0, const QuadratureSpec& spec);

struct ExtensionSample {
  double t;
  double approximant;
};

struct ExtensionResult {
  double value = 0.0;
  std::vector<ExtensionSample> trace;
  std::vector<double> extrapolants;
  bool converged = false;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, ExtensionResult r)
      : std::runtime_error(what), result_(std::move(r)) {}
  const ExtensionResult& result() const { return result_; }

 private:
  ExtensionResult result_;
};

/// -c_sigma t^{1-2sigma} d/dt P_t f(x0) with the t-derivative taken under the
/// integral. With `subtract_value`, f(x0) is removed from e^{-sL}f(x0) inside
/// the time integral (legitimate because the weight integrates to zero).
double extension_approximant(const OperatorSpec& op, double sigma, const ScalarField& f,
                             const Point& x0, double t, const QuadratureSpec& spec,
                             bool subtract_value = true);

/// t0 * 2^{-j}, j = 0..count-1.
std::vector<double> halving_sequence(double t0 = 0.5, int count = 7);

/// Richardson-extrapolated t -> 0 limit of extension_approximant along a
/// strictly decreasing t_sequence (all >= 1e-4). Throws NonConvergenceError
/// (carrying the trace) when successive extrapolants differ by more than tol.
ExtensionResult extension_limit(const OperatorSpec& op, double sigma, const ScalarField& f,
                                const Point& x0, std::span<const double> t_sequence,
                                const QuadratureSpec& spec, double tol = 1e-6);

/// |I| t^{2 sigma} with I = int_0^inf (2sigma - t^2/2s) e^{-t^2/4s} ds/s^{1+sigma}.
double identity_I_check(double sigma, double t, const QuadratureSpec& spec);

struct SpectralResult {
  double value = 0.0;
  int truncation_K = 0;
  double tail_estimate = 0.0;
};

class TailDominanceError : public std::runtime_error {
 public:
  TailDominanceError(const std::string& what, SpectralResult r)
      : std::runtime_error(what), result_(r) {}
  const SpectralResult& result() const { return result_; }

 private:
  SpectralResult result_;
};

/// sum_{|k| <= K} lambda_k^sigma <f, h_k> h_k(x0) with Gauss-Hermite
/// coefficients; d in {1, 2}. `tail_tol` <= 0 means spec.target(value).
SpectralResult spectral_fractional(const OperatorSpec& op, double sigma, const ScalarField& f,
                                   const Point& x0, int K, const QuadratureSpec& spec,
                                   double tail_tol = 0.0);

enum class Verdict { Admissible, NotAdmissible, Inconclusive };
const char* to_string(Verdict v);

struct AdmissibilityReport {
  IntegralOutcome weight_integral;  // int |f| Phi_sigma
  bool pointwise_finite = false;
  IntegralOutcome tail_part;   // int_A^inf (e^{-sL}|f|(x0) + |f(x0)|) ds/s^{1+sigma}
  IntegralOutcome local_part;  // int_0^A |I_delta f(x0,s)| ds/s^{1+sigma}
  IntegralOutcome far_part;    // int_{|y-x0| >= delta} |f(y)-f(x0)| K(x0,y) dy
  double delta = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

/// Split radius of the local/far decomposition: 11 max(|x0|,1) for Hermite
/// type operators, 3 max(|x0|,1) for the shifted Laplacian.
double default_delta(const OperatorSpec& op, const Point& x0);

/// int_0^A |I_delta f(x0,s)| ds/s^{1+sigma} where
/// I_delta f(x0,s) = int_{|y-x0|<delta} h_s(x0,y) (f(y)-f(x0)) dy. For the
/// shifted Laplacian the range (A, inf) is added.
IntegralOutcome local_admissibility(const OperatorSpec& op, double sigma, const ScalarField& f,
                                    const Point& x0, double delta, const QuadratureSpec& spec);

AdmissibilityReport admissibility_check(const OperatorSpec& op, double sigma, const ScalarField& f,
                                        const Point& x0, const QuadratureSpec& spec,
                                        std::optional<double> delta = std::nullopt);

struct FracResult {
  IntegralOutcome bochner;
  std::optional<ExtensionResult> extension;
  std::optional<SpectralResult> spectral;
  double agreement_spread = 0.0;
  /// OU only: L^sigma of the transferred field at x0 before rescaling.
  std::optional<double> transferred_value;
};

struct FracRequest {
  bool extension = false;
  bool spectral = false;
  int spectral_K = 80;
  std::vector<double> t_sequence = halving_sequence();
  double extension_tol = 1e-6;
};

/// Max pairwise |difference| among the definitions that produced a value.
double agreement_spread(const FracResult& r);

/// All requested definitions at one point.
FracResult fractional_power(const OperatorSpec& op, double sigma, const ScalarField& f,
                            const Point& x0, const QuadratureSpec& spec,
                            const FracRequest& request = {});

/// O^sigma f(x0) = e^{|x0|^2/2} L^sigma(f~)(x0), L = -Laplacian + |x|^2 - d,
/// f~ = e^{-|x|^2/2} f.
FracResult ou_fractional(double sigma, const ScalarField& f, const Point& x0,
                         const QuadratureSpec& spec, const FracRequest& request = {});

}  // namespace fracherm
