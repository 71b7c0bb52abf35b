#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fracherm/field.hpp"
#include "fracherm/quad.hpp"

namespace fracherm {

enum class Tri { True, False, Inconclusive };
const char* to_string(Tri t);

struct SmoothnessSpec {
  double alpha = 1.0;
  double delta = 1.0;  // integration radius
  Point x0;

  void validate() const;
};

struct SmoothnessReport {
  IntegralOutcome second_diff_integral;  // int |D2_h f(x0)| / |h|^{d+alpha}
  IntegralOutcome first_diff_integral;   // int |D1_h f(x0)| / |h|^{d+alpha-3}
  /// int |f(x0+h) - f(x0)| / |h|^{d+alpha-3}, the equivalent strict form.
  IntegralOutcome centered_diff_integral;
  Tri in_D_alpha = Tri::Inconclusive;
  Tri in_D_alpha_strict = Tri::Inconclusive;
  /// Strict membership read off the centered form alone.
  Tri strict_via_centered = Tri::Inconclusive;
  /// d + alpha - 3 <= 0: the strict condition adds nothing.
  bool redundancy_note = false;
};

/// f(x0+h) - f(x0-h).
double delta1(const ScalarField& f, const Point& x0, const Point& h);
/// f(x0+h) + f(x0-h) - 2 f(x0).
double delta2(const ScalarField& f, const Point& x0, const Point& h);

SmoothnessReport dini_membership(const ScalarField& f, const SmoothnessSpec& spec, const QuadratureSpec& qspec);

class DegenerateFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Slope of log sup_{|h|=r} |f(x0+h) - f(x0) [- grad f(x0).h]| against log r
/// (least squares). The gradient correction is used when the field has one.
double lip_estimate(const ScalarField& f, const Point& x0, std::span<const double> radii,
                    int angular_points = 16);

/// Parts of f even and odd about x0; even + odd = f.
std::pair<ScalarField, ScalarField> even_odd_split(const ScalarField& f, const Point& x0);

class IntegrabilityError : public std::runtime_error {
 public:
  IntegrabilityError(const std::string& what, IntegralOutcome o)
      : std::runtime_error(what), outcome_(std::move(o)) {}
  const IntegralOutcome& outcome() const { return outcome_; }

 private:
  IntegralOutcome outcome_;
};

/// (-Laplacian)^sigma f(x0) = -(c_{d,sigma}/2) int D2_h f(x0) / |h|^{d+2 sigma} dh.
/// |h| <= 1 is scanned by shells (Diverged allowed; value is then the partial
/// sum reached); |h| > 1 is integrated directly after checking
/// f in L1(dy/(1+|y|)^{d+2 sigma}).
IntegralOutcome frac_laplacian_pv(const ScalarField& f, double sigma, const Point& x0, const QuadratureSpec& qspec);

/// The same integral restricted to |h| >= inner_cutoff.
IntegralOutcome frac_laplacian_partial(const ScalarField& f, double sigma, const Point& x0, double inner_cutoff,
                                       const QuadratureSpec& qspec);

}  // namespace fracherm
