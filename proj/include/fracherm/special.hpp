#pragma once

namespace fracherm {

/// Gamma function on the reals (poles excluded); thin wrapper over std::tgamma.
double gamma_fn(double x);

/// Gamma(-s) = Gamma(1-s)/(-s) for s in (0,1); always negative there.
double gamma_negative(double s);

/// Constants tied to a fractional order sigma in (0,1).
struct FracParams {
  double sigma;
  double c_sigma;            // 2^{2s-1} Gamma(s) / Gamma(1-s), the Neumann-limit constant
  double a_sigma;            // 1 / (4^s Gamma(s)), from the t-derivative of the Poisson kernel
  double gamma_minus_sigma;  // Gamma(1-s) / (-s)

  static FracParams make(double sigma);
};

/// Normalizing constant of the singular-integral form of (-Laplacian)^sigma
/// in R^d: 4^s Gamma(d/2+s) / (pi^{d/2} |Gamma(-s)|).
double frac_laplacian_constant(int d, double sigma);

/// F_nu(z) = int_0^inf e^{-s} e^{-z^2/(4s)} s^{nu-1} ds = 2 (z/2)^nu K_nu(z).
double bessel_k_integral(double nu, double z);

}  // namespace fracherm
