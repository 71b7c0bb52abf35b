#include "fracherm/special.hpp"

#include <cmath>
#include <stdexcept>

namespace fracherm {

double gamma_fn(double x) {
  if (x <= 0.0 && x == std::floor(x)) throw std::domain_error("gamma_fn: pole at non-positive integer");
  return std::tgamma(x);
}

double gamma_negative(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("gamma_negative: sigma must lie in (0,1)");
  return std::tgamma(1.0 - s) / (-s);
}

FracParams FracParams::make(double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::domain_error("sigma must lie in (0,1)");
  FracParams p;
  p.sigma = sigma;
  p.c_sigma = std::pow(2.0, 2.0 * sigma - 1.0) * std::tgamma(sigma) / std::tgamma(1.0 - sigma);
  p.a_sigma = 1.0 / (std::pow(4.0, sigma) * std::tgamma(sigma));
  p.gamma_minus_sigma = gamma_negative(sigma);
  return p;
}

double frac_laplacian_constant(int d, double sigma) {
  if (d < 1) throw std::domain_error("frac_laplacian_constant: d must be >= 1");
  return std::pow(4.0, sigma) * std::tgamma(0.5 * d + sigma) /
         (std::pow(M_PI, 0.5 * d) * std::fabs(gamma_negative(sigma)));
}

double bessel_k_integral(double nu, double z) {
  if (!(z > 0.0)) throw std::domain_error("bessel_k_integral: z must be > 0");
  return 2.0 * std::pow(0.5 * z, nu) * std::cyl_bessel_k(nu, z);
}

}  // namespace fracherm
