#include <gtest/gtest.h>

#include <cmath>

#include "fracherm/quad.hpp"
#include "fracherm/special.hpp"

using namespace fracherm;

TEST(Adaptive, SqrtEndpointSingularity) {
  const QuadratureSpec spec;
  const auto o = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, spec);
  ASSERT_TRUE(o.converged());
  EXPECT_NEAR(o.value, 2.0, 1e-9);
}

TEST(Adaptive, ReversedBoundsRejected) {
  const QuadratureSpec spec;
  const auto f = [](double x) { return std::cos(x); };
  EXPECT_NEAR(integrate_adaptive(f, 0.0, 1.0, spec).value, std::sin(1.0), 1e-13);
  EXPECT_THROW(integrate_adaptive(f, 1.0, 0.0, spec), std::invalid_argument);
}

TEST(SemiInfinite, Exponential) {
  const QuadratureSpec spec;
  const auto o = integrate_semiinfinite([](double x) { return std::exp(-x); }, 1.0, spec);
  ASSERT_TRUE(o.converged());
  EXPECT_NEAR(o.value, std::exp(-1.0), 1e-12);
}

TEST(Pieces, InfiniteLastBreak) {
  const QuadratureSpec spec;
  const double breaks[] = {0.0, 1.0, 4.0, INFINITY};
  const auto o = integrate_pieces([](double x) { return std::exp(-x * x); }, breaks, spec);
  ASSERT_TRUE(o.converged());
  EXPECT_NEAR(o.value, 0.5 * std::sqrt(M_PI), 1e-12);
}

TEST(Shells, PowerBelowCriticalConverges) {
  // int_0^1 t^{-1-s+e} dt = 1/(e-s), s = 0.5, e = 0.7
  const QuadratureSpec spec;
  const auto o = diagnose_shells([](double t) { return std::pow(t, -0.8); }, 1.0, spec);
  ASSERT_EQ(o.status, Status::Converged);
  EXPECT_NEAR(o.value, 5.0, 1e-7);
  EXPECT_FALSE(o.shell_trace.empty());
}

TEST(Shells, HarmonicDiverges) {
  const QuadratureSpec spec;
  const auto o = diagnose_shells([](double t) { return 1.0 / t; }, 1.0, spec);
  EXPECT_EQ(o.status, Status::Diverged);
  EXPECT_GT(o.value, spec.divergence_threshold);
}

TEST(Shells, CriticalPowerDiverges) {
  const QuadratureSpec spec;
  const auto o = diagnose_shells([](double t) { return std::pow(t, -1.5); }, 1.0, spec);
  EXPECT_EQ(o.status, Status::Diverged);
}

TEST(Shells, VanishingIntegrandConverges) {
  const QuadratureSpec spec;
  const auto o = diagnose_shells([](double) { return 0.0; }, 1.0, spec);
  EXPECT_EQ(o.status, Status::Converged);
  EXPECT_EQ(o.value, 0.0);
}

TEST(GaussHermite, MomentsAndLargeOrders) {
  for (int n : {1, 10, 100, 220, 256}) {
    const auto rule = gauss_hermite_nodes(n);
    ASSERT_EQ(static_cast<int>(rule.size()), n);
    double m0 = 0.0;
    double m2 = 0.0;
    for (const auto& [x, w] : rule) {
      m0 += w;
      m2 += w * x * x;
    }
    EXPECT_NEAR(m0, std::sqrt(M_PI), 1e-13) << n;
    if (n > 1) EXPECT_NEAR(m2, 0.5 * std::sqrt(M_PI), 1e-13) << n;
    for (size_t i = 1; i < rule.size(); ++i) EXPECT_LT(rule[i - 1].node, rule[i].node);
  }
  EXPECT_THROW(gauss_hermite_nodes(0), std::invalid_argument);
  EXPECT_THROW(gauss_hermite_nodes(257), std::invalid_argument);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const auto rule = gauss_legendre_nodes(8);
  double s = 0.0;
  for (const auto& [x, w] : rule) s += w * std::pow(x, 14);
  EXPECT_NEAR(s, 2.0 / 15.0, 1e-15);
}

TEST(Spec, ValidateRejectsBadPolicy) {
  QuadratureSpec spec;
  spec.shell_ratio = 1.5;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  QuadratureSpec ok;
  EXPECT_NO_THROW(ok.validate());
  EXPECT_DOUBLE_EQ(ok.scaled(0.1).rel_tol, 1e-11);
}

TEST(Special, GammaAndConstants) {
  EXPECT_NEAR(gamma_negative(0.5), -3.5449077018110320546, 1e-14);
  EXPECT_NEAR(frac_laplacian_constant(1, 0.5), 0.31830988618379067154, 1e-15);
  const FracParams p = FracParams::make(0.5);
  EXPECT_NEAR(p.c_sigma, 1.0, 1e-15);
  EXPECT_NEAR(p.a_sigma, 0.5 / std::sqrt(M_PI), 1e-15);
  // F_{1/2}(z) = sqrt(pi) e^{-z}
  EXPECT_NEAR(bessel_k_integral(0.5, 1.3), std::sqrt(M_PI) * std::exp(-1.3), 1e-12);
}
