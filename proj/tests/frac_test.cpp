#include <gtest/gtest.h>

#include <cmath>

#include "fracherm/frac.hpp"
#include "fracherm/hermite.hpp"

using namespace fracherm;

namespace {

ScalarField gauss1() {
  return ScalarField(1, [](const Point& p) { return std::exp(-p[0] * p[0]); }, "exp(-x^2)");
}

ScalarField psi1() {
  return ScalarField(1, [](const Point& p) { return std::exp(-0.5 * p[0] * p[0]); }, "psi");
}

}  // namespace

// Spectral sums of exp(-x^2) over its closed-form even coefficients, summed
// to 60 terms in 30-digit arithmetic.
struct GaussCase {
  double sigma;
  double x0;
  double value;
};

class GaussOracle : public ::testing::TestWithParam<GaussCase> {};

TEST_P(GaussOracle, BochnerAndSpectralMatch) {
  const auto [sigma, x0, value] = GetParam();
  const auto op = OperatorSpec::hermite(1, 0.0);
  const QuadratureSpec spec;
  const auto b = bochner_fractional(op, sigma, gauss1(), Point{x0}, spec);
  ASSERT_TRUE(b.converged());
  EXPECT_NEAR(b.value, value, 1e-8);
  const auto s = spectral_fractional(op, sigma, gauss1(), Point{x0}, 80, spec);
  EXPECT_NEAR(s.value, value, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Frozen, GaussOracle,
                         ::testing::Values(GaussCase{0.3, 0.0, 1.13269952782657914274},
                                           GaussCase{0.3, 0.5, 0.81283937037906591243},
                                           GaussCase{0.5, 0.0, 1.27397099297958808947},
                                           GaussCase{0.5, 0.5, 0.84512303311079222543}));

TEST(Bochner, EigenfunctionLaw) {
  const QuadratureSpec spec;
  for (double m : {0.0, -1.0}) {
    const auto op = OperatorSpec::hermite(1, m);
    ScalarField h3(1, [](const Point& p) { return hermite_function_1d(3, p[0]); }, "h3");
    const auto o = bochner_fractional(op, 0.25, h3, Point{0.7}, spec);
    ASSERT_TRUE(o.converged());
    const double want = std::pow(7.0 + m, 0.25) * hermite_function_1d(3, 0.7);
    EXPECT_NEAR(o.value / want, 1.0, 1e-6);
  }
}

TEST(Bochner, ShiftedLaplacianConstant) {
  const QuadratureSpec spec;
  ScalarField one(1, [](const Point&) { return 1.0; }, "one");
  const auto o = bochner_fractional(OperatorSpec::shifted_laplacian(1, 2.0), 0.5, one, Point{0.3}, spec);
  ASSERT_TRUE(o.converged());
  EXPECT_NEAR(o.value, std::sqrt(2.0), 1e-8);
}

TEST(Bochner, KinkIsNotAbsolutelyIntegrable) {
  const QuadratureSpec spec;
  ScalarField kink(1, [](const Point& p) { return std::fabs(p[0]) * std::exp(-p[0] * p[0]); }, "|x|e");
  const auto o = bochner_fractional(OperatorSpec::hermite(1, 0.0), 0.5, kink, Point{0.0}, spec);
  EXPECT_EQ(o.status, Status::Diverged);
}

TEST(Bochner, RejectsSigmaOutsideUnitInterval) {
  const QuadratureSpec spec;
  EXPECT_THROW(bochner_fractional(OperatorSpec::hermite(1, 0.0), 1.0, gauss1(), Point{0.0}, spec),
               std::domain_error);
}

TEST(Poisson, HalfOrderSubordination) {
  // sigma = 1/2: P_t psi = e^{-t sqrt(lambda)} psi with lambda = 1.
  const QuadratureSpec spec;
  const auto op = OperatorSpec::hermite(1, 0.0);
  for (auto order : {IntegrationOrder::TimeOuter, IntegrationOrder::SpaceOuter}) {
    const double got = poisson_apply(op, 0.5, 0.7, psi1(), Point{0.4}, spec, order);
    EXPECT_NEAR(got, std::exp(-0.7) * std::exp(-0.08), 1e-6);
  }
}

TEST(Poisson, KernelIsPositiveAndSymmetric) {
  const QuadratureSpec spec;
  for (double m : {0.0, -1.0}) {
    const auto op = OperatorSpec::hermite(1, m);
    const double a = poisson_kernel(op, 0.5, 1.0, Point{0.0}, Point{2.5}, spec);
    const double b = poisson_kernel(op, 0.5, 1.0, Point{2.5}, Point{0.0}, spec);
    EXPECT_GT(a, 0.0);
    EXPECT_NEAR(a / b, 1.0, 1e-9);
  }
}

TEST(Poisson, WeightComparabilityOnGrid) {
  const QuadratureSpec spec;
  const auto op = OperatorSpec::hermite(1, -1.0);
  double lo = INFINITY;
  double hi = 0.0;
  for (double y = -6.0; y <= 6.0; y += 0.5) {
    const double r = poisson_kernel(op, 0.5, 1.0, Point{0.0}, Point{y}, spec) / weight_phi(op, 0.5, Point{y});
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi / lo, 2.0);
}

// -c t^{1-2s} d/dt P_t psi(0) with P_t psi = (2/Gamma(s)) (t/2)^s K_s(t) psi,
// differentiated in 30-digit arithmetic.
TEST(Extension, ApproximantOracle) {
  const QuadratureSpec spec;
  const auto op = OperatorSpec::hermite(1, 0.0);
  EXPECT_NEAR(extension_approximant(op, 0.3, psi1(), Point{0.0}, 0.25, spec), 0.87161025090847678082, 1e-8);
  EXPECT_NEAR(extension_approximant(op, 0.75, psi1(), Point{0.0}, 0.25, spec), 0.53694207884326270314, 1e-8);
  EXPECT_NEAR(extension_approximant(op, 0.5, psi1(), Point{0.0}, 0.25, spec), std::exp(-0.25), 1e-8);
}

TEST(Extension, RawAndSubtractedFormsAgree) {
  const QuadratureSpec spec;
  const auto op = OperatorSpec::shifted_laplacian(1, 1.0);
  const double a = extension_approximant(op, 0.5, gauss1(), Point{0.2}, 0.1, spec, true);
  const double b = extension_approximant(op, 0.5, gauss1(), Point{0.2}, 0.1, spec, false);
  EXPECT_NEAR(a, b, 1e-6);
}

TEST(Extension, LimitMatchesClosedForm) {
  // x^2 e^{-x^2/2} = pi^{1/4}(h0/2 + h2/sqrt2): value (1 - 5^s)/2 at 0.
  const QuadratureSpec spec;
  ScalarField f(1, [](const Point& p) { return p[0] * p[0] * std::exp(-0.5 * p[0] * p[0]); }, "x2g");
  const auto ts = halving_sequence();
  for (double s : {0.3, 0.5}) {
    const auto r = extension_limit(OperatorSpec::hermite(1, 0.0), s, f, Point{0.0}, ts, spec);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 0.5 * (1.0 - std::pow(5.0, s)), 1e-8);
    EXPECT_EQ(r.trace.size(), ts.size());
  }
}

TEST(Extension, ShortSequenceDoesNotConverge) {
  const QuadratureSpec spec;
  const std::vector<double> ts{0.5, 0.25};
  EXPECT_THROW(extension_limit(OperatorSpec::hermite(1, 0.0), 0.5, gauss1(), Point{0.0}, ts, spec, 1e-12),
               NonConvergenceError);
  const std::vector<double> bad{0.25, 0.5};
  EXPECT_THROW(extension_limit(OperatorSpec::hermite(1, 0.0), 0.5, gauss1(), Point{0.0}, bad, spec),
               std::invalid_argument);
}

TEST(Identity, VanishingIntegral) {
  const QuadratureSpec spec;
  for (double s : {0.25, 0.5, 0.75}) {
    for (double t : {0.5, 1.0, 2.0}) EXPECT_LE(identity_I_check(s, t, spec), 1e-9);
  }
}

TEST(Spectral, TailDominanceOnRoughData) {
  const QuadratureSpec spec;
  ScalarField kink(1, [](const Point& p) { return std::fabs(p[0]) * std::exp(-p[0] * p[0]); }, "|x|e");
  EXPECT_THROW(spectral_fractional(OperatorSpec::hermite(1, 0.0), 0.5, kink, Point{0.0}, 40, spec),
               TailDominanceError);
}

TEST(Spectral, TwoDimensionalProduct) {
  // exp(-x1^2) psi(x2): L = L1 + L2 does not factor under a fractional power,
  // so compare with the Bochner value instead.
  const QuadratureSpec spec;
  const auto op = OperatorSpec::hermite(2, 0.0);
  ScalarField f(2, [](const Point& p) { return std::exp(-p[0] * p[0] - 0.5 * p[1] * p[1]); }, "f");
  const Point x0{0.5, 0.1};
  const auto s = spectral_fractional(op, 0.5, f, x0, 60, spec);
  const auto b = bochner_fractional(op, 0.5, f, x0, spec);
  ASSERT_TRUE(b.converged());
  EXPECT_NEAR(s.value, b.value, 1e-7);
}

TEST(OrnsteinUhlenbeck, ConstantsAreAnnihilated) {
  const QuadratureSpec spec;
  ScalarField one(1, [](const Point&) { return 1.0; }, "one");
  for (double x : {0.0, -1.5}) {
    const auto r = ou_fractional(0.5, one, Point{x}, spec);
    ASSERT_TRUE(r.bochner.converged());
    EXPECT_NEAR(r.bochner.value, 0.0, 1e-8);
  }
}

TEST(OrnsteinUhlenbeck, TransferenceIdentity) {
  const QuadratureSpec spec;
  ScalarField x2(1, [](const Point& p) { return p[0] * p[0]; }, "x2");
  const Point x0{0.8};
  const auto r = ou_fractional(0.25, x2, x0, spec);
  const auto b = bochner_fractional(OperatorSpec::hermite(1, -1.0), 0.25, ou_transfer(x2), x0, spec);
  EXPECT_NEAR(r.bochner.value, std::exp(0.32) * b.value, 1e-10);
  // x^2 - 1/2 has eigenvalue 4.
  EXPECT_NEAR(r.bochner.value, std::pow(4.0, 0.25) * (0.64 - 0.5), 1e-7);
}

TEST(Admissibility, SmoothAndKinkedData) {
  const QuadratureSpec spec;
  const auto op = OperatorSpec::hermite(1, 0.0);
  EXPECT_EQ(admissibility_check(op, 0.5, gauss1(), Point{0.5}, spec).verdict, Verdict::Admissible);
  ScalarField kink(1, [](const Point& p) { return std::fabs(p[0]) * std::exp(-p[0] * p[0]); }, "|x|e");
  const auto r = admissibility_check(op, 0.5, kink, Point{0.0}, spec);
  EXPECT_EQ(r.verdict, Verdict::NotAdmissible);
  EXPECT_EQ(r.local_part.status, Status::Diverged);
}

TEST(Admissibility, GaussianGrowthFailsWeight) {
  const QuadratureSpec spec;
  ScalarField big(1, [](const Point& p) { return std::exp(0.6 * p[0] * p[0]); }, "e^{0.6x^2}");
  const auto r = admissibility_check(OperatorSpec::hermite(1, 0.0), 0.5, big, Point{0.0}, spec);
  EXPECT_NE(r.verdict, Verdict::Admissible);
  EXPECT_FALSE(r.weight_integral.converged());
}

TEST(FractionalPower, AllDefinitionsAgree) {
  const QuadratureSpec spec;
  FracRequest req;
  req.extension = true;
  req.spectral = true;
  const auto r = fractional_power(OperatorSpec::hermite(1, 0.0), 0.5, gauss1(), Point{0.5}, spec, req);
  ASSERT_TRUE(r.extension && r.spectral);
  EXPECT_LE(r.agreement_spread, 1e-6);
}
