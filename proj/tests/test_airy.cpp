#include <cmath>
#include <random>

#include <boost/math/special_functions/airy.hpp>
#include <gtest/gtest.h>

#include "xres/acceptance.hpp"
#include "xres/airy.hpp"

using namespace xres;

namespace {

double rel_or_abs(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Airy, ValueAtZero) {
  const AiryPair p = airy_eval(0.0);
  EXPECT_NEAR(p.ai, 0.3550280538878172, 1e-16);
  EXPECT_NEAR(p.wronskian(), 1.0 / kPi, 1e-16);
}

TEST(Airy, MatchesBoostAcrossRange) {
  for (double y = -200.0; y <= 80.0; y += 0.37) {
    const AiryPair p = airy_eval(y);
    // Ai decays below double range resolution for large y; compare relative to the local envelope.
    const double ai_scale = std::max(std::abs(boost::math::airy_ai(y)), 1e-300);
    EXPECT_LT(std::abs(p.ai - boost::math::airy_ai(y)) / std::max(ai_scale, y < 0 ? std::pow(-y, -0.25) : 0.0), 2e-12)
        << y;
    EXPECT_LT(std::abs(p.bi - boost::math::airy_bi(y)) / std::max(std::abs(boost::math::airy_bi(y)),
                                                                   y < 0 ? std::pow(-y, -0.25) : 0.0),
              2e-12)
        << y;
  }
}

TEST(Airy, WronskianAtRandomPoints) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(kAiryMin, kAiryMax);
  for (int i = 0; i < 100; ++i) {
    const double y = u(rng);
    EXPECT_LT(std::abs(airy_eval(y).wronskian() * kPi - 1.0), 1e-11) << y;
  }
}

TEST(Airy, PositiveAsymptoticLeadingTerm) {
  const double lead = 0.5 / std::sqrt(kPi) * std::pow(10.0, -0.25) * std::exp(-2.0 / 3.0 * std::pow(10.0, 1.5));
  EXPECT_LT(std::abs(airy_eval(10.0).ai / lead - 1.0), 0.032);
}

TEST(Airy, NegativeEnvelope) {
  for (double y = -200.0; y <= -20.0; y += 1.3)
    EXPECT_LE(std::abs(airy_eval(y).ai * std::sqrt(kPi) * std::pow(-y, 0.25)), 1.0 + 5.0 * std::pow(-y, -1.5));
}

TEST(Airy, RangeErrors) {
  EXPECT_THROW(airy_eval(-200.5), RangeError);
  EXPECT_THROW(airy_eval(80.5), RangeError);
  EXPECT_THROW(ci_eval(100.0), RangeError);
}

TEST(Ci, DefinitionAndConjugate) {
  const AiryPair p = airy_eval(0.0);
  const CiPair c = ci_eval(0.0);
  const cplx ep = std::polar(1.0, kPi / 4);
  EXPECT_LT(std::abs(c.ci - (ep * p.ai + std::conj(ep) * p.bi)), 1e-16);
  for (double y : {-30.0, -2.5, 0.7, 5.0}) {
    const CiPair d = ci_eval(y);
    EXPECT_EQ(d.ci_star, std::conj(d.ci));
  }
}

TEST(Ci, LinearIdentityRecoversTwiceAi) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-200.0, 20.0);
  const cplx em = std::polar(1.0, -kPi / 4);
  for (int i = 0; i < 100; ++i) {
    const double y = u(rng);
    const CiPair c = ci_eval(y);
    const double scale = std::max(1.0, std::abs(c.ci));
    EXPECT_LT(std::abs(em * c.ci + std::conj(em) * c.ci_star - 2.0 * airy_eval(y).ai) / scale, 1e-12) << y;
  }
}

TEST(Ci, OscillatoryModulus) {
  EXPECT_LT(std::abs(std::abs(ci_eval(-25.0).ci) / (std::pow(25.0, -0.25) / std::sqrt(kPi)) - 1.0), 0.01);
}

TEST(AiryProduct, ReferenceValue) {
  EXPECT_NEAR(airy_product_integral(1.0, 2.0, 0.0, 0.0), std::pow(7.0, -1.0 / 3.0) * 0.3550280538878172, 1e-15);
  EXPECT_NEAR(airy_product_integral(1.0, 2.0, 0.0, 0.0), 0.185596, 3e-6);
}

TEST(AiryProduct, EqualShiftsGiveAiAtZero) {
  for (auto [l1, l2] : {std::pair{0.7, 2.5}, std::pair{-1.5, 0.9}, std::pair{-2.0, -0.6}})
    EXPECT_NEAR(airy_product_integral(l1, l2, 0.3, 0.3),
                0.3550280538878172 / std::cbrt(std::abs(l2 * l2 * l2 - l1 * l1 * l1)), 1e-14);
}

// The quadrature oracle settles the sign: the integral is symmetric in the two factors.
TEST(AiryProduct, QuadratureFixesSignForBothOrders) {
  const double q12 = detail::airy_product_quadrature(1.0, 2.0, 0.0, 0.0);
  const double q21 = detail::airy_product_quadrature(2.0, 1.0, 0.0, 0.0);
  EXPECT_NEAR(q12, q21, 1e-10);
  EXPECT_NEAR(q12, airy_product_integral(1.0, 2.0, 0.0, 0.0), 1e-8);
  EXPECT_NEAR(q21, airy_product_integral(2.0, 1.0, 0.0, 0.0), 1e-8);
}

TEST(AiryProduct, RandomTuplesAgainstQuadrature) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mag(0.5, 3.0), mu(-1.0, 1.0), coin(0.0, 1.0);
  for (int k = 0; k < 6; ++k) {
    double l1 = 0.0, l2 = 0.0;
    do {
      l1 = (coin(rng) < 0.5 ? -1.0 : 1.0) * mag(rng);
      l2 = (coin(rng) < 0.5 ? -1.0 : 1.0) * mag(rng);
    } while (std::abs(l1 - l2) < 0.25);
    const double m1 = mu(rng), m2 = mu(rng);
    EXPECT_LT(rel_or_abs(detail::airy_product_quadrature(l1, l2, m1, m2), airy_product_integral(l1, l2, m1, m2)),
              1e-6)
        << l1 << " " << l2 << " " << m1 << " " << m2;
  }
}

TEST(AiryProduct, DomainErrors) {
  EXPECT_THROW(airy_product_integral(1.0, 1.0, 0.0, 0.0), DomainError);
  EXPECT_THROW(airy_product_integral(0.0, 1.0, 0.0, 0.0), DomainError);
}
