#include <cmath>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "xres/airy.hpp"
#include "xres/crossing.hpp"
#include "xres/models.hpp"

using namespace xres;

namespace {

const ModelConfig& n2() {
  static const ModelConfig m = shipped_model(2);
  return m;
}

}  // namespace

TEST(Window, EpsilonBranches) {
  EXPECT_EQ(epsilon_exponent(1), 0.0);
  EXPECT_EQ(epsilon_exponent(2), 0.5);
  EXPECT_NEAR(epsilon_exponent(3), 0.2, 1e-15);
  EXPECT_THROW(epsilon_exponent(0), DomainError);
}

TEST(Window, Classification) {
  const double h = 1e-4;
  EXPECT_EQ(make_point(cplx(0.0, 0.0), h, 2).window, EnergyWindow::small);
  EXPECT_EQ(make_point(cplx(0.9 * std::pow(h, 0.4), 0.0), h, 2).window, EnergyWindow::full);
  EXPECT_EQ(make_point(cplx(0.0, 0.0), h, 1).window, EnergyWindow::full);
  EXPECT_THROW(make_point(cplx(1.1 * std::pow(h, 0.4), 0.0), h, 2), DomainError);
  EXPECT_THROW(make_point(cplx(0.0, 2.0 * h), h, 2), DomainError);
  EXPECT_NEAR(make_point_at_lambda(0.7, h, 2).lambda, 0.7, 1e-12);
}

TEST(Kappa, ZeroValueModelTwo) {
  const CrossingData c = detect_contact_order(n2().potentials);
  EXPECT_NEAR(kappa_n(c, 1.0, 0.0), 2.0 * kPi * gen_airy_zero(2), 1e-10);
  EXPECT_NEAR(kappa_n(c, 1.0, 0.0), 2.40964367319, 1e-9);
  EXPECT_LT(std::abs(kappa_n_zero(c, 1.0) / kappa_n(c, 1.0, 0.0) - 1.0), 1e-10);
  EXPECT_NEAR(kappa_n_zero(c, 2.0), 2.0 * kappa_n_zero(c, 1.0), 1e-14);
  EXPECT_EQ(kappa_n(c, 0.0, 0.7), 0.0);
}

TEST(Kappa, TwoRoutesAgreeForOrderThree) {
  const CrossingData c = detect_contact_order(shipped_model(3).potentials);
  EXPECT_LT(std::abs(kappa_n_zero(c, 1.0) / kappa_n(c, 1.0, 0.0) - 1.0), 1e-10);
}

// The closed form carries V1'(0)^n only; with unequal slopes at n = 1 the two routes differ.
TEST(Kappa, OrderOneRoutesDifferWithUnequalSlopes) {
  const CrossingData c = detect_contact_order(shipped_model(1).potentials);
  EXPECT_NEAR(kappa_n(c, 1.0, 0.0), 1.98733, 1e-5);
  EXPECT_NEAR(kappa_n_zero(c, 1.0), 2.23071, 1e-5);
}

TEST(Kappa, UnitBracketToy) {
  CrossingData c;
  c.n = 1;
  c.bracket_2n = 6.0;
  EXPECT_NEAR(kappa_n_zero(c, 1.0), 2.0 * boost::math::tgamma(4.0 / 3) * std::cos(kPi / 6), 1e-14);
}

TEST(Kappa, DecaysForNegativeLambdaOscillatesForPositive) {
  const CrossingData c = detect_contact_order(n2().potentials);
  EXPECT_LT(std::abs(kappa_n(c, 1.0, -12.0)), 1e-3 * kappa_n(c, 1.0, 0.0));
  int sign_changes = 0;
  double prev = kappa_n(c, 1.0, 0.0);
  for (double l = 0.25; l <= 12.0; l += 0.25) {
    const double k = kappa_n(c, 1.0, l);
    if ((k > 0) != (prev > 0)) ++sign_changes;
    prev = k;
  }
  EXPECT_GE(sign_changes, 3);
}

TEST(Integral, ZeroInteraction) {
  InteractionModel off = n2().interaction;
  off.r0_amplitude = 0.0;
  EXPECT_EQ(crossing_integral(n2().potentials, off, 0.0, 1e-3).value, 0.0);
}

TEST(Integral, LeadingTermSmallWindow) {
  const CrossingData c = detect_contact_order(n2().potentials);
  const AsymptoticIntegral a = crossing_integral_asymptotic(make_point(cplx(0.0), 1e-4, 2), c, 1.0);
  EXPECT_NEAR(a.value, -0.38190, 5e-5);
  EXPECT_EQ(a.window, EnergyWindow::small);
  EXPECT_NEAR(a.error_order, 1.0 / 3.0, 1e-15);
  const AsymptoticIntegral f = crossing_integral_asymptotic(make_point(cplx(0.0), 1e-4, 1), c, 1.0);
  EXPECT_EQ(f.window, EnergyWindow::full);
}

TEST(Integral, OrderOneLeadingTermExponentiallySmall) {
  const CrossingData c = detect_contact_order(shipped_model(1).potentials);
  const AsymptoticIntegral a = crossing_integral_asymptotic(make_point_at_lambda(-15.0, 1e-6, 1, 20.0), c, 1.0);
  EXPECT_LT(std::abs(a.value), 1e-8);
}

TEST(Integral, ConvergesToLeadingTerm) {
  const CrossingData c = detect_contact_order(n2().potentials);
  std::vector<double> hs, dev;
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const double q = crossing_integral(n2().potentials, n2().interaction, 0.0, h).value;
    const double lead = crossing_integral_asymptotic(make_point(cplx(0.0), h, 2), c, 1.0).value;
    hs.push_back(h);
    dev.push_back(std::abs(q / lead - 1.0));
  }
  EXPECT_LT(dev.back(), dev.front());
  EXPECT_GT(loglog_slope(hs, dev), 0.05);
}

TEST(Integral, ScaledEnergiesAcrossLambda) {
  const CrossingData c = detect_contact_order(n2().potentials);
  for (double lambda : {-2.0, 0.0, 2.0}) {
    std::vector<double> hs, dev;
    for (double h : {1e-2, 1e-3, 1e-4}) {
      const double E = lambda * std::pow(h, 0.4);
      if (std::abs(E) > n2().potentials.e_max()) continue;
      const double q = crossing_integral(n2().potentials, n2().interaction, E, h).value;
      const double lead = crossing_integral_asymptotic(make_point_at_lambda(lambda, h, 2), c, 1.0).value;
      hs.push_back(h);
      dev.push_back(std::abs(q - lead));
    }
    ASSERT_GE(hs.size(), 2u);
    EXPECT_LT(dev.back(), dev.front()) << lambda;
  }
}

// Linearized potentials turn the integral into the Airy product closed form.
TEST(Integral, LinearizedOrderOneMatchesProductClosedForm) {
  const double h = 1e-3, E = 0.0;
  const double s1 = 1.0, s2 = 2.0;
  const double l1 = std::cbrt(s1 / (h * h)), l2 = std::cbrt(s2 / (h * h));
  const double closed = airy_product_integral(l1, l2, E / s1, E / s2);
  // Flat r0 = 1 and xi_j = s_j^{1/3} x, so xi1' xi2' is constant.
  const double prefactor = -2.0 * kPi / std::cbrt(h) / std::pow(s1 * s2, 1.0 / 6.0);
  const double via_lemma = prefactor * closed;
  const CrossingData c = detect_contact_order(shipped_model(1).potentials);
  const double lead = crossing_integral_asymptotic(make_point(cplx(E), h, 1), c, 1.0).value;
  EXPECT_LT(std::abs(via_lemma / lead - 1.0), 1e-12);
}

TEST(Transfer, AsymptoticForm) {
  const CrossingData c = detect_contact_order(n2().potentials);
  const TransferMatrix t = transfer_matrix_asymptotic(make_point(cplx(0.0), 1e-5, 2), c, 1.0);
  EXPECT_NEAR(std::abs(t.entries(0, 1)), 0.240964, 2e-6);
  EXPECT_EQ(t.entries(0, 1), t.entries(1, 0));
  const double k2 = std::pow(kappa_n(c, 1.0, 0.0) * std::pow(1e-5, 0.2), 2);
  EXPECT_NEAR(std::abs(t.entries.determinant() + 1.0 + k2), 0.0, 1e-12);
  const TransferMatrix z = transfer_matrix_asymptotic(make_point(cplx(0.0), 1e-5, 2), c, 0.0);
  EXPECT_EQ(z.entries(0, 0), cplx(0.0, -1.0));
  EXPECT_EQ(z.entries(0, 1), cplx(0.0, 0.0));
}

TEST(Wkb, PhaseAndSigma) {
  const ModelConfig& m = n2();
  const PhaseSigma p = wkb_phase_sigma(m.potentials, m.interaction, 0.0, -0.01);
  EXPECT_LT(std::abs(std::abs(p.phi) / (std::pow(0.01, 2.5) / 5.0) - 1.0), 0.05);
  // sigma ~ r0(0) / (2 sqrt(v0 |x|)) as x -> 0-.
  std::vector<double> xs{-0.02, -0.01, -0.005};
  std::vector<double> lim;
  for (double x : xs) lim.push_back(wkb_phase_sigma(m.potentials, m.interaction, 0.0, x).sigma * std::sqrt(-x));
  const double rich = 2.0 * lim[2] - lim[1];
  EXPECT_NEAR(rich, 0.5, 1e-3);
  EXPECT_THROW(wkb_phase_sigma(m.potentials, m.interaction, 0.0, 0.05), DomainError);
}

TEST(Wkb, PhaseDerivativeMatchesFiniteDifference) {
  const ModelConfig& m = n2();
  const double E = 0.02, x = -0.1, d = 1e-5;
  const double fd = (wkb_phase_sigma(m.potentials, m.interaction, E, x + d).phi -
                     wkb_phase_sigma(m.potentials, m.interaction, E, x - d).phi) /
                    (2.0 * d);
  EXPECT_NEAR(fd, wkb_phase_deriv(m.potentials, E, x), 1e-7);
}
