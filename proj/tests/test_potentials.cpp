#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "xres/models.hpp"
#include "xres/numerics.hpp"
#include "xres/potentials.hpp"

using namespace xres;

namespace {

PotentialModel model_n2() { return shipped_model(2).potentials; }

}  // namespace

TEST(Model, ShippedModelsValidate) {
  for (int n : {1, 2, 3}) EXPECT_NO_THROW(shipped_model(n)) << n;
  EXPECT_THROW(shipped_model(4), DomainError);
}

TEST(Model, ValidationRejectsBadInput) {
  const Interval dom{-1.5, 1.0};
  EXPECT_THROW(PotentialModel({0.0, 1.0, 1.0}, {0.0, 1.0, 0.0, 1.0}, 0.5, dom), ModelError);
  EXPECT_THROW(PotentialModel({1.0, 1.0, 1.0}, {0.0, 1.0, 0.0, 1.0}, -1.0, dom), ModelError);
  EXPECT_THROW(PotentialModel({0.0, 1.0, 1.0}, {0.0, -1.0, 0.0, 1.0}, -1.0, dom), ModelError);
  // V2 above V1 left of the crossing.
  EXPECT_THROW(PotentialModel({0.0, 1.0, 1.0}, {0.0, 1.0, 2.0}, -1.0, dom), ModelError);
}

TEST(ContactOrder, ShippedModels) {
  const CrossingData c2 = detect_contact_order(model_n2());
  EXPECT_EQ(c2.n, 2);
  EXPECT_NEAR(c2.q_n, 1.0, 1e-14);
  EXPECT_NEAR(c2.v0, 1.0, 1e-14);
  EXPECT_NEAR(c2.bracket_2n, -24.0, 1e-12);

  const CrossingData c1 = detect_contact_order(shipped_model(1).potentials);
  EXPECT_EQ(c1.n, 1);
  EXPECT_NEAR(c1.q_n, -std::pow(2.0, -0.25), 1e-12);
  EXPECT_EQ(detect_contact_order(shipped_model(3).potentials).n, 3);
}

// Identical potentials already violate V2 < V1 left of the crossing, so they never reach the contact-order scan.
TEST(ContactOrder, IdenticalPotentialsRejected) {
  EXPECT_THROW(PotentialModel({0.0, 1.0, 1.0}, {0.0, 1.0, 1.0}, -1.0, {-1.5, 1.0}), ModelError);
}

TEST(TurningPoint, Values) {
  const PotentialModel m = model_n2();
  EXPECT_NEAR(turning_point(m, 1, 0.0).real(), 0.0, 1e-15);
  EXPECT_NEAR(turning_point(m, 2, 0.0).real(), 0.0, 1e-15);
  const double a2 = turning_point_real(m, 2, 0.01);
  EXPECT_NEAR(a2, 0.0099990003, 1e-9);
  EXPECT_LE(std::abs(a2 + a2 * a2 * a2 - 0.01), 1e-15);
}

TEST(TurningPoint, DifferenceLaw) {
  const PotentialModel m = model_n2();
  const CrossingData c = detect_contact_order(m);
  std::vector<double> es, diff;
  for (double E = 1e-4; E <= 1.0001e-2; E *= std::sqrt(10.0)) {
    es.push_back(E);
    diff.push_back(std::abs(turning_point_real(m, 2, E) - turning_point_real(m, 1, E)));
  }
  EXPECT_NEAR(loglog_slope(es, diff), c.n, 0.05);
  const double E = 1e-4;
  EXPECT_NEAR((turning_point_real(m, 2, E) - turning_point_real(m, 1, E)) / (c.q_n / std::sqrt(c.v0) * E * E), 1.0,
              0.01);
}

TEST(Langer, LinearPotentialIsIdentity) {
  const PotentialModel m({0.0, 1.0, 1.0}, {0.0, 1.0}, -1.0, {-1.5, 1.0});
  const LangerChart c = langer_xi(m, 2, 0.0);
  const Interval ch = m.chart();
  for (int i = 0; i <= 40; ++i) {
    const double x = ch.lo + (ch.hi - ch.lo) * i / 40.0;
    EXPECT_NEAR(c.xi(x), x, 1e-12) << x;
    EXPECT_NEAR(c.xi_direct(x), x, 1e-12) << x;
  }
}

TEST(Langer, SignConventionAndIdentity) {
  for (int n : {1, 2, 3}) {
    const PotentialModel m = shipped_model(n).potentials;
    for (int k = 0; k < 10; ++k) {
      const double E = -0.15 + 0.3 * k / 9.0;
      for (int j : {1, 2}) {
        const LangerChart c = langer_xi(m, j, E);
        const Interval ch = m.chart();
        EXPECT_NEAR(c.xi(c.turning_point()), 0.0, 1e-10);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
          const double x = ch.lo + (ch.hi - ch.lo) * (i + 0.5) / 50.0;
          const double xi = c.xi(x), d = c.xi_deriv(x);
          EXPECT_GT(d, 0.0);
          if (x < c.turning_point()) EXPECT_LT(xi, 0.0);
          if (x > c.turning_point()) EXPECT_GT(xi, 0.0);
          worst = std::max(worst, std::abs(xi * d * d - c.potential_minus_energy(x)));
        }
        EXPECT_LT(worst, 1e-10) << n << " " << j << " " << E;
      }
    }
  }
}

TEST(Action, CircleArea) {
  const PotentialModel m = model_n2();
  for (double E : {-0.2, 0.0, 0.1, 0.2}) {
    const ActionValue a = action(m, E);
    EXPECT_NEAR(a.A, kPi * (E + 0.25), 1e-12) << E;
    EXPECT_NEAR(a.A_deriv, kPi, 1e-10) << E;
  }
  EXPECT_NEAR(action(m, -0.25 + 1e-6).A, kPi * 1e-6, 1e-12);
}

TEST(Action, DerivativeMatchesFiniteDifference) {
  const PotentialModel m({0.0, 1.0, 1.3, 0.3}, {0.0, 1.0, 0.0, 1.0}, -1.0, {-1.5, 1.0});
  const double E = 0.05, d = 1e-4;
  const double fd = (action(m, E + d).A - action(m, E - d).A) / (2.0 * d);
  EXPECT_LT(std::abs(action(m, E).A_deriv / fd - 1.0), 1e-6);
}

TEST(Action, DegenerateWell) { EXPECT_THROW(action(model_n2(), -0.25), DomainError); }

TEST(Bump, SupportAndSmoothness) {
  EXPECT_DOUBLE_EQ(bump(0.0, 0.4).v, 1.0);
  EXPECT_EQ(bump(0.4, 0.4).v, 0.0);
  EXPECT_EQ(bump(-0.5, 0.4).v, 0.0);
  const double x = 0.17, e = 1e-5;
  EXPECT_NEAR(bump(x, 0.4).d1, (bump(x + e, 0.4).v - bump(x - e, 0.4).v) / (2 * e), 1e-7);
  EXPECT_NEAR(bump(x, 0.4).d2, (bump(x + e, 0.4).d1 - bump(x - e, 0.4).d1) / (2 * e), 1e-6);
  EXPECT_NEAR(bump(x, 0.4).d3, (bump(x + e, 0.4).d2 - bump(x - e, 0.4).d2) / (2 * e), 1e-5);
}
