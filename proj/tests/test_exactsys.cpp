#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "xres/airy.hpp"
#include "xres/exactsys.hpp"
#include "xres/models.hpp"

using namespace xres;

namespace {

const ModelConfig& n2() {
  static const ModelConfig m = shipped_model(2);
  return m;
}

InteractionModel no_interaction() {
  InteractionModel u = n2().interaction;
  u.r0_amplitude = 0.0;
  return u;
}

}  // namespace

TEST(Grid, OriginIsANode) {
  const ExactSetup st = make_exact_setup(n2().potentials, n2().interaction, 0.01, 1e-3);
  EXPECT_NEAR(st.eg.grid.x(st.eg.origin), 0.0, 1e-14);
  EXPECT_NEAR(st.eg.grid.x(0), -n2().interaction.support_radius, 1e-15);
  EXPECT_EQ(st.eg.left.end, st.eg.right.begin);
}

TEST(Basis, WronskiansNormalized) {
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const ExactSetup st = make_exact_setup(n2().potentials, n2().interaction, 0.0, h);
    for (int j = 0; j < 2; ++j) {
      const ScalarBasis& b = st.basis[j];
      EXPECT_LT(std::abs(b.wronskian_mp - 1.0), 1e-12);
      EXPECT_LT(std::abs(b.wronskian_oi - cplx(0.0, 2.0)), 1e-12);
      EXPECT_LT(b.wronskian_drift, 1e-8) << h << " " << j;
      EXPECT_LT(std::abs(b.t_factor - std::polar(1.0, -kPi / 4)), 1e-14);
    }
  }
}

TEST(Basis, RawConnectionFactorConvergesLinearly) {
  std::vector<double> hs, dev;
  for (double h : {1e-2, 3e-3, 1e-3, 3e-4}) {
    const ExactSetup st = make_exact_setup(n2().potentials, n2().interaction, 0.0, h);
    hs.push_back(h);
    dev.push_back(std::abs(st.basis[0].t_raw - std::polar(1.0, -kPi / 4)));
  }
  EXPECT_NEAR(loglog_slope(hs, dev), 1.0, 0.2);
}

// For V = x at E = 0 the Langer map is the identity and the uniform Airy solution is exact.
TEST(Basis, ExactAiryCase) {
  const PotentialModel m({0.0, 1.0, 1.0}, {0.0, 1.0}, -1.0, {-1.5, 1.0});
  const double h = 1e-3;
  const ExactSetup st = make_exact_setup(m, n2().interaction, 0.0, h);
  const ScalarBasis& b = st.basis[1];
  const double h23 = std::pow(h, 2.0 / 3.0), pre = std::sqrt(kPi) * std::pow(h, -1.0 / 6.0);
  double worst = 0.0;
  for (std::size_t i = 0; i <= st.eg.right.end; i += 7) {
    const double x = st.eg.grid.x(i);
    const double want = pre * airy_eval(x / h23).ai;
    worst = std::max(worst, std::abs(b.u_minus.f[i] - want) / std::max(std::abs(want), 1e-3 * pre));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Interaction, AdjointPairing) {
  InteractionModel u = n2().interaction;
  u.r1_amplitude = 0.7;
  const double h = 0.05;
  const Grid g{-0.5, 1e-4, 10001};
  const Span all{0, g.size - 1};
  Sampled f(g.size), k(g.size);
  for (std::size_t i = 0; i < g.size; ++i) {
    const double x = g.x(i);
    f.f[i] = std::sin(3 * x);
    f.d1[i] = 3 * std::cos(3 * x);
    f.d2[i] = -9 * std::sin(3 * x);
    f.d3[i] = -27 * std::cos(3 * x);
    k.f[i] = std::exp(x);
    k.d1[i] = k.d2[i] = k.d3[i] = std::exp(x);
  }
  const Applied Uf = apply_interaction(interaction_jets(u, false, g, h), f, h, all);
  const Applied Usg = apply_interaction(interaction_jets(u, true, g, h), k, h, all);
  cplx lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i + 1 < g.size; ++i) {
    lhs += 0.5 * g.step * (Uf.f[i] * k.f[i] + Uf.f[i + 1] * k.f[i + 1]);
    rhs += 0.5 * g.step * (f.f[i] * Usg.f[i] + f.f[i + 1] * Usg.f[i + 1]);
  }
  EXPECT_LT(std::abs(lhs - rhs), 1e-8);
  EXPECT_GT(std::abs(lhs), 1e-2);
}

TEST(Kernel, SolvesInhomogeneousEquation) {
  const ExactSetup st = make_exact_setup(n2().potentials, n2().interaction, 0.0, 1e-3);
  const KernelSpec k = st.kernel_a(0);
  const Sampled& src = st.basis[1].u_out;
  const Sampled v = kernel_apply(st.problem[0], k, st.jets[0], src);
  // -h^2 v'' + (V - E) v = -h U f checked with a sixth-order difference of v'.
  static constexpr double c[7] = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
  const Applied F = apply_interaction(st.jets[0], src, st.h, k.span);
  double res = 0.0, scale = 0.0;
  for (std::size_t i = k.span.begin + 3; i + 3 <= k.span.end; i += 5) {
    cplx dd = 0.0;
    for (int m = 0; m < 7; ++m) dd += c[m] * v.d1[i + m - 3];
    dd /= st.eg.grid.step;
    const double x = st.eg.grid.x(i);
    const cplx lhs = -st.h * st.h * dd + st.problem[0].potential(x) * v.f[i];
    res = std::max(res, std::abs(lhs + st.h * F.f[i]));
    scale = std::max(scale, std::abs(st.h * F.f[i]));
  }
  EXPECT_LT(res / scale, 1e-6);
}

TEST(System, ZeroInteractionGivesMinusI) {
  const TransferOracleReport r = transfer_matrix_numeric(n2().potentials, no_interaction(), 0.0, 1e-3);
  const Eigen::Matrix2cd want = cplx(0.0, -1.0) * Eigen::Matrix2cd::Identity();
  EXPECT_LT((r.numeric.entries - want).norm(), 1e-12);
  EXPECT_LT((r.T_approx - want).norm(), 1e-12);
}

TEST(System, ResidualContractionAndOrigin) {
  const ExactSystem S = solve_exact_system(n2().potentials, n2().interaction, 0.0, 1e-3);
  EXPECT_LT(S.residual, 1e-6);
  EXPECT_LT(S.contraction_p, 0.5);
  EXPECT_LT(S.contraction_a, 0.5);
  const NumericTransfer nt = transfer_from_system(S);
  EXPECT_LT(nt.origin_residual, 1e-8);
}

TEST(System, OffDiagonalMatchesAsymptotics) {
  const TransferOracleReport r = transfer_matrix_numeric(n2().potentials, n2().interaction, 0.0, 1e-4);
  for (int k = 0; k < 2; ++k) {
    EXPECT_GT(r.offdiag_ratio[k].real(), 0.9);
    EXPECT_LT(r.offdiag_ratio[k].real(), 1.1);
  }
  EXPECT_LT(std::abs(r.numeric.entries(0, 1) - r.numeric.entries(1, 0)), 0.05 * std::abs(r.numeric.entries(0, 1)));
  // First-order form agrees with the exact assembly up to second-order terms.
  EXPECT_LT(std::abs(r.T_approx(0, 1) - r.numeric.entries(0, 1)), 0.1 * std::abs(r.numeric.entries(0, 1)));
}

TEST(System, FrozenTransferAtSmallH) {
  const TransferOracleReport r = transfer_matrix_numeric(n2().potentials, n2().interaction, 0.0, 1e-4);
  EXPECT_NEAR(r.numeric.entries(0, 1).real(), -0.36907, 2e-3);
  EXPECT_NEAR(r.asymptotic.entries(0, 1).real(), -0.38190, 1e-4);
}

TEST(System, DriftGuardThrows) {
  ExactSystemOptions opt;
  opt.max_wronskian_drift = -1.0;
  EXPECT_THROW(make_exact_setup(n2().potentials, n2().interaction, 0.0, 1e-3, opt), NumericError);
}

TEST(Wkb, CoefficientsOfOutgoingSolution) {
  const double h = 1e-3, E = 0.0;
  const ExactSetup st = make_exact_setup(n2().potentials, no_interaction(), E, h);
  const WKBBasis wkb(n2().potentials, E, h);
  const std::size_t node = st.eg.origin / 4;  // x = -0.3
  const WKBCoefficients c = wkb_coefficients(wkb, 1, st.basis[0].u_out, st.eg.grid, node);
  // A single exponential dominates at leading order.
  EXPECT_LT(std::min(std::abs(c.flat), std::abs(c.sharp)), 0.05 * std::max(std::abs(c.flat), std::abs(c.sharp)));
}
