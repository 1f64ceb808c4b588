#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "xres/airy.hpp"
#include "xres/errors.hpp"
#include "xres/genairy.hpp"
#include "xres/numerics.hpp"
#include "xres/potentials.hpp"

namespace xres {

enum class EnergyWindow { full, small };

inline const char* to_string(EnergyWindow w) { return w == EnergyWindow::full ? "full" : "small"; }

// Scaled energy E / h^{2/(2n+1)}.
inline double scaled_energy(double E, double h, int n) { return E / std::pow(h, 2.0 / (2.0 * n + 1.0)); }

struct SemiclassicalPoint {
  cplx E;
  double h = 0.0;
  int n = 1;
  double L = 1.0;
  double lambda = 0.0;
  EnergyWindow window = EnergyWindow::full;

  double delta1() const { return L * std::pow(h, 2.0 / (2.0 * n + 1.0)); }
  double delta2() const { return L * h; }
};

// |Re E| <= h^{4/(2n+1)} counts as the small window; anything else up to L h^{2/(2n+1)} is full.
inline SemiclassicalPoint make_point(cplx E, double h, int n, double L = 1.0) {
  if (!(h > 0.0)) throw DomainError("h must be positive");
  if (n < 1) throw DomainError("contact order must be positive");
  SemiclassicalPoint p{E, h, n, L, scaled_energy(E.real(), h, n), EnergyWindow::full};
  if (std::abs(E.real()) > p.delta1() * (1.0 + 1e-12) || std::abs(E.imag()) > p.delta2() * (1.0 + 1e-12))
    throw DomainError("energy outside the window |Re E| <= L h^{2/(2n+1)}, |Im E| <= L h");
  if (n >= 2 && std::abs(E.real()) <= std::pow(h, 4.0 / (2.0 * n + 1.0))) p.window = EnergyWindow::small;
  return p;
}

inline SemiclassicalPoint make_point_at_lambda(double lambda, double h, int n, double L = 1.0) {
  return make_point(cplx(lambda * std::pow(h, 2.0 / (2.0 * n + 1.0)), 0.0), h, n, std::max(L, std::abs(lambda)));
}

inline double epsilon_exponent(int n) {
  if (n < 1) throw DomainError("contact order must be positive");
  if (n == 1) return 0.0;
  if (n == 2) return 0.5;
  return 3.0 / (4.0 * n + 3.0);
}

// Error exponent of the leading transfer/integral asymptotics.
inline double transfer_error_order(int n, EnergyWindow w) {
  const double m = 2.0 * n + 1.0;
  if (w == EnergyWindow::small) return std::min(2.0 / m, 1.0 / 3.0);
  return (2.0 - epsilon_exponent(n)) / m;
}

// Argument of A_n at scaled energy lambda.
inline double kappa_argument(const CrossingData& c, double lambda) {
  const double m = 2.0 * c.n + 1.0;
  return -std::pow(std::abs(c.q_n), 2.0 / m) * lambda / c.v0;
}

inline double kappa_n(const CrossingData& c, double r0_at_0, double lambda) {
  if (c.q_n == 0.0) throw DomainError("q_n must be nonzero");
  if (r0_at_0 == 0.0) return 0.0;
  const double m = 2.0 * c.n + 1.0;
  const double an = gen_airy(c.n, kappa_argument(c, lambda)).value;
  return 2.0 * kPi * r0_at_0 / std::sqrt(c.v0) * std::pow(std::abs(c.q_n), -1.0 / m) * an;
}

// Closed form through the iterated Poisson bracket.
inline double kappa_n_zero(const CrossingData& c, double r0_at_0) {
  if (c.bracket_2n == 0.0) throw DomainError("bracket must be nonzero");
  const int n = c.n;
  const double m = 2.0 * n + 1.0;
  return 2.0 * r0_at_0 * std::pow(factorial(2 * n + 1) / std::abs(c.bracket_2n), 1.0 / m) *
         gamma_fn((m + 1.0) / m) * std::cos(kPi / (2.0 * m));
}

struct IntegralResult {
  double value = 0.0;
  double est_error = 0.0;
  std::size_t panels = 0;
};

struct AsymptoticIntegral {
  double value = 0.0;
  double error_order = 0.0;
  EnergyWindow window = EnergyWindow::full;
};

inline AsymptoticIntegral crossing_integral_asymptotic(const SemiclassicalPoint& p, const CrossingData& c,
                                                       double r0_at_0) {
  const double m = 2.0 * c.n + 1.0;
  const double arg = p.window == EnergyWindow::small ? 0.0 : kappa_argument(c, p.lambda);
  const double an = r0_at_0 == 0.0 ? 0.0 : gen_airy(c.n, arg).value;
  const double v = -2.0 * kPi * r0_at_0 / std::sqrt(c.v0) * std::pow(p.h / std::abs(c.q_n), 1.0 / m) * an;
  return {v, transfer_error_order(c.n, p.window), p.window};
}

struct CrossingIntegralOptions {
  double rel_tol = 1e-6;
  std::size_t max_panels = 4000000;
};

namespace detail {

// Local oscillation/decay rate of the Airy product, used to size panels.
inline double airy_product_rate(const PotentialModel& m, double E, double h, double x) {
  const double s = std::sqrt(std::abs(m.v1()(x) - E)) + std::sqrt(std::abs(m.v2()(x) - E));
  return s / h + std::pow(h, -2.0 / 3.0);
}

}  // namespace detail

// Direct quadrature of -(2 pi / h^{1/3}) int r0 / sqrt(xi1' xi2') Ai(xi1 / h^{2/3}) Ai(xi2 / h^{2/3}) dx.
inline IntegralResult crossing_integral(const PotentialModel& model, const InteractionModel& inter, double E, double h,
                                        const CrossingIntegralOptions& opt = {}) {
  if (!(h > 0.0)) throw DomainError("h must be positive");
  const double R = inter.support_radius;
  const Interval ch = model.chart();
  if (!(-R >= ch.lo && R <= ch.hi)) throw DomainError("interaction support must lie inside the Langer charts");
  if (inter.r0_amplitude == 0.0) return {};
  const LangerChart c1(model, 1, E, ch), c2(model, 2, E, ch);
  const double h23 = std::pow(h, 2.0 / 3.0);

  // Cut the right end where the product of decaying Airy factors is below e^{-75}.
  auto decay = [&](double x) {
    const double a = std::max(c1.xi(x), 0.0), b = std::max(c2.xi(x), 0.0);
    return 2.0 / 3.0 * (a * std::sqrt(a) + b * std::sqrt(b)) / h;
  };
  double hi = R;
  if (decay(R) > 75.0) {
    double lo = std::max(c1.turning_point(), c2.turning_point());
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (decay(mid) > 75.0 ? hi : lo) = mid;
    }
  }

  auto integrand = [&](double x) {
    const BumpValue r = inter.r0(x);
    if (r.v == 0.0) return 0.0;
    const double d = std::sqrt(c1.xi_deriv(x) * c2.xi_deriv(x));
    return r.v / d * detail::airy_ai_any(c1.xi(x) / h23) * detail::airy_ai_any(c2.xi(x) / h23);
  };
  auto run = [&](double width_factor, std::size_t* panels) {
    double acc = 0.0;
    std::size_t count = 0;
    double x = -R;
    while (x < hi) {
      const double w = width_factor * 2.0 * kPi / detail::airy_product_rate(model, E, h, x);
      const double xn = std::min(hi, x + w);
      acc += gauss_panel<20>(integrand, x, xn);
      x = xn;
      if (++count > opt.max_panels) throw NumericError("crossing integral: panel budget exceeded");
    }
    *panels = count;
    return acc;
  };

  const double pref = -2.0 * kPi / std::cbrt(h);
  std::size_t np = 0, np2 = 0;
  double coarse = run(1.0, &np);
  for (double f = 0.5; f > 1e-3; f *= 0.5) {
    const double fine = run(f, &np2);
    const double err = std::abs(fine - coarse);
    if (err <= opt.rel_tol * std::abs(fine) + 1e-12 / std::abs(pref)) return {pref * fine, std::abs(pref) * err, np2};
    coarse = fine;
  }
  throw NumericError("crossing integral: refinement did not converge");
}

struct TransferMatrix {
  enum class Provenance { asymptotic_closed_form, numeric_oracle };
  Eigen::Matrix2cd entries = Eigen::Matrix2cd::Zero();
  Provenance provenance = Provenance::asymptotic_closed_form;
  double error_order = 0.0;
};

inline const char* to_string(TransferMatrix::Provenance p) {
  return p == TransferMatrix::Provenance::asymptotic_closed_form ? "asymptotic_closed_form" : "numeric_oracle";
}

// T = -i (Id - i kappa h^{1/(2n+1)} offdiag(1, 1)).
inline TransferMatrix transfer_matrix_asymptotic(const SemiclassicalPoint& p, const CrossingData& c, double r0_at_0) {
  const double kappa = kappa_n(c, r0_at_0, p.window == EnergyWindow::small ? 0.0 : p.lambda);
  const double off = kappa * std::pow(p.h, 1.0 / (2.0 * c.n + 1.0));
  TransferMatrix t;
  const cplx mi(0.0, -1.0);
  t.entries << mi, cplx(-off, 0.0), cplx(-off, 0.0), mi;
  t.provenance = TransferMatrix::Provenance::asymptotic_closed_form;
  t.error_order = transfer_error_order(c.n, p.window);
  return t;
}

struct PhaseSigma {
  double phi = 0.0;
  double sigma = 0.0;
};

// phi = int_{a1}^x sqrt(E - V1) - int_{a2}^x sqrt(E - V2), sigma = r0 [(E - V1)(E - V2)]^{-1/4} / 2.
inline PhaseSigma wkb_phase_sigma(const PotentialModel& model, const InteractionModel& inter, double E, double x) {
  const Interval ch = model.chart();
  const LangerChart c1(model, 1, E, ch, 2), c2(model, 2, E, ch, 2);
  if (!(x < std::min(c1.turning_point(), c2.turning_point())))
    throw DomainError("x must lie left of both turning points");
  if (x < ch.lo) throw ChartError("x outside the Langer chart");
  const double x1 = -c1.xi_direct(x), x2 = -c2.xi_direct(x);
  PhaseSigma r;
  r.phi = 2.0 / 3.0 * (x2 * std::sqrt(x2) - x1 * std::sqrt(x1));
  const double prod = (E - model.v1()(x)) * (E - model.v2()(x));
  r.sigma = 0.5 * inter.r0(x).v / std::pow(prod, 0.25);
  return r;
}

// Exact phase derivative sqrt(E - V1) - sqrt(E - V2).
inline double wkb_phase_deriv(const PotentialModel& model, double E, double x) {
  return std::sqrt(E - model.v1()(x)) - std::sqrt(E - model.v2()(x));
}

}  // namespace xres
