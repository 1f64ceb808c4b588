#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "xres/crossing.hpp"
#include "xres/errors.hpp"
#include "xres/numerics.hpp"
#include "xres/potentials.hpp"

namespace xres {

// Rectangle [-delta1, delta1] + i [-delta2, delta2].
struct ResonanceWindow {
  double L = 1.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double h = 0.0;
  int n = 1;
  EnergyWindow kind = EnergyWindow::full;
};

inline ResonanceWindow full_window(double h, int n, double L = 1.0) {
  if (!(h > 0.0) || !(L > 0.0)) throw DomainError("h and L must be positive");
  if (n < 1) throw DomainError("contact order must be positive");
  return {L, L * std::pow(h, 2.0 / (2.0 * n + 1.0)), L * h, h, n, EnergyWindow::full};
}

// delta1 is the caller's choice, expected o(h^{4/(2n+1)}).
inline ResonanceWindow small_window(double h, int n, double delta1, double L = 1.0) {
  if (!(h > 0.0) || !(L > 0.0) || !(delta1 > 0.0)) throw DomainError("h, L and delta1 must be positive");
  if (n < 1) throw DomainError("contact order must be positive");
  return {L, delta1, L * h, h, n, EnergyWindow::small};
}

struct ResonancePrediction {
  double E_bs = 0.0;
  cplx z;
  double lambda = 0.0;
  double kappa = 0.0;
  double width_leading = 0.0;
  double error_exponent_re = 0.0;
  double error_exponent_im = 0.0;
  EnergyWindow window = EnergyWindow::full;
  bool boundary = false;
};

// Roots of A(E) = (2k+1) pi h in [-delta1, delta1].
inline std::vector<double> bohr_sommerfeld_points(const PotentialModel& model, const ResonanceWindow& w) {
  const double lo = -w.delta1, hi = w.delta1;
  const double h = w.h;
  const double a_lo = action(model, lo).A, a_hi = action(model, hi).A;
  if (!(a_hi > a_lo)) throw DomainError("action is not increasing on the window");
  const double k_first = std::ceil((a_lo / (kPi * h) - 1.0) / 2.0);
  const double k_last = std::floor((a_hi / (kPi * h) - 1.0) / 2.0);
  std::vector<double> roots;
  for (double k = k_first; k <= k_last; k += 1.0) {
    const double target = (2.0 * k + 1.0) * kPi * h;
    double a = lo, b = hi;
    double E = lo + (hi - lo) * (target - a_lo) / (a_hi - a_lo);
    for (int it = 0; it < 100; ++it) {
      const ActionValue av = action(model, E);
      const double f = av.A - target;
      (f < 0.0 ? a : b) = E;
      double next = E - f / av.A_deriv;
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      const bool done = std::abs(next - E) <= 1e-15 * (1.0 + std::abs(E));
      E = next;
      if (done) break;
    }
    if (E < lo || E > hi) continue;
    const double res = std::cos(action(model, E).A / (2.0 * h));
    if (!(std::abs(res) < 1e-10))
      throw NumericError("Bohr-Sommerfeld root residual " + std::to_string(res) + " above tolerance");
    roots.push_back(E);
  }
  return roots;
}

inline double imaginary_error_exponent(int n, EnergyWindow w) {
  const double m = 2.0 * n + 1.0;
  return w == EnergyWindow::small ? (2.0 * n + 4.0) / m : (2.0 * n + 4.0 - epsilon_exponent(n)) / m;
}

// z = E_bs - i kappa^2 h^{(2n+3)/(2n+1)} / A'(E_bs); Re z carries no correction.
inline std::vector<ResonancePrediction> predict_resonances(const PotentialModel& model, const InteractionModel& inter,
                                                           const ResonanceWindow& w) {
  const CrossingData cd = detect_contact_order(model);
  if (cd.n != w.n) throw DomainError("window contact order does not match the model");
  const int n = cd.n;
  const double m = 2.0 * n + 1.0;
  const double hp = std::pow(w.h, (2.0 * n + 3.0) / m);
  std::vector<ResonancePrediction> out;
  for (double E : bohr_sommerfeld_points(model, w)) {
    ResonancePrediction p;
    p.E_bs = E;
    p.window = w.kind;
    p.lambda = scaled_energy(E, w.h, n);
    p.kappa = kappa_n(cd, inter.r0_at_0(), w.kind == EnergyWindow::small ? 0.0 : p.lambda);
    p.width_leading = p.kappa * p.kappa / action(model, E).A_deriv * hp;
    p.z = cplx(E, -p.width_leading);
    p.error_exponent_re = (2.0 * n + 3.0) / m;
    p.error_exponent_im = imaginary_error_exponent(n, w.kind);
    p.boundary = std::abs(std::abs(E) - w.delta1) <= 2.0 * w.h;
    out.push_back(p);
  }
  return out;
}

struct WidthConsistencyPoint {
  double h = 0.0;
  double E = 0.0;
  double kappa_closed = 0.0;    // from the generalized Airy function
  double kappa_integral = 0.0;  // from the crossing integral
  double gap = 0.0;             // |kappa_integral - kappa_closed| / |kappa_closed|
  double width_closed = 0.0;
  double width_integral = 0.0;
  bool ok = false;
  std::string status;
};

struct WidthConsistencyReport {
  double lambda = 0.0;
  int n = 0;
  std::vector<WidthConsistencyPoint> points;
  double gap_slope = 0.0;  // log-log slope of gap against h over the successful points
  bool gap_decreasing = false;
};

// kappa two ways at fixed scaled energy: closed form, and -I(E, h) / h^{1/(2n+1)}.
inline WidthConsistencyReport width_consistency_check(const PotentialModel& model, const InteractionModel& inter,
                                                      double lambda, const std::vector<double>& h_grid,
                                                      const CrossingIntegralOptions& opt = {}) {
  const CrossingData cd = detect_contact_order(model);
  const int n = cd.n;
  const double m = 2.0 * n + 1.0;
  WidthConsistencyReport rep;
  rep.lambda = lambda;
  rep.n = n;
  std::vector<double> hs, gaps;
  for (double h : h_grid) {
    WidthConsistencyPoint pt;
    pt.h = h;
    pt.E = lambda * std::pow(h, 2.0 / m);
    try {
      pt.kappa_closed = kappa_n(cd, inter.r0_at_0(), lambda);
      const IntegralResult I = crossing_integral(model, inter, pt.E, h, opt);
      pt.kappa_integral = -I.value / std::pow(h, 1.0 / m);
      pt.gap = pt.kappa_closed != 0.0 ? std::abs(pt.kappa_integral - pt.kappa_closed) / std::abs(pt.kappa_closed)
                                      : std::abs(pt.kappa_integral);
      const double hp = std::pow(h, (2.0 * n + 3.0) / m) / action(model, pt.E).A_deriv;
      pt.width_closed = pt.kappa_closed * pt.kappa_closed * hp;
      pt.width_integral = pt.kappa_integral * pt.kappa_integral * hp;
      pt.ok = true;
      pt.status = "ok";
      if (pt.gap > 0.0) {
        hs.push_back(h);
        gaps.push_back(pt.gap);
      }
    } catch (const std::exception& e) {
      pt.status = e.what();
    }
    rep.points.push_back(pt);
  }
  if (hs.size() >= 2) rep.gap_slope = loglog_slope(hs, gaps);
  rep.gap_decreasing = hs.size() >= 2;
  for (std::size_t i = 1; i < hs.size(); ++i)
    if ((hs[i] < hs[i - 1]) != (gaps[i] < gaps[i - 1])) rep.gap_decreasing = false;
  return rep;
}

}  // namespace xres
