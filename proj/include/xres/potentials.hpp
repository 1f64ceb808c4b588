#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "xres/errors.hpp"
#include "xres/numerics.hpp"
#include "xres/polynomial.hpp"

namespace xres {

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

class PotentialModel {
 public:
  PotentialModel(std::vector<double> v1_coeffs, std::vector<double> v2_coeffs, double b0, Interval domain,
                 double e_max = 0.05)
      : v1_(std::move(v1_coeffs)), v2_(std::move(v2_coeffs)), b0_(b0), domain_(domain), e_max_(e_max) {
    validate();
  }

  const Polynomial& v(int j) const { return j == 1 ? v1_ : v2_; }
  const Polynomial& v1() const { return v1_; }
  const Polynomial& v2() const { return v2_; }
  double b0() const { return b0_; }
  const Interval& domain() const { return domain_; }
  double e_max() const { return e_max_; }

  // Interval around the crossing on which Langer charts are built.
  Interval chart() const {
    const double half = 0.6 * std::abs(b0_);
    return {std::max(domain_.lo, -half), std::min(domain_.hi, half)};
  }

 private:
  void validate() const {
    if (!(b0_ < 0.0)) throw ModelError("b0 must be negative");
    if (!(domain_.lo < b0_ && domain_.hi > 0.0)) throw ModelError("domain must contain [b0, 0] in its interior");
    if (std::abs(v1_(0.0)) > 1e-14 || std::abs(v2_(0.0)) > 1e-14) throw ModelError("V1(0) and V2(0) must vanish");
    if (std::abs(v1_(b0_)) > 1e-12 * (1.0 + std::abs(b0_))) throw ModelError("V1(b0) must vanish");
    if (!(v1_.derivative()(0.0) > 0.0 && v2_.derivative()(0.0) > 0.0))
      throw ModelError("V1'(0) and V2'(0) must be positive");
    const int samples = 10000;
    const double span = domain_.hi - domain_.lo;
    const double tiny = 1e-9 * span;
    for (int i = 0; i <= samples; ++i) {
      const double x = domain_.lo + span * i / samples;
      const double a = v1_(x), b = v2_(x);
      if (std::abs(x) > tiny && std::abs(x - b0_) > tiny && !(a / (x * (x - b0_)) > 0.0))
        throw ModelError("V1/(x(x-b0)) must be positive at x = " + std::to_string(x));
      if (std::abs(x) > tiny && !(b / x > 0.0))
        throw ModelError("V2/x must be positive at x = " + std::to_string(x));
      if (x < -tiny && !(b < a)) throw ModelError("V2 < V1 must hold for x < 0 at x = " + std::to_string(x));
    }
  }

  Polynomial v1_, v2_;
  double b0_;
  Interval domain_;
  double e_max_;
};

// Smooth bump exp(1 - 1/(1 - u)), u = (x/R)^2, with three derivatives.
struct BumpValue {
  double v = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
};

inline BumpValue bump(double x, double radius) {
  const double u = (x / radius) * (x / radius);
  if (u >= 1.0) return {};
  const double w = 1.0 / (1.0 - u);
  const double g = 1.0 - w;
  if (g < -700.0) return {};
  const double u1 = 2.0 * x / (radius * radius), u2 = 2.0 / (radius * radius);
  const double g1 = -u1 * w * w;
  const double g2 = -(u2 * w * w + 2.0 * u1 * u1 * w * w * w);
  const double g3 = -(6.0 * u1 * u2 * w * w * w + 6.0 * u1 * u1 * u1 * w * w * w * w);
  const double b = std::exp(g);
  return {b, b * g1, b * (g2 + g1 * g1), b * (g3 + 3.0 * g1 * g2 + g1 * g1 * g1)};
}

// U = r0(x) + i r1(x) h D_x with r0, r1 scaled bumps of common support radius.
struct InteractionModel {
  double r0_amplitude = 1.0;
  double r1_amplitude = 0.0;
  double support_radius = 0.4;

  BumpValue r0(double x) const { return scaled(r0_amplitude, x); }
  BumpValue r1(double x) const { return scaled(r1_amplitude, x); }
  double r0_at_0() const { return r0_amplitude; }

 private:
  BumpValue scaled(double a, double x) const {
    BumpValue b = bump(x, support_radius);
    return {a * b.v, a * b.d1, a * b.d2, a * b.d3};
  }
};

struct CrossingData {
  int n = 0;
  double q_n = 0.0;
  double v0 = 0.0;
  double bracket_2n = 0.0;
};

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

inline CrossingData detect_contact_order(const PotentialModel& model) {
  const Polynomial& p1 = model.v1();
  const Polynomial& p2 = model.v2();
  const double d1 = p1.derivative_at(0.0, 1), d2 = p2.derivative_at(0.0, 1);
  const int deg = std::max(p1.degree(), p2.degree());
  for (int k = 1; k <= deg; ++k) {
    const double a = p1.derivative_at(0.0, k), b = p2.derivative_at(0.0, k);
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    if (std::abs(a - b) <= 1e-12 * scale) continue;
    CrossingData c;
    c.n = k;
    c.v0 = std::sqrt(d1 * d2);
    c.q_n = (a - b) / (factorial(k) * std::pow(d1 * d2, 0.25));
    c.bracket_2n = ((k % 2 == 0) ? 1.0 : -1.0) * factorial(2 * k) / factorial(k) * std::pow(d1, k) * (b - a);
    return c;
  }
  throw DomainError("infinite contact: V1 - V2 vanishes to every order at the crossing");
}

// Root of V_j(x) = E near the crossing, by Newton continuation from E / V_j'(0).
inline cplx turning_point(const PotentialModel& model, int j, cplx E) {
  const Polynomial& p = model.v(j);
  const Polynomial dp = p.derivative();
  const double slope0 = dp(0.0);
  const Interval ch = model.chart();
  const double radius = std::min(-ch.lo, ch.hi);
  if (std::abs(E) > model.e_max() * (1.0 + 1e-12)) throw ChartError("energy outside the chart |E| <= E_max");
  cplx x = E / slope0;
  for (int it = 0; it < 100; ++it) {
    const cplx f = p(x) - E;
    const cplx df = dp(x);
    const cplx step = f / df;
    x -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) break;
  }
  const cplx resid = p(x) - E;
  if (!(std::abs(x) < radius) || std::abs(resid) > 1e-13 * std::max(1.0, std::abs(dp(x))) * (1.0 + std::abs(E)) * 10.0)
    throw ChartError("no turning point inside the chart");
  return x;
}

inline double turning_point_real(const PotentialModel& model, int j, double E) {
  return std::real(turning_point(model, j, cplx(E)));
}

// Langer variable: xi < 0 left of the turning point, xi > 0 right of it, xi (xi')^2 = V - E.
class LangerChart {
 public:
  LangerChart(const PotentialModel& model, int j, double E, Interval range, std::size_t nodes = 64)
      : v_(model.v(j)), j_(j), E_(E), range_(range) {
    a_ = turning_point_real(model, j, E);
    qm_ = backward_difference_quotient(v_, a_);
    const std::vector<double> t = v_.taylor_at(a_);
    qp_.assign(t.begin() + (t.size() > 1 ? 1 : 0), t.end());
    cheb_ = Chebyshev([this](double x) { return xi_direct(x); }, range.lo, range.hi, nodes);
  }

  int which() const { return j_; }
  double energy() const { return E_; }
  double turning_point() const { return a_; }
  const Interval& range() const { return range_; }

  // Direct quadrature of the defining integral.
  double xi_direct(double x) const {
    if (x == a_) return 0.0;
    const bool left = x < a_;
    const double top = std::sqrt(std::abs(x - a_));
    const std::vector<double>& q = left ? qm_ : qp_;
    auto integrand = [&](double s) {
      const double w = s * s;
      const double g = horner(q, w);
      return 2.0 * w * std::sqrt(std::max(g, 0.0));
    };
    const double F = integrate_smooth(integrand, 0.0, top, 1e-13);
    const double mag = std::pow(1.5 * F, 2.0 / 3.0);
    return left ? -mag : mag;
  }

  double xi(double x) const { return cheb_(x); }
  double xi_deriv(double x) const { return cheb_.deriv(x); }
  double xi_deriv2(double x) const { return cheb_.deriv2(x); }
  double potential_minus_energy(double x) const { return v_(x) - E_; }

 private:
  Polynomial v_;
  int j_;
  double E_;
  Interval range_;
  double a_ = 0.0;
  std::vector<double> qm_, qp_;
  Chebyshev cheb_;
};

inline LangerChart langer_xi(const PotentialModel& model, int j, double E) {
  return LangerChart(model, j, E, model.chart());
}

struct ActionValue {
  double A = 0.0;
  double A_deriv = 0.0;
};

namespace detail {

inline double bisect_root(const Polynomial& p, double lo, double hi) {
  double flo = p(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = p(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  const Polynomial dp = p.derivative();
  for (int it = 0; it < 3; ++it) {
    const double d = dp(x);
    if (d == 0.0) break;
    const double nx = x - p(x) / d;
    if (nx < lo || nx > hi) break;
    x = nx;
  }
  return x;
}

// Divide p by (x - r), discarding the remainder.
inline std::vector<double> deflate(const std::vector<double>& p, double r) {
  const std::size_t m = p.size();
  std::vector<double> q(m > 1 ? m - 1 : 1, 0.0);
  if (m <= 1) return q;
  double acc = p[m - 1];
  for (std::size_t k = m - 1; k-- > 0;) {
    q[k] = acc;
    acc = p[k] + r * acc;
  }
  return q;
}

}  // namespace detail

struct WellTurningPoints {
  double left = 0.0;
  double right = 0.0;
  double bottom = 0.0;
};

inline WellTurningPoints well_turning_points(const PotentialModel& model, double E) {
  const Polynomial& v = model.v1();
  const Polynomial dv = v.derivative();
  const double xb = detail::bisect_root(dv, model.b0(), 0.0);
  if (!(E > v(xb) + 1e-14 * (1.0 + std::abs(v(xb))))) throw DomainError("degenerate well: E at or below the bottom");
  const Polynomial f = v - E;
  const Interval d = model.domain();
  if (!(f(d.lo) > 0.0 && f(d.hi) > 0.0)) throw DomainError("well is not closed inside the domain");
  return {detail::bisect_root(f, d.lo, xb), detail::bisect_root(f, xb, d.hi), xb};
}

// Phase-space area 2 int sqrt(E - V1) over the well and its energy derivative.
inline ActionValue action(const PotentialModel& model, double E) {
  const WellTurningPoints w = well_turning_points(model, E);
  std::vector<double> p = (model.v1() - E).coeffs();
  for (double& c : p) c = -c;  // E - V1
  std::vector<double> g = detail::deflate(detail::deflate(p, w.left), w.right);
  for (double& c : g) c = -c;  // (E - V1) = (x - left)(right - x) g(x)
  const double c = 0.5 * (w.left + w.right), r = 0.5 * (w.right - w.left);
  auto G = [&](double th) { return horner(g, c + r * std::cos(th)); };
  ActionValue out;
  out.A = 2.0 * r * r * integrate_smooth([&](double th) {
            const double s = std::sin(th);
            return s * s * std::sqrt(std::max(G(th), 0.0));
          }, 0.0, kPi);
  out.A_deriv = integrate_smooth([&](double th) { return 1.0 / std::sqrt(G(th)); }, 0.0, kPi);
  return out;
}

}  // namespace xres
