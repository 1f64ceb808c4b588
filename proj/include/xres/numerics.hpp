#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "xres/errors.hpp"

namespace xres {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

// r^{1/p} with the sign of r (odd p).
inline double signed_root(double r, double p) {
  return std::copysign(std::pow(std::abs(r), 1.0 / p), r);
}

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

template <unsigned N>
const GaussRule& gauss_legendre() {
  static const GaussRule rule = [] {
    using G = boost::math::quadrature::gauss<double, N>;
    GaussRule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = a.size(); i-- > 0;) {
      if (a[i] == 0.0) continue;
      r.x.push_back(-a[i]);
      r.w.push_back(w[i]);
    }
    if (N % 2 == 1) {
      r.x.push_back(0.0);
      r.w.push_back(w[0]);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) continue;
      r.x.push_back(a[i]);
      r.w.push_back(w[i]);
    }
    return r;
  }();
  return rule;
}

// Fixed Gauss-Legendre rule on [a, b].
template <unsigned N, class F>
auto gauss_panel(F&& f, double a, double b) {
  const GaussRule& g = gauss_legendre<N>();
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  decltype(f(a)) acc{};
  for (std::size_t i = 0; i < g.x.size(); ++i) acc += g.w[i] * f(c + r * g.x[i]);
  return acc * r;
}

// Adaptive Gauss-Kronrod for smooth real integrands.
template <class F>
double integrate_smooth(F&& f, double a, double b, double tol = 1e-14, double* err = nullptr) {
  double e = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol, &e);
  if (err) *err = e;
  if (!std::isfinite(v)) throw NumericError("quadrature produced a non-finite value");
  return v;
}

// Chebyshev interpolant on [a, b] with value and derivative evaluation.
class Chebyshev {
 public:
  Chebyshev() = default;

  template <class F>
  Chebyshev(F&& f, double a, double b, std::size_t n) : a_(a), b_(b) {
    std::vector<double> fx(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = std::cos(kPi * (static_cast<double>(k) + 0.5) / static_cast<double>(n));
      fx[k] = f(0.5 * (a + b) + 0.5 * (b - a) * t);
    }
    c_.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += fx[k] * std::cos(kPi * static_cast<double>(j) * (static_cast<double>(k) + 0.5) /
                              static_cast<double>(n));
      c_[j] = 2.0 * s / static_cast<double>(n);
    }
    c_[0] *= 0.5;
    dc_ = differentiate(c_);
    const double scale = 2.0 / (b - a);
    for (double& v : dc_) v *= scale;
    ddc_ = differentiate(dc_);
    for (double& v : ddc_) v *= scale;
  }

  double lo() const { return a_; }
  double hi() const { return b_; }
  double operator()(double x) const { return clenshaw(c_, x); }
  double deriv(double x) const { return clenshaw(dc_, x); }
  double deriv2(double x) const { return clenshaw(ddc_, x); }
  // Magnitude of the trailing coefficients relative to the leading one.
  double tail_ratio() const {
    double lead = 0.0;
    for (double v : c_) lead = std::max(lead, std::abs(v));
    const std::size_t n = c_.size();
    double tail = 0.0;
    for (std::size_t k = n - std::min<std::size_t>(n, 4); k < n; ++k) tail = std::max(tail, std::abs(c_[k]));
    return lead > 0.0 ? tail / lead : 0.0;
  }

 private:
  static std::vector<double> differentiate(const std::vector<double>& c) {
    const std::size_t n = c.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    d[n - 2] = 2.0 * static_cast<double>(n - 1) * c[n - 1];
    for (std::size_t k = n - 2; k-- > 0;) d[k] = d[k + 2] + 2.0 * static_cast<double>(k + 1) * c[k + 1];
    d[0] *= 0.5;
    return d;
  }
  double clenshaw(const std::vector<double>& c, double x) const {
    const double t = (2.0 * x - a_ - b_) / (b_ - a_);
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
      const double b0 = 2.0 * t * b1 - b2 + c[k];
      b2 = b1;
      b1 = b0;
    }
    return t * b1 - b2 + c[0];
  }

  double a_ = -1.0, b_ = 1.0;
  std::vector<double> c_, dc_, ddc_;
};

// Least-squares slope of log|y| against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

}  // namespace xres
