#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "xres/errors.hpp"
#include "xres/numerics.hpp"

namespace xres {

enum class GenAiryMethod { oscillatory_quadrature, asymptotic_neg, asymptotic_pos, closed_form_zero };

inline const char* to_string(GenAiryMethod m) {
  switch (m) {
    case GenAiryMethod::oscillatory_quadrature: return "oscillatory_quadrature";
    case GenAiryMethod::asymptotic_neg: return "asymptotic_neg";
    case GenAiryMethod::asymptotic_pos: return "asymptotic_pos";
    case GenAiryMethod::closed_form_zero: return "closed_form_zero";
  }
  return "unknown";
}

struct GenAiryResult {
  double value = 0.0;
  int n = 1;
  GenAiryMethod method = GenAiryMethod::oscillatory_quadrature;
  double est_error = 0.0;
};

inline constexpr int kGenAiryMaxOrder = 6;
inline constexpr double kGenAiryYMax = 50.0;

inline double gamma_fn(double z) {
  if (!(z > 0.0)) throw DomainError("gamma_fn requires z > 0");
  return std::tgamma(z);
}

// 2^{2n} (n!)^2 / (2n+1)!, the integral of (1 - t^2)^n over [0, 1].
inline double cn_const(int n) {
  double c = 1.0;
  for (int k = 1; k <= n; ++k) c *= (2.0 * k) / (2.0 * k + 1.0);
  return c;
}

inline double gen_airy_zero(int n) {
  if (n < 1) throw DomainError("order must be positive");
  const double m = 2.0 * n + 1.0;
  return std::pow(m, 1.0 / m) * gamma_fn((m + 1.0) / m) * std::cos(kPi / (2.0 * m)) / kPi;
}

// Closed form of the integral over R of exp(i a z^{k+1}).
inline cplx degenerate_stationary_phase(int k, double a) {
  if (k < 1) throw DomainError("k must be positive");
  if (a == 0.0) throw DomainError("a must be nonzero");
  const double kp = k + 1.0;
  const double mag = 2.0 * gamma_fn((k + 2.0) / kp) / std::pow(std::abs(a), 1.0 / kp);
  if (k % 2 == 1) return mag * std::polar(1.0, kPi / (2.0 * kp) * (a > 0 ? 1.0 : -1.0));
  return cplx(mag * std::cos(kPi / (2.0 * kp)), 0.0);
}

// Envelope law for y -> -infinity, with both stationary points counted.
inline double gen_airy_asymptotic_neg(int n, double y) {
  if (n < 1) throw DomainError("order must be positive");
  if (y > -10.0) throw RangeError("asymptotic form needs y <= -10");
  const double ay = std::abs(y);
  const double np1 = n + 1.0;
  const double pre = 2.0 / kPi * std::pow(np1 / std::pow(2.0, n), 1.0 / np1) * gamma_fn((n + 2.0) / np1);
  const double ph = cn_const(n) * std::pow(ay, n + 0.5);
  const double osc = (n % 2 == 1) ? std::cos(ph - kPi / (2.0 * np1))
                                  : std::cos(kPi / (2.0 * np1)) * std::cos(ph);
  return pre * osc * std::pow(ay, -n / (2.0 * np1));
}

namespace detail {

using CPoly = std::vector<cplx>;

inline cplx cpoly_eval(const CPoly& c, cplx x) {
  cplx acc(0.0);
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

inline CPoly cpoly_mul(const CPoly& a, const CPoly& b) {
  CPoly r(a.size() + b.size() - 1, cplx(0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline CPoly cpoly_pow(const CPoly& a, int n) {
  CPoly r{cplx(1.0)};
  for (int i = 0; i < n; ++i) r = cpoly_mul(r, a);
  return r;
}

inline CPoly cpoly_antiderivative(const CPoly& a) {
  CPoly r(a.size() + 1, cplx(0.0));
  for (std::size_t k = 0; k < a.size(); ++k) r[k + 1] = a[k] / static_cast<double>(k + 1);
  return r;
}

// Phase  int_0^eta (y + tau^2)^n dtau  and its derivative (y + eta^2)^n as polynomials in eta.
struct GenAiryPhase {
  CPoly phase;
  CPoly rate;
};

inline GenAiryPhase gen_airy_phase(int n, double y) {
  const CPoly base{cplx(y), cplx(0.0), cplx(1.0)};
  GenAiryPhase p;
  p.rate = cpoly_pow(base, n);
  p.phase = cpoly_antiderivative(p.rate);
  return p;
}

// Phase along the horizontal line eta = t + i sigma, relative to its value at t = 0.
inline GenAiryPhase gen_airy_line_phase(int n, double y, double sigma) {
  const CPoly base{cplx(y - sigma * sigma), cplx(0.0, 2.0 * sigma), cplx(1.0)};
  GenAiryPhase p;
  p.rate = cpoly_pow(base, n);
  p.phase = cpoly_antiderivative(p.rate);
  return p;
}

struct MarchResult {
  cplx value;
  cplx coarse;     // same panels, lower-order rule
  double abs_sum;  // integral of |integrand|
  long panels;
};

struct MarchOptions {
  double phase_step = 1.5;
  double max_step = 0.5;
  long max_panels = 4000000;
};

// Integral of exp(i F(z0 + s dir)) dir ds over s in [0, s_end] (s_end may be infinite,
// in which case marching stops once the integrand has decayed by e^{-46} and keeps decaying).
inline MarchResult march(const GenAiryPhase& F, cplx z0, cplx dir, double s_end,
                         const MarchOptions& opt = {}) {
  const GaussRule& hi = gauss_legendre<24>();
  const GaussRule& lo = gauss_legendre<16>();
  const bool infinite = !std::isfinite(s_end);
  MarchResult r{cplx(0.0), cplx(0.0), 0.0, 0};
  double s = 0.0;
  double min_im = std::imag(cpoly_eval(F.phase, z0));
  auto rate_at = [&](double t) { return std::abs(cpoly_eval(F.rate, z0 + t * dir)) * std::abs(dir); };
  while (infinite || s < s_end) {
    double step = opt.max_step;
    const double r0 = rate_at(s);
    if (r0 > 0.0) step = std::min(step, opt.phase_step / r0);
    for (int it = 0; it < 60; ++it) {
      const double r1 = rate_at(s + step);
      if (r1 * step <= opt.phase_step) break;
      step *= 0.5;
    }
    if (!infinite) step = std::min(step, s_end - s);
    const double c = s + 0.5 * step, h = 0.5 * step;
    cplx acc_hi(0.0), acc_lo(0.0);
    double acc_abs = 0.0;
    for (std::size_t i = 0; i < hi.x.size(); ++i) {
      const cplx e = std::exp(cplx(0.0, 1.0) * cpoly_eval(F.phase, z0 + (c + h * hi.x[i]) * dir));
      acc_hi += hi.w[i] * e;
      acc_abs += hi.w[i] * std::abs(e);
    }
    for (std::size_t i = 0; i < lo.x.size(); ++i)
      acc_lo += lo.w[i] * std::exp(cplx(0.0, 1.0) * cpoly_eval(F.phase, z0 + (c + h * lo.x[i]) * dir));
    r.value += acc_hi * h * dir;
    r.coarse += acc_lo * h * dir;
    r.abs_sum += acc_abs * h * std::abs(dir);
    s += step;
    if (++r.panels > opt.max_panels) throw NumericError("generalized Airy quadrature exceeded its panel budget");
    if (infinite) {
      const cplx z = z0 + s * dir;
      const double im = std::imag(cpoly_eval(F.phase, z));
      min_im = std::min(min_im, im);
      const double growth = std::imag(cpoly_eval(F.rate, z) * dir);
      if (im - min_im > 46.0 && growth > 0.0) break;
    }
  }
  return r;
}

inline double gen_airy_phase_at_stationary(int n, double y) {
  return cn_const(n) * std::pow(std::abs(y), n + 0.5);
}

inline constexpr double kQuadraturePhaseBudget = 2.0e6;

struct HalfLine {
  cplx value;
  double est_error;
};

// Integral of exp(i P(eta)) over eta in [0, +inf) for y <= 0: real segment past the
// stationary point, then a ray into the first-octant decay sector.
inline HalfLine gen_airy_half_line_nonpositive(int n, double y) {
  const GenAiryPhase F = gen_airy_phase(n, y);
  const double theta = kPi / (2.0 * (2.0 * n + 1.0));
  const double R = (y < 0.0) ? std::sqrt(-y) + 1.0 : 0.0;
  MarchResult seg{cplx(0.0), cplx(0.0), 0.0, 0};
  if (R > 0.0) seg = march(F, cplx(0.0), cplx(1.0), R);
  const MarchResult ray = march(F, cplx(R), std::polar(1.0, theta), std::numeric_limits<double>::infinity());
  const cplx v = seg.value + ray.value;
  const double err = std::abs(seg.value - seg.coarse) + std::abs(ray.value - ray.coarse) +
                     1e-15 * (seg.abs_sum + ray.abs_sum) * (1.0 + 1e-16 * gen_airy_phase_at_stationary(n, y));
  return {v, err};
}

// Same half-line integral for y > 0 along eta = t + i sigma; the factor exp(-G) with
// G = int_0^sigma (y - tau^2)^n dtau is pulled out analytically.
inline HalfLine gen_airy_half_line_positive(int n, double y, double* log_scale) {
  const double sy = std::sqrt(y);
  auto g_of = [&](double sigma) {
    const CPoly base{cplx(y), cplx(0.0), cplx(-1.0)};
    const CPoly prim = cpoly_antiderivative(cpoly_pow(base, n));
    return std::real(cpoly_eval(prim, cplx(sigma)));
  };
  double best_sigma = sy;
  if (n >= 3) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 16; ++k) {
      const double sigma = sy * k / 16.0;
      const GenAiryPhase L = gen_airy_line_phase(n, y, sigma);
      double peak = -std::numeric_limits<double>::infinity();
      const double tmax = 3.0 * (sy + 1.0);
      for (int i = 0; i <= 400; ++i) {
        const double t = tmax * i / 400.0;
        peak = std::max(peak, -std::imag(cpoly_eval(L.phase, cplx(t))));
      }
      const double level = peak - g_of(sigma);
      if (level < best) {
        best = level;
        best_sigma = sigma;
      }
    }
  }
  const GenAiryPhase L = gen_airy_line_phase(n, y, best_sigma);
  const MarchResult m = march(L, cplx(0.0), cplx(1.0), std::numeric_limits<double>::infinity());
  *log_scale = -g_of(best_sigma);
  const double err = std::abs(m.value - m.coarse) + 1e-15 * m.abs_sum;
  return {m.value, err};
}

}  // namespace detail

// Exponential form (1/2pi) * integral over R, with the two half-lines computed on
// mirrored contours. Imaginary part is a realness diagnostic.
inline cplx gen_airy_exp_form(int n, double y) {
  const double inf = std::numeric_limits<double>::infinity();
  if (y > 0.0) {
    double ls = 0.0;
    const detail::HalfLine right = detail::gen_airy_half_line_positive(n, y, &ls);
    const double sigma = std::sqrt(y);
    // Left half along eta = t + i sigma, t <= 0 (n <= 2 contour; n >= 3 reuses the right half).
    cplx left = std::conj(right.value);
    if (n <= 2) {
      const detail::GenAiryPhase L = detail::gen_airy_line_phase(n, y, sigma);
      left = -detail::march(L, cplx(0.0), cplx(-1.0), inf).value;
    }
    return std::exp(ls) * (right.value + left) / (2.0 * kPi);
  }
  const detail::HalfLine right = detail::gen_airy_half_line_nonpositive(n, y);
  // Integral over (-inf, 0] equals the integral of exp(-i P) over [0, inf), which decays
  // in the lower sector.
  detail::GenAiryPhase G = detail::gen_airy_phase(n, y);
  for (auto& c : G.phase) c = -c;
  for (auto& c : G.rate) c = -c;
  const double theta = kPi / (2.0 * (2.0 * n + 1.0));
  const double R = (y < 0.0) ? std::sqrt(-y) + 1.0 : 0.0;
  cplx left(0.0);
  if (R > 0.0) left += detail::march(G, cplx(0.0), cplx(1.0), R).value;
  left += detail::march(G, cplx(R), std::polar(1.0, -theta), inf).value;
  return (right.value + left) / (2.0 * kPi);
}

// A_n(y) for n in [1, 6], y in [-50, 50].
inline GenAiryResult gen_airy(int n, double y) {
  if (n < 1 || n > kGenAiryMaxOrder) throw RangeError("generalized Airy order must lie in [1, 6]");
  if (!(std::abs(y) <= kGenAiryYMax)) throw RangeError("generalized Airy argument must lie in [-50, 50]");
  GenAiryResult r;
  r.n = n;
  if (y <= 0.0) {
    if (y <= -10.0 && detail::gen_airy_phase_at_stationary(n, y) > detail::kQuadraturePhaseBudget) {
      r.value = gen_airy_asymptotic_neg(n, y);
      r.method = GenAiryMethod::asymptotic_neg;
      r.est_error = std::pow(std::abs(y), -(3.0 * n + 1.0) / (2.0 * (n + 1.0)));
      return r;
    }
    const detail::HalfLine hl = detail::gen_airy_half_line_nonpositive(n, y);
    r.value = std::real(hl.value) / kPi;
    r.est_error = hl.est_error / kPi;
    r.method = GenAiryMethod::oscillatory_quadrature;
    return r;
  }
  double ls = 0.0;
  const detail::HalfLine hl = detail::gen_airy_half_line_positive(n, y, &ls);
  const double scale = std::exp(ls);
  r.value = scale * std::real(hl.value) / kPi;
  r.est_error = scale * hl.est_error / kPi;
  r.method = (y > 8.0) ? GenAiryMethod::asymptotic_pos : GenAiryMethod::oscillatory_quadrature;
  return r;
}

// Cosine form (1/pi) int_0^inf cos(P(eta)) d eta without the range policing of gen_airy.
inline double gen_airy_cos_form(int n, double y) {
  if (y <= 0.0) return std::real(detail::gen_airy_half_line_nonpositive(n, y).value) / kPi;
  double ls = 0.0;
  const detail::HalfLine hl = detail::gen_airy_half_line_positive(n, y, &ls);
  return std::exp(ls) * std::real(hl.value) / kPi;
}

inline GenAiryResult gen_airy_zero_result(int n) {
  return {gen_airy_zero(n), n, GenAiryMethod::closed_form_zero, 0.0};
}

}  // namespace xres
