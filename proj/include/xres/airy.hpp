#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "xres/errors.hpp"
#include "xres/numerics.hpp"

namespace xres {

struct AiryPair {
  double ai = 0.0;
  double bi = 0.0;
  double ai_deriv = 0.0;
  double bi_deriv = 0.0;

  double wronskian() const { return ai * bi_deriv - ai_deriv * bi; }
};

struct CiPair {
  cplx ci;
  cplx ci_star;
};

inline constexpr double kAiryMin = -200.0;
inline constexpr double kAiryMax = 80.0;

namespace detail {

inline constexpr long double kAi0 = 0.355028053887817239260063186004183176L;
inline constexpr long double kAip0 = -0.258819403792806798405183560189203963L;
inline constexpr long double kBi0 = 0.614926627446000735150922369093613553L;
inline constexpr long double kBip0 = 0.448288357353826357914823710398828390L;

inline constexpr double kSeriesEdge = 4.5;
inline constexpr double kAsymptoticEdge = 8.0;

struct Cauchy {
  long double v;
  long double dv;
};

// Taylor expansion of a solution of v'' = x v about c, evaluated at c + d.
inline Cauchy airy_taylor(long double c, Cauchy at_c, long double d) {
  // a_{k+2} (k+2)(k+1) = c a_k + a_{k-1}
  long double akm1 = 0.0L, ak = at_c.v, ak1 = at_c.dv;
  long double sum = ak + ak1 * d;
  long double dsum = ak1;
  long double dk = d;  // d^{k+1}
  for (int k = 0; k < 400; ++k) {
    const long double ak2 = (c * ak + akm1) / static_cast<long double>((k + 2) * (k + 1));
    const long double term = ak2 * dk * d;
    const long double dterm = static_cast<long double>(k + 2) * ak2 * dk;
    sum += term;
    dsum += dterm;
    akm1 = ak;
    ak = ak1;
    ak1 = ak2;
    dk *= d;
    const long double scale = std::fabs(sum) + std::fabs(dsum) + 1e-300L;
    if (k > 4 && std::fabs(term) + std::fabs(dterm) < 1e-21L * scale &&
        std::fabs(ak) * std::fabs(dk) < 1e-21L * scale)
      break;
  }
  return {sum, dsum};
}

// Walk a solution from x0 to x1 in Taylor steps of at most 0.25.
inline Cauchy airy_walk(long double x0, Cauchy s, long double x1) {
  const long double span = x1 - x0;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::fabs(span) / 0.25L)));
  const long double d = span / static_cast<long double>(steps);
  long double x = x0;
  for (int i = 0; i < steps; ++i) {
    s = airy_taylor(x, s, d);
    x += d;
  }
  return s;
}

struct AsymptoticSums {
  double even_u, odd_u, even_v, odd_v;  // alternating sums split by parity
  double all_u, all_v, alt_u, alt_v;    // plain and alternating full sums
};

inline AsymptoticSums airy_asymptotic_sums(double zeta) {
  AsymptoticSums s{1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0};
  double uk = 1.0;
  double zk = 1.0;
  double last = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double kk = static_cast<double>(k);
    uk *= (6.0 * kk - 5.0) * (6.0 * kk - 3.0) * (6.0 * kk - 1.0) / ((2.0 * kk - 1.0) * 216.0 * kk);
    const double vk = -(6.0 * kk + 1.0) / (6.0 * kk - 1.0) * uk;
    zk /= zeta;
    const double tu = uk * zk, tv = vk * zk;
    const double mag = std::abs(tu) + std::abs(tv);
    if (mag > last) break;  // optimal truncation
    last = mag;
    const double alt = (k % 2 == 0) ? 1.0 : -1.0;
    s.all_u += tu;
    s.all_v += tv;
    s.alt_u += alt * tu;
    s.alt_v += alt * tv;
    // Parity-split sums carry (-1)^m for index 2m or 2m+1.
    const int m = k / 2;
    const double sm = (m % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      s.even_u += sm * tu;
      s.even_v += sm * tv;
    } else {
      s.odd_u += sm * tu;
      s.odd_v += sm * tv;
    }
    if (mag < 1e-18) break;
  }
  return s;
}

inline AiryPair airy_asymptotic_pos(double y) {
  const double zeta = 2.0 / 3.0 * y * std::sqrt(y);
  const double y4 = std::pow(y, 0.25);
  const AsymptoticSums s = airy_asymptotic_sums(zeta);
  const double em = std::exp(-zeta), ep = std::exp(zeta);
  const double rp = 1.0 / std::sqrt(kPi);
  AiryPair r;
  r.ai = 0.5 * rp * em / y4 * s.alt_u;
  r.ai_deriv = -0.5 * rp * y4 * em * s.alt_v;
  r.bi = rp * ep / y4 * s.all_u;
  r.bi_deriv = rp * y4 * ep * s.all_v;
  return r;
}

inline AiryPair airy_asymptotic_neg(double y) {
  const double x = -y;
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const double x4 = std::pow(x, 0.25);
  const AsymptoticSums s = airy_asymptotic_sums(zeta);
  const double th = zeta - 0.25 * kPi;
  const double c = std::cos(th), sn = std::sin(th);
  const double rp = 1.0 / std::sqrt(kPi);
  AiryPair r;
  r.ai = rp / x4 * (c * s.even_u + sn * s.odd_u);
  r.ai_deriv = rp * x4 * (sn * s.even_v - c * s.odd_v);
  r.bi = rp / x4 * (-sn * s.even_u + c * s.odd_u);
  r.bi_deriv = rp * x4 * (c * s.even_v + sn * s.odd_v);
  return r;
}

inline AiryPair airy_series(double y) {
  const Cauchy a = airy_taylor(0.0L, {kAi0, kAip0}, static_cast<long double>(y));
  const Cauchy b = airy_taylor(0.0L, {kBi0, kBip0}, static_cast<long double>(y));
  return {static_cast<double>(a.v), static_cast<double>(b.v), static_cast<double>(a.dv),
          static_cast<double>(b.dv)};
}

// Ai, Bi and derivatives at any real y (no range policing).
inline AiryPair airy_any(double y) {
  if (std::abs(y) <= kSeriesEdge) return airy_series(y);
  if (y >= kAsymptoticEdge) return airy_asymptotic_pos(y);
  if (y <= -kAsymptoticEdge) return airy_asymptotic_neg(y);
  if (y > 0.0) {
    // Ai is recessive: walk down from the asymptotic edge. Bi is dominant: walk up.
    const AiryPair top = airy_asymptotic_pos(kAsymptoticEdge);
    const Cauchy a = airy_walk(kAsymptoticEdge, {top.ai, top.ai_deriv}, y);
    const AiryPair edge = airy_series(kSeriesEdge);
    const Cauchy b = airy_walk(kSeriesEdge, {edge.bi, edge.bi_deriv}, y);
    return {static_cast<double>(a.v), static_cast<double>(b.v), static_cast<double>(a.dv),
            static_cast<double>(b.dv)};
  }
  const AiryPair edge = airy_series(-kSeriesEdge);
  const Cauchy a = airy_walk(-kSeriesEdge, {edge.ai, edge.ai_deriv}, y);
  const Cauchy b = airy_walk(-kSeriesEdge, {edge.bi, edge.bi_deriv}, y);
  return {static_cast<double>(a.v), static_cast<double>(b.v), static_cast<double>(a.dv),
          static_cast<double>(b.dv)};
}

inline double airy_ai_any(double y) {
  if (y > 105.0) return 0.0;
  return airy_any(y).ai;
}

inline CiPair ci_from(const AiryPair& p) {
  const cplx ep = std::polar(1.0, 0.25 * kPi);
  const cplx em = std::conj(ep);
  return {ep * p.ai + em * p.bi, em * p.ai + ep * p.bi};
}

}  // namespace detail

inline void check_airy_range(double y) {
  if (!(y >= kAiryMin && y <= kAiryMax))
    throw RangeError("Airy argument " + std::to_string(y) + " outside [-200, 80]");
}

inline AiryPair airy_eval(double y) {
  check_airy_range(y);
  return detail::airy_any(y);
}

// Ci = e^{i pi/4} Ai + e^{-i pi/4} Bi and its conjugate Ci*.
inline CiPair ci_eval(double y) { return detail::ci_from(airy_eval(y)); }

// Closed form of the integral over R of Ai(l1 (x - m1)) Ai(l2 (x - m2)).
// The prefactor is |l2^3 - l1^3|^{-1/3}: the integral is symmetric under swapping the two factors.
inline double airy_product_integral(double lambda1, double lambda2, double mu1, double mu2) {
  if (lambda1 == 0.0 || lambda2 == 0.0) throw DomainError("Airy scale must be nonzero");
  if (lambda1 == lambda2) throw DomainError("Airy scales must differ");
  const double pref = std::cbrt(std::abs(lambda2 * lambda2 * lambda2 - lambda1 * lambda1 * lambda1));
  const double inv = 1.0 / (lambda1 * lambda1 * lambda1) - 1.0 / (lambda2 * lambda2 * lambda2);
  const double arg = (mu2 - mu1) / signed_root(inv, 3.0);
  return airy_eval(arg).ai / pref;
}

}  // namespace xres
