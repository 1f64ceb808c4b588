#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xres/airy.hpp"
#include "xres/crossing.hpp"
#include "xres/errors.hpp"
#include "xres/numerics.hpp"
#include "xres/potentials.hpp"

namespace xres {

// Uniform nodes x_i = lo + i * step, i = 0 .. size - 1.
struct Grid {
  double lo = 0.0;
  double step = 0.0;
  std::size_t size = 0;
  double x(std::size_t i) const { return lo + step * static_cast<double>(i); }
};

// Index range [begin, end] (inclusive) of a grid.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool contains(std::size_t i) const { return i >= begin && i <= end; }
};

// Sampled function with its first three derivatives.
struct Sampled {
  std::vector<cplx> f, d1, d2, d3;

  Sampled() = default;
  explicit Sampled(std::size_t n) : f(n), d1(n), d2(n), d3(n) {}
  std::size_t size() const { return f.size(); }
};

inline double sup_norm(const Sampled& s, Span r) {
  double m = 0.0;
  for (std::size_t i = r.begin; i <= r.end; ++i) m = std::max(m, std::abs(s.f[i]));
  return m;
}

inline void add_into(Sampled& acc, const Sampled& t, Span r) {
  for (std::size_t i = r.begin; i <= r.end; ++i) {
    acc.f[i] += t.f[i];
    acc.d1[i] += t.d1[i];
    acc.d2[i] += t.d2[i];
    acc.d3[i] += t.d3[i];
  }
}

inline cplx wronskian_at(const Sampled& u, const Sampled& v, std::size_t i) {
  return u.f[i] * v.d1[i] - u.d1[i] * v.f[i];
}

// Scalar equation -h^2 u'' + (V - E) u = 0 on a grid.
struct ScalarProblem {
  Polynomial potential;  // V - E
  Polynomial slope;      // V'
  double h = 0.0;
  Grid grid;
};

namespace detail {

struct TaylorState {
  cplx u, du;
};

// Taylor step of u'' = q(x) u / h^2 from x0 by d, with q polynomial.
inline TaylorState taylor_step(const std::vector<double>& q_at_x0, double h2, TaylorState s, double d) {
  std::vector<cplx> c;
  c.reserve(64);
  c.push_back(s.u);
  c.push_back(s.du);
  cplx sum = s.u + s.du * d, dsum = s.du;
  double dk = d;  // d^{k-1} for the derivative term
  int quiet = 0;
  for (std::size_t k = 0; k < 400; ++k) {
    cplx acc = 0.0;
    const std::size_t top = std::min(k, q_at_x0.size() - 1);
    for (std::size_t m = 0; m <= top; ++m) acc += q_at_x0[m] * c[k - m];
    const cplx next = acc / (h2 * static_cast<double>((k + 1) * (k + 2)));
    c.push_back(next);
    const cplx dterm = static_cast<double>(k + 2) * next * dk;
    dk *= d;
    const cplx term = next * dk;
    sum += term;
    dsum += dterm;
    const double scale = std::abs(sum) + std::abs(dsum) * std::abs(d) + 1e-300;
    if (std::abs(term) + std::abs(dterm) * std::abs(d) < 1e-18 * scale) {
      if (++quiet >= 3) break;
    } else {
      quiet = 0;
    }
  }
  return {sum, dsum};
}

inline void fill_higher(const ScalarProblem& p, Sampled& s, std::size_t i) {
  const double x = p.grid.x(i);
  const double q = p.potential(x), dq = p.slope(x);
  const double h2 = p.h * p.h;
  s.d2[i] = q * s.f[i] / h2;
  s.d3[i] = (dq * s.f[i] + q * s.d1[i]) / h2;
}

}  // namespace detail

// Solution through (u, u') at node `start`, integrated to both ends of the grid.
inline Sampled integrate_scalar(const ScalarProblem& p, std::size_t start, cplx u0, cplx du0) {
  const std::size_t n = p.grid.size;
  Sampled s(n);
  s.f[start] = u0;
  s.d1[start] = du0;
  detail::fill_higher(p, s, start);
  const double h2 = p.h * p.h;
  for (std::size_t i = start; i + 1 < n; ++i) {
    const std::vector<double> q = p.potential.taylor_at(p.grid.x(i));
    const detail::TaylorState t = detail::taylor_step(q, h2, {s.f[i], s.d1[i]}, p.grid.step);
    s.f[i + 1] = t.u;
    s.d1[i + 1] = t.du;
    detail::fill_higher(p, s, i + 1);
  }
  for (std::size_t i = start; i > 0; --i) {
    const std::vector<double> q = p.potential.taylor_at(p.grid.x(i));
    const detail::TaylorState t = detail::taylor_step(q, h2, {s.f[i], s.d1[i]}, -p.grid.step);
    s.f[i - 1] = t.u;
    s.d1[i - 1] = t.du;
    detail::fill_higher(p, s, i - 1);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(std::abs(s.f[i])) || !std::isfinite(std::abs(s.d1[i])))
      throw NumericError("scalar ODE integration overflowed");
  return s;
}

// Langer-uniform Airy-type data sqrt(pi) h^{-1/6} xi'^{-1/2} F(h^{-2/3} xi) and its derivative.
struct UniformData {
  cplx u, du;
};

inline UniformData uniform_airy_data(const LangerChart& chart, double h, double x, bool ci) {
  const double xi = chart.xi(x), d1 = chart.xi_deriv(x), d2 = chart.xi_deriv2(x);
  const double h23 = std::pow(h, 2.0 / 3.0);
  const AiryPair a = detail::airy_any(xi / h23);
  cplx F = a.ai, dF = a.ai_deriv;
  if (ci) {
    const cplx ep = std::polar(1.0, 0.25 * kPi), em = std::conj(ep);
    F = ep * a.ai + em * a.bi;
    dF = ep * a.ai_deriv + em * a.bi_deriv;
  }
  const double pre = std::sqrt(kPi) * std::pow(h, -1.0 / 6.0);
  const double s = 1.0 / std::sqrt(d1);
  return {pre * s * F, pre * (-0.5 * s * s * s * d2 * F + std::sqrt(d1) / h23 * dF)};
}

struct ExactGridOptions {
  double decay_exponent = 40.0;  // right edge where (1/h) int sqrt(V - E) reaches this value
  double airy_fraction = 1.0 / 12.0;
  double wavelength_fraction = 1.0 / 24.0;
  std::size_t max_nodes = 4000000;
};

// Grid [-R, x_R] with x = 0 on a node.
struct ExactGrid {
  Grid grid;
  std::size_t origin = 0;  // node at x = 0
  Span left;               // [-R, 0]
  Span right;              // [0, x_R]
};

inline ExactGrid make_exact_grid(const PotentialModel& model, const InteractionModel& inter, double E, double h,
                                 const LangerChart& c1, const LangerChart& c2, const ExactGridOptions& opt = {}) {
  const double R = inter.support_radius;
  const Interval ch = model.chart();
  if (!(-R >= ch.lo && R <= ch.hi)) throw DomainError("interaction support must lie inside the Langer charts");
  // Right edge: both decaying solutions are e^{-decay_exponent} below their turning-point size.
  const double xi_target = std::pow(1.5 * opt.decay_exponent * h, 2.0 / 3.0);
  double xr = R;
  if (c1.xi(R) > xi_target && c2.xi(R) > xi_target) {
    double lo = std::max({0.0, c1.turning_point(), c2.turning_point()}), hi = R;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (std::min(c1.xi(mid), c2.xi(mid)) > xi_target ? hi : lo) = mid;
    }
    xr = hi;
  }
  double kmax = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = -R + (xr + R) * i / 400.0;
    kmax = std::max({kmax, std::sqrt(std::abs(model.v1()(x) - E)), std::sqrt(std::abs(model.v2()(x) - E))});
  }
  double d = opt.airy_fraction * std::pow(h, 2.0 / 3.0);
  if (kmax > 0.0) d = std::min(d, opt.wavelength_fraction * 2.0 * kPi * h / (2.0 * kmax));
  const std::size_t nl = static_cast<std::size_t>(std::ceil(R / d));
  d = R / static_cast<double>(nl);
  const std::size_t nr = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(xr / d)));
  if (nl + nr + 1 > opt.max_nodes) throw NumericError("exact-solution grid exceeds the node budget");
  ExactGrid g;
  g.grid = {-R, d, nl + nr + 1};
  g.origin = nl;
  g.left = {0, nl};
  g.right = {nl, nl + nr};
  return g;
}

struct ScalarBasis {
  int which = 1;
  Sampled u_minus, u_plus, u_out, u_inc;
  cplx wronskian_mp;  // h W(u-, u+), exactly 1 by construction
  cplx wronskian_oi;  // h W(out, inc), exactly 2i by construction
  double wronskian_drift = 0.0;  // max relative drift of each Wronskian over the span where the pair is used
  cplx t_factor;                 // t in (u-, u+) = (out, inc) [[t, conj t], [conj t, t]] / 2
  cplx t_raw;                    // same quantity before the phase normalization of (out, inc)
  double turning_point = 0.0;
};

inline double wronskian_drift(const Sampled& u, const Sampled& v, cplx ref, Span r) {
  double m = 0.0;
  for (std::size_t i = r.begin; i <= r.end; ++i) m = std::max(m, std::abs(wronskian_at(u, v, i) - ref) / std::abs(ref));
  return m;
}

inline ScalarProblem scalar_problem(const PotentialModel& model, int j, double E, double h, const Grid& grid) {
  return {model.v(j) - E, model.v(j).derivative(), h, grid};
}

// Exact decaying/growing and outgoing/incoming solutions of the scalar equation for V_j.
inline ScalarBasis scalar_basis(const PotentialModel& model, int j, double E, double h, const ExactGrid& eg,
                                const LangerChart& chart) {
  const ScalarProblem p = scalar_problem(model, j, E, h, eg.grid);
  const std::size_t last = eg.grid.size - 1;
  const double xr = eg.grid.x(last), xl = eg.grid.x(0);
  if (!(xl < chart.turning_point()))
    throw DomainError("grid must extend left of the turning point");

  const UniformData dm = uniform_airy_data(chart, h, xr, false);
  Sampled um = integrate_scalar(p, last, dm.u, dm.du);
  const UniformData dc = uniform_airy_data(chart, h, xl, true);
  Sampled out = integrate_scalar(p, 0, dc.u, dc.du);

  auto conj_of = [](const Sampled& s) {
    Sampled c(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      c.f[i] = std::conj(s.f[i]);
      c.d1[i] = std::conj(s.d1[i]);
      c.d2[i] = std::conj(s.d2[i]);
      c.d3[i] = std::conj(s.d3[i]);
    }
    return c;
  };
  auto scale = [](Sampled& s, cplx a) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      s.f[i] *= a;
      s.d1[i] *= a;
      s.d2[i] *= a;
      s.d3[i] *= a;
    }
  };
  const std::size_t o = eg.origin;
  // h W(out, conj out) = 2 i gamma with gamma > 0.
  Sampled inc = conj_of(out);
  const double gamma = (h * wronskian_at(out, inc, o)).imag() / 2.0;
  if (!(gamma > 0.0)) throw NumericError("outgoing solution has a degenerate Wronskian");
  scale(out, 1.0 / std::sqrt(gamma));
  inc = conj_of(out);

  ScalarBasis b;
  b.which = j;
  b.turning_point = chart.turning_point();
  b.t_raw = cplx(0.0, -1.0) * h * wronskian_at(um, inc, o);
  // Rephase (out, inc) so that arg t = -pi/4, then rescale u- so that |t| = 1.
  const double theta = std::arg(b.t_raw) + 0.25 * kPi;
  scale(out, std::polar(1.0, theta));
  inc = conj_of(out);
  scale(um, 1.0 / std::abs(b.t_raw));
  b.t_factor = std::polar(1.0, -0.25 * kPi);

  const cplx t = b.t_factor;
  Sampled up(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    up.f[i] = 0.5 * (std::conj(t) * out.f[i] + t * inc.f[i]);
    up.d1[i] = 0.5 * (std::conj(t) * out.d1[i] + t * inc.d1[i]);
    up.d2[i] = 0.5 * (std::conj(t) * out.d2[i] + t * inc.d2[i]);
    up.d3[i] = 0.5 * (std::conj(t) * out.d3[i] + t * inc.d3[i]);
  }
  b.u_minus = std::move(um);
  b.u_plus = std::move(up);
  b.u_out = std::move(out);
  b.u_inc = std::move(inc);
  b.wronskian_mp = h * wronskian_at(b.u_minus, b.u_plus, o);
  b.wronskian_oi = h * wronskian_at(b.u_out, b.u_inc, o);
  b.wronskian_drift = std::max(wronskian_drift(b.u_minus, b.u_plus, b.wronskian_mp / h, eg.right),
                               wronskian_drift(b.u_out, b.u_inc, b.wronskian_oi / h, eg.left));
  return b;
}

// Multiplier jets (a, b) with U_j f = a f + h b f'.
struct InteractionJets {
  std::vector<std::array<double, 3>> a, b;
};

// U f = r0 f + h r1 f';  U* f = r0 f - h (r1 f)' = (r0 - h r1') f - h r1 f'.
inline InteractionJets interaction_jets(const InteractionModel& inter, bool conjugated, const Grid& g, double h) {
  InteractionJets j;
  j.a.resize(g.size);
  j.b.resize(g.size);
  for (std::size_t i = 0; i < g.size; ++i) {
    const BumpValue r0 = inter.r0(g.x(i)), r1 = inter.r1(g.x(i));
    if (!conjugated) {
      j.a[i] = {r0.v, r0.d1, r0.d2};
      j.b[i] = {r1.v, r1.d1, r1.d2};
    } else {
      j.a[i] = {r0.v - h * r1.d1, r0.d1 - h * r1.d2, r0.d2 - h * r1.d3};
      j.b[i] = {-r1.v, -r1.d1, -r1.d2};
    }
  }
  return j;
}

// (U f, (U f)', (U f)'') on a span.
struct Applied {
  std::vector<cplx> f, d1, d2;
};

inline Applied apply_interaction(const InteractionJets& jets, const Sampled& f, double h, Span r) {
  Applied out;
  const std::size_t n = f.size();
  out.f.assign(n, 0.0);
  out.d1.assign(n, 0.0);
  out.d2.assign(n, 0.0);
  for (std::size_t i = r.begin; i <= r.end; ++i) {
    const auto& a = jets.a[i];
    const auto& b = jets.b[i];
    out.f[i] = a[0] * f.f[i] + h * b[0] * f.d1[i];
    out.d1[i] = a[1] * f.f[i] + a[0] * f.d1[i] + h * (b[1] * f.d1[i] + b[0] * f.d2[i]);
    out.d2[i] = a[2] * f.f[i] + 2.0 * a[1] * f.d1[i] + a[0] * f.d2[i] +
                h * (b[2] * f.d1[i] + 2.0 * b[1] * f.d2[i] + b[0] * f.d3[i]);
  }
  return out;
}

namespace detail {

// Cumulative integral of g (with g', g'') from the anchor node, exact for quintics on each cell.
inline std::vector<cplx> cumulative_from(const std::vector<cplx>& g, const std::vector<cplx>& g1,
                                         const std::vector<cplx>& g2, double d, Span r, std::size_t anchor) {
  std::vector<cplx> c(g.size(), 0.0);
  auto cell = [&](std::size_t i) {
    return d / 2.0 * (g[i] + g[i + 1]) + d * d / 10.0 * (g1[i] - g1[i + 1]) + d * d * d / 120.0 * (g2[i] + g2[i + 1]);
  };
  for (std::size_t i = anchor; i < r.end; ++i) c[i + 1] = c[i] + cell(i);
  for (std::size_t i = anchor; i > r.begin; --i) c[i - 1] = c[i] - cell(i - 1);
  return c;
}

struct Product {
  std::vector<cplx> g, g1, g2;
};

inline Product product(const Sampled& u, const Applied& F, Span r) {
  Product p;
  const std::size_t n = u.size();
  p.g.assign(n, 0.0);
  p.g1.assign(n, 0.0);
  p.g2.assign(n, 0.0);
  for (std::size_t i = r.begin; i <= r.end; ++i) {
    p.g[i] = u.f[i] * F.f[i];
    p.g1[i] = u.d1[i] * F.f[i] + u.f[i] * F.d1[i];
    p.g2[i] = u.d2[i] * F.f[i] + 2.0 * u.d1[i] * F.d1[i] + u.f[i] * F.d2[i];
  }
  return p;
}

}  // namespace detail

// Kernel K(u, u_dagger; s, t) applied to the source -h U_j f, i.e. the operator -h K U_j.
struct KernelSpec {
  const Sampled* u = nullptr;
  const Sampled* u_dagger = nullptr;
  std::size_t s = 0;  // anchor of the integral against u_dagger
  std::size_t t = 0;  // anchor of the integral against u
  Span span;
};

inline Sampled kernel_apply(const ScalarProblem& p, const KernelSpec& k, const InteractionJets& jets,
                            const Sampled& f) {
  const Span r = k.span;
  const std::size_t n = f.size();
  const double h = p.h;
  Applied F = apply_interaction(jets, f, h, r);
  for (std::size_t i = r.begin; i <= r.end; ++i) {
    F.f[i] *= -h;
    F.d1[i] *= -h;
    F.d2[i] *= -h;
  }
  const cplx w = wronskian_at(*k.u, *k.u_dagger, k.s);
  if (std::abs(w) == 0.0) throw NumericError("degenerate basis: vanishing Wronskian");
  const detail::Product pd = detail::product(*k.u_dagger, F, r);
  const detail::Product pu = detail::product(*k.u, F, r);
  const double d = p.grid.step;
  const std::vector<cplx> Id = detail::cumulative_from(pd.g, pd.g1, pd.g2, d, r, k.s);
  const std::vector<cplx> Iu = detail::cumulative_from(pu.g, pu.g1, pu.g2, d, r, k.t);
  const cplx c = 1.0 / (h * h * w);
  Sampled v(n);
  const double h2 = h * h;
  for (std::size_t i = r.begin; i <= r.end; ++i) {
    v.f[i] = c * (k.u->f[i] * Id[i] - k.u_dagger->f[i] * Iu[i]);
    v.d1[i] = c * (k.u->d1[i] * Id[i] - k.u_dagger->d1[i] * Iu[i]);
    const double x = p.grid.x(i);
    const double q = p.potential(x), dq = p.slope(x);
    v.d2[i] = (q * v.f[i] - F.f[i]) / h2;
    v.d3[i] = (dq * v.f[i] + q * v.d1[i] - F.d1[i]) / h2;
  }
  return v;
}

// C_j(u, u_dagger; s)[f] = (1 / (h W(u, u_dagger))) int_0^s u_dagger U_j f.
inline cplx functional_c(const ScalarProblem& p, const Sampled& u, const Sampled& u_dagger, std::size_t origin,
                         std::size_t s, const InteractionJets& jets, const Sampled& f) {
  const Span r{std::min(origin, s), std::max(origin, s)};
  const Applied F = apply_interaction(jets, f, p.h, r);
  const detail::Product pd = detail::product(u_dagger, F, r);
  const std::vector<cplx> I = detail::cumulative_from(pd.g, pd.g1, pd.g2, p.grid.step, r, origin);
  return I[s] / (p.h * wronskian_at(u, u_dagger, origin));
}

struct NeumannResult {
  Sampled first, second;  // components of w
  std::size_t terms = 0;
  double contraction_ratio = 0.0;
  double tail_bound = 0.0;
};

struct NeumannOptions {
  double rel_tol = 1e-12;
  std::size_t max_terms = 12;
  double max_ratio = 0.5;
};

// w_1 = (J_1 u, K2 J_1 u) for seed on channel 1, w_2 = (K1 J_2 u, J_2 u) for seed on channel 2.
inline NeumannResult neumann_series(const ScalarProblem& p1, const ScalarProblem& p2, const KernelSpec& k1,
                                    const KernelSpec& k2, const InteractionJets& jets1,
                                    const InteractionJets& jets2, const Sampled& seed, int channel,
                                    const NeumannOptions& opt = {}) {
  const bool one = channel == 1;
  const ScalarProblem& pa = one ? p1 : p2;  // own channel
  const ScalarProblem& pb = one ? p2 : p1;  // other channel
  const KernelSpec& ka = one ? k1 : k2;
  const KernelSpec& kb = one ? k2 : k1;
  const InteractionJets& ja = one ? jets1 : jets2;
  const InteractionJets& jb = one ? jets2 : jets1;
  const Span r = ka.span;

  NeumannResult res;
  Sampled J(seed.size());
  add_into(J, seed, r);
  Sampled term = seed;
  const double seed_norm = sup_norm(seed, r);
  double prev = seed_norm;
  res.terms = 1;
  double last_ratio = 0.0;
  while (res.terms < opt.max_terms) {
    const Sampled mid = kernel_apply(pb, kb, jb, term);
    term = kernel_apply(pa, ka, ja, mid);
    const double nrm = sup_norm(term, r);
    const double ratio = prev > 0.0 ? nrm / prev : 0.0;
    res.contraction_ratio = std::max(res.contraction_ratio, ratio);
    if (ratio >= opt.max_ratio)
      throw ConvergenceError("Neumann series does not contract (ratio " + std::to_string(ratio) + ")", ratio);
    add_into(J, term, r);
    ++res.terms;
    last_ratio = ratio;
    prev = nrm;
    if (nrm <= opt.rel_tol * seed_norm) break;
  }
  res.tail_bound = last_ratio < 1.0 ? prev * last_ratio / (1.0 - last_ratio) : prev;
  Sampled other = kernel_apply(pb, kb, jb, J);
  if (one) {
    res.first = std::move(J);
    res.second = std::move(other);
  } else {
    res.first = std::move(other);
    res.second = std::move(J);
  }
  return res;
}

// Relative residual of the coupled system on interior nodes, using a sixth-order difference of w'.
inline double system_residual(const ScalarProblem& p1, const ScalarProblem& p2, const InteractionJets& jets_u,
                              const InteractionJets& jets_ustar, const NeumannResult& w, Span r) {
  static constexpr std::array<double, 7> c{-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
  const double h = p1.h, d = p1.grid.step;
  const Applied Uw2 = apply_interaction(jets_u, w.second, h, r);
  const Applied Uw1 = apply_interaction(jets_ustar, w.first, h, r);
  double res = 0.0, scale = 0.0;
  for (std::size_t i = r.begin + 3; i + 3 <= r.end; ++i) {
    cplx dd1 = 0.0, dd2 = 0.0;
    for (int k = 0; k < 7; ++k) {
      dd1 += c[k] * w.first.d1[i + k - 3];
      dd2 += c[k] * w.second.d1[i + k - 3];
    }
    dd1 /= d;
    dd2 /= d;
    const double x = p1.grid.x(i);
    const cplx e1 = -h * h * dd1 + p1.potential(x) * w.first.f[i] + h * Uw2.f[i];
    const cplx e2 = -h * h * dd2 + p2.potential(x) * w.second.f[i] + h * Uw1.f[i];
    res = std::max({res, std::abs(e1), std::abs(e2)});
    scale = std::max({scale, std::abs(p1.potential(x) * w.first.f[i]), std::abs(p2.potential(x) * w.second.f[i]),
                      std::abs(h * h * dd1), std::abs(h * h * dd2)});
  }
  return scale > 0.0 ? res / scale : 0.0;
}

struct CoefficientSet {
  std::array<cplx, 2> alpha{};  // alpha_j
  std::array<cplx, 2> beta{};   // beta_j
  // [j][target][seed], target/seed: 0 = out, 1 = inc
  std::array<std::array<std::array<cplx, 2>, 2>, 2> alpha_grid{};
  std::array<std::array<std::array<cplx, 2>, 2>, 2> beta_grid{};
};

enum Wave { kOut = 0, kInc = 1 };

inline const char* wave_name(int w) { return w == kOut ? "out" : "inc"; }

struct ExactSystemOptions {
  ExactGridOptions grid;
  NeumannOptions neumann;
  double max_condition = 1e8;
  double max_wronskian_drift = 1e-6;
};

// Grid, scalar bases, interaction jets and kernels shared by all Neumann solutions at (E, h).
struct ExactSetup {
  double E = 0.0, h = 0.0;
  ExactGrid eg;
  ScalarProblem problem[2];
  ScalarBasis basis[2];
  InteractionJets jets[2];  // U_1 = U acts on the second component, U_2 = U* on the first
  double wronskian_drift = 0.0;

  // p family: K(u-, u+; 0, +inf) on [0, x_R].
  KernelSpec kernel_p(int j) const {
    const ScalarBasis& b = basis[j];
    return {&b.u_minus, &b.u_plus, eg.origin, eg.right.end, eg.right};
  }
  // a family: K(out, inc; -inf, -inf) on [-R, 0].
  KernelSpec kernel_a(int j) const {
    const ScalarBasis& b = basis[j];
    return {&b.u_out, &b.u_inc, eg.left.begin, eg.left.begin, eg.left};
  }
};

inline ExactSetup make_exact_setup(const PotentialModel& model, const InteractionModel& inter, double E, double h,
                                   const ExactSystemOptions& opt = {}) {
  if (!(h > 0.0)) throw DomainError("h must be positive");
  const Interval ch = model.chart();
  const LangerChart c1(model, 1, E, ch), c2(model, 2, E, ch);
  ExactSetup st;
  st.E = E;
  st.h = h;
  st.eg = make_exact_grid(model, inter, E, h, c1, c2, opt.grid);
  const Grid& g = st.eg.grid;
  st.problem[0] = scalar_problem(model, 1, E, h, g);
  st.problem[1] = scalar_problem(model, 2, E, h, g);
  st.basis[0] = scalar_basis(model, 1, E, h, st.eg, c1);
  st.basis[1] = scalar_basis(model, 2, E, h, st.eg, c2);
  st.wronskian_drift = std::max(st.basis[0].wronskian_drift, st.basis[1].wronskian_drift);
  if (!(st.wronskian_drift <= opt.max_wronskian_drift))
    throw NumericError("scalar basis Wronskian drift " + std::to_string(st.wronskian_drift) + " exceeds tolerance");
  st.jets[0] = interaction_jets(inter, false, g, h);
  st.jets[1] = interaction_jets(inter, true, g, h);
  return st;
}

enum class SolutionFamily { minus1, minus2, out1, inc1, out2, inc2 };

// Exact solution w of the coupled system seeded by one scalar solution.
inline NeumannResult neumann_solve(const ExactSetup& st, SolutionFamily fam, const NeumannOptions& opt = {}) {
  const bool p = fam == SolutionFamily::minus1 || fam == SolutionFamily::minus2;
  const int channel = (fam == SolutionFamily::minus1 || fam == SolutionFamily::out1 || fam == SolutionFamily::inc1) ? 1 : 2;
  const ScalarBasis& b = st.basis[channel - 1];
  const Sampled& seed = p ? b.u_minus : (fam == SolutionFamily::out1 || fam == SolutionFamily::out2) ? b.u_out : b.u_inc;
  const KernelSpec k1 = p ? st.kernel_p(0) : st.kernel_a(0);
  const KernelSpec k2 = p ? st.kernel_p(1) : st.kernel_a(1);
  return neumann_series(st.problem[0], st.problem[1], k1, k2, st.jets[0], st.jets[1], seed, channel, opt);
}

struct ExactSystem {
  ExactSetup setup;
  NeumannResult w_minus[2];    // w_1^-, w_2^-
  NeumannResult w_wave[2][2];  // [j][out/inc]
  CoefficientSet coeffs;
  double contraction_p = 0.0, contraction_a = 0.0;
  double residual = 0.0;  // worst system residual over all w
};

// The twelve functionals from the six Neumann solutions.
inline CoefficientSet coefficients_from(const ExactSetup& st, const NeumannResult (&w_minus)[2],
                                        const NeumannResult (&w_wave)[2][2]) {
  CoefficientSet c;
  const std::size_t o = st.eg.origin, xr = st.eg.right.end, xl = st.eg.left.begin;
  auto own = [](const NeumannResult& r, int j) -> const Sampled& { return j == 0 ? r.first : r.second; };
  auto other = [](const NeumannResult& r, int j) -> const Sampled& { return j == 0 ? r.second : r.first; };
  for (int j = 0; j < 2; ++j) {
    const int jh = 1 - j;
    const ScalarBasis& bj = st.basis[j];
    const ScalarBasis& bh = st.basis[jh];
    const ScalarProblem& pj = st.problem[j];
    const ScalarProblem& ph = st.problem[jh];
    c.alpha[j] = functional_c(ph, bh.u_plus, bh.u_minus, o, xr, st.jets[jh], own(w_minus[j], j));
    c.beta[j] = functional_c(pj, bj.u_plus, bj.u_minus, o, xr, st.jets[j], other(w_minus[j], j));
    for (int seed = 0; seed < 2; ++seed) {
      const NeumannResult& w = w_wave[j][seed];
      for (int tgt = 0; tgt < 2; ++tgt) {
        const Sampled& uh = tgt == kOut ? bh.u_out : bh.u_inc;
        const Sampled& uh_hat = tgt == kOut ? bh.u_inc : bh.u_out;
        const Sampled& uj = tgt == kOut ? bj.u_out : bj.u_inc;
        const Sampled& uj_hat = tgt == kOut ? bj.u_inc : bj.u_out;
        c.alpha_grid[j][tgt][seed] = functional_c(ph, uh, uh_hat, o, xl, st.jets[jh], own(w, j));
        c.beta_grid[j][tgt][seed] = functional_c(pj, uj, uj_hat, o, xl, st.jets[j], other(w, j));
      }
    }
  }
  return c;
}

// Scalar bases, the six Neumann solutions and the coefficient set at (E, h).
inline ExactSystem solve_exact_system(const PotentialModel& model, const InteractionModel& inter, double E, double h,
                                      const ExactSystemOptions& opt = {}) {
  ExactSystem S;
  S.setup = make_exact_setup(model, inter, E, h, opt);
  const ExactSetup& st = S.setup;
  S.w_minus[0] = neumann_solve(st, SolutionFamily::minus1, opt.neumann);
  S.w_minus[1] = neumann_solve(st, SolutionFamily::minus2, opt.neumann);
  S.w_wave[0][kOut] = neumann_solve(st, SolutionFamily::out1, opt.neumann);
  S.w_wave[0][kInc] = neumann_solve(st, SolutionFamily::inc1, opt.neumann);
  S.w_wave[1][kOut] = neumann_solve(st, SolutionFamily::out2, opt.neumann);
  S.w_wave[1][kInc] = neumann_solve(st, SolutionFamily::inc2, opt.neumann);
  const ScalarProblem& p1 = st.problem[0];
  const ScalarProblem& p2 = st.problem[1];
  for (int j = 0; j < 2; ++j) {
    S.contraction_p = std::max(S.contraction_p, S.w_minus[j].contraction_ratio);
    S.residual = std::max(S.residual, system_residual(p1, p2, st.jets[0], st.jets[1], S.w_minus[j], st.eg.right));
    for (int w = 0; w < 2; ++w) {
      S.contraction_a = std::max(S.contraction_a, S.w_wave[j][w].contraction_ratio);
      S.residual = std::max(S.residual, system_residual(p1, p2, st.jets[0], st.jets[1], S.w_wave[j][w], st.eg.left));
    }
  }
  S.coeffs = coefficients_from(st, S.w_minus, S.w_wave);
  return S;
}

inline CoefficientSet coefficient_set(const PotentialModel& model, const InteractionModel& inter, double E, double h,
                                      const ExactSystemOptions& opt = {}) {
  return solve_exact_system(model, inter, E, h, opt).coeffs;
}

struct NumericTransfer {
  TransferMatrix T;          // A_out A_inc^{-1}
  Eigen::Matrix2cd T_approx;  // explicit first-order form in the alpha coefficients
  Eigen::Matrix2cd A_inc, A_out;
  double condition = 0.0;
  double origin_residual = 0.0;  // mismatch of the 4x4 relation rebuilt from solution values at x = 0
};

inline double condition_number(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

inline NumericTransfer transfer_from_system(const ExactSystem& S, double max_condition = 1e8) {
  const CoefficientSet& c = S.coeffs;
  const auto& a = c.alpha_grid;  // [j][target][seed]
  const auto& b = c.beta_grid;
  // Rows/columns ordered (1 inc, 2 inc, 1 out, 2 out).
  Eigen::Matrix4cd Ma;
  Ma << 1.0 + b[0][kInc][kInc], a[1][kInc][kInc], b[0][kInc][kOut], a[1][kInc][kOut],
      a[0][kInc][kInc], 1.0 + b[1][kInc][kInc], a[0][kInc][kOut], b[1][kInc][kOut],
      b[0][kOut][kInc], a[1][kOut][kInc], 1.0 + b[0][kOut][kOut], a[1][kOut][kOut],
      a[0][kOut][kInc], b[1][kOut][kInc], a[0][kOut][kOut], 1.0 + b[1][kOut][kOut];
  const cplx t1 = S.setup.basis[0].t_factor, t2 = S.setup.basis[1].t_factor;
  Eigen::Matrix4cd Q = Eigen::Matrix4cd::Zero();
  Q(0, 0) = std::conj(t1);
  Q(0, 2) = t1;
  Q(1, 1) = std::conj(t2);
  Q(1, 3) = t2;
  Q(2, 0) = t1;
  Q(2, 2) = std::conj(t1);
  Q(3, 1) = t2;
  Q(3, 3) = std::conj(t2);
  Q *= 0.5;
  Eigen::Matrix<cplx, 4, 2> Mp;
  Mp << 1.0, 0.0, 0.0, 1.0, c.beta[0], c.alpha[1], c.alpha[0], c.beta[1];

  NumericTransfer r;
  const double cond_a = condition_number(Ma);
  if (!(cond_a <= max_condition))
    throw ConditioningError("coefficient matrix is ill-conditioned (" + std::to_string(cond_a) + ")", cond_a);
  const Eigen::Matrix<cplx, 4, 2> A = Ma.partialPivLu().solve(Q * Mp);
  r.A_inc = A.topRows<2>();
  r.A_out = A.bottomRows<2>();
  r.condition = condition_number(r.A_inc);
  if (!(r.condition <= max_condition))
    throw ConditioningError("incoming block is ill-conditioned (" + std::to_string(r.condition) + ")", r.condition);
  r.T.entries = r.A_out * r.A_inc.inverse();
  r.T.provenance = TransferMatrix::Provenance::numeric_oracle;

  const cplx i(0.0, 1.0);
  auto off = [&](int j) {
    return a[j][kInc][kInc] - a[j][kOut][kOut] + i * (2.0 * c.alpha[j] - a[j][kInc][kOut] - a[j][kOut][kInc]);
  };
  r.T_approx << -i, -i * off(1), -i * off(0), -i;

  // Values at x = 0: columns of the exact solutions stacked as (w1, w2, w1', w2').
  const std::size_t o = S.setup.eg.origin;
  auto column = [&](const NeumannResult& w) {
    Eigen::Vector4cd v;
    v << w.first.f[o], w.second.f[o], w.first.d1[o], w.second.d1[o];
    return v;
  };
  Eigen::Matrix4cd Wa;
  Wa.col(0) = column(S.w_wave[0][kInc]);
  Wa.col(1) = column(S.w_wave[1][kInc]);
  Wa.col(2) = column(S.w_wave[0][kOut]);
  Wa.col(3) = column(S.w_wave[1][kOut]);
  Eigen::Matrix<cplx, 4, 2> Wp;
  Wp.col(0) = column(S.w_minus[0]);
  Wp.col(1) = column(S.w_minus[1]);
  r.origin_residual = (Wa * A - Wp).norm() / Wp.norm();
  return r;
}

struct TransferOracleReport {
  double E = 0.0, h = 0.0;
  int n = 0;
  TransferMatrix numeric;
  TransferMatrix asymptotic;
  Eigen::Matrix2cd T_approx;
  cplx offdiag_ratio[2];  // (iT)_{12}, (iT)_{21} over -i kappa h^{1/(2n+1)}
  double diag_deviation = 0.0;
  double contraction_ratio = 0.0;
  double residual = 0.0;
  double wronskian_drift = 0.0;
  double origin_residual = 0.0;
  double condition = 0.0;
  CoefficientSet coeffs;
};

inline TransferOracleReport transfer_matrix_numeric(const PotentialModel& model, const InteractionModel& inter,
                                                    double E, double h, const ExactSystemOptions& opt = {}) {
  const CrossingData cd = detect_contact_order(model);
  const ExactSystem S = solve_exact_system(model, inter, E, h, opt);
  const NumericTransfer nt = transfer_from_system(S, opt.max_condition);
  TransferOracleReport rep;
  rep.E = E;
  rep.h = h;
  rep.n = cd.n;
  rep.numeric = nt.T;
  const int n = cd.n;
  const double lambda = scaled_energy(E, h, n);
  const SemiclassicalPoint sp{cplx(E, 0.0), h, n, std::max(1.0, std::abs(lambda)), lambda, EnergyWindow::full};
  rep.asymptotic = transfer_matrix_asymptotic(sp, cd, inter.r0_at_0());
  rep.numeric.error_order = rep.asymptotic.error_order;
  rep.T_approx = nt.T_approx;
  const cplx i(0.0, 1.0);
  const Eigen::Matrix2cd iT = i * nt.T.entries;
  const cplx ref = -i * kappa_n(cd, inter.r0_at_0(), lambda) * std::pow(h, 1.0 / (2.0 * n + 1.0));
  rep.offdiag_ratio[0] = ref != 0.0 ? iT(0, 1) / ref : cplx(0.0);
  rep.offdiag_ratio[1] = ref != 0.0 ? iT(1, 0) / ref : cplx(0.0);
  rep.diag_deviation = std::max(std::abs(iT(0, 0) - 1.0), std::abs(iT(1, 1) - 1.0));
  rep.contraction_ratio = std::max(S.contraction_a, S.contraction_p);
  rep.residual = S.residual;
  rep.wronskian_drift = S.setup.wronskian_drift;
  rep.origin_residual = nt.origin_residual;
  rep.condition = nt.condition;
  rep.coeffs = S.coeffs;
  return rep;
}

}  // namespace xres

namespace xres {

// Leading-order WKB data left of the turning points:
// phi_flat = int_{a_j}^x sqrt(E - V_j), phi_sharp = -phi_flat, sigma_{j,j,0} = (E - V_j)^{-1/4}.
struct WKBBasis {
  double E = 0.0, h = 0.0;
  LangerChart chart1, chart2;

  WKBBasis(const PotentialModel& model, double E_, double h_)
      : E(E_), h(h_), chart1(model, 1, E_, model.chart()), chart2(model, 2, E_, model.chart()) {}

  const LangerChart& chart(int j) const { return j == 1 ? chart1 : chart2; }

  double phi_flat(int j, double x) const {
    const LangerChart& c = chart(j);
    if (!(x < c.turning_point())) throw DomainError("WKB phase requires x left of the turning point");
    const double s = -c.xi_direct(x);
    return -2.0 / 3.0 * s * std::sqrt(s);
  }
  double phi_sharp(int j, double x) const { return -phi_flat(j, x); }
  double sigma(int j, double x) const { return std::pow(-chart(j).potential_minus_energy(x), -0.25); }
};

// Microlocal coefficients (flat, sharp) of one component, fitted to value and derivative at x.
struct WKBCoefficients {
  cplx flat, sharp;
};

inline WKBCoefficients wkb_coefficients(const WKBBasis& wkb, int component, const Sampled& f, const Grid& g,
                                        std::size_t node) {
  const double x = g.x(node);
  const double k = std::sqrt(-wkb.chart(component).potential_minus_energy(x));
  const double s = wkb.sigma(component, x);
  const cplx i(0.0, 1.0);
  const cplx ef = std::exp(i * wkb.phi_flat(component, x) / wkb.h) * s;
  const cplx es = std::exp(i * wkb.phi_sharp(component, x) / wkb.h) * s;
  // f = c_f ef + c_s es,  f' ~ (i k / h)(c_f ef - c_s es)
  const cplx plus = f.f[node], minus = f.d1[node] * wkb.h / (i * k);
  return {0.5 * (plus + minus) / ef, 0.5 * (plus - minus) / es};
}

}  // namespace xres
