#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace xres {

// Real polynomial stored by ascending powers: c[0] + c[1] x + ...
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

  const std::vector<double>& coeffs() const { return c_; }
  int degree() const { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }
  double coeff(std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }

  template <class T>
  T operator()(const T& x) const {
    T acc(0);
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + T(c_[k]);
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return Polynomial{};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
  }

  // k-th derivative at x.
  double derivative_at(double x, int k) const {
    Polynomial p = *this;
    for (int i = 0; i < k; ++i) p = p.derivative();
    return p(x);
  }

  // Coefficients of p(x0 + d) as a polynomial in d.
  std::vector<double> taylor_at(double x0) const {
    std::vector<double> a = c_;
    const std::size_t m = a.size();
    for (std::size_t i = 0; i + 1 < m; ++i)
      for (std::size_t j = m - 1; j > i; --j) a[j - 1] += x0 * a[j];
    return a;
  }

  Polynomial operator-(const Polynomial& o) const {
    std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = coeff(k) - o.coeff(k);
    return Polynomial(std::move(r));
  }

  Polynomial operator-(double s) const {
    std::vector<double> r = c_;
    if (r.empty()) r.push_back(0.0);
    r[0] -= s;
    return Polynomial(std::move(r));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }
  std::vector<double> c_;
};

// (p(a) - p(a - w)) / w as a polynomial in w.
inline std::vector<double> backward_difference_quotient(const Polynomial& p, double a) {
  std::vector<double> t = p.taylor_at(a);  // p(a + d) = sum t_k d^k
  std::vector<double> q;
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;  // -(-w)^k / w
    q.push_back(sign * t[k]);
  }
  // q[k-1] multiplies w^{k-1}
  return q;
}

inline double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

}  // namespace xres
