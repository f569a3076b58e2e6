#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the library: expected values are derived from first principles with
// plain integer and floating-point arithmetic.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

namespace oracle {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Reduced fraction with a positive denominator.
struct Frac {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Frac(std::int64_t n = 0, std::int64_t d = 1) : num(n), den(d) {
    if (den < 0) num = -num, den = -den;
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) num /= g, den /= g;
  }
  friend Frac operator+(Frac a, Frac b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Frac operator*(std::int64_t k, Frac a) { return {k * a.num, a.den}; }
  friend bool operator==(Frac a, Frac b) { return a.num == b.num && a.den == b.den; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline Frac dot(const std::vector<std::int64_t>& m, const std::vector<Frac>& a) {
  Frac s;
  for (std::size_t k = 0; k < m.size(); ++k) s = s + m[k] * a[k];
  return s;
}

// Dual basis of a unimodular ray basis (rays given as rows) by cofactors; n <= 3.
inline std::vector<std::vector<std::int64_t>> dual_basis(const std::vector<std::vector<std::int64_t>>& rays) {
  const std::size_t n = rays.size();
  if (n == 1) return {{rays[0][0]}};  // det = +-1 so the inverse is itself
  if (n == 2) {
    const auto& u = rays[0];
    const auto& v = rays[1];
    const std::int64_t det = u[0] * v[1] - u[1] * v[0];
    // m_0 . u = 1, m_0 . v = 0  ->  m_0 = (v1, -v0)/det
    return {{v[1] / det, -v[0] / det}, {-u[1] / det, u[0] / det}};
  }
  const auto& a = rays[0];
  const auto& b = rays[1];
  const auto& c = rays[2];
  auto cross = [](const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
    return std::vector<std::int64_t>{x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
  };
  const auto bc = cross(b, c), ca = cross(c, a), ab = cross(a, b);
  const std::int64_t det = a[0] * bc[0] + a[1] * bc[1] + a[2] * bc[2];
  return {{bc[0] / det, bc[1] / det, bc[2] / det},
          {ca[0] / det, ca[1] / det, ca[2] / det},
          {ab[0] / det, ab[1] / det, ab[2] / det}};
}

// h-polynomial from face numbers via sum_i h_i t^i = sum_i f_i t^i (1 - t)^{n - i},
// f_i = number of i-element cones (f_0 = 1 for the apex).
inline std::vector<std::int64_t> h_from_faces(const std::vector<std::int64_t>& f) {
  const std::size_t n = f.size() - 1;
  std::vector<std::int64_t> h(n + 1, 0);
  for (std::size_t i = 0; i <= n; ++i) {
    // expand (1 - t)^{n-i}
    std::vector<std::int64_t> poly{1};
    for (std::size_t k = 0; k < n - i; ++k) {
      std::vector<std::int64_t> next(poly.size() + 1, 0);
      for (std::size_t j = 0; j < poly.size(); ++j) {
        next[j] += poly[j];
        next[j + 1] -= poly[j];
      }
      poly = next;
    }
    for (std::size_t j = 0; j < poly.size(); ++j) h[i + j] += f[i] * poly[j];
  }
  return h;
}

// CP^n with the default action: homogeneous coordinate j carries weight e_j
// (e_0 = 0), so it scales by e^{-2 pi a0_j s} along the flow (a0_0 = 0).
inline std::vector<std::complex<double>> projective_flow(std::vector<std::complex<double>> z,
                                                         const std::vector<double>& a0, double s) {
  for (std::size_t j = 1; j < z.size(); ++j) z[j] *= std::exp(-kTwoPi * a0[j - 1] * s);
  std::size_t big = 0;
  for (std::size_t j = 1; j < z.size(); ++j)
    if (std::abs(z[j]) > std::abs(z[big])) big = j;
  const auto scale = z[big];
  for (auto& v : z) v /= scale;
  return z;
}

// Forward limit on CP^n: the nonzero coordinate with the smallest exponent
// <w_j, a0>; backward: the largest. nullopt on a tie.
inline std::optional<int> projective_limit(const std::vector<std::complex<double>>& z, const std::vector<Frac>& a0,
                                           bool forward) {
  std::optional<int> best;
  Frac best_q;
  bool tie = false;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (z[j] == 0.0) continue;
    const Frac q = j == 0 ? Frac(0) : a0[j - 1];
    const double d = best ? q.value() - best_q.value() : 0.0;
    if (!best || (forward ? d < 0 : d > 0)) {
      best = static_cast<int>(j);
      best_q = q;
      tie = false;
    } else if (q == best_q) {
      tie = true;
    }
  }
  if (tie) return std::nullopt;
  return best;
}

// Chart norm of the field in the exponential metric, straight from the
// definition: sum a^2 x^2 e^{-|x|} + a^2 y^2 e^{-|y|}.
inline double chart_norm(const std::vector<std::complex<double>>& w, const std::vector<double>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = w[i].real(), y = w[i].imag();
    s += a[i] * a[i] * (x * x * std::exp(-std::abs(x)) + y * y * std::exp(-std::abs(y)));
  }
  return std::sqrt(s);
}

}  // namespace oracle
