#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace jostlab {

// Truncated Taylor series c[k] = f^(k)(x0)/k!, k <= N. Arithmetic on jets
// propagates exact derivatives of closed-form expressions.
template <std::size_t N>
struct Jet {
  std::array<double, N + 1> c{};

  static Jet constant(double v) {
    Jet j;
    j.c[0] = v;
    return j;
  }
  static Jet variable(double x0) {
    Jet j;
    j.c[0] = x0;
    if constexpr (N >= 1) j.c[1] = 1.0;
    return j;
  }

  double value() const { return c[0]; }

  double derivative(std::size_t k) const {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return c[k] * f;
  }

  Jet& operator+=(const Jet& o) {
    for (std::size_t k = 0; k <= N; ++k) c[k] += o.c[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t k = 0; k <= N; ++k) c[k] -= o.c[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
};

template <std::size_t N>
Jet<N> operator+(Jet<N> a, const Jet<N>& b) { return a += b; }
template <std::size_t N>
Jet<N> operator-(Jet<N> a, const Jet<N>& b) { return a -= b; }
template <std::size_t N>
Jet<N> operator-(Jet<N> a) { return a *= -1.0; }
template <std::size_t N>
Jet<N> operator*(Jet<N> a, double s) { return a *= s; }
template <std::size_t N>
Jet<N> operator*(double s, Jet<N> a) { return a *= s; }
template <std::size_t N>
Jet<N> operator+(Jet<N> a, double s) {
  a.c[0] += s;
  return a;
}
template <std::size_t N>
Jet<N> operator+(double s, Jet<N> a) { return a + s; }
template <std::size_t N>
Jet<N> operator-(double s, const Jet<N>& a) { return (-a) + s; }

template <std::size_t N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r;
  for (std::size_t n = 0; n <= N; ++n) {
    double s = 0.0;
    for (std::size_t k = 0; k <= n; ++k) s += a.c[k] * b.c[n - k];
    r.c[n] = s;
  }
  return r;
}

template <std::size_t N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> q;
  for (std::size_t n = 0; n <= N; ++n) {
    double s = a.c[n];
    for (std::size_t k = 1; k <= n; ++k) s -= b.c[k] * q.c[n - k];
    q.c[n] = s / b.c[0];
  }
  return q;
}

// a^p for a(x0) > 0.
template <std::size_t N>
Jet<N> pow(const Jet<N>& a, double p) {
  Jet<N> b;
  b.c[0] = std::pow(a.c[0], p);
  for (std::size_t n = 1; n <= N; ++n) {
    double s = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      s += (p * static_cast<double>(k) - static_cast<double>(n - k)) * a.c[k] * b.c[n - k];
    b.c[n] = s / (static_cast<double>(n) * a.c[0]);
  }
  return b;
}

template <std::size_t N>
Jet<N> exp(const Jet<N>& a) {
  Jet<N> e;
  e.c[0] = std::exp(a.c[0]);
  for (std::size_t n = 1; n <= N; ++n) {
    double s = 0.0;
    for (std::size_t k = 1; k <= n; ++k) s += static_cast<double>(k) * a.c[k] * e.c[n - k];
    e.c[n] = s / static_cast<double>(n);
  }
  return e;
}

template <std::size_t N>
Jet<N> log(const Jet<N>& a) {
  Jet<N> l;
  l.c[0] = std::log(a.c[0]);
  for (std::size_t n = 1; n <= N; ++n) {
    double s = 0.0;
    for (std::size_t k = 1; k < n; ++k) s += static_cast<double>(k) * l.c[k] * a.c[n - k];
    l.c[n] = (a.c[n] - s / static_cast<double>(n)) / a.c[0];
  }
  return l;
}

// Solves y' = F(y), y(x0) = y0 in Taylor mode: y_{n+1} = F(y)_n / (n+1).
template <std::size_t N, class F>
Jet<N> solve_autonomous(double y0, F&& rhs) {
  Jet<N> y = Jet<N>::constant(y0);
  for (std::size_t n = 0; n < N; ++n) {
    Jet<N> f = rhs(y);
    y.c[n + 1] = f.c[n] / static_cast<double>(n + 1);
  }
  return y;
}

}  // namespace jostlab
