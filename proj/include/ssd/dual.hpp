#pragma once

#include <array>
#include <cmath>

namespace ssd {

// Forward-mode dual number with N directional derivatives.
template <int N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit constant promotion
  static Dual variable(double value, int i) {
    Dual x(value);
    x.d[i] = 1.0;
    return x;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v;
    for (int i = 0; i < N; ++i) d[i] = (d[i] - v * inv * o.d[i]) * inv;
    v *= inv;
    return *this;
  }
};

template <int N>
Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <int N>
Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <int N>
Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <int N>
Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }
template <int N>
Dual<N> operator+(Dual<N> a, double b) { a.v += b; return a; }
template <int N>
Dual<N> operator+(double b, Dual<N> a) { a.v += b; return a; }
template <int N>
Dual<N> operator-(Dual<N> a, double b) { a.v -= b; return a; }
template <int N>
Dual<N> operator-(double b, const Dual<N>& a) {
  Dual<N> r;
  r.v = b - a.v;
  for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
  return r;
}
template <int N>
Dual<N> operator-(const Dual<N>& a) { return 0.0 - a; }
template <int N>
Dual<N> operator*(Dual<N> a, double b) {
  a.v *= b;
  for (auto& x : a.d) x *= b;
  return a;
}
template <int N>
Dual<N> operator*(double b, Dual<N> a) { return a * b; }
template <int N>
Dual<N> operator/(Dual<N> a, double b) { return a * (1.0 / b); }

template <int N>
Dual<N> sqrt(const Dual<N>& a) {
  Dual<N> r;
  r.v = std::sqrt(a.v);
  const double k = 0.5 / r.v;
  for (int i = 0; i < N; ++i) r.d[i] = k * a.d[i];
  return r;
}

template <int N>
Dual<N> atan2(const Dual<N>& y, const Dual<N>& x) {
  Dual<N> r;
  r.v = std::atan2(y.v, x.v);
  const double inv = 1.0 / (x.v * x.v + y.v * y.v);
  for (int i = 0; i < N; ++i) r.d[i] = (x.v * y.d[i] - y.v * x.d[i]) * inv;
  return r;
}

// f(a) given f(a.v) and f'(a.v).
template <int N>
Dual<N> chain(const Dual<N>& a, double f, double df) {
  Dual<N> r;
  r.v = f;
  for (int i = 0; i < N; ++i) r.d[i] = df * a.d[i];
  return r;
}

inline double value_of(double x) { return x; }
using std::atan2;
using std::sqrt;
template <int N>
double value_of(const Dual<N>& x) { return x.v; }

}  // namespace ssd
