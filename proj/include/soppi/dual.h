// Copyright 2026 The SOPPI Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Forward-mode dual numbers carrying N directional derivatives at once.
//
//   Dual<2> x(3.0, 0), y(4.0, 1);   // seed d/dx and d/dy
//   auto r = sin(x) * y;
//   r.value == sin(3) * 4, r.grad == {cos(3) * 4, sin(3)}

#ifndef SOPPI_DUAL_H_
#define SOPPI_DUAL_H_

#include <array>
#include <cmath>

namespace soppi {

template <int N>
struct Dual {
  double value = 0.0;
  std::array<double, N> grad{};

  constexpr Dual() = default;
  constexpr Dual(double v) : value(v) {}  // NOLINT: implicit constants
  // Seeds the derivative with respect to direction `index`.
  constexpr Dual(double v, int index) : value(v) { grad[index] = 1.0; }
};

namespace dual_internal {

template <int N, typename F>
constexpr Dual<N> Map(const Dual<N>& a, double value, F&& scale) {
  Dual<N> r(value);
  for (int i = 0; i < N; ++i) r.grad[i] = scale(a.grad[i]);
  return r;
}

}  // namespace dual_internal

template <int N>
constexpr Dual<N> operator-(const Dual<N>& a) {
  return dual_internal::Map(a, -a.value, [](double g) { return -g; });
}

template <int N>
constexpr Dual<N> operator+(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r(a.value + b.value);
  for (int i = 0; i < N; ++i) r.grad[i] = a.grad[i] + b.grad[i];
  return r;
}

template <int N>
constexpr Dual<N> operator-(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r(a.value - b.value);
  for (int i = 0; i < N; ++i) r.grad[i] = a.grad[i] - b.grad[i];
  return r;
}

template <int N>
constexpr Dual<N> operator*(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r(a.value * b.value);
  for (int i = 0; i < N; ++i) r.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
  return r;
}

template <int N>
constexpr Dual<N> operator/(const Dual<N>& a, const Dual<N>& b) {
  const double inv = 1.0 / b.value;
  Dual<N> r(a.value * inv);
  for (int i = 0; i < N; ++i) {
    r.grad[i] = (a.grad[i] - r.value * b.grad[i]) * inv;
  }
  return r;
}

template <int N>
constexpr Dual<N> operator+(const Dual<N>& a, double b) { return a + Dual<N>(b); }
template <int N>
constexpr Dual<N> operator+(double a, const Dual<N>& b) { return Dual<N>(a) + b; }
template <int N>
constexpr Dual<N> operator-(const Dual<N>& a, double b) { return a - Dual<N>(b); }
template <int N>
constexpr Dual<N> operator-(double a, const Dual<N>& b) { return Dual<N>(a) - b; }
template <int N>
constexpr Dual<N> operator*(const Dual<N>& a, double b) {
  return dual_internal::Map(a, a.value * b, [b](double g) { return g * b; });
}
template <int N>
constexpr Dual<N> operator*(double a, const Dual<N>& b) { return b * a; }
template <int N>
constexpr Dual<N> operator/(const Dual<N>& a, double b) { return a * (1.0 / b); }
template <int N>
constexpr Dual<N> operator/(double a, const Dual<N>& b) { return Dual<N>(a) / b; }

template <int N>
Dual<N> sin(const Dual<N>& a) {
  const double c = std::cos(a.value);
  return dual_internal::Map(a, std::sin(a.value), [c](double g) { return g * c; });
}

template <int N>
Dual<N> cos(const Dual<N>& a) {
  const double s = -std::sin(a.value);
  return dual_internal::Map(a, std::cos(a.value), [s](double g) { return g * s; });
}

// Derivative is taken as zero everywhere (including the kink at 0).
template <int N>
constexpr Dual<N> sign(const Dual<N>& a) {
  return Dual<N>(a.value > 0.0 ? 1.0 : (a.value < 0.0 ? -1.0 : 0.0));
}

template <int N>
constexpr Dual<N> clamp(const Dual<N>& a, double lo, double hi) {
  if (a.value < lo) return Dual<N>(lo);
  if (a.value > hi) return Dual<N>(hi);
  return a;
}

inline double sign(double a) { return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0); }
inline double clamp(double a, double lo, double hi) {
  return a < lo ? lo : (a > hi ? hi : a);
}

}  // namespace soppi

#endif  // SOPPI_DUAL_H_
