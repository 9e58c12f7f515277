// Copyright 2026 The apcd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * @file mat2.hpp
 * @brief 2x2 matrices and 2-vectors over double.
 *
 * The accelerated iteration keeps each coordinate as a pair (y_k, z_k) and
 * advances all pairs with the same 2x2 matrix, so this tiny algebra is the
 * workhorse of the change of basis.
 */

#include <cmath>
#include <cstdint>
#include <string>

#include "apcd/error.hpp"

namespace apcd {

struct Vec2 {
  double d1 = 0.0;
  double d2 = 0.0;

  constexpr bool operator==(const Vec2&) const = default;

  constexpr Vec2 operator+(const Vec2& o) const { return {d1 + o.d1, d2 + o.d2}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {d1 - o.d1, d2 - o.d2}; }
  constexpr Vec2 operator*(double s) const { return {d1 * s, d2 * s}; }
};

/// Row-major [[a11, a12], [a21, a22]].
struct Mat2 {
  double a11 = 1.0, a12 = 0.0;
  double a21 = 0.0, a22 = 1.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  constexpr bool operator==(const Mat2&) const = default;

  constexpr Mat2 operator*(const Mat2& m) const {
    return {a11 * m.a11 + a12 * m.a21, a11 * m.a12 + a12 * m.a22,
            a21 * m.a11 + a22 * m.a21, a21 * m.a12 + a22 * m.a22};
  }

  constexpr Vec2 operator*(const Vec2& v) const {
    return {a11 * v.d1 + a12 * v.d2, a21 * v.d1 + a22 * v.d2};
  }

  constexpr Mat2 operator+(const Mat2& m) const {
    return {a11 + m.a11, a12 + m.a12, a21 + m.a21, a22 + m.a22};
  }

  constexpr Mat2 operator-(const Mat2& m) const {
    return {a11 - m.a11, a12 - m.a12, a21 - m.a21, a22 - m.a22};
  }

  constexpr Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }

  constexpr double det() const { return a11 * a22 - a12 * a21; }
};

/// Analytic inverse; throws SingularMatrix when |det| < min_det.
inline Mat2 inverse(const Mat2& m, double min_det = 1e-300) {
  const double d = m.det();
  if (!(std::abs(d) >= min_det)) {
    throw SingularMatrix("2x2 matrix is singular (det = " + std::to_string(d) + ")");
  }
  return {m.a22 / d, -m.a12 / d, -m.a21 / d, m.a11 / d};
}

/// Exponentiation by squaring, O(log e) products.
constexpr Mat2 power(Mat2 base, std::uint64_t e) {
  Mat2 acc = Mat2::identity();
  while (e != 0) {
    if (e & 1u) acc = acc * base;
    base = base * base;
    e >>= 1u;
  }
  return acc;
}

/// Largest absolute entrywise difference.
inline double max_abs_diff(const Mat2& a, const Mat2& b) {
  return std::fmax(std::fmax(std::abs(a.a11 - b.a11), std::abs(a.a12 - b.a12)),
                   std::fmax(std::abs(a.a21 - b.a21), std::abs(a.a22 - b.a22)));
}

}  // namespace apcd
