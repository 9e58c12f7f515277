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
 * @file basis.hpp
 * @brief Recurrence matrices of the change of basis (y_k; z_k) = B^t (u_k; v_k).
 *
 * For a coordinate that is not updated at step t,
 *
 *     (y_k; z_k)^{t+1} = A^t (y_k; z_k)^t,
 *
 * and the updated coordinate additionally receives Delta z * D^t. With
 * B^0 = I and B^{t+1} = A^t B^t, storing (u, v) = (B^t)^{-1} (y, z) means a
 * step touches one coordinate of (u, v) only.
 *
 * Every A^t is row-stochastic, so B^t is too. Its determinant decays
 * (geometrically for strongly convex schedules, polynomially for the convex
 * one), which is why quotients B^t (B^s)^{-1} over short windows are
 * evaluated directly instead of through a large-t inverse.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "apcd/error.hpp"
#include "apcd/mat2.hpp"
#include "apcd/schedule.hpp"

namespace apcd {

inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kInverseTol = 1e-10;
inline constexpr double kMinBasisDet = 1e-300;

/// Max ratio 1/det of a transfer matrix before the engines re-anchor their
/// (u, v) storage. Bounds the error amplification of the change of basis.
inline constexpr double kDefaultRebaseLimit = 1e4;

namespace detail {

inline void require_nonnegative(std::int64_t t, const char* what) {
  if (t < 0) throw OutOfRange(std::string(what) + " must be non-negative");
}

/// Spectral pieces of the constant strongly convex A: A = P + lambda (I - P).
struct ScSpectrum {
  Mat2 proj;       // eigenvalue 1
  Mat2 comp;       // I - proj, eigenvalue lambda
  double lambda;   // (1 - phi) / (1 + phi)

  explicit ScSpectrum(double phi)
      : lambda((1.0 - phi) / (1.0 + phi)) {
    // Left Perron vector of A is ((1 + phi)/2, (1 - phi)/2); right one is (1, 1).
    const double p1 = 0.5 * (1.0 + phi);
    const double p2 = 0.5 * (1.0 - phi);
    proj = {p1, p2, p1, p2};
    comp = Mat2::identity() - proj;
  }

  Mat2 power(double k) const { return proj + comp * std::pow(lambda, k); }
};

}  // namespace detail

/// A^t. Rows sum to one.
inline Mat2 a_matrix(std::int64_t t, const Schedule& sched) {
  const StepParams p = sched.params(t);
  const StepParams next = sched.params(t + 1);
  const double e = p.varphi * (1.0 - next.psi);
  return {1.0 - e, e, 1.0 - p.varphi, p.varphi};
}

/// D^t = (n psi_{t+1} phi_t + 1 - psi_{t+1}; 1).
inline Vec2 d_vector(std::int64_t t, const Schedule& sched) {
  const StepParams p = sched.params(t);
  const StepParams next = sched.params(t + 1);
  return {static_cast<double>(sched.n()) * next.psi * p.phi + (1.0 - next.psi), 1.0};
}

/// Closed-form transfer matrices anchored at a fixed origin step.
/// forward(t) = B^t (B^origin)^{-1}, backward(t) = its inverse.
class BasisFrame {
 public:
  BasisFrame(const Schedule& sched, std::int64_t origin)
      : origin_(origin), constant_(sched.constant()), t0_(sched.t0()),
        spectrum_(sched.constant() ? sched.params(0).phi : 0.0) {
    detail::require_nonnegative(origin, "basis origin");
  }

  std::int64_t origin() const { return origin_; }

  Mat2 forward(std::int64_t t) const { return between(origin_, t); }
  Mat2 backward(std::int64_t t) const { return between(t, origin_); }

  /// B^to (B^from)^{-1}.
  Mat2 between(std::int64_t from, std::int64_t to) const {
    if (constant_) return spectrum_.power(static_cast<double>(to - from));
    // Convex: A^l = [[(l+t0-1)/(l+t0+1), 2/(l+t0+1)], [0, 1]] telescopes.
    const double a = static_cast<double>(from) + t0_;
    const double b = static_cast<double>(to) + t0_;
    const double ratio = ((a - 1.0) * a) / ((b - 1.0) * b);
    return {ratio, 1.0 - ratio, 0.0, 1.0};
  }

 private:
  std::int64_t origin_;
  bool constant_;
  double t0_;
  detail::ScSpectrum spectrum_;
};

/// B^to (B^from)^{-1}: the product A^{to-1} ... A^{from} for to >= from and
/// the inverse of A^{from-1} ... A^{to} otherwise. O(1) closed forms.
inline Mat2 transfer(std::int64_t from, std::int64_t to, const Schedule& sched) {
  detail::require_nonnegative(from, "transfer origin");
  detail::require_nonnegative(to, "transfer target");
  return BasisFrame(sched, 0).between(from, to);
}

/// B^t = A^{t-1} ... A^0, B^0 = I. SC: eigen closed form; Convex:
/// [[p_t, 1 - p_t], [0, 1]] with p_t = (2n+1)(2n+2)/((2n+t+1)(2n+t+2)).
inline Mat2 b_matrix(std::int64_t t, const Schedule& sched) {
  detail::require_nonnegative(t, "step index t");
  return transfer(0, t, sched);
}

/// B^t by repeated squaring of the constant A (SC) or by the explicit
/// product (Convex). Cross-check for b_matrix.
inline Mat2 b_matrix_by_squaring(std::int64_t t, const Schedule& sched) {
  detail::require_nonnegative(t, "step index t");
  if (sched.constant()) return power(a_matrix(0, sched), static_cast<std::uint64_t>(t));
  Mat2 b = Mat2::identity();
  for (std::int64_t l = 0; l < t; ++l) b = a_matrix(l, sched) * b;
  return b;
}

/// (B^t)^{-1}; throws SingularMatrix once det(B^t) underflows below 1e-300.
inline Mat2 b_inverse(std::int64_t t, const Schedule& sched) {
  detail::require_nonnegative(t, "step index t");
  const double det = b_matrix(t, sched).det();
  if (!(det >= kMinBasisDet)) {
    throw SingularMatrix("B^t is numerically singular at t = " + std::to_string(t));
  }
  return transfer(t, 0, sched);
}

/// B^t (B^{s+1})^{-1} as an explicit product of at most |t - s - 1| factors
/// A^l or (A^l)^{-1}. Intended for the short windows |t - s| <= 2q.
inline Mat2 windowed_b_transfer(std::int64_t t, std::int64_t s, const Schedule& sched) {
  detail::require_nonnegative(t, "t");
  detail::require_nonnegative(s + 1, "s + 1");
  Mat2 m = Mat2::identity();
  if (t >= s + 1) {
    for (std::int64_t l = s + 1; l < t; ++l) m = a_matrix(l, sched) * m;
  } else {
    // (A^s ... A^t)^{-1} = (A^t)^{-1} ... (A^s)^{-1}
    for (std::int64_t l = s; l >= t; --l) m = inverse(a_matrix(l, sched)) * m;
  }
  return m;
}

/// min{(n-8)/12, (2n-4)/10, n/20}: window bound under which B^t is good.
inline double goodness_q_limit(std::size_t n) {
  const double nd = static_cast<double>(n);
  return std::min({(nd - 8.0) / 12.0, (2.0 * nd - 4.0) / 10.0, nd / 20.0});
}

/// Goodness of B^t at (t, s): with M = B^t (B^{s+1})^{-1} and
/// c = n psi_{s+1} phi_s + 1 - psi_{s+1}, the first components of
/// M(c;1), M(c;0), M(0;1), M(0;0) are at most (3/2) n phi_t in absolute
/// value and the second component of M(c;1) is at most 2.
inline bool check_goodness(std::int64_t t, std::int64_t s, const Schedule& sched) {
  const Mat2 m = windowed_b_transfer(t, s, sched);
  const double c = d_vector(s, sched).d1;
  const double bound = 1.5 * static_cast<double>(sched.n()) * sched.params(t).phi;
  const Vec2 probes[] = {{c, 1.0}, {c, 0.0}, {0.0, 1.0}, {0.0, 0.0}};
  for (const Vec2& v : probes) {
    if (std::abs((m * v).d1) > bound) return false;
  }
  return (m * probes[0]).d2 <= 2.0;
}

/// Number of steps W >= 1 after `origin` for which 1/det(B^{origin+W} (B^origin)^{-1})
/// stays within `limit`. Max int64 when the basis never degenerates.
inline std::int64_t rebase_horizon(std::int64_t origin, const Schedule& sched,
                                   double limit = kDefaultRebaseLimit) {
  constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();
  detail::require_nonnegative(origin, "rebase origin");
  if (!std::isfinite(limit)) return kNever;
  if (!(limit > 1.0)) throw InvalidRegime("rebase limit must exceed 1");
  if (sched.constant()) {
    const double lambda = detail::ScSpectrum(sched.params(0).phi).lambda;
    if (lambda >= 1.0) return kNever;
    const double w = std::floor(std::log(limit) / -std::log(lambda));
    if (w >= 9.0e18) return kNever;
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(w));
  }
  // 1/det = x(x+1) / ((a-1)a) with a = origin + t0, x = origin + W + t0 - 1.
  const double a = static_cast<double>(origin) + sched.t0();
  const double c = limit * (a - 1.0) * a;
  double x = std::floor(0.5 * (std::sqrt(1.0 + 4.0 * c) - 1.0));
  while (x * (x + 1.0) > c) x -= 1.0;
  const double w = x - (a - 1.0);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(w));
}

}  // namespace apcd
