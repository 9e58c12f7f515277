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
 * @file schedule.hpp
 * @brief Per-step parameter sequences (phi, psi, varphi, Gamma) for the
 * accelerated coordinate iteration, and the admissible asynchrony bound q.
 *
 * Three regimes are supported:
 *  - ScLinear:    strongly convex, linear rate with linear parallel speedup.
 *  - ScSublinear: strongly convex, weaker rate but larger admissible q.
 *  - Convex:      smooth convex, O(1/T^2)-type rate with phi_t = 2/(t + t0).
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "apcd/error.hpp"

namespace apcd {

enum class RegimeTag { ScLinear, ScSublinear, Convex };

inline std::string_view to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::ScLinear:
      return "sc_linear";
    case RegimeTag::ScSublinear:
      return "sc_sublinear";
    case RegimeTag::Convex:
      return "convex";
  }
  return "?";
}

inline RegimeTag parse_regime_tag(std::string_view s) {
  if (s == "sc_linear") return RegimeTag::ScLinear;
  if (s == "sc_sublinear") return RegimeTag::ScSublinear;
  if (s == "convex") return RegimeTag::Convex;
  throw ParseError("unknown regime '" + std::string(s) + "' (expected sc_linear, sc_sublinear or convex)");
}

inline constexpr double kDefaultEpsilon = 0.1;
inline constexpr std::size_t kMinTheoremDimension = 19;

struct Regime {
  RegimeTag tag = RegimeTag::ScLinear;
  double mu = 1.0;  ///< strong convexity in the unit-diagonal metric; 0 for Convex
  std::size_t n = kMinTheoremDimension;
  double epsilon = kDefaultEpsilon;  ///< slack in (0, 1/3); ScSublinear and Convex only
  std::optional<double> t0;          ///< Convex only: phi_t = 2/(t + t0), t0 >= 2(n+1)

  static Regime sc_linear(std::size_t n, double mu) { return {RegimeTag::ScLinear, mu, n, kDefaultEpsilon, std::nullopt}; }
  static Regime sc_sublinear(std::size_t n, double mu, double eps = kDefaultEpsilon) {
    return {RegimeTag::ScSublinear, mu, n, eps, std::nullopt};
  }
  static Regime convex(std::size_t n, double eps = kDefaultEpsilon) {
    return {RegimeTag::Convex, 0.0, n, eps, std::nullopt};
  }

  bool strongly_convex() const { return tag != RegimeTag::Convex; }
};

struct StepParams {
  double phi = 0.0;     ///< step / momentum weight
  double psi = 1.0;     ///< y-mixing weight
  double varphi = 1.0;  ///< w-mixing weight
  double gamma = 1.0;   ///< proximal coefficient Gamma_t
};

namespace detail {

inline StepParams sc_linear_unchecked(double n, double mu) {
  const double phi = std::sqrt(3.0 * mu) / (std::sqrt(20.0) * n);
  return {phi, 1.0 / (1.0 + phi), 1.0 - phi, std::sqrt(20.0 * mu / 3.0)};
}

inline StepParams sc_sublinear_unchecked(double n, double mu) {
  const double phi = std::pow(3.0 * mu / 20.0, 2.0 / 3.0) / n;
  return {phi, 1.0 / (1.0 + phi), 1.0 - phi, (20.0 / 3.0) * std::sqrt(n * phi)};
}

/// phi_t = 2/(t + t0); with t0 = 2n + 2 this is 2/(2n + t + 2).
inline StepParams convex_unchecked(double n, double t0, double t) {
  const double phi = 2.0 / (t + t0);
  return {phi, 1.0 - phi, 1.0, (20.0 / 3.0) * std::sqrt(n * phi)};
}

inline void require_dimension(std::size_t n) {
  if (n < kMinTheoremDimension) {
    throw InvalidRegime("dimension n = " + std::to_string(n) + " is below the required n >= 19");
  }
}

inline void require_sc_mu(double mu) {
  if (!(mu > 0.0 && mu <= 1.0)) {
    throw InvalidRegime("strong convexity mu = " + std::to_string(mu) + " must lie in (0, 1]");
  }
}

}  // namespace detail

/// Linear-rate strongly convex parameters; constant in t.
inline StepParams sc_linear_params(std::size_t n, double mu) {
  detail::require_sc_mu(mu);
  detail::require_dimension(n);
  return detail::sc_linear_unchecked(static_cast<double>(n), mu);
}

/// Sublinear strongly convex parameters; constant in t.
inline StepParams sc_sublinear_params(std::size_t n, double mu) {
  detail::require_sc_mu(mu);
  detail::require_dimension(n);
  return detail::sc_sublinear_unchecked(static_cast<double>(n), mu);
}

/// Convex parameters at step t with the default t0 = 2n + 2.
inline StepParams convex_params(std::size_t n, std::int64_t t) {
  if (t < 0) throw OutOfRange("step index t must be non-negative");
  detail::require_dimension(n);
  const double nd = static_cast<double>(n);
  return detail::convex_unchecked(nd, 2.0 * nd + 2.0, static_cast<double>(t));
}

/// Admissible asynchrony bound from the linear-rate (ScLinear) or the
/// sublinear (ScSublinear, Convex) theorem. Callers floor it.
inline double q_bound(const Regime& regime, double l_res_bar) {
  if (!(l_res_bar > 0.0)) throw InvalidRegime("l_res_bar must be positive");
  const double n = static_cast<double>(regime.n);
  const double rn = std::sqrt(n);
  const double shared = std::min({rn / (37.0 * l_res_bar), rn / 17.0, n / 50.0});
  if (regime.tag == RegimeTag::ScLinear) {
    return std::min(rn * std::pow(regime.mu, 0.25) / (38.0 * l_res_bar), shared);
  }
  return std::min(std::sqrt(regime.epsilon * n) / (17.0 * l_res_bar), shared);
}

/// Immutable parameter source for every engine. Pure; safe to share across threads.
class Schedule {
 public:
  /// Validates every theorem hypothesis including n >= 19.
  static Schedule make(const Regime& regime) { return Schedule(regime, true); }

  /// Same validation except the n >= 19 dimension hypothesis. For small
  /// equivalence experiments where the rate theorems are not invoked.
  static Schedule relaxed(const Regime& regime) { return Schedule(regime, false); }

  const Regime& regime() const { return regime_; }
  RegimeTag tag() const { return regime_.tag; }
  std::size_t n() const { return regime_.n; }
  bool constant() const { return regime_.tag != RegimeTag::Convex; }

  /// Convex-regime offset t0 (phi_t = 2/(t + t0)); 0 for SC regimes.
  double t0() const { return t0_; }

  StepParams params(std::int64_t t) const {
    if (t < 0) throw OutOfRange("step index t must be non-negative");
    if (constant()) return sc_;
    return detail::convex_unchecked(static_cast<double>(regime_.n), t0_, static_cast<double>(t));
  }

  /// Diagnostic weight zeta_t of ||x* - z^t||^2 in the potential
  /// F^t = f(x^t) - f* + zeta_t ||x* - z^t||^2. SC regimes use tau = 1/2;
  /// Convex uses the convex-case weight with slack epsilon.
  double potential_weight(std::int64_t t) const {
    const StepParams p = params(t);
    const double nphi = static_cast<double>(regime_.n) * p.phi;
    const double slack = constant() ? 0.5 : regime_.epsilon;
    return 0.5 * nphi * p.gamma * (1.0 - nphi * slack / 3.0);
  }

 private:
  Schedule(const Regime& regime, bool strict) : regime_(regime) {
    if (regime_.n == 0) throw InvalidRegime("dimension n must be positive");
    if (strict) detail::require_dimension(regime_.n);
    const double n = static_cast<double>(regime_.n);
    switch (regime_.tag) {
      case RegimeTag::ScLinear:
        detail::require_sc_mu(regime_.mu);
        sc_ = detail::sc_linear_unchecked(n, regime_.mu);
        break;
      case RegimeTag::ScSublinear:
        detail::require_sc_mu(regime_.mu);
        require_epsilon();
        sc_ = detail::sc_sublinear_unchecked(n, regime_.mu);
        break;
      case RegimeTag::Convex:
        if (regime_.mu != 0.0) throw InvalidRegime("Convex regime requires mu = 0");
        require_epsilon();
        t0_ = regime_.t0.value_or(2.0 * n + 2.0);
        if (!(t0_ >= 2.0 * (n + 1.0))) {
          throw InvalidRegime("Convex regime offset t0 must be at least 2(n+1)");
        }
        break;
    }
  }

  void require_epsilon() const {
    if (!(regime_.epsilon > 0.0 && regime_.epsilon < 1.0 / 3.0)) {
      throw InvalidRegime("slack epsilon must lie in (0, 1/3)");
    }
  }

  Regime regime_;
  StepParams sc_{};
  double t0_ = 0.0;
};

}  // namespace apcd
