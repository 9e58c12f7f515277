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
 * @file seq_engine.hpp
 * @brief Sequential accelerated coordinate descent, in two equivalent forms.
 *
 * BasicState keeps full x, y, z and costs O(n) per step; it is the reference.
 * EfficientState keeps (u, v) with (y_k; z_k) = B^t (u_k; v_k) and touches one
 * coordinate per step.
 *
 * Rebasing. det B^t decays (like ((1-phi)/(1+phi))^t for the strongly convex
 * schedules), so u, v grow without bound and lose digits. The efficient state
 * therefore stores (u, v) relative to an origin step o,
 *
 *     (y_k; z_k) = B^t (B^o)^{-1} (u_k; v_k),
 *
 * and moves o forward, rewriting every (u_k, v_k), whenever 1/det of that
 * transfer would exceed the rebase limit. The boundaries depend only on the
 * schedule, so the asynchronous engine reproduces them exactly. A limit of
 * +inf never rebases.
 */

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "apcd/basis.hpp"
#include "apcd/error.hpp"
#include "apcd/mat2.hpp"
#include "apcd/problems.hpp"
#include "apcd/rng.hpp"
#include "apcd/schedule.hpp"
#include "apcd/trace.hpp"

namespace apcd {

struct BasicState {
  std::vector<double> x, y, z;
  std::int64_t t = 0;

  static BasicState start(std::span<const double> x0) {
    std::vector<double> v(x0.begin(), x0.end());
    return {v, v, v, 0};
  }
};

struct EfficientState {
  std::vector<double> u, v;
  std::int64_t t = 0;
  std::int64_t origin = 0;     ///< basis origin o
  std::int64_t rebase_at = 0;  ///< next step at which o moves to t
  double rebase_limit = kDefaultRebaseLimit;

  static EfficientState start(std::span<const double> x0, const Schedule& sched,
                              double rebase_limit = kDefaultRebaseLimit) {
    std::vector<double> w(x0.begin(), x0.end());
    return {w, w, 0, 0, rebase_horizon(0, sched, rebase_limit), rebase_limit};
  }
};

struct Iterates {
  std::vector<double> x, y, z;
};

/// w = varphi z + (1 - varphi) y.
inline std::vector<double> mix_w(const std::vector<double>& y, const std::vector<double>& z, const StepParams& p) {
  std::vector<double> w(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) w[j] = p.varphi * z[j] + (1.0 - p.varphi) * y[j];
  return w;
}

/// x from y = psi x + (1 - psi) z.
inline std::vector<double> recover_x(const std::vector<double>& y, const std::vector<double>& z, double psi) {
  if (!(psi > 0.0)) throw SingularMatrix("psi_t = 0: x cannot be recovered from (y, z)");
  std::vector<double> x(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) x[j] = (y[j] - (1.0 - psi) * z[j]) / psi;
  return x;
}

/// One step of the basic iteration. Returns the gradient value used.
template <CoordinateProblem P>
double step_basic(BasicState& s, const P& p, const Schedule& sched, std::size_t k,
                  std::optional<double> g_override = std::nullopt) {
  const std::size_t n = s.x.size();
  detail::require_index(k, n);
  const StepParams cur = sched.params(s.t);
  const StepParams next = sched.params(s.t + 1);
  const double g = g_override ? *g_override : p.grad_coord(s.y, k);
  const double dz = -g / cur.gamma;
  const double nphi = static_cast<double>(sched.n()) * cur.phi;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = cur.varphi * s.z[j] + (1.0 - cur.varphi) * s.y[j];
    const double zj = j == k ? w + dz : w;
    const double xj = j == k ? s.y[j] + nphi * dz : s.y[j];
    s.x[j] = xj;
    s.z[j] = zj;
    s.y[j] = next.psi * xj + (1.0 - next.psi) * zj;
  }
  ++s.t;
  return g;
}

/// Moves the basis origin of `s` to s.t.
inline void rebase(EfficientState& s, const Schedule& sched) {
  const Mat2 m = transfer(s.origin, s.t, sched);
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    const Vec2 r = m * Vec2{s.u[j], s.v[j]};
    s.u[j] = r.d1;
    s.v[j] = r.d2;
  }
  s.origin = s.t;
  const std::int64_t h = rebase_horizon(s.origin, sched, s.rebase_limit);
  s.rebase_at = h > std::numeric_limits<std::int64_t>::max() - s.origin ? std::numeric_limits<std::int64_t>::max()
                                                                        : s.origin + h;
}

/// Basis origins in [0, T): 0 followed by every rebase point before T.
inline std::vector<std::int64_t> rebase_points(const Schedule& sched, std::int64_t T,
                                               double limit = kDefaultRebaseLimit) {
  std::vector<std::int64_t> out{0};
  for (;;) {
    const std::int64_t o = out.back();
    const std::int64_t h = rebase_horizon(o, sched, limit);
    if (h >= T - o) break;
    out.push_back(o + h);
  }
  return out;
}

namespace detail {

/// Delta z for coordinate k at step t with y reconstructed on support(k)
/// through `fwd` = B^t (B^o)^{-1}. `read(j)` yields the stored (u_j, v_j).
template <CoordinateProblem P, class Read>
double delta_z(const P& p, const Schedule& sched, const Mat2& fwd, std::int64_t t, std::size_t k, Read&& read,
               std::vector<double>& buf, double* g_out = nullptr) {
  const auto supp = p.support(k);
  buf.resize(supp.size());
  for (std::size_t i = 0; i < supp.size(); ++i) {
    const Vec2 uv = read(supp[i]);
    buf[i] = fwd.a11 * uv.d1 + fwd.a12 * uv.d2;
  }
  const double g = p.grad_on_support(k, buf);
  if (g_out) *g_out = g;
  return -g / sched.params(t).gamma;
}

/// (B^{t+1} (B^o)^{-1})^{-1} D^t dz: what step t adds to (u_k, v_k).
inline Vec2 commit_increment(const Schedule& sched, std::int64_t origin, std::int64_t t, double dz) {
  return transfer(t + 1, origin, sched) * (d_vector(t, sched) * dz);
}

}  // namespace detail

/// One step of the efficient iteration. Returns the gradient value used.
template <CoordinateProblem P>
double step_efficient(EfficientState& s, const P& p, const Schedule& sched, std::size_t k,
                      std::optional<double> g_override = std::nullopt) {
  detail::require_index(k, s.u.size());
  if (s.t >= s.rebase_at) rebase(s, sched);
  double g = 0.0;
  double dz = 0.0;
  if (g_override) {
    g = *g_override;
    dz = -g / sched.params(s.t).gamma;
  } else {
    thread_local std::vector<double> buf;
    const Mat2 fwd = transfer(s.origin, s.t, sched);
    dz = detail::delta_z(p, sched, fwd, s.t, k, [&](Index j) { return Vec2{s.u[j], s.v[j]}; }, buf, &g);
  }
  const Vec2 inc = detail::commit_increment(sched, s.origin, s.t, dz);
  s.u[k] += inc.d1;
  s.v[k] += inc.d2;
  ++s.t;
  return g;
}

/// (y, z) at the state's current step.
inline std::pair<std::vector<double>, std::vector<double>> reconstruct_yz(const EfficientState& s,
                                                                          const Schedule& sched) {
  const Mat2 m = transfer(s.origin, s.t, sched);
  std::vector<double> y(s.u.size()), z(s.u.size());
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    const Vec2 r = m * Vec2{s.u[j], s.v[j]};
    y[j] = r.d1;
    z[j] = r.d2;
  }
  return {std::move(y), std::move(z)};
}

/// (x, y, z) at the state's current step.
inline Iterates finalize(const EfficientState& s, const Schedule& sched) {
  auto [y, z] = reconstruct_yz(s, sched);
  auto x = recover_x(y, z, sched.params(s.t).psi);
  return {std::move(x), std::move(y), std::move(z)};
}

enum class Mode { Basic, Efficient };

struct SequentialOptions {
  /// Checkpoint spacing in steps; 0 means one checkpoint per epoch (n steps).
  std::int64_t record_every = 0;
  double rebase_limit = kDefaultRebaseLimit;
  std::optional<std::vector<double>> x0;  ///< defaults to the origin
  std::optional<double> target_gap;       ///< stop at the first checkpoint at or below
};

struct SolveResult {
  RunTrace trace;
  Iterates final;
  std::int64_t steps = 0;
};

/// Checkpoint metrics at step t.
template <CoordinateProblem P>
TraceRecord make_record(const P& p, const Schedule& sched, std::int64_t t, const std::vector<double>& x,
                        const std::vector<double>& z, std::int64_t wall_ns) {
  TraceRecord r;
  r.t = t;
  r.f_gap = p.value(x);
  r.wall_ns = wall_ns;
  if (const auto& xs = p.minimizer()) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) d2 += ((*xs)[j] - z[j]) * ((*xs)[j] - z[j]);
    r.potential = r.f_gap + sched.potential_weight(t) * d2;
  }
  return r;
}

inline std::int64_t checkpoint_spacing(std::int64_t record_every, std::size_t n) {
  if (record_every < 0) throw OutOfRange("record_every must be non-negative");
  return record_every == 0 ? static_cast<std::int64_t>(n) : record_every;
}

/// T steps with k_t = CoordinateStream(seed, n).at(t). Checkpoints at 0, every
/// record_every steps, and T.
template <CoordinateProblem P>
SolveResult run_sequential(const P& p, const Schedule& sched, std::int64_t T, std::uint64_t seed,
                           Mode mode = Mode::Efficient, const SequentialOptions& opts = {}) {
  if (T < 0) throw OutOfRange("T must be non-negative");
  const std::size_t n = p.dimension();
  if (sched.n() != n) throw InvalidRegime("schedule dimension does not match the problem");
  std::vector<double> x0 = opts.x0.value_or(std::vector<double>(n, 0.0));
  if (x0.size() != n) throw InvalidProblem("x0 has wrong size");
  const std::int64_t every = checkpoint_spacing(opts.record_every, n);
  const CoordinateStream ks(seed, n);
  const auto clock_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - clock_start).count();
  };

  SolveResult out;
  auto finish = [&](Iterates it, std::int64_t t) {
    out.trace.total_ns = elapsed();
    out.final = std::move(it);
    out.steps = t;
  };

  if (mode == Mode::Basic) {
    BasicState s = BasicState::start(x0);
    out.trace.records.push_back(make_record(p, sched, 0, s.x, s.z, 0));
    while (s.t < T) {
      step_basic(s, p, sched, ks.at(static_cast<std::uint64_t>(s.t)));
      if (s.t % every == 0 || s.t == T) {
        out.trace.records.push_back(make_record(p, sched, s.t, s.x, s.z, elapsed()));
        if (opts.target_gap && out.trace.records.back().f_gap <= *opts.target_gap) break;
      }
    }
    finish({s.x, s.y, s.z}, s.t);
    return out;
  }

  EfficientState s = EfficientState::start(x0, sched, opts.rebase_limit);
  out.trace.records.push_back(make_record(p, sched, 0, x0, x0, 0));
  while (s.t < T) {
    step_efficient(s, p, sched, ks.at(static_cast<std::uint64_t>(s.t)));
    if (s.t % every == 0 || s.t == T) {
      Iterates it = finalize(s, sched);
      out.trace.records.push_back(make_record(p, sched, s.t, it.x, it.z, elapsed()));
      if (opts.target_gap && out.trace.records.back().f_gap <= *opts.target_gap) break;
    }
  }
  finish(finalize(s, sched), s.t);
  return out;
}

}  // namespace apcd
