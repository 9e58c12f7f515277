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
 * @file async_engine.hpp
 * @brief Shared-memory asynchronous version of the efficient iteration.
 *
 * Workers draw ranks t from a global counter, read the (u, v) entries on the
 * gradient support without locking (reads may mix states), and commit the
 * increment to u_k and then v_k, each under its own lock. Coordinates come
 * from CoordinateStream(seed, n).at(t), so rank t always updates the same
 * coordinate no matter which worker claims it.
 *
 * Basis rebasing (see seq_engine.hpp) is an epoch barrier here: the worker
 * holding a boundary rank waits until every earlier rank has committed,
 * rewrites (u, v) into the new frame, and opens the next epoch. Ranks of the
 * new epoch wait for that. Between boundaries workers run freely.
 *
 * Interval bookkeeping uses a global event counter: a rank's start stamp is
 * taken just before its reads and its commit stamp just after its v unlock.
 * Wall-clock nanoseconds are logged alongside for reports.
 */

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "apcd/basis.hpp"
#include "apcd/error.hpp"
#include "apcd/problems.hpp"
#include "apcd/rng.hpp"
#include "apcd/schedule.hpp"
#include "apcd/seq_engine.hpp"
#include "apcd/trace.hpp"

namespace apcd {

struct AsyncConfig {
  std::size_t workers = 1;
  std::int64_t T = 0;
  /// Admission gate: ranks run in FIFO groups of q_throttle + 1, a group
  /// starting only after every earlier rank has committed. Absent = no gate.
  std::optional<std::int64_t> q_throttle;
  /// Ranks claimed per counter access. Effective asynchrony grows to about q * r.
  std::int64_t counter_batch = 1;
  std::uint64_t seed = 0;
  std::int64_t record_every = 0;  ///< 0 = one checkpoint per epoch
  double rebase_limit = kDefaultRebaseLimit;
  std::optional<std::vector<double>> x0;
  /// Test hook run after a rank's reads, before its gradient.
  std::function<void(std::size_t worker, std::int64_t rank)> after_read;
};

struct CommitRecord {
  std::int64_t rank = 0;
  std::uint32_t coord = 0;
  std::int64_t start_ns = 0;
  std::int64_t commit_ns = 0;
  std::uint32_t worker = 0;
  double delta_z = 0.0;
  std::uint64_t start_seq = 0;   ///< event-counter stamp before the reads
  std::uint64_t commit_seq = 0;  ///< event-counter stamp after the v unlock
};

using CommitLog = std::vector<CommitRecord>;

struct AsyncResult {
  EfficientState state;  ///< shared (u, v) after join
  Iterates final;
  RunTrace trace;        ///< replayed in rank order
  CommitLog log;         ///< sorted by rank
  std::int64_t q_obs = 0;
  std::int64_t max_in_flight = 0;
};

/// Throws unless `log` holds ranks 0..T-1 exactly once, in order.
inline void require_complete(const CommitLog& log) {
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (log[i].rank != static_cast<std::int64_t>(i)) {
      throw Error("commit log incomplete or unsorted at position " + std::to_string(i));
    }
  }
}

/// Max over updates of how many other updates' [start, commit] intervals
/// intersect its own.
inline std::int64_t measure_overlap(const CommitLog& log) {
  require_complete(log);
  const std::size_t m = log.size();
  std::vector<std::uint64_t> starts(m), commits(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (log[i].commit_seq <= log[i].start_seq) throw Error("commit stamp precedes start stamp");
    starts[i] = log[i].start_seq;
    commits[i] = log[i].commit_seq;
  }
  std::sort(starts.begin(), starts.end());
  std::sort(commits.begin(), commits.end());
  std::int64_t q = 0;
  for (const auto& r : log) {
    const auto starts_after = static_cast<std::int64_t>(starts.end() - std::upper_bound(starts.begin(), starts.end(), r.commit_seq));
    const auto commits_before = static_cast<std::int64_t>(std::lower_bound(commits.begin(), commits.end(), r.start_seq) - commits.begin());
    q = std::max(q, static_cast<std::int64_t>(m) - starts_after - commits_before - 1);
  }
  return q;
}

inline constexpr const char* kCommitLogHeader = "rank,coord,start_ns,commit_ns,worker,delta_z,start_seq,commit_seq";

inline void write_commit_log_csv(std::ostream& os, const CommitLog& log) {
  os << kCommitLogHeader << "\n";
  for (const auto& r : log) {
    os << r.rank << ',' << r.coord << ',' << r.start_ns << ',' << r.commit_ns << ',' << r.worker << ','
       << format_double(r.delta_z) << ',' << r.start_seq << ',' << r.commit_seq << "\n";
  }
}

inline CommitLog read_commit_log_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCommitLogHeader) throw ParseError("commit log CSV: bad header");
  CommitLog log;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream in(line);
    std::string f[8];
    for (auto& field : f) {
      if (!std::getline(in, field, ',')) throw ParseError("commit log CSV: short row '" + line + "'");
    }
    CommitRecord r;
    r.rank = std::stoll(f[0]);
    r.coord = static_cast<std::uint32_t>(std::stoul(f[1]));
    r.start_ns = std::stoll(f[2]);
    r.commit_ns = std::stoll(f[3]);
    r.worker = static_cast<std::uint32_t>(std::stoul(f[4]));
    r.delta_z = parse_double(f[5]);
    r.start_seq = std::stoull(f[6]);
    r.commit_seq = std::stoull(f[7]);
    log.push_back(r);
  }
  return log;
}

inline void save_commit_log_csv(const std::string& path, const CommitLog& log) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open '" + path + "' for writing");
  write_commit_log_csv(os, log);
}

struct Replay {
  EfficientState state;
  RunTrace trace;
};

/// Re-applies the logged Delta z in rank order. The result is the
/// start-time-ordered iterate sequence; its final (u, v) matches the shared
/// memory up to the order of floating-point additions.
template <CoordinateProblem P>
Replay replay_log(const P& p, const Schedule& sched, const CommitLog& log, std::span<const double> x0,
                  std::int64_t record_every = 0, double rebase_limit = kDefaultRebaseLimit) {
  require_complete(log);
  const auto T = static_cast<std::int64_t>(log.size());
  const std::int64_t every = checkpoint_spacing(record_every, p.dimension());
  Replay out{EfficientState::start(x0, sched, rebase_limit), {}};
  EfficientState& s = out.state;
  std::vector<double> x0v(x0.begin(), x0.end());
  out.trace.records.push_back(make_record(p, sched, 0, x0v, x0v, 0));
  std::int64_t wall = 0;
  for (const auto& r : log) {
    if (s.t >= s.rebase_at) rebase(s, sched);
    const Vec2 inc = detail::commit_increment(sched, s.origin, s.t, r.delta_z);
    s.u[r.coord] += inc.d1;
    s.v[r.coord] += inc.d2;
    ++s.t;
    wall = std::max(wall, r.commit_ns);
    if (s.t % every == 0 || s.t == T) {
      const Iterates it = finalize(s, sched);
      out.trace.records.push_back(make_record(p, sched, s.t, it.x, it.z, wall));
    }
  }
  out.trace.total_ns = wall;
  return out;
}

namespace detail {

struct Aborted {};

class SpinLock {
 public:
  void lock() {
    while (flag_.test_and_set(std::memory_order_acquire)) {
      while (flag_.test(std::memory_order_relaxed)) std::this_thread::yield();
    }
  }
  void unlock() { flag_.clear(std::memory_order_release); }

 private:
  std::atomic_flag flag_;
};

template <class Pred>
void wait_until(Pred&& pred, const std::atomic<bool>& abort) {
  for (int spins = 0; !pred(); ++spins) {
    if (abort.load(std::memory_order_relaxed)) throw Aborted{};
    if (spins > 16) std::this_thread::yield();
  }
}

struct SharedMemory {
  explicit SharedMemory(const std::vector<double>& x0)
      : u(x0.size()), v(x0.size()), lock_u(x0.size()), lock_v(x0.size()) {
    for (std::size_t j = 0; j < x0.size(); ++j) {
      u[j].store(x0[j], std::memory_order_relaxed);
      v[j].store(x0[j], std::memory_order_relaxed);
    }
  }

  std::vector<std::atomic<double>> u, v;
  std::vector<SpinLock> lock_u, lock_v;
  std::atomic<std::int64_t> counter{0};
  std::atomic<std::int64_t> committed{0};
  std::atomic<std::uint64_t> clock{0};
  std::atomic<std::int64_t> epoch{0};
  std::atomic<std::int64_t> in_flight{0};
  std::atomic<std::int64_t> max_in_flight{0};
  std::atomic<bool> abort{false};
};

}  // namespace detail

/// Runs cfg.T updates on cfg.workers threads. Rethrows the first worker
/// exception after all threads have joined.
template <CoordinateProblem P>
AsyncResult run_async(const P& p, const Schedule& sched, const AsyncConfig& cfg) {
  const std::size_t n = p.dimension();
  if (cfg.workers < 1) throw InvalidRegime("workers must be at least 1");
  if (cfg.T < 0) throw OutOfRange("T must be non-negative");
  if (cfg.counter_batch < 1) throw InvalidRegime("counter_batch must be at least 1");
  if (cfg.q_throttle && *cfg.q_throttle < 0) throw InvalidRegime("q_throttle must be non-negative");
  if (sched.n() != n) throw InvalidRegime("schedule dimension does not match the problem");
  const std::vector<double> x0 = cfg.x0.value_or(std::vector<double>(n, 0.0));
  if (x0.size() != n) throw InvalidProblem("x0 has wrong size");

  const std::vector<std::int64_t> origins = rebase_points(sched, cfg.T, cfg.rebase_limit);
  const CoordinateStream ks(cfg.seed, n);
  const std::int64_t group = cfg.q_throttle ? *cfg.q_throttle + 1 : 0;
  detail::SharedMemory mem(x0);
  std::vector<CommitLog> logs(cfg.workers);
  std::exception_ptr failure;
  std::mutex failure_mu;
  const auto t_start = std::chrono::steady_clock::now();
  auto now_ns = [&] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t_start).count();
  };

  auto rebase_shared = [&](std::int64_t from, std::int64_t to) {
    const Mat2 m = transfer(from, to, sched);
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2 r = m * Vec2{mem.u[j].load(std::memory_order_relaxed), mem.v[j].load(std::memory_order_relaxed)};
      mem.u[j].store(r.d1, std::memory_order_relaxed);
      mem.v[j].store(r.d2, std::memory_order_relaxed);
    }
  };

  auto process = [&](std::size_t worker, std::int64_t t, std::vector<double>& buf) {
    if (group > 0) {
      const std::int64_t first = (t / group) * group;
      detail::wait_until([&] { return mem.committed.load(std::memory_order_acquire) >= first; }, mem.abort);
    }
    const auto e = static_cast<std::int64_t>(std::upper_bound(origins.begin(), origins.end(), t) - origins.begin()) - 1;
    const std::int64_t origin = origins[static_cast<std::size_t>(e)];
    if (e > 0 && t == origin) {
      detail::wait_until([&] { return mem.committed.load(std::memory_order_acquire) >= t; }, mem.abort);
      rebase_shared(origins[static_cast<std::size_t>(e - 1)], origin);
      mem.epoch.store(e, std::memory_order_release);
    } else {
      detail::wait_until([&] { return mem.epoch.load(std::memory_order_acquire) >= e; }, mem.abort);
    }

    const std::size_t k = ks.at(static_cast<std::uint64_t>(t));
    CommitRecord rec;
    rec.rank = t;
    rec.coord = static_cast<std::uint32_t>(k);
    rec.worker = static_cast<std::uint32_t>(worker);
    const std::int64_t flying = mem.in_flight.fetch_add(1, std::memory_order_acq_rel) + 1;
    std::int64_t seen = mem.max_in_flight.load(std::memory_order_relaxed);
    while (flying > seen && !mem.max_in_flight.compare_exchange_weak(seen, flying, std::memory_order_relaxed)) {
    }
    rec.start_seq = mem.clock.fetch_add(1, std::memory_order_seq_cst);
    rec.start_ns = now_ns();

    const Mat2 fwd = transfer(origin, t, sched);
    const auto supp = p.support(k);
    buf.resize(supp.size());
    for (std::size_t i = 0; i < supp.size(); ++i) {
      const Index j = supp[i];
      buf[i] = fwd.a11 * mem.u[j].load(std::memory_order_relaxed) + fwd.a12 * mem.v[j].load(std::memory_order_relaxed);
    }
    if (cfg.after_read) cfg.after_read(worker, t);
    const double g = p.grad_on_support(k, buf);
    rec.delta_z = -g / sched.params(t).gamma;
    const Vec2 inc = detail::commit_increment(sched, origin, t, rec.delta_z);

    mem.lock_u[k].lock();
    mem.u[k].store(mem.u[k].load(std::memory_order_relaxed) + inc.d1, std::memory_order_relaxed);
    mem.lock_u[k].unlock();
    mem.lock_v[k].lock();
    mem.v[k].store(mem.v[k].load(std::memory_order_relaxed) + inc.d2, std::memory_order_relaxed);
    mem.lock_v[k].unlock();

    rec.commit_seq = mem.clock.fetch_add(1, std::memory_order_seq_cst);
    rec.commit_ns = now_ns();
    mem.in_flight.fetch_sub(1, std::memory_order_acq_rel);
    logs[worker].push_back(rec);
    mem.committed.fetch_add(1, std::memory_order_acq_rel);
  };

  auto work = [&](std::size_t worker) {
    std::vector<double> buf;
    try {
      for (;;) {
        const std::int64_t base = mem.counter.fetch_add(cfg.counter_batch, std::memory_order_relaxed);
        if (base >= cfg.T) break;
        const std::int64_t end = std::min(cfg.T, base + cfg.counter_batch);
        for (std::int64_t t = base; t < end; ++t) process(worker, t, buf);
      }
    } catch (const detail::Aborted&) {
    } catch (...) {
      std::lock_guard<std::mutex> g(failure_mu);
      if (!failure) failure = std::current_exception();
      mem.abort.store(true, std::memory_order_relaxed);
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(cfg.workers);
  for (std::size_t w = 0; w < cfg.workers; ++w) threads.emplace_back(work, w);
  for (auto& th : threads) th.join();
  if (failure) std::rethrow_exception(failure);

  AsyncResult out;
  for (auto& l : logs) out.log.insert(out.log.end(), l.begin(), l.end());
  std::sort(out.log.begin(), out.log.end(), [](const CommitRecord& a, const CommitRecord& b) { return a.rank < b.rank; });
  out.q_obs = measure_overlap(out.log);
  out.max_in_flight = mem.max_in_flight.load();

  out.state = EfficientState::start(x0, sched, cfg.rebase_limit);
  for (std::size_t j = 0; j < n; ++j) {
    out.state.u[j] = mem.u[j].load();
    out.state.v[j] = mem.v[j].load();
  }
  out.state.t = cfg.T;
  out.state.origin = origins.back();
  const std::int64_t h = rebase_horizon(out.state.origin, sched, cfg.rebase_limit);
  out.state.rebase_at = h > std::numeric_limits<std::int64_t>::max() - out.state.origin
                            ? std::numeric_limits<std::int64_t>::max()
                            : out.state.origin + h;
  out.final = finalize(out.state, sched);

  out.trace = replay_log(p, sched, out.log, x0, cfg.record_every, cfg.rebase_limit).trace;
  out.trace.q_obs = out.q_obs;
  return out;
}

/// Per-worker commit counts, for starvation checks.
inline std::vector<std::int64_t> commits_per_worker(const CommitLog& log, std::size_t workers) {
  std::vector<std::int64_t> c(workers, 0);
  for (const auto& r : log) {
    if (r.worker < workers) ++c[r.worker];
  }
  return c;
}

}  // namespace apcd
