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
 * @file harness.hpp
 * @brief Experiment configs and the checks behind the `apcd` CLI.
 *
 * Config files are INI:
 *
 *   [problem]  generator = identity | sparse_quadratic | least_squares | logistic | file
 *              n, s, m, mu, ridge, seed, path, allow_singular
 *   [regime]   kind = sc_linear | sc_sublinear | convex; mu (defaults to the
 *              problem's), epsilon, t0
 *   [run]      T, seeds, workers, q_throttle, counter_batch, mode, record_every,
 *              target_gap, checkpoints
 *   [output]   dir   (overridden by APCD_OUT_DIR)
 *
 * Rate checks are one-sided: the theorems bound expectations from above, so
 * a seed mean passes when mean <= bound * (1 + 3 stderr / mean).
 */

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "apcd/async_engine.hpp"
#include "apcd/basis.hpp"
#include "apcd/error.hpp"
#include "apcd/problem_io.hpp"
#include "apcd/problems.hpp"
#include "apcd/schedule.hpp"
#include "apcd/seq_engine.hpp"
#include "apcd/trace.hpp"

namespace apcd {

using AnyProblem = std::variant<QuadraticProblem, LogisticProblem>;

struct ProblemSpec {
  std::string generator = "identity";
  std::size_t n = 100;
  std::size_t s = 8;
  std::size_t m = 0;  ///< rows for least_squares / logistic; 0 means 2n
  double mu = 1.0;    ///< target for sparse_quadratic
  double ridge = 0.0;
  std::uint64_t seed = 1;
  std::string path;
  bool allow_singular = false;
};

struct RegimeSpec {
  RegimeTag kind = RegimeTag::ScLinear;
  std::optional<double> mu;  ///< defaults to the problem's
  double epsilon = kDefaultEpsilon;
  std::optional<double> t0;
};

struct RunSpec {
  std::int64_t T = 0;  ///< 0 means 20 epochs
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::size_t> workers{1};
  std::optional<std::int64_t> q_throttle;
  std::int64_t counter_batch = 1;
  Mode mode = Mode::Efficient;
  std::int64_t record_every = 0;
  double target_gap = 1e-6;
  std::vector<std::int64_t> checkpoints;  ///< verify-rate T values; empty = {n, 5n, 20n}
};

struct ExperimentConfig {
  ProblemSpec problem;
  RegimeSpec regime;
  RunSpec run;
  std::string out_dir = ".";
};

namespace detail {

template <class T>
std::vector<T> parse_list(const std::string& s, const char* what) {
  std::vector<T> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(tok, &used);
      if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw ParseError(std::string("bad value '") + tok + "' in " + what);
    }
  }
  if (out.empty()) throw ParseError(std::string(what) + " must not be empty");
  return out;
}

/// Strict keyed read: absent keys keep the default, malformed values throw.
template <class T>
void read_key(const boost::property_tree::ptree& t, const char* key, T& out) {
  if (t.find(key) != t.not_found()) out = t.get<T>(key);
}

template <class T>
void read_key(const boost::property_tree::ptree& t, const char* key, std::optional<T>& out) {
  if (t.find(key) != t.not_found()) out = t.get<T>(key);
}

inline bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ParseError("bad boolean '" + s + "'");
}

}  // namespace detail

inline std::vector<std::uint64_t> parse_seeds(const std::string& s) { return detail::parse_list<std::uint64_t>(s, "seeds"); }
inline std::vector<std::size_t> parse_workers(const std::string& s) {
  auto w = detail::parse_list<std::size_t>(s, "workers");
  if (std::find(w.begin(), w.end(), std::size_t{0}) != w.end()) throw ParseError("workers must be positive");
  return w;
}

inline ExperimentConfig parse_config(std::istream& is) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  try {
    if (auto p = tree.get_child_optional("problem")) {
      detail::read_key(*p, "generator", c.problem.generator);
      detail::read_key(*p, "n", c.problem.n);
      detail::read_key(*p, "s", c.problem.s);
      detail::read_key(*p, "m", c.problem.m);
      detail::read_key(*p, "mu", c.problem.mu);
      detail::read_key(*p, "ridge", c.problem.ridge);
      detail::read_key(*p, "seed", c.problem.seed);
      detail::read_key(*p, "path", c.problem.path);
      if (auto b = p->get_optional<std::string>("allow_singular")) c.problem.allow_singular = detail::parse_bool(*b);
    }
    if (auto r = tree.get_child_optional("regime")) {
      if (auto k = r->get_optional<std::string>("kind")) c.regime.kind = parse_regime_tag(*k);
      detail::read_key(*r, "mu", c.regime.mu);
      detail::read_key(*r, "epsilon", c.regime.epsilon);
      detail::read_key(*r, "t0", c.regime.t0);
    }
    if (auto r = tree.get_child_optional("run")) {
      detail::read_key(*r, "T", c.run.T);
      if (auto s = r->get_optional<std::string>("seeds")) c.run.seeds = parse_seeds(*s);
      if (auto w = r->get_optional<std::string>("workers")) c.run.workers = parse_workers(*w);
      detail::read_key(*r, "q_throttle", c.run.q_throttle);
      detail::read_key(*r, "counter_batch", c.run.counter_batch);
      if (auto m = r->get_optional<std::string>("mode")) {
        if (*m == "basic") {
          c.run.mode = Mode::Basic;
        } else if (*m == "efficient") {
          c.run.mode = Mode::Efficient;
        } else {
          throw ParseError("mode must be basic or efficient");
        }
      }
      detail::read_key(*r, "record_every", c.run.record_every);
      detail::read_key(*r, "target_gap", c.run.target_gap);
      if (auto cp = r->get_optional<std::string>("checkpoints")) {
        c.run.checkpoints = detail::parse_list<std::int64_t>(*cp, "checkpoints");
      }
    }
    if (auto o = tree.get_child_optional("output")) detail::read_key(*o, "dir", c.out_dir);
  } catch (const pt::ptree_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (c.run.T < 0) throw ParseError("T must be non-negative");
  if (c.run.counter_batch < 1) throw ParseError("counter_batch must be at least 1");
  if (c.run.q_throttle && *c.run.q_throttle < 0) throw ParseError("q_throttle must be non-negative");
  if (const char* env = std::getenv("APCD_OUT_DIR"); env && *env) c.out_dir = env;
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open config '" + path + "'");
  return parse_config(is);
}

inline AnyProblem build_problem(const ProblemSpec& spec) {
  const std::size_t m = spec.m == 0 ? 2 * spec.n : spec.m;
  if (spec.generator == "identity") return make_identity_quadratic(spec.n, spec.seed);
  if (spec.generator == "sparse_quadratic") return make_sparse_quadratic(spec.n, spec.s, spec.seed, spec.mu);
  if (spec.generator == "least_squares") {
    return make_random_least_squares(m, spec.n, spec.seed, {spec.ridge, spec.allow_singular});
  }
  if (spec.generator == "logistic") return make_logistic(m, spec.n, spec.seed, spec.ridge);
  if (spec.generator == "file") {
    if (spec.path.empty()) throw ParseError("generator = file needs a path");
    return load_quadratic(spec.path);
  }
  throw ParseError("unknown generator '" + spec.generator + "'");
}

inline std::size_t dimension_of(const AnyProblem& p) {
  return std::visit([](const auto& q) { return q.dimension(); }, p);
}

inline double mu_of(const AnyProblem& p) {
  return std::visit([](const auto& q) { return q.mu(); }, p);
}

inline Regime make_regime(const RegimeSpec& spec, std::size_t n, double problem_mu) {
  Regime r;
  r.tag = spec.kind;
  r.n = n;
  r.epsilon = spec.epsilon;
  r.t0 = spec.t0;
  r.mu = spec.kind == RegimeTag::Convex ? spec.mu.value_or(0.0) : spec.mu.value_or(problem_mu);
  return r;
}

inline Schedule make_schedule(const ExperimentConfig& c, const AnyProblem& p) {
  return Schedule::make(make_regime(c.regime, dimension_of(p), mu_of(p)));
}

// ---------------------------------------------------------------- statistics

struct Stats {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
};

inline Stats summarize(std::span<const double> xs) {
  if (xs.size() < 2) throw Error("need at least two seeds for a standard error");
  Stats s;
  s.count = xs.size();
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  return s;
}

/// Ratio of means mean(b)/mean(a) and its delta-method standard error.
inline std::pair<double, double> ratio_of_means(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw Error("ratio_of_means: need paired samples, at least two");
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double vaa = 0.0, vbb = 0.0, vab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    vaa += (a[i] - ma) * (a[i] - ma);
    vbb += (b[i] - mb) * (b[i] - mb);
    vab += (a[i] - ma) * (b[i] - mb);
  }
  vaa /= n - 1.0;
  vbb /= n - 1.0;
  vab /= n - 1.0;
  const double r = mb / ma;
  const double var = (vbb - 2.0 * r * vab + r * r * vaa) / (ma * ma * n);
  return {r, std::sqrt(std::max(0.0, var))};
}

// ---------------------------------------------------------------- rate bounds

/// Right-hand side of the expected-gap bound after T steps, from
/// f0 = f(x^0) - f* and dist2 = ||x* - x^0||^2.
inline double rate_bound(const Schedule& sched, std::int64_t T, double f0, double dist2) {
  const Regime& r = sched.regime();
  const double n = static_cast<double>(r.n);
  const double td = static_cast<double>(T);
  switch (r.tag) {
    case RegimeTag::ScLinear: {
      const double rate = 1.0 - std::sqrt(3.0 / 80.0) * std::sqrt(r.mu) / n;
      return std::pow(rate, td) * (f0 + (1.0 - std::sqrt(r.mu) / std::sqrt(240.0)) * 0.5 * r.mu * dist2);
    }
    case RegimeTag::ScSublinear: {
      const double rate = 1.0 - (1.0 - r.epsilon) * std::pow(3.0 * r.mu / 20.0, 2.0 / 3.0) / n;
      return std::pow(rate, td) * (f0 + (10.0 / 3.0) * dist2);
    }
    case RegimeTag::Convex: {
      if (sched.t0() != 2.0 * n + 2.0) throw InvalidRegime("the convex rate bound is stated for t0 = 2n + 2");
      const double base = (2.0 * n) * (2.0 * n + 1.0) / ((2.0 * n + td) * (2.0 * n + td + 1.0));
      const double expo = n * (0.75 - r.epsilon - 1.0 / (4.0 * n)) / (n + 1.0);
      return std::pow(base, expo) * (f0 + (10.0 / 3.0) * dist2);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

struct RateRow {
  std::int64_t T = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;
  double allowed = 0.0;  ///< bound * (1 + 3 stderr / mean)
  bool pass = false;
};

struct RateReport {
  std::vector<RateRow> rows;
  bool pass = true;
};

inline std::vector<std::int64_t> default_checkpoints(std::size_t n) {
  const auto nn = static_cast<std::int64_t>(n);
  return {nn, 5 * nn, 20 * nn};
}

/// Seed-averaged gap at each checkpoint against the regime's bound, from x^0 = 0.
template <CoordinateProblem P>
RateReport verify_rate(const P& p, const Schedule& sched, std::span<const std::uint64_t> seeds,
                       std::span<const std::int64_t> checkpoints) {
  if (!p.minimizer()) throw InvalidProblem("rate verification needs a known minimizer");
  if (checkpoints.empty()) throw Error("no checkpoints");
  const std::size_t n = p.dimension();
  const std::vector<double> x0(n, 0.0);
  const double f0 = p.value(x0);
  double dist2 = 0.0;
  for (double v : *p.minimizer()) dist2 += v * v;
  std::int64_t every = 0;
  for (std::int64_t c : checkpoints) {
    if (c < 0) throw OutOfRange("checkpoint must be non-negative");
    every = std::gcd(every, c);
  }
  if (every == 0) every = 1;
  const std::int64_t T = *std::max_element(checkpoints.begin(), checkpoints.end());

  std::vector<std::vector<double>> gaps(checkpoints.size());
  for (std::uint64_t seed : seeds) {
    SequentialOptions o;
    o.record_every = every;
    const SolveResult res = run_sequential(p, sched, T, seed, Mode::Efficient, o);
    for (std::size_t i = 0; i < checkpoints.size(); ++i) gaps[i].push_back(res.trace.at(checkpoints[i])->f_gap);
  }
  RateReport rep;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const Stats st = summarize(gaps[i]);
    RateRow row;
    row.T = checkpoints[i];
    row.mean = st.mean;
    row.stderr_ = st.stderr_;
    row.bound = rate_bound(sched, row.T, f0, dist2);
    row.allowed = st.mean > 0.0 ? row.bound * (1.0 + 3.0 * st.stderr_ / st.mean) : row.bound;
    row.pass = st.mean <= row.allowed;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

inline void write_rate_csv(std::ostream& os, const RateReport& rep) {
  os << "T,mean_gap,stderr,bound,allowed,pass\n";
  for (const auto& r : rep.rows) {
    os << r.T << ',' << format_double(r.mean) << ',' << format_double(r.stderr_) << ',' << format_double(r.bound)
       << ',' << format_double(r.allowed) << ',' << (r.pass ? 1 : 0) << "\n";
  }
}

// ---------------------------------------------------------------- potential decay

struct DecayRow {
  std::int64_t t = 0;
  double mean_now = 0.0;
  double mean_next = 0.0;
  double ratio = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;  ///< 1 - phi_t / 2
  bool pass = false;
};

struct DecayReport {
  std::vector<DecayRow> rows;
  bool pass = true;
};

/// E[F^{t+1}] / E[F^t] <= 1 - phi_t/2 + 3 stderr for t = 0..tmax.
template <CoordinateProblem P>
DecayReport potential_decay(const P& p, const Schedule& sched, std::span<const std::uint64_t> seeds, std::int64_t tmax) {
  if (!p.minimizer()) throw InvalidProblem("potential needs a known minimizer");
  std::vector<std::vector<double>> pot(static_cast<std::size_t>(tmax + 2));
  for (std::uint64_t seed : seeds) {
    SequentialOptions o;
    o.record_every = 1;
    const SolveResult res = run_sequential(p, sched, tmax + 1, seed, Mode::Efficient, o);
    for (const auto& r : res.trace.records) pot[static_cast<std::size_t>(r.t)].push_back(r.potential);
  }
  DecayReport rep;
  for (std::int64_t t = 0; t <= tmax; ++t) {
    const auto [ratio, se] = ratio_of_means(pot[static_cast<std::size_t>(t)], pot[static_cast<std::size_t>(t + 1)]);
    DecayRow row;
    row.t = t;
    row.mean_now = summarize(pot[static_cast<std::size_t>(t)]).mean;
    row.mean_next = summarize(pot[static_cast<std::size_t>(t + 1)]).mean;
    row.ratio = ratio;
    row.stderr_ = se;
    row.bound = 1.0 - sched.params(t).phi / 2.0;
    row.pass = ratio <= row.bound + 3.0 * se;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

// ---------------------------------------------------------------- speedup

struct SpeedupRow {
  std::size_t workers = 1;
  double epochs = std::numeric_limits<double>::quiet_NaN();  ///< mean epochs to target (async)
  double seq_epochs = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = std::numeric_limits<double>::quiet_NaN();  ///< mean wall time to target
  double speedup = std::numeric_limits<double>::quiet_NaN();  ///< wall(1 worker) / wall(w)
  std::int64_t q_obs = 0;                                     ///< max over seeds
  std::size_t reached = 0;                                    ///< seeds reaching the target
  bool epochs_ok = false;                                     ///< epochs <= 2 seq_epochs
};

struct SpeedupReport {
  std::vector<SpeedupRow> rows;
  double q_bound = 0.0;
  bool pass = true;
};

/// Epochs and wall time to reach `target` for each worker count. Each async
/// run is capped at min(T_cap, 3 x the slowest sequential run).
template <CoordinateProblem P>
SpeedupReport measure_speedup(const P& p, const Schedule& sched, std::span<const std::size_t> workers,
                              std::span<const std::uint64_t> seeds, double target, std::int64_t T_cap,
                              std::optional<std::int64_t> q_throttle = std::nullopt, std::int64_t counter_batch = 1) {
  if (std::find(workers.begin(), workers.end(), std::size_t{1}) == workers.end()) {
    throw Error("speedup needs 1 in the workers list");
  }
  const auto n = static_cast<double>(p.dimension());
  std::vector<double> seq_epochs;
  std::int64_t seq_max = 0;
  for (std::uint64_t seed : seeds) {
    SequentialOptions o;
    o.target_gap = target;
    const SolveResult res = run_sequential(p, sched, T_cap, seed, Mode::Efficient, o);
    const auto hit = res.trace.first_below(target);
    if (!hit) throw Error("target gap unreachable within T = " + std::to_string(T_cap));
    seq_epochs.push_back(static_cast<double>(hit->t) / n);
    seq_max = std::max(seq_max, hit->t);
  }
  const double seq_mean = std::accumulate(seq_epochs.begin(), seq_epochs.end(), 0.0) / static_cast<double>(seq_epochs.size());

  SpeedupReport rep;
  rep.q_bound = q_bound(sched.regime(), p.lipschitz().l_res_bar);
  double base_wall = std::numeric_limits<double>::quiet_NaN();
  std::vector<SpeedupRow> rows;
  for (std::size_t w : workers) {
    SpeedupRow row;
    row.workers = w;
    row.seq_epochs = seq_mean;
    double ep = 0.0, wall = 0.0;
    for (std::uint64_t seed : seeds) {
      AsyncConfig cfg;
      cfg.workers = w;
      cfg.T = std::min(T_cap, 3 * seq_max);
      cfg.seed = seed;
      cfg.q_throttle = q_throttle;
      cfg.counter_batch = counter_batch;
      const AsyncResult res = run_async(p, sched, cfg);
      row.q_obs = std::max(row.q_obs, res.q_obs);
      if (const auto hit = res.trace.first_below(target)) {
        ++row.reached;
        ep += static_cast<double>(hit->t) / n;
        wall += static_cast<double>(hit->wall_ns) * 1e-6;
      }
    }
    if (row.reached == seeds.size()) {
      row.epochs = ep / static_cast<double>(row.reached);
      row.wall_ms = wall / static_cast<double>(row.reached);
    }
    row.epochs_ok = row.reached == seeds.size() && row.epochs <= 2.0 * seq_mean;
    if (w == 1) base_wall = row.wall_ms;
    rep.pass = rep.pass && row.epochs_ok;
    rows.push_back(row);
  }
  for (auto& r : rows) r.speedup = base_wall / r.wall_ms;
  rep.rows = std::move(rows);
  return rep;
}

inline void write_speedup_csv(std::ostream& os, const SpeedupReport& rep) {
  os << "workers,epochs_to_target,seq_epochs,wall_ms,speedup,q_obs,q_bound,reached,epochs_ok\n";
  for (const auto& r : rep.rows) {
    os << r.workers << ',' << format_double(r.epochs) << ',' << format_double(r.seq_epochs) << ','
       << format_double(r.wall_ms) << ',' << format_double(r.speedup) << ',' << r.q_obs << ','
       << format_double(rep.q_bound) << ',' << r.reached << ',' << (r.epochs_ok ? 1 : 0) << "\n";
  }
}

// ---------------------------------------------------------------- matrix checks

struct CheckRow {
  std::string name;
  double value = 0.0;  ///< worst deviation, or count of failures
  double limit = 0.0;
  bool pass = false;
};

/// Schedules used by the matrix suites, relaxed so small n is allowed.
inline std::vector<std::pair<std::string, Schedule>> check_schedules(std::size_t n) {
  std::vector<std::pair<std::string, Schedule>> out;
  const std::string tag = "n=" + std::to_string(n);
  out.emplace_back("sc_linear(mu=1) " + tag, Schedule::relaxed(Regime::sc_linear(n, 1.0)));
  out.emplace_back("sc_linear(mu=0.01) " + tag, Schedule::relaxed(Regime::sc_linear(n, 0.01)));
  out.emplace_back("sc_sublinear(mu=0.01) " + tag, Schedule::relaxed(Regime::sc_sublinear(n, 0.01)));
  out.emplace_back("convex " + tag, Schedule::relaxed(Regime::convex(n)));
  return out;
}

namespace detail {

inline std::vector<std::int64_t> sampled_steps(std::int64_t tmax, std::int64_t dense, std::int64_t stride) {
  std::vector<std::int64_t> ts;
  for (std::int64_t t = 0; t <= std::min(tmax, dense); ++t) ts.push_back(t);
  for (std::int64_t t = dense + stride; t <= tmax; t += stride) ts.push_back(t);
  if (ts.back() != tmax) ts.push_back(tmax);
  return ts;
}

}  // namespace detail

/// Product identity, row-stochasticity, convex closed form and the SC eigen
/// form against exponentiation by squaring.
inline std::vector<CheckRow> matrix_identity_checks(std::span<const std::size_t> ns, std::int64_t tmax = 10000,
                                                    std::int64_t sc_tmax = 100000) {
  std::vector<CheckRow> rows;
  for (std::size_t n : ns) {
    for (const auto& [name, sched] : check_schedules(n)) {
      double prod = 0.0, stoch = 0.0;
      bool second_row_exact = true;
      for (std::int64_t t : detail::sampled_steps(tmax, 1000, 37)) {
        const Mat2 a = a_matrix(t, sched);
        const Mat2 b = b_matrix(t, sched);
        prod = std::max(prod, max_abs_diff(b_matrix(t + 1, sched), a * b));
        for (const Mat2& m : {a, b}) {
          stoch = std::max({stoch, std::abs(m.a11 + m.a12 - 1.0), std::abs(m.a21 + m.a22 - 1.0)});
          if (!sched.constant() && !(m.a21 == 0.0 && m.a22 == 1.0)) second_row_exact = false;
        }
      }
      rows.push_back({"B^{t+1} = A^t B^t  " + name, prod, kAlgebraTol, prod <= kAlgebraTol});
      rows.push_back({"row-stochastic     " + name, stoch, kAlgebraTol, stoch <= kAlgebraTol});
      if (sched.constant()) {
        double worst = 0.0;
        for (std::int64_t t : detail::sampled_steps(sc_tmax, 200, 997)) {
          worst = std::max(worst, max_abs_diff(b_matrix(t, sched), b_matrix_by_squaring(t, sched)));
        }
        rows.push_back({"eigen form = squaring " + name, worst, 1e-11, worst <= 1e-11});
      } else {
        rows.push_back({"second row (0, 1)  " + name, second_row_exact ? 0.0 : 1.0, 0.0, second_row_exact});
        double worst = 0.0;
        Mat2 brute = Mat2::identity();
        const double nd = static_cast<double>(n);
        for (std::int64_t t = 0; t <= tmax; ++t) {
          const double td = static_cast<double>(t);
          const double pt = (2 * nd + 1) * (2 * nd + 2) / ((2 * nd + td + 1) * (2 * nd + td + 2));
          worst = std::max({worst, std::abs(brute.a11 - pt), std::abs(brute.a12 - (1.0 - pt)),
                            max_abs_diff(b_matrix(t, sched), brute)});
          brute = a_matrix(t, sched) * brute;
        }
        rows.push_back({"closed form p_t    " + name, worst, kAlgebraTol, worst <= kAlgebraTol});
      }
    }
  }
  return rows;
}

/// Goodness over every |s - t| <= 2q with s >= 0 at sampled t, where
/// q = floor(goodness_q_limit(n)).
inline std::vector<CheckRow> goodness_checks(std::span<const std::size_t> ns, std::int64_t tmax = 5000) {
  std::vector<CheckRow> rows;
  for (std::size_t n : ns) {
    const auto q = static_cast<std::int64_t>(std::floor(std::max(0.0, goodness_q_limit(n))));
    for (const auto& [name, sched] : check_schedules(n)) {
      std::int64_t failures = 0, checked = 0;
      for (std::int64_t t : detail::sampled_steps(tmax, 500, 7)) {
        for (std::int64_t s = std::max<std::int64_t>(0, t - 2 * q); s <= t + 2 * q; ++s) {
          ++checked;
          if (!check_goodness(t, s, sched)) ++failures;
        }
      }
      rows.push_back({"good (q=" + std::to_string(q) + ", " + std::to_string(checked) + " pairs) " + name,
                      static_cast<double>(failures), 0.0, failures == 0});
    }
  }
  return rows;
}

inline void write_checks_csv(std::ostream& os, const std::vector<CheckRow>& rows) {
  os << "check,value,limit,pass\n";
  for (const auto& r : rows) {
    os << '"' << r.name << "\"," << format_double(r.value) << ',' << format_double(r.limit) << ','
       << (r.pass ? 1 : 0) << "\n";
  }
}

// ---------------------------------------------------------------- equivalence

/// max_j |a_j - b_j| / (1 + max_j |a_j|).
inline double relative_deviation(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, mag = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    diff = std::max(diff, std::abs(a[j] - b[j]));
    mag = std::max(mag, std::abs(a[j]));
  }
  return diff / (1.0 + mag);
}

/// Worst deviation between basic and efficient (x, y, z, w) over T steps.
/// When `shared_gradients` is set the efficient run is fed the basic run's
/// gradient values; otherwise it computes its own.
template <CoordinateProblem P>
double basic_vs_efficient(const P& p, const Schedule& sched, std::int64_t T, std::uint64_t seed,
                          bool shared_gradients, std::span<const double> x0) {
  const CoordinateStream ks(seed, p.dimension());
  BasicState b = BasicState::start(x0);
  EfficientState e = EfficientState::start(x0, sched);
  double worst = 0.0;
  for (std::int64_t t = 0; t < T; ++t) {
    const std::size_t k = ks.at(static_cast<std::uint64_t>(t));
    const double g = step_basic(b, p, sched, k);
    step_efficient(e, p, sched, k, shared_gradients ? std::optional<double>(g) : std::nullopt);
    const Iterates it = finalize(e, sched);
    const StepParams prm = sched.params(e.t);
    worst = std::max({worst, relative_deviation(b.x, it.x), relative_deviation(b.y, it.y),
                      relative_deviation(b.z, it.z),
                      relative_deviation(mix_w(b.y, b.z, prm), mix_w(it.y, it.z, prm))});
  }
  return worst;
}

/// Worst deviation between a 1-worker async run and the sequential efficient
/// run: every checkpoint gap plus the final (x, y, z).
template <CoordinateProblem P>
double async_vs_sequential(const P& p, const Schedule& sched, std::int64_t T, std::uint64_t seed,
                           std::span<const double> x0) {
  SequentialOptions so;
  so.record_every = 1;
  so.x0 = std::vector<double>(x0.begin(), x0.end());
  const SolveResult seq = run_sequential(p, sched, T, seed, Mode::Efficient, so);
  AsyncConfig cfg;
  cfg.workers = 1;
  cfg.T = T;
  cfg.seed = seed;
  cfg.record_every = 1;
  cfg.x0 = so.x0;
  const AsyncResult as = run_async(p, sched, cfg);
  double worst = 0.0;
  if (seq.trace.records.size() != as.trace.records.size()) return std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < seq.trace.records.size(); ++i) {
    const double a = seq.trace.records[i].f_gap;
    const double b = as.trace.records[i].f_gap;
    worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(a)));
  }
  return std::max({worst, relative_deviation(seq.final.x, as.final.x), relative_deviation(seq.final.y, as.final.y),
                   relative_deviation(seq.final.z, as.final.z)});
}

struct EquivalenceCase {
  std::string name;
  QuadraticProblem problem;
  Schedule schedule;
  std::vector<double> x0;
};

/// Ten random sparse quadratics (n in {5, 50}) under each regime, started
/// from a random point.
inline std::vector<EquivalenceCase> equivalence_cases(std::uint64_t base_seed = 2026) {
  std::vector<EquivalenceCase> out;
  for (int i = 0; i < 10; ++i) {
    const std::size_t n = i % 2 == 0 ? 5 : 50;
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    Sampler rng(seed ^ 0x5eed);
    const double mu = rng.uniform(0.05, 1.0);
    QuadraticProblem prob = make_sparse_quadratic(n, std::min<std::size_t>(n, 4), seed, mu);
    std::vector<double> x0(n);
    for (double& v : x0) v = rng.normal();
    const std::string tag = "problem " + std::to_string(i) + " (n=" + std::to_string(n) + ")";
    const double pm = prob.mu();
    out.push_back({tag + " sc_linear", prob, Schedule::relaxed(Regime::sc_linear(n, pm)), x0});
    out.push_back({tag + " sc_sublinear", prob, Schedule::relaxed(Regime::sc_sublinear(n, pm)), x0});
    out.push_back({tag + " convex", prob, Schedule::relaxed(Regime::convex(n)), x0});
  }
  return out;
}

}  // namespace apcd
