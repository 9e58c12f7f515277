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

// apcd: run and check asynchronous accelerated coordinate descent.
//
//   apcd solve          --config run.ini [--workers 8] [--out dir]
//   apcd verify-rate    --config rate.ini [--seeds 1,2,3]
//   apcd speedup        --config speedup.ini [--workers 1,2,4,8]
//   apcd check-matrices [--config any.ini]
//   apcd equivalence    [--config any.ini]
//
// Exit status: 0 success, 1 solver or check failure, 2 bad config/arguments.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "apcd/async_engine.hpp"
#include "apcd/harness.hpp"
#include "apcd/seq_engine.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string seeds;
  std::string workers;
  std::optional<std::int64_t> q_throttle;
  std::optional<std::int64_t> counter_batch;
};

apcd::ExperimentConfig resolve(const Flags& f, bool need_config) {
  apcd::ExperimentConfig c;
  if (!f.config.empty()) {
    c = apcd::load_config(f.config);
  } else if (need_config) {
    throw apcd::ParseError("--config is required");
  }
  if (!f.out.empty()) c.out_dir = f.out;
  if (!f.seeds.empty()) c.run.seeds = apcd::parse_seeds(f.seeds);
  if (!f.workers.empty()) c.run.workers = apcd::parse_workers(f.workers);
  if (f.q_throttle) {
    if (*f.q_throttle < 0) throw apcd::ParseError("--q-throttle must be non-negative");
    c.run.q_throttle = f.q_throttle;
  }
  if (f.counter_batch) {
    if (*f.counter_batch < 1) throw apcd::ParseError("--counter-batch must be at least 1");
    c.run.counter_batch = *f.counter_batch;
  }
  return c;
}

std::string out_path(const apcd::ExperimentConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.out_dir);
  return (std::filesystem::path(c.out_dir) / name).string();
}

template <class Write>
void write_file(const std::string& path, Write&& w) {
  std::ofstream os(path);
  if (!os) throw apcd::Error("cannot write '" + path + "'");
  w(os);
  std::printf("wrote %s\n", path.c_str());
}

int cmd_solve(const apcd::ExperimentConfig& c) {
  const apcd::AnyProblem prob = apcd::build_problem(c.problem);
  const apcd::Schedule sched = apcd::make_schedule(c, prob);
  const auto n = static_cast<std::int64_t>(sched.n());
  const std::int64_t T = c.run.T > 0 ? c.run.T : 20 * n;
  const std::uint64_t seed = c.run.seeds.front();
  const std::size_t workers = c.run.workers.front();

  return std::visit(
      [&](const auto& p) {
        apcd::RunTrace trace;
        std::optional<apcd::CommitLog> log;
        if (c.run.mode == apcd::Mode::Basic) {
          apcd::SequentialOptions o;
          o.record_every = c.run.record_every;
          trace = apcd::run_sequential(p, sched, T, seed, apcd::Mode::Basic, o).trace;
        } else {
          apcd::AsyncConfig cfg;
          cfg.workers = workers;
          cfg.T = T;
          cfg.seed = seed;
          cfg.q_throttle = c.run.q_throttle;
          cfg.counter_batch = c.run.counter_batch;
          cfg.record_every = c.run.record_every;
          auto res = apcd::run_async(p, sched, cfg);
          trace = std::move(res.trace);
          log = std::move(res.log);
        }
        write_file(out_path(c, "trace.csv"), [&](std::ostream& os) { apcd::write_trace_csv(os, trace); });
        if (log) write_file(out_path(c, "commit_log.csv"), [&](std::ostream& os) { apcd::write_commit_log_csv(os, *log); });
        const auto lip = p.lipschitz();
        std::printf("regime        %s (n=%lld, mu=%g)\n", std::string(apcd::to_string(sched.tag())).c_str(),
                    static_cast<long long>(n), sched.regime().mu);
        std::printf("steps         %lld\n", static_cast<long long>(T));
        std::printf("workers       %zu\n", c.run.mode == apcd::Mode::Basic ? std::size_t{1} : workers);
        std::printf("initial gap   %.6e\n", trace.initial_gap());
        std::printf("final gap     %.6e\n", trace.final_gap());
        std::printf("q_obs         %lld\n", static_cast<long long>(trace.q_obs));
        std::printf("q_bound       %.4f\n", apcd::q_bound(sched.regime(), lip.l_res_bar));
        std::printf("wall          %.3f ms\n", static_cast<double>(trace.total_ns) * 1e-6);
        return std::isfinite(trace.final_gap()) ? 0 : 1;
      },
      prob);
}

int cmd_verify_rate(const apcd::ExperimentConfig& c) {
  const apcd::AnyProblem prob = apcd::build_problem(c.problem);
  const apcd::Schedule sched = apcd::make_schedule(c, prob);
  const auto cps = c.run.checkpoints.empty() ? apcd::default_checkpoints(sched.n()) : c.run.checkpoints;
  const apcd::RateReport rep = std::visit([&](const auto& p) { return apcd::verify_rate(p, sched, c.run.seeds, cps); }, prob);
  std::printf("%-8s %-14s %-12s %-14s %-14s %s\n", "T", "mean gap", "stderr", "bound", "allowed", "");
  for (const auto& r : rep.rows) {
    std::printf("%-8lld %-14.6e %-12.3e %-14.6e %-14.6e %s\n", static_cast<long long>(r.T), r.mean, r.stderr_,
                r.bound, r.allowed, r.pass ? "ok" : "VIOLATED");
  }
  write_file(out_path(c, "rate.csv"), [&](std::ostream& os) { apcd::write_rate_csv(os, rep); });
  return rep.pass ? 0 : 1;
}

int cmd_speedup(const apcd::ExperimentConfig& c) {
  const apcd::AnyProblem prob = apcd::build_problem(c.problem);
  const apcd::Schedule sched = apcd::make_schedule(c, prob);
  const std::int64_t cap = c.run.T > 0 ? c.run.T : 1000 * static_cast<std::int64_t>(sched.n());
  const apcd::SpeedupReport rep = std::visit(
      [&](const auto& p) {
        return apcd::measure_speedup(p, sched, c.run.workers, c.run.seeds, c.run.target_gap, cap, c.run.q_throttle,
                                     c.run.counter_batch);
      },
      prob);
  std::printf("hardware threads: %u, q_bound: %.4f\n", std::thread::hardware_concurrency(), rep.q_bound);
  std::printf("%-8s %-10s %-10s %-12s %-8s %-8s %s\n", "workers", "epochs", "seq", "wall ms", "speedup", "q_obs", "");
  for (const auto& r : rep.rows) {
    std::printf("%-8zu %-10.2f %-10.2f %-12.2f %-8.2f %-8lld %s\n", r.workers, r.epochs, r.seq_epochs, r.wall_ms,
                r.speedup, static_cast<long long>(r.q_obs), r.epochs_ok ? "ok" : "SLOW");
  }
  write_file(out_path(c, "speedup.csv"), [&](std::ostream& os) { apcd::write_speedup_csv(os, rep); });
  return rep.pass ? 0 : 1;
}

int print_checks(const std::vector<apcd::CheckRow>& rows) {
  bool ok = true;
  for (const auto& r : rows) {
    std::printf("%-4s %-60s %.3e (limit %.1e)\n", r.pass ? "ok" : "FAIL", r.name.c_str(), r.value, r.limit);
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

int cmd_check_matrices(const apcd::ExperimentConfig& c, bool have_config) {
  std::vector<std::size_t> ns{19, 50, 200};
  if (have_config) ns = {c.problem.n};
  auto rows = apcd::matrix_identity_checks(ns);
  const auto good = apcd::goodness_checks(ns);
  rows.insert(rows.end(), good.begin(), good.end());
  write_file(out_path(c, "matrices.csv"), [&](std::ostream& os) { apcd::write_checks_csv(os, rows); });
  return print_checks(rows);
}

int cmd_equivalence(const apcd::ExperimentConfig& c) {
  const std::int64_t T = c.run.T > 0 ? c.run.T : 500;
  const std::uint64_t seed = c.run.seeds.front();
  std::vector<apcd::CheckRow> rows;
  for (const auto& ec : apcd::equivalence_cases()) {
    const double shared = apcd::basic_vs_efficient(ec.problem, ec.schedule, T, seed, true, ec.x0);
    const double own = apcd::basic_vs_efficient(ec.problem, ec.schedule, T, seed, false, ec.x0);
    const double as = apcd::async_vs_sequential(ec.problem, ec.schedule, T, seed, ec.x0);
    rows.push_back({"basic~efficient (shared g) " + ec.name, shared, 1e-9, shared <= 1e-9});
    rows.push_back({"basic~efficient (own g)    " + ec.name, own, 1e-9, own <= 1e-9});
    rows.push_back({"async(1)~sequential        " + ec.name, as, 1e-9, as <= 1e-9});
  }
  write_file(out_path(c, "equivalence.csv"), [&](std::ostream& os) { apcd::write_checks_csv(os, rows); });
  return print_checks(rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous accelerated coordinate descent: solver and checks"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* sc) {
    sc->add_option("--config", f.config, "INI experiment config");
    sc->add_option("--out", f.out, "Output directory");
    sc->add_option("--seeds", f.seeds, "Comma-separated seeds, e.g. 1,2,3");
    sc->add_option("--workers", f.workers, "Comma-separated worker counts, e.g. 1,2,4,8");
    sc->add_option("--q-throttle", f.q_throttle, "Admit at most k+1 updates in flight");
    sc->add_option("--counter-batch", f.counter_batch, "Ranks claimed per counter access");
  };
  auto* solve = app.add_subcommand("solve", "Run one solver instance and write trace.csv");
  auto* rate = app.add_subcommand("verify-rate", "Seed-averaged gaps against the analytic rate bound");
  auto* speed = app.add_subcommand("speedup", "Epochs and wall time to a target gap per worker count");
  auto* mats = app.add_subcommand("check-matrices", "Basis matrix identities and goodness");
  auto* equiv = app.add_subcommand("equivalence", "Basic vs efficient vs 1-worker async");
  for (auto* sc : {solve, rate, speed, mats, equiv}) add_common(sc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*solve) return cmd_solve(resolve(f, true));
    if (*rate) return cmd_verify_rate(resolve(f, true));
    if (*speed) return cmd_speedup(resolve(f, true));
    if (*mats) return cmd_check_matrices(resolve(f, false), !f.config.empty());
    if (*equiv) return cmd_equivalence(resolve(f, false));
  } catch (const apcd::ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const apcd::InvalidRegime& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const apcd::InvalidProblem& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
