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
 * @file trace.hpp
 * @brief Per-checkpoint metrics of a run and their CSV form.
 */

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "apcd/error.hpp"
#include "apcd/problem_io.hpp"

namespace apcd {

struct TraceRecord {
  std::int64_t t = 0;
  double f_gap = 0.0;      ///< f(x^t) - f*; raw f(x^t) when f* is unknown
  double potential = std::numeric_limits<double>::quiet_NaN();  ///< NaN without x*
  std::int64_t wall_ns = 0;

  bool operator==(const TraceRecord& o) const {
    auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
    return t == o.t && same(f_gap, o.f_gap) && same(potential, o.potential) && wall_ns == o.wall_ns;
  }
};

struct RunTrace {
  std::vector<TraceRecord> records;
  std::int64_t q_obs = 0;
  std::int64_t total_ns = 0;

  double initial_gap() const { return records.empty() ? std::numeric_limits<double>::quiet_NaN() : records.front().f_gap; }
  double final_gap() const { return records.empty() ? std::numeric_limits<double>::quiet_NaN() : records.back().f_gap; }

  /// First checkpoint whose gap is at most `target`.
  std::optional<TraceRecord> first_below(double target) const {
    for (const auto& r : records) {
      if (r.f_gap <= target) return r;
    }
    return std::nullopt;
  }

  /// Gap at checkpoint t, if recorded.
  std::optional<TraceRecord> at(std::int64_t t) const {
    for (const auto& r : records) {
      if (r.t == t) return r;
    }
    return std::nullopt;
  }
};

inline constexpr const char* kTraceHeader = "t,f_gap,potential,wall_ns";

inline void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << kTraceHeader << "\n";
  for (const auto& r : trace.records) {
    os << r.t << ',' << format_double(r.f_gap) << ',' << format_double(r.potential) << ',' << r.wall_ns << "\n";
  }
}

inline RunTrace read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTraceHeader) throw ParseError("trace CSV: bad header");
  RunTrace trace;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream in(line);
    std::string f[4];
    for (auto& field : f) {
      if (!std::getline(in, field, ',')) throw ParseError("trace CSV: short row '" + line + "'");
    }
    TraceRecord r;
    r.t = std::stoll(f[0]);
    r.f_gap = parse_double(f[1]);
    r.potential = parse_double(f[2]);
    r.wall_ns = std::stoll(f[3]);
    trace.records.push_back(r);
  }
  if (!trace.records.empty()) trace.total_ns = trace.records.back().wall_ns;
  return trace;
}

inline void save_trace_csv(const std::string& path, const RunTrace& trace) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open '" + path + "' for writing");
  write_trace_csv(os, trace);
}

inline RunTrace load_trace_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open '" + path + "'");
  return read_trace_csv(is);
}

}  // namespace apcd
