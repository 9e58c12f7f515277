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

// Text format for quadratic problems, loosely after Matrix Market:
//
//   %%APCD quadratic
//   % free-form comment lines
//   n <n>
//   mu <mu>
//   linear <c_1> ... <c_n>
//   minimizer <x_1> ... <x_n>       (optional)
//   nnz <count>
//   <row> <col> <value>             (1-based, both triangles)
//
// Doubles are written in shortest round-trip form.

#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "apcd/error.hpp"
#include "apcd/problems.hpp"

namespace apcd {

/// Shortest decimal that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ParseError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline void write_quadratic(std::ostream& os, const QuadraticProblem& p) {
  const std::size_t n = p.dimension();
  os << "%%APCD quadratic\n";
  os << "n " << n << "\n";
  os << "mu " << format_double(p.mu()) << "\n";
  os << "linear";
  for (double c : p.linear()) os << ' ' << format_double(c);
  os << "\n";
  if (p.minimizer()) {
    os << "minimizer";
    for (double x : *p.minimizer()) os << ' ' << format_double(x);
    os << "\n";
  }
  const auto entries = p.entries();
  os << "nnz " << entries.size() << "\n";
  for (const auto& e : entries) {
    os << e.row + 1 << ' ' << e.col + 1 << ' ' << format_double(e.value) << "\n";
  }
}

namespace detail {

inline std::vector<double> read_values(std::istringstream& in, std::size_t n, const char* what) {
  std::vector<double> out;
  out.reserve(n);
  std::string tok;
  while (in >> tok) out.push_back(parse_double(tok));
  if (out.size() != n) throw ParseError(std::string(what) + " has " + std::to_string(out.size()) + " values, expected " + std::to_string(n));
  return out;
}

}  // namespace detail

inline QuadraticProblem read_quadratic(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("%%APCD quadratic", 0) != 0) {
    throw ParseError("missing '%%APCD quadratic' header");
  }
  std::optional<std::size_t> n;
  std::optional<double> mu;
  std::vector<double> linear;
  std::optional<std::vector<double>> xs;
  std::optional<std::size_t> nnz;
  while (!nnz && std::getline(is, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream in(line);
    std::string key;
    in >> key;
    if (key == "n") {
      std::size_t v = 0;
      if (!(in >> v) || v == 0) throw ParseError("bad dimension line");
      n = v;
    } else if (key == "mu") {
      std::string tok;
      in >> tok;
      mu = parse_double(tok);
    } else if (key == "linear" || key == "minimizer") {
      if (!n) throw ParseError("'" + key + "' before 'n'");
      auto vals = detail::read_values(in, *n, key.c_str());
      if (key == "linear") {
        linear = std::move(vals);
      } else {
        xs = std::move(vals);
      }
    } else if (key == "nnz") {
      std::size_t v = 0;
      if (!(in >> v)) throw ParseError("bad nnz line");
      nnz = v;
    } else {
      throw ParseError("unknown key '" + key + "'");
    }
  }
  if (!n || !mu || !nnz || linear.empty()) throw ParseError("incomplete header (need n, mu, linear, nnz)");
  std::vector<QuadraticProblem::Entry> entries;
  entries.reserve(*nnz);
  while (entries.size() < *nnz && std::getline(is, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream in(line);
    std::size_t r = 0;
    std::size_t c = 0;
    std::string tok;
    if (!(in >> r >> c >> tok) || r == 0 || c == 0 || r > *n || c > *n) {
      throw ParseError("bad triplet line: '" + line + "'");
    }
    entries.push_back({static_cast<Index>(r - 1), static_cast<Index>(c - 1), parse_double(tok)});
  }
  if (entries.size() != *nnz) throw ParseError("expected " + std::to_string(*nnz) + " triplets");
  return QuadraticProblem(*n, std::move(entries), std::move(linear), *mu, std::move(xs));
}

inline void save_quadratic(const std::string& path, const QuadraticProblem& p) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open '" + path + "' for writing");
  write_quadratic(os, p);
}

inline QuadraticProblem load_quadratic(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open '" + path + "'");
  return read_quadratic(is);
}

}  // namespace apcd
