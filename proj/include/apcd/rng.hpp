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
 * @file rng.hpp
 * @brief Counter-indexed SplitMix64 streams.
 *
 * The coordinate chosen at step t is a pure function of (seed, t), so the
 * asynchronous engine draws the same k_t no matter which worker claims rank t.
 * Output is bit-identical across platforms (no std:: distributions involved).
 */

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>

namespace apcd {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Random-access stream: draw(i) is the i-th SplitMix64 output for this key.
class Stream {
 public:
  explicit constexpr Stream(std::uint64_t seed) : key_(splitmix64_mix(seed + kGoldenGamma)) {}

  constexpr std::uint64_t draw(std::uint64_t i) const {
    return splitmix64_mix(key_ + (i + 1) * kGoldenGamma);
  }

  /// Independent child stream.
  constexpr Stream split(std::uint64_t id) const {
    return Stream(splitmix64_mix(key_ ^ splitmix64_mix(id + 0x632be59bd9b4e019ULL)), 0);
  }

  /// Uniform in [0, n) by 128-bit multiply-high; no modulo, no rejection.
  /// Bias is at most n / 2^64.
  constexpr std::uint64_t bounded(std::uint64_t i, std::uint64_t n) const {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(draw(i)) * n) >> 64);
  }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t i) const {
    return static_cast<double>(draw(i) >> 11) * 0x1.0p-53;
  }

 private:
  constexpr Stream(std::uint64_t key, int) : key_(key) {}
  std::uint64_t key_;
};

/// Coordinate k_t for every step t of a run.
class CoordinateStream {
 public:
  CoordinateStream(std::uint64_t seed, std::size_t n) : stream_(Stream(seed).split(0xC00D)), n_(n) {}

  std::size_t at(std::uint64_t t) const { return static_cast<std::size_t>(stream_.bounded(t, n_)); }
  std::size_t dimension() const { return n_; }

 private:
  Stream stream_;
  std::size_t n_;
};

/// Sequential sampler for problem generators.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : stream_(seed) {}

  double uniform() { return stream_.uniform(i_++); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return stream_.bounded(i_++, n); }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  Stream stream_;
  std::uint64_t i_ = 0;
};

}  // namespace apcd
