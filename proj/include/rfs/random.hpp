/* Copyright 2026 The rfspec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <utility>

namespace rfs {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Counter-based generator: the value at position `counter` of stream `key`
/// is a pure function of (key, counter), so any block of a matrix can be
/// filled independently and in any order.
class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t key() const noexcept { return key_; }

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(key_ + (counter + 1) * kGoldenGamma);
  }

  // Uniform on (0, 1].
  double uniform_open0(std::uint64_t counter) const noexcept {
    return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on [0, 1).
  double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // Box-Muller pair built from counters 2p and 2p+1.
  std::pair<double, double> normal_pair(std::uint64_t p) const noexcept {
    const double r = std::sqrt(-2.0 * std::log(uniform_open0(2 * p)));
    const double t = 2.0 * std::numbers::pi * uniform(2 * p + 1);
    return {r * std::cos(t), r * std::sin(t)};
  }

  // Child stream for a named purpose (matrix tag, layer, draw index...).
  constexpr CounterRng substream(std::uint64_t tag) const noexcept {
    return CounterRng(mix64(key_ ^ mix64(tag * kGoldenGamma + 0x632be59bd9b4e019ULL)));
  }

 private:
  std::uint64_t key_;
};

// Seed of replica `index` under `master`. Distinct indices give distinct
// seeds because mix64 is a bijection.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(master + (index + 1) * kGoldenGamma);
}

enum class EntryKind { Gaussian, Rademacher, Uniform };

/// Centred i.i.d. entry law with the given variance.
struct EntryDistribution {
  EntryKind kind = EntryKind::Gaussian;
  double variance = 1.0;

  double stddev() const { return std::sqrt(variance); }
};

EntryKind parse_entry_kind(std::string_view name);
std::string_view entry_kind_name(EntryKind kind);

// Entry `index` of a stream. Gaussian entries 2p and 2p+1 share one
// Box-Muller pair, so filling pairwise and entrywise agree bit for bit.
inline double draw_entry(const EntryDistribution& dist, const CounterRng& rng,
                         std::uint64_t index) noexcept {
  const double s = dist.stddev();
  switch (dist.kind) {
    case EntryKind::Gaussian: {
      const auto [a, b] = rng.normal_pair(index / 2);
      return s * ((index & 1U) ? b : a);
    }
    case EntryKind::Rademacher:
      return (rng.bits(index) >> 63) ? s : -s;
    case EntryKind::Uniform:
      return s * std::numbers::sqrt3 * (2.0 * rng.uniform(index) - 1.0);
  }
  return 0.0;
}

}  // namespace rfs
