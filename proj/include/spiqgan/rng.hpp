// Copyright 2026 The SpiQGAN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace spiqgan {

/// Seeded random stream. Wraps std::mt19937_64 and converts raw draws
/// itself so that streams are reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent sub-stream keyed by `seed` and an ordered tuple of
  /// integers (purpose, step, batch index, patch, ...). Two different keys
  /// give unrelated streams, so the draw a consumer sees never depends on
  /// the order in which other streams were used.
  static Rng keyed(std::uint64_t seed, std::initializer_list<std::uint64_t> key);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Purpose tags for keyed sub-streams.
enum class StreamPurpose : std::uint64_t {
  kGeneratorInit = 1,
  kCriticInit = 2,
  kCriticNoise = 3,
  kCriticReal = 4,
  kGeneratorNoise = 5,
  kGeneratorReal = 6,
  kEvaluationNoise = 7,
  kSampling = 8,
};

}  // namespace spiqgan
