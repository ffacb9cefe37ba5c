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

#include <cstddef>
#include <span>
#include <vector>

#include "spiqgan/rng.hpp"

namespace spiqgan {

inline constexpr std::size_t kCriticHidden = 64;

/// Weights of the d -> 64 (ReLU) -> 1 critic, stored contiguously as
/// [w1 (64 x d, row-major) | b1 (64) | w2 (64) | b2].
class CriticParams {
 public:
  CriticParams() = default;
  /// All-zero parameters for inputs of length `input_size`.
  explicit CriticParams(std::size_t input_size)
      : input_size_(input_size), values_(kCriticHidden * input_size + 2 * kCriticHidden + 1, 0.0) {}

  std::size_t input_size() const { return input_size_; }

  double& w1(std::size_t h, std::size_t i) { return values_[h * input_size_ + i]; }
  double w1(std::size_t h, std::size_t i) const { return values_[h * input_size_ + i]; }
  double& b1(std::size_t h) { return values_[b1_offset() + h]; }
  double b1(std::size_t h) const { return values_[b1_offset() + h]; }
  double& w2(std::size_t h) { return values_[w2_offset() + h]; }
  double w2(std::size_t h) const { return values_[w2_offset() + h]; }
  double& b2() { return values_.back(); }
  double b2() const { return values_.back(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool operator==(const CriticParams&) const = default;

 private:
  std::size_t b1_offset() const { return kCriticHidden * input_size_; }
  std::size_t w2_offset() const { return b1_offset() + kCriticHidden; }

  std::size_t input_size_ = 0;
  std::vector<double> values_;
};

struct CriticGradients {
  CriticParams params;        // d output / d parameter, same layout
  std::vector<double> input;  // d output / d x
};

/// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer.
CriticParams init_critic(std::size_t input_size, Rng& rng);

/// w2 . relu(w1 x + b1) + b2. Throws ConfigError on length mismatch.
double critic_forward(const CriticParams& p, std::span<const double> x);

/// Exact gradients of critic_forward, with relu'(0) = 0.
CriticGradients critic_backward(const CriticParams& p, std::span<const double> x);

/// Clamps every entry to [-c, c]. Throws ConfigError unless c > 0.
void clip_weights(CriticParams& p, double c);

}  // namespace spiqgan
