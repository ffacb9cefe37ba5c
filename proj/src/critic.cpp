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

#include "spiqgan/critic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spiqgan/errors.hpp"

namespace spiqgan {
namespace {

void check_input(const CriticParams& p, std::span<const double> x) {
  if (x.size() != p.input_size()) {
    throw ConfigError("critic input has length " + std::to_string(x.size()) + ", expected " +
                      std::to_string(p.input_size()));
  }
}

double pre_activation(const CriticParams& p, std::span<const double> x, std::size_t h) {
  double a = p.b1(h);
  for (std::size_t i = 0; i < x.size(); ++i) a += p.w1(h, i) * x[i];
  return a;
}

}  // namespace

CriticParams init_critic(std::size_t input_size, Rng& rng) {
  if (input_size == 0) throw ConfigError("critic input size must be positive");
  CriticParams p(input_size);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(input_size));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(kCriticHidden));
  for (std::size_t h = 0; h < kCriticHidden; ++h) {
    for (std::size_t i = 0; i < input_size; ++i) p.w1(h, i) = rng.uniform(-bound1, bound1);
  }
  for (std::size_t h = 0; h < kCriticHidden; ++h) p.b1(h) = rng.uniform(-bound1, bound1);
  for (std::size_t h = 0; h < kCriticHidden; ++h) p.w2(h) = rng.uniform(-bound2, bound2);
  p.b2() = rng.uniform(-bound2, bound2);
  return p;
}

double critic_forward(const CriticParams& p, std::span<const double> x) {
  check_input(p, x);
  double out = p.b2();
  for (std::size_t h = 0; h < kCriticHidden; ++h) {
    const double a = pre_activation(p, x, h);
    if (a > 0.0) out += p.w2(h) * a;
  }
  return out;
}

CriticGradients critic_backward(const CriticParams& p, std::span<const double> x) {
  check_input(p, x);
  CriticGradients g{CriticParams(p.input_size()), std::vector<double>(x.size(), 0.0)};
  g.params.b2() = 1.0;
  for (std::size_t h = 0; h < kCriticHidden; ++h) {
    const double a = pre_activation(p, x, h);
    if (a <= 0.0) continue;  // dead unit, relu'(0) = 0
    g.params.w2(h) = a;
    const double delta = p.w2(h);
    g.params.b1(h) = delta;
    for (std::size_t i = 0; i < x.size(); ++i) {
      g.params.w1(h, i) = delta * x[i];
      g.input[i] += delta * p.w1(h, i);
    }
  }
  return g;
}

void clip_weights(CriticParams& p, double c) {
  if (!(c > 0.0)) throw ConfigError("clip constant must be positive");
  for (double& v : p.values()) v = std::clamp(v, -c, c);
}

}  // namespace spiqgan
