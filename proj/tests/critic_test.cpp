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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "spiqgan/adam.hpp"
#include "spiqgan/critic.hpp"
#include "spiqgan/errors.hpp"

using namespace spiqgan;

namespace {

// Two-layer evaluation written out loop by loop.
double hand_forward(const CriticParams& p, const std::vector<double>& x) {
  double out = p.b2();
  for (std::size_t h = 0; h < kCriticHidden; ++h) {
    double pre = p.b1(h);
    for (std::size_t i = 0; i < x.size(); ++i) pre += p.w1(h, i) * x[i];
    out += p.w2(h) * (pre > 0 ? pre : 0.0);
  }
  return out;
}

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = -1, double hi = 1) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("critic forward") {
  CriticParams zero(3);
  CHECK(critic_forward(zero, std::vector<double>{0.3, 1, 0}) == 0.0);

  CriticParams bias(4);
  for (std::size_t h = 0; h < kCriticHidden; ++h) bias.b1(h) = 1.0;
  bias.w2(0) = 1.0;
  CHECK(critic_forward(bias, std::vector<double>{5, -2, 0.1, 9}) == 1.0);

  Rng rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t d = 1 + rng.below(8);
    const auto p = init_critic(d, rng);
    const auto x = random_vector(rng, d, 0, 1);
    CHECK(critic_forward(p, x) == doctest::Approx(hand_forward(p, x)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(critic_forward(zero, std::vector<double>{1, 2}), ConfigError);
}

TEST_CASE("critic init") {
  Rng rng(2);
  const std::size_t d = 6;
  const auto p = init_critic(d, rng);
  CHECK(p.values().size() == kCriticHidden * d + 2 * kCriticHidden + 1);
  const double l1 = 1 / std::sqrt(double(d));
  const double l2 = 1 / std::sqrt(double(kCriticHidden));
  for (std::size_t h = 0; h < kCriticHidden; ++h) {
    for (std::size_t i = 0; i < d; ++i) CHECK(std::abs(p.w1(h, i)) <= l1);
    CHECK(std::abs(p.b1(h)) <= l1);
    CHECK(std::abs(p.w2(h)) <= l2);
  }
  CHECK(std::abs(p.b2()) <= l2);
  Rng again(2);
  CHECK(init_critic(d, again) == p);
}

TEST_CASE("critic backward") {
  Rng rng(3);
  const auto p = init_critic(4, rng);
  const std::vector<double> x{0.2, 0.5, 0.9, 0.1};
  CHECK(critic_backward(p, x).params.b2() == 1.0);

  auto dead = p;
  for (std::size_t h = 0; h < kCriticHidden; ++h) dead.b1(h) = -0.5;
  const auto g = critic_backward(dead, std::vector<double>(4, 0.0));
  CHECK(g.input == std::vector<double>(4, 0.0));

  // pre-activation exactly zero counts as inactive
  CriticParams tie(1);
  tie.w1(0, 0) = 1.0;
  tie.w2(0) = 2.0;
  CHECK(critic_backward(tie, std::vector<double>{0.0}).input[0] == 0.0);
  CHECK(critic_backward(tie, std::vector<double>{1e-9}).input[0] == 2.0);
  CHECK_THROWS_AS(critic_backward(tie, std::vector<double>{1, 2}), ConfigError);
}

TEST_CASE("property: critic gradients equal finite differences") {
  Rng rng(4);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t d = 1 + rng.below(6);
    auto p = init_critic(d, rng);
    const auto x = random_vector(rng, d, 0, 1);
    const auto g = critic_backward(p, x);

    const std::vector<double> theta(p.values().begin(), p.values().end());
    const auto fd_p = oracle::central_difference(
        [&](const std::vector<double>& v) {
          CriticParams q = p;
          std::copy(v.begin(), v.end(), q.values().begin());
          return critic_forward(q, x);
        },
        theta);
    for (std::size_t i = 0; i < theta.size(); ++i) CHECK(oracle::close(g.params.values()[i], fd_p[i], 1e-6, 1e-9));

    const auto fd_x = oracle::central_difference([&](const std::vector<double>& v) { return critic_forward(p, v); }, x);
    for (std::size_t i = 0; i < d; ++i) CHECK(oracle::close(g.input[i], fd_x[i], 1e-6, 1e-9));
  }
}

TEST_CASE("property: piecewise linear within an activation region") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = init_critic(3, rng);
    const auto x1 = random_vector(rng, 3, 0, 1);
    auto x2 = x1;
    for (auto& v : x2) v += rng.uniform(-1e-4, 1e-4);
    bool same_region = true;
    for (std::size_t h = 0; h < kCriticHidden; ++h) {
      double a = p.b1(h), b = p.b1(h);
      for (std::size_t i = 0; i < 3; ++i) {
        a += p.w1(h, i) * x1[i];
        b += p.w1(h, i) * x2[i];
      }
      same_region = same_region && ((a > 0) == (b > 0));
    }
    if (!same_region) continue;
    const double alpha = rng.uniform();
    std::vector<double> mix(3);
    for (std::size_t i = 0; i < 3; ++i) mix[i] = alpha * x1[i] + (1 - alpha) * x2[i];
    CHECK(critic_forward(p, mix) ==
          doctest::Approx(alpha * critic_forward(p, x1) + (1 - alpha) * critic_forward(p, x2)).epsilon(1e-12));
  }
}

TEST_CASE("weight clipping") {
  Rng rng(6);
  auto p = init_critic(2, rng);
  for (auto& v : p.values()) v *= 0.001;
  const auto before = p;
  clip_weights(p, 0.01);
  CHECK(p == before);

  p.w1(0, 0) = 0.7;
  p.w2(3) = -5;
  clip_weights(p, 0.01);
  CHECK(p.w1(0, 0) == 0.01);
  CHECK(p.w2(3) == -0.01);

  auto big = init_critic(5, rng);
  clip_weights(big, 0.02);
  for (double v : big.values()) CHECK(std::abs(v) <= 0.02);
  CHECK_THROWS_AS(clip_weights(big, 0.0), ConfigError);
  CHECK_THROWS_AS(clip_weights(big, -1.0), ConfigError);
}

TEST_CASE("adam") {
  std::vector<double> p{1.0, -2.0};
  auto st = AdamState::zeros(2);
  adam_step(p, std::vector<double>{0.0, 0.0}, st, 0.1);
  CHECK(p == std::vector<double>{1.0, -2.0});
  CHECK(st.step_count == 1);

  for (double scale : {1e-3, 1.0, 1e4}) {
    std::vector<double> q{0.0, 0.0};
    auto s = AdamState::zeros(2);
    adam_step(q, std::vector<double>{scale, -scale}, s, 0.05);
    CHECK(q[0] == doctest::Approx(-0.05).epsilon(1e-4));
    CHECK(q[1] == doctest::Approx(0.05).epsilon(1e-4));
  }

  CHECK_THROWS_AS(adam_step(p, std::vector<double>{1.0}, st, 0.1), ConfigError);
  CHECK_THROWS_AS(adam_step(p, std::vector<double>{1.0, 1.0}, st, 0.0), ConfigError);
}

TEST_CASE("adam matches the hand-iterated recurrence") {
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double grads[3] = {0.5, -1.5, 2.0};
  double theta = 0.3, m = 0, v = 0;
  std::vector<double> p{0.3};
  auto st = AdamState::zeros(1);
  for (int t = 1; t <= 3; ++t) {
    const double g = grads[t - 1];
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    theta -= lr * mh / (std::sqrt(vh) + eps);
    adam_step(p, std::vector<double>{g}, st, lr);
    CHECK(std::abs(p[0] - theta) < 1e-12);
    CHECK(std::abs(st.m[0] - m) < 1e-12);
    CHECK(std::abs(st.v[0] - v) < 1e-12);
    CHECK(st.v[0] >= 0);
  }
}
