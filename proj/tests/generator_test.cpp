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
#include <numbers>

#include "oracles.hpp"
#include "spiqgan/errors.hpp"
#include "spiqgan/generator.hpp"
#include "spiqgan/spikedata.hpp"

using namespace spiqgan;
using std::numbers::pi;

namespace {

GeneratorConfig make_cfg(int n, int layers, int t, int aux = 0) {
  GeneratorConfig cfg;
  cfg.n_feature = n;
  cfg.n_layers = layers;
  cfg.n_patches = t;
  cfg.n_aux = aux;
  return cfg;
}

NoiseVector zero_noise(const GeneratorConfig& cfg) {
  return NoiseVector{std::vector<double>(cfg.noise_per_patch() * cfg.n_patches, 0.0)};
}

GeneratorParams zero_params(const GeneratorConfig& cfg) {
  return GeneratorParams{std::vector<double>(cfg.param_count(), 0.0)};
}

// Marginals of every patch, recomputed gate by gate from the dense oracle.
std::vector<double> oracle_forward(const GeneratorConfig& cfg, const std::vector<double>& theta,
                                   const NoiseVector& noise) {
  std::vector<double> out;
  const int q = cfg.qubits_per_patch();
  for (int p = 0; p < cfg.n_patches; ++p) {
    std::vector<GateOp> gates;
    for (int l = 0; l < cfg.n_layers; ++l) {
      const std::size_t row = cfg.fresh_noise_per_layer ? l : 0;
      for (int k = 0; k < q; ++k) gates.push_back(GateOp::rx(k, noise.z[(p * cfg.noise_rows() + row) * q + k]));
      for (int k = 0; k < q; ++k) {
        gates.push_back(GateOp::ry(k, theta[GeneratorParams::index(cfg, p, l, k, 0)]));
        gates.push_back(GateOp::rz(k, theta[GeneratorParams::index(cfg, p, l, k, 1)]));
      }
      for (int k = 0; k + 1 < q; ++k) gates.push_back(GateOp::cnot(k, k + 1));
    }
    const auto amp = oracle::run_dense(gates, q);
    for (int k = 0; k < cfg.n_feature; ++k) {
      double m = 0;
      for (std::size_t b = 0; b < amp.size(); ++b)
        if ((b >> k) & 1) m += std::norm(amp[b]);
      out.push_back(m);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("parameter counts") {
  Rng rng(1);
  CHECK(init_params(make_cfg(2, 4, 1), rng).theta.size() == 16);
  CHECK(init_params(make_cfg(10, 4, 30), rng).theta.size() == 2400);
  for (int n : {2, 4, 6, 8, 10})
    for (int t : {1, 2, 5, 10, 20, 30}) CHECK(make_cfg(n, 4, t).param_count() == std::size_t(8 * n * t));
  CHECK(make_cfg(3, 2, 2, 1).param_count() == std::size_t(2 * 2 * 4 * 2));

  GeneratorConfig defaults;
  CHECK(defaults.n_layers == 4);
  CHECK(defaults.n_aux == 0);
  CHECK(defaults.noise_low == 0.0);
  CHECK(defaults.noise_high == pi);
}

TEST_CASE("init_params") {
  const auto cfg = make_cfg(3, 4, 2);
  Rng a(9), b(9);
  const auto pa = init_params(cfg, a);
  CHECK(pa == init_params(cfg, b));
  for (double v : pa.theta) {
    CHECK(v >= 0.0);
    CHECK(v < 2 * pi);
  }
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(make_cfg(0, 4, 1).validate(), ConfigError);
  CHECK_THROWS_AS(make_cfg(2, 0, 1).validate(), ConfigError);
  CHECK_THROWS_AS(make_cfg(2, 4, 0).validate(), ConfigError);
  CHECK_THROWS_AS(make_cfg(2, 4, 1, -1).validate(), ConfigError);
  CHECK_THROWS_AS(make_cfg(20, 4, 1, 5).validate(), ConfigError);
  CHECK_NOTHROW(make_cfg(20, 4, 1, 4).validate());
  auto bad = make_cfg(2, 4, 1);
  bad.noise_high = bad.noise_low - 0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("noise") {
  auto cfg = make_cfg(3, 2, 4);
  Rng rng(3);
  const auto noise = draw_noise(cfg, rng);
  CHECK(noise.z.size() == 12);
  for (double z : noise.z) {
    CHECK(z >= 0.0);
    CHECK(z <= pi);
  }
  cfg.noise_sharing = NoiseSharing::kShared;
  const auto shared = draw_noise(cfg, rng);
  for (int p = 1; p < 4; ++p) CHECK(std::ranges::equal(shared.patch(cfg, p), shared.patch(cfg, 0)));
  cfg.fresh_noise_per_layer = true;
  CHECK(draw_noise(cfg, rng).z.size() == 4 * 2 * 3);
}

TEST_CASE("build_patch_circuit") {
  auto c1 = make_cfg(1, 1, 1);
  const std::vector<double> th1{0.3, 0.4};
  const std::vector<double> z1{0.7};
  const auto g1 = build_patch_circuit(c1, th1, z1);
  REQUIRE(g1.size() == 3);
  CHECK(g1[0] == GateOp::rx(0, 0.7));
  CHECK(g1[1] == GateOp::ry(0, 0.3));
  CHECK(g1[2] == GateOp::rz(0, 0.4));

  auto c3 = make_cfg(3, 2, 1);
  const std::vector<double> th(c3.params_per_patch(), 0.1);
  const std::vector<double> z{1, 2, 3};
  const auto g = build_patch_circuit(c3, th, z);
  CHECK(g.size() == 22);
  // layer layout: 3 RX, then RY/RZ per qubit, then CNOT(0,1), CNOT(1,2)
  CHECK(g[0] == GateOp::rx(0, 1));
  CHECK(g[2] == GateOp::rx(2, 3));
  CHECK(g[3].kind == GateKind::RY);
  CHECK(g[4].kind == GateKind::RZ);
  CHECK(g[9] == GateOp::cnot(0, 1));
  CHECK(g[10] == GateOp::cnot(1, 2));
  CHECK(g[11] == GateOp::rx(0, 1));

  const auto zero = patch_state(c3, std::vector<double>(c3.params_per_patch(), 0.0), std::vector<double>(3, 0.0));
  CHECK(std::abs(zero.probabilities()[0] - 1.0) < 1e-15);

  CHECK_THROWS_AS(build_patch_circuit(c3, std::vector<double>(5, 0.0), z), ConfigError);
  CHECK_THROWS_AS(build_patch_circuit(c3, th, std::vector<double>(2, 0.0)), ConfigError);
}

TEST_CASE("patch marginals") {
  auto cfg = make_cfg(2, 3, 1);
  const auto zero = patch_marginals(cfg, std::vector<double>(cfg.params_per_patch(), 0.0), std::vector<double>(2, 0.0));
  CHECK(zero == std::vector<double>{0.0, 0.0});

  auto one = make_cfg(1, 1, 1);
  CHECK(patch_marginals(one, std::vector<double>{0, 0}, std::vector<double>{pi})[0] == doctest::Approx(1.0));

  auto c3 = make_cfg(3, 2, 1);
  Rng rng(4);
  const auto params = init_params(c3, rng);
  const auto noise = draw_noise(c3, rng);
  const auto got = patch_marginals(c3, params.theta, noise.z);
  const auto state = patch_state(c3, params.theta, noise.z);
  const auto p = state.probabilities();
  for (int k = 0; k < 3; ++k) {
    double want = 0;
    for (std::size_t b = 0; b < p.size(); ++b)
      if ((b >> k) & 1) want += p[b];
    CHECK(got[k] == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("auxiliary qubits are traced out") {
  auto cfg = make_cfg(2, 2, 1, 1);
  Rng rng(6);
  const auto params = init_params(cfg, rng);
  const auto noise = draw_noise(cfg, rng);
  const auto dist = patch_feature_distribution(cfg, params.theta, noise.z);
  REQUIRE(dist.size() == 4);
  const auto full = patch_state(cfg, params.theta, noise.z).probabilities();
  REQUIRE(full.size() == 8);
  for (std::size_t f = 0; f < 4; ++f) CHECK(dist[f] == doctest::Approx(full[f] + full[f + 4]).epsilon(1e-13));
  const auto m = patch_marginals(cfg, params.theta, noise.z);
  CHECK(m.size() == 2);
  CHECK(m[0] == doctest::Approx(dist[1] + dist[3]));
  CHECK(m[1] == doctest::Approx(dist[2] + dist[3]));
}

TEST_CASE("generator_forward") {
  Rng rng(12);
  auto c1 = make_cfg(2, 4, 1);
  const auto p1 = init_params(c1, rng);
  const auto z1 = draw_noise(c1, rng);
  CHECK(generator_forward(c1, p1, z1) == patch_marginals(c1, p1.theta, z1.z));

  auto c2 = make_cfg(2, 4, 2);
  auto p2 = init_params(c2, rng);
  auto z2 = draw_noise(c2, rng);
  std::fill(p2.theta.begin() + c2.params_per_patch(), p2.theta.end(), 0.0);
  std::fill(z2.z.begin() + c2.noise_per_patch(), z2.z.end(), 0.0);
  const auto out2 = generator_forward(c2, p2, z2);
  CHECK(out2[2] == 0.0);
  CHECK(out2[3] == 0.0);

  auto c3 = make_cfg(2, 4, 3);
  CHECK(generator_forward(c3, init_params(c3, rng), draw_noise(c3, rng)).size() == 6);
}

TEST_CASE("property: forward matches the dense oracle and stays in [0, 1]") {
  Rng rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    auto cfg = make_cfg(1 + rng.below(3), 1 + rng.below(3), 1 + rng.below(2), rng.below(2));
    cfg.fresh_noise_per_layer = rep % 3 == 0;
    const auto params = init_params(cfg, rng);
    const auto noise = draw_noise(cfg, rng);
    const auto got = generator_forward(cfg, params, noise);
    const auto want = oracle_forward(cfg, params.theta, noise);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(std::abs(got[i] - want[i]) < 1e-12);
      CHECK(got[i] >= 0.0);
      CHECK(got[i] <= 1.0);
    }
  }
}

TEST_CASE("property: patch independence") {
  Rng rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    auto cfg = make_cfg(2, 2, 3);
    auto params = init_params(cfg, rng);
    const auto noise = draw_noise(cfg, rng);
    const auto before = generator_forward(cfg, params, noise);
    const int p = static_cast<int>(rng.below(3));
    params.theta[GeneratorParams::index(cfg, p, 1, 0, 0)] += 0.9;
    const auto after = generator_forward(cfg, params, noise);
    for (int q = 0; q < 3; ++q)
      for (int k = 0; k < 2; ++k)
        if (q != p) CHECK(after[q * 2 + k] == before[q * 2 + k]);
  }
}

TEST_CASE("generator_sample") {
  Rng rng(2);
  auto c = make_cfg(2, 3, 2);
  const auto zeros = generator_sample(c, zero_params(c), zero_noise(c), rng);
  CHECK(zeros == BinaryMatrix(2, 2));

  auto one = make_cfg(1, 1, 1);
  const auto m = generator_sample(one, zero_params(one), NoiseVector{{pi}}, rng);
  REQUIRE(m.rows() == 1);
  CHECK(m(0, 0) == 1);

  Rng a(77), b(77), ra(5), rb(5);
  const auto params = init_params(c, a);
  const auto noise = draw_noise(c, b);
  for (int i = 0; i < 10; ++i) CHECK(generator_sample(c, params, noise, ra) == generator_sample(c, params, noise, rb));
}

TEST_CASE("sampled states follow the patch distribution") {
  auto cfg = make_cfg(2, 4, 1);
  Rng rng(40);
  const auto params = init_params(cfg, rng);
  const auto noise = draw_noise(cfg, rng);
  const auto dist = patch_feature_distribution(cfg, params.theta, noise.z);
  const int draws = 100000;
  std::vector<double> freq(4, 0.0);
  for (int i = 0; i < draws; ++i) {
    const auto w = generator_sample(cfg, params, noise, rng);
    freq[w(0, 0) + 2 * w(1, 0)] += 1.0 / draws;
  }
  CHECK(oracle::within_3sigma(freq, dist, draws));
}

TEST_CASE("parameter-shift gradient") {
  Rng rng(50);
  auto cfg = make_cfg(2, 2, 2);
  const auto params = init_params(cfg, rng);
  const auto noise = draw_noise(cfg, rng);
  const auto g0 = param_shift_gradient(cfg, params, noise, std::vector<double>(4, 0.0));
  CHECK(g0 == std::vector<double>(cfg.param_count(), 0.0));
  CHECK_THROWS_AS(param_shift_gradient(cfg, params, noise, std::vector<double>(3, 1.0)), ConfigError);

  // n=1, L=1 at theta=0, z=0: m(a) = sin^2(a/2), dm/da = sin(a)/2
  auto one = make_cfg(1, 1, 1);
  for (double a : {0.0, 0.4, 1.3}) {
    const GeneratorParams p{{a, 0.2}};
    const NoiseVector z{{0.0}};
    const auto g = param_shift_gradient(one, p, z, std::vector<double>{1.0});
    const auto fd = oracle::central_difference(
        [&](const std::vector<double>& th) { return generator_forward(one, GeneratorParams{th}, z)[0]; }, p.theta);
    CHECK(oracle::close(g[0], fd[0], 1e-6, 1e-9));
    CHECK(g[0] == doctest::Approx(0.5 * std::sin(a)).epsilon(1e-12));
    CHECK(std::abs(g[1]) < 1e-12);
  }
}

TEST_CASE("property: parameter shift equals finite differences") {
  Rng rng(60);
  for (int rep = 0; rep < 24; ++rep) {
    auto cfg = make_cfg(1 + rng.below(3), 1 + rng.below(3), 1 + rng.below(2));
    if (rep == 0) cfg = make_cfg(3, 2, 2);
    cfg.n_aux = rep % 5 == 4 ? 1 : 0;
    const auto params = init_params(cfg, rng);
    const auto noise = draw_noise(cfg, rng);
    std::vector<double> upstream(cfg.output_size());
    for (auto& u : upstream) u = rng.uniform(-1, 1);
    const auto g = param_shift_gradient(cfg, params, noise, upstream);
    const auto fd = oracle::central_difference(
        [&](const std::vector<double>& th) {
          const auto out = generator_forward(cfg, GeneratorParams{th}, noise);
          double s = 0;
          for (std::size_t i = 0; i < out.size(); ++i) s += upstream[i] * out[i];
          return s;
        },
        params.theta);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(oracle::close(g[i], fd[i], 1e-5, 1e-8));
  }
}

TEST_CASE("accumulate adds into an existing gradient") {
  Rng rng(61);
  auto cfg = make_cfg(2, 2, 1);
  const auto params = init_params(cfg, rng);
  const auto noise = draw_noise(cfg, rng);
  const std::vector<double> up{0.3, -0.2};
  const auto g = param_shift_gradient(cfg, params, noise, up);
  std::vector<double> acc(g.size(), 1.0);
  accumulate_param_shift_gradient(cfg, params, noise, up, acc);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(acc[i] == doctest::Approx(1.0 + g[i]));
}

TEST_CASE("state distribution by quadrature matches a midpoint rule") {
  auto cfg = make_cfg(2, 2, 1);
  Rng rng(70);
  const auto params = init_params(cfg, rng);
  REQUIRE(state_distribution_uses_quadrature(cfg));
  const auto dist = generator_state_distribution(cfg, params, rng);
  REQUIRE(dist.size() == 4);

  // composite Simpson rule on both noise angles
  const int grid = 200;
  const double h = pi / grid;
  auto weight = [&](int i) { return (i == 0 || i == grid) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
  std::vector<double> want(4, 0.0);
  for (int a = 0; a <= grid; ++a) {
    for (int b = 0; b <= grid; ++b) {
      const std::vector<double> z{a * h, b * h};
      const double w = weight(a) * weight(b) * (h / 3) * (h / 3) / (pi * pi);
      const auto f = patch_feature_distribution(cfg, params.theta, z);
      // feature bit k of f vs state index with neuron 0 as the high bit
      for (std::size_t s = 0; s < 4; ++s) want[((s & 1) << 1) | (s >> 1)] += w * f[s];
    }
  }
  for (std::size_t s = 0; s < 4; ++s) CHECK(std::abs(dist[s] - want[s]) < 1e-6);
}

TEST_CASE("state distribution factorizes across independent patches") {
  auto cfg = make_cfg(1, 2, 2);
  Rng rng(71);
  const auto params = init_params(cfg, rng);
  const auto joint = generator_state_distribution(cfg, params, rng);
  auto single = make_cfg(1, 2, 1);
  const auto p0 = generator_state_distribution(single, GeneratorParams{{params.theta.begin(), params.theta.begin() + 4}}, rng);
  const auto p1 = generator_state_distribution(single, GeneratorParams{{params.theta.begin() + 4, params.theta.end()}}, rng);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) CHECK(joint[a * 2 + b] == doctest::Approx(p0[a] * p1[b]).epsilon(1e-12));

  cfg.noise_sharing = NoiseSharing::kShared;
  const auto shared = generator_state_distribution(cfg, params, rng);
  double sum = 0;
  for (double v : shared) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("state distribution matches sampled windows") {
  auto cfg = make_cfg(2, 2, 2);
  Rng rng(72);
  const auto params = init_params(cfg, rng);
  const auto dist = generator_state_distribution(cfg, params, rng);
  const int draws = 100000;
  std::vector<double> freq(16, 0.0);
  for (int i = 0; i < draws; ++i) {
    const auto noise = draw_noise(cfg, rng);
    freq[state_index(generator_sample(cfg, params, noise, rng))] += 1.0 / draws;
  }
  CHECK(oracle::chi_square_3sigma(freq, dist, draws));
}

TEST_CASE("Monte-Carlo fallback") {
  auto cfg = make_cfg(4, 2, 1);
  CHECK_FALSE(state_distribution_uses_quadrature(cfg));
  Rng init(73);
  const auto params = init_params(cfg, init);
  Rng a(1), b(1);
  const auto da = generator_state_distribution(cfg, params, a, 256);
  CHECK(da == generator_state_distribution(cfg, params, b, 256));
  double sum = 0;
  for (double v : da) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(generator_state_distribution(make_cfg(7, 2, 3), init_params(make_cfg(7, 2, 3), init), a),
                  ConfigError);
}
