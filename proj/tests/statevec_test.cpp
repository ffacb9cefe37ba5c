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

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "spiqgan/errors.hpp"
#include "spiqgan/statevec.hpp"

using namespace spiqgan;
using std::numbers::pi;

TEST_CASE("zero state") {
  auto s1 = StateVector::zero(1);
  CHECK(s1.dimension() == 2);
  CHECK(s1.amplitudes()[0] == Complex(1, 0));
  CHECK(s1.amplitudes()[1] == Complex(0, 0));
  auto s2 = init_zero(2);
  CHECK(s2.dimension() == 4);
  CHECK(s2.probabilities() == std::vector<double>{1, 0, 0, 0});
  CHECK_THROWS_AS(StateVector::zero(25), ConfigError);
  CHECK_THROWS_AS(StateVector::zero(0), ConfigError);
  CHECK_NOTHROW(StateVector::zero(kMaxQubits));
}

TEST_CASE("single gates") {
  auto s = apply_gate(init_zero(1), GateOp::rx(0, pi));
  CHECK(std::abs(s.amplitudes()[0]) < 1e-15);
  CHECK(std::abs(s.amplitudes()[1] - Complex(0, -1)) < 1e-15);
  CHECK(s.marginal_one(0) == doctest::Approx(1.0));

  auto r = apply_gate(init_zero(1), GateOp::ry(0, pi / 3));
  CHECK(r.marginal_one(0) == doctest::Approx(0.25).epsilon(1e-14));

  // |q1=0, q0=1> -> |q1=1, q0=1>
  auto c = apply_circuit(init_zero(2), std::vector{GateOp::rx(0, pi), GateOp::cnot(0, 1)});
  const auto p = c.probabilities();
  CHECK(p[3] == doctest::Approx(1.0));
  CHECK(p[1] < 1e-30);
}

TEST_CASE("invalid gates") {
  auto s = init_zero(2);
  CHECK_THROWS_AS(s.apply(GateOp::rx(2, 1.0)), ConfigError);
  CHECK_THROWS_AS(s.apply(GateOp::rx(-1, 1.0)), ConfigError);
  CHECK_THROWS_AS(s.apply(GateOp::cnot(1, 1)), ConfigError);
  CHECK_THROWS_AS(s.apply(GateOp::cnot(2, 0)), ConfigError);
  CHECK_THROWS_AS(s.marginal_one(5), ConfigError);
}

TEST_CASE("circuits") {
  auto s = apply_circuit(init_zero(3), std::vector<GateOp>{});
  CHECK(s.probabilities()[0] == 1.0);
  auto back = apply_circuit(init_zero(1), std::vector{GateOp::rx(0, pi), GateOp::rx(0, pi)});
  CHECK(back.probabilities()[0] == doctest::Approx(1.0).epsilon(1e-15));

  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const auto gates = oracle::random_circuit(rng, 4, 10);
    const auto got = apply_circuit(init_zero(4), gates);
    const auto want = oracle::run_dense(gates, 4);
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(got.amplitudes()[i] - want[i]) < 1e-10);
  }
}

TEST_CASE("3-qubit 12-gate circuit equals the dense product") {
  Rng rng(3);
  const auto gates = oracle::random_circuit(rng, 3, 12);
  const auto got = apply_circuit(init_zero(3), gates);
  const auto want = oracle::run_dense(gates, 3);
  for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(got.amplitudes()[i] - want[i]) < 1e-10);
}

TEST_CASE("property: oracle equivalence and norm over random circuits") {
  Rng rng(11);
  for (int rep = 0; rep < 150; ++rep) {
    const int q = 1 + static_cast<int>(rng.below(4));
    const int len = static_cast<int>(rng.below(21));
    const auto gates = oracle::random_circuit(rng, q, len);
    const auto got = apply_circuit(init_zero(q), gates);
    const auto want = oracle::run_dense(gates, q);
    double worst = 0;
    for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(got.amplitudes()[i] - want[i]));
    CHECK(worst < 1e-10);
    CHECK(std::abs(got.squared_norm() - 1.0) < 1e-10);
  }
}

TEST_CASE("probabilities") {
  CHECK(init_zero(1).probabilities() == std::vector<double>{1, 0});
  auto h = apply_gate(init_zero(1), GateOp::rx(0, pi / 2));
  CHECK(h.probabilities()[0] == doctest::Approx(0.5));
  CHECK(h.probabilities()[1] == doctest::Approx(0.5));

  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = apply_circuit(init_zero(3), oracle::random_circuit(rng, 3, 15));
    double sum = 0;
    for (double v : s.probabilities()) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-10);
  }
}

TEST_CASE("marginals") {
  auto z = init_zero(3);
  for (int q = 0; q < 3; ++q) CHECK(z.marginal_one(q) == 0.0);

  auto s = apply_gate(init_zero(2), GateOp::ry(0, pi / 2));
  CHECK(s.marginal_one(0) == doctest::Approx(0.5));
  CHECK(s.marginal_one(1) == doctest::Approx(0.0));

  Rng rng(8);
  const auto r = apply_circuit(init_zero(4), oracle::random_circuit(rng, 4, 20));
  const auto p = r.probabilities();
  for (int q = 0; q < 4; ++q) {
    double want = 0;
    for (std::size_t b = 0; b < p.size(); ++b)
      if ((b >> q) & 1) want += p[b];
    CHECK(r.marginal_one(q) == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("sampling") {
  Rng rng(1);
  const auto z = init_zero(3);
  for (int i = 0; i < 50; ++i) CHECK(z.sample_bitstring(rng) == std::vector<std::uint8_t>{0, 0, 0});

  const auto x = apply_gate(init_zero(2), GateOp::rx(0, pi));
  for (int i = 0; i < 50; ++i) CHECK(x.sample_bitstring(rng) == std::vector<std::uint8_t>{1, 0});

  const auto h = apply_gate(init_zero(1), GateOp::rx(0, pi / 2));
  const int draws = 100000;
  int ones = 0;
  for (int i = 0; i < draws; ++i) ones += h.sample_bitstring(rng)[0];
  const double sigma = std::sqrt(0.25 / draws);
  CHECK(std::abs(ones / double(draws) - 0.5) < std::min(0.01, 3 * sigma + 1e-3));

  Rng a(42), b(42);
  const auto s = apply_circuit(init_zero(3), oracle::random_circuit(a, 3, 10));
  Rng d1(9), d2(9);
  for (int i = 0; i < 20; ++i) CHECK(s.sample_bitstring(d1) == s.sample_bitstring(d2));
}

TEST_CASE("property: rotation identities and global phase") {
  Rng rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const auto base = apply_circuit(init_zero(3), oracle::random_circuit(rng, 3, 8));
    for (auto kind : {GateKind::RX, GateKind::RY, GateKind::RZ}) {
      for (double angle : {0.0, 4 * pi}) {
        const auto out = apply_gate(base, GateOp{kind, static_cast<int>(rng.below(3)), -1, angle});
        for (std::size_t i = 0; i < base.dimension(); ++i)
          CHECK(std::abs(out.amplitudes()[i] - base.amplitudes()[i]) < 1e-12);
      }
      const auto half = apply_gate(base, GateOp{kind, 0, -1, 2 * pi});
      const auto p0 = base.probabilities();
      const auto p1 = half.probabilities();
      for (std::size_t i = 0; i < p0.size(); ++i) CHECK(std::abs(p0[i] - p1[i]) < 1e-12);
    }
    auto phased = base;
    const Complex phase = std::polar(1.0, rng.uniform(0, 2 * pi));
    for (auto& a : phased.amplitudes()) a *= phase;
    const auto p0 = base.probabilities();
    const auto p1 = phased.probabilities();
    for (std::size_t i = 0; i < p0.size(); ++i) CHECK(std::abs(p0[i] - p1[i]) < 1e-12);
  }
}
