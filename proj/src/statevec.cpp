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

#include "spiqgan/statevec.hpp"

#include <cmath>
#include <string>

#include "spiqgan/errors.hpp"

namespace spiqgan {

StateVector StateVector::zero(int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw ConfigError("qubit count " + std::to_string(num_qubits) + " outside [1, " +
                      std::to_string(kMaxQubits) + "]");
  }
  std::vector<Complex> amps(std::size_t{1} << num_qubits);
  amps[0] = Complex{1.0, 0.0};
  return StateVector(num_qubits, std::move(amps));
}

void StateVector::check_qubit(int qubit) const {
  if (qubit < 0 || qubit >= num_qubits_) {
    throw ConfigError("qubit index " + std::to_string(qubit) + " outside register of " +
                      std::to_string(num_qubits_));
  }
}

void StateVector::apply(const GateOp& gate) {
  check_qubit(gate.target);
  const std::size_t stride = std::size_t{1} << gate.target;
  const std::size_t dim = amplitudes_.size();
  Complex* a = amplitudes_.data();

  switch (gate.kind) {
    case GateKind::RX: {
      // [[c, -is], [-is, c]]
      const double c = std::cos(gate.angle / 2);
      const double s = std::sin(gate.angle / 2);
      for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
          const Complex a0 = a[i];
          const Complex a1 = a[i + stride];
          a[i] = c * a0 + Complex{s * a1.imag(), -s * a1.real()};
          a[i + stride] = Complex{s * a0.imag(), -s * a0.real()} + c * a1;
        }
      }
      break;
    }
    case GateKind::RY: {
      // [[c, -s], [s, c]]
      const double c = std::cos(gate.angle / 2);
      const double s = std::sin(gate.angle / 2);
      for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
          const Complex a0 = a[i];
          const Complex a1 = a[i + stride];
          a[i] = c * a0 - s * a1;
          a[i + stride] = s * a0 + c * a1;
        }
      }
      break;
    }
    case GateKind::RZ: {
      // diag(e^{-i angle/2}, e^{+i angle/2})
      const Complex lo = std::polar(1.0, -gate.angle / 2);
      const Complex hi = std::polar(1.0, gate.angle / 2);
      for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
          a[i] *= lo;
          a[i + stride] *= hi;
        }
      }
      break;
    }
    case GateKind::CNOT: {
      check_qubit(gate.control);
      if (gate.control == gate.target) throw ConfigError("CNOT control equals target");
      const std::size_t cmask = std::size_t{1} << gate.control;
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cmask) && !(i & stride)) std::swap(a[i], a[i | stride]);
      }
      break;
    }
  }
}

void StateVector::apply(std::span<const GateOp> gates) {
  for (const GateOp& g : gates) apply(g);
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(amplitudes_.size());
  for (std::size_t b = 0; b < p.size(); ++b) p[b] = std::norm(amplitudes_[b]);
  return p;
}

double StateVector::marginal_one(int qubit) const {
  check_qubit(qubit);
  const std::size_t mask = std::size_t{1} << qubit;
  double p = 0.0;
  for (std::size_t b = 0; b < amplitudes_.size(); ++b) {
    if (b & mask) p += std::norm(amplitudes_[b]);
  }
  return p;
}

std::vector<std::uint8_t> StateVector::sample_bitstring(Rng& rng) const {
  const double u = rng.uniform();
  double cdf = 0.0;
  std::size_t chosen = amplitudes_.size() - 1;
  for (std::size_t b = 0; b < amplitudes_.size(); ++b) {
    cdf += std::norm(amplitudes_[b]);
    if (u < cdf) {
      chosen = b;
      break;
    }
  }
  // Rounding can leave cdf slightly below 1; fall back to the last state
  // with nonzero weight rather than one with zero probability.
  if (u >= cdf) {
    while (chosen > 0 && std::norm(amplitudes_[chosen]) == 0.0) --chosen;
  }
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(num_qubits_));
  for (int k = 0; k < num_qubits_; ++k) bits[k] = static_cast<std::uint8_t>((chosen >> k) & 1U);
  return bits;
}

double StateVector::squared_norm() const {
  double s = 0.0;
  for (const Complex& c : amplitudes_) s += std::norm(c);
  return s;
}

StateVector init_zero(int num_qubits) { return StateVector::zero(num_qubits); }

StateVector apply_gate(StateVector state, const GateOp& gate) {
  state.apply(gate);
  return state;
}

StateVector apply_circuit(StateVector state, std::span<const GateOp> gates) {
  state.apply(gates);
  return state;
}

}  // namespace spiqgan
