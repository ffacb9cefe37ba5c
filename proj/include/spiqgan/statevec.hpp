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

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "spiqgan/rng.hpp"

namespace spiqgan {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 24;

enum class GateKind { RX, RY, RZ, CNOT };

/// One gate of the ansatz gate set. Rotations follow
/// R_A(angle) = exp(-i * angle * A / 2); `control` is only read for CNOT.
struct GateOp {
  GateKind kind = GateKind::RX;
  int target = 0;
  int control = -1;
  double angle = 0.0;

  static GateOp rx(int target, double angle) { return {GateKind::RX, target, -1, angle}; }
  static GateOp ry(int target, double angle) { return {GateKind::RY, target, -1, angle}; }
  static GateOp rz(int target, double angle) { return {GateKind::RZ, target, -1, angle}; }
  static GateOp cnot(int control, int target) { return {GateKind::CNOT, target, control, 0.0}; }

  bool operator==(const GateOp&) const = default;
};

/// Dense amplitude vector over `num_qubits` qubits. Qubit 0 is the least
/// significant bit of the basis index.
class StateVector {
 public:
  /// |0...0> on q qubits; throws ConfigError unless 1 <= q <= kMaxQubits.
  static StateVector zero(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  std::span<Complex> amplitudes() { return amplitudes_; }

  /// In-place gate application. Throws ConfigError on invalid indices.
  void apply(const GateOp& gate);
  void apply(std::span<const GateOp> gates);

  /// |a_b|^2 for every basis index b.
  std::vector<double> probabilities() const;

  /// Probability that `qubit` measures 1.
  double marginal_one(int qubit) const;

  /// Inverse-CDF draw of a basis index; returns the bit of each qubit
  /// (entry k is qubit k).
  std::vector<std::uint8_t> sample_bitstring(Rng& rng) const;

  double squared_norm() const;

 private:
  StateVector(int num_qubits, std::vector<Complex> amplitudes)
      : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {}

  void check_qubit(int qubit) const;

  int num_qubits_;
  std::vector<Complex> amplitudes_;
};

/// Functional forms used across the code base.
StateVector init_zero(int num_qubits);
StateVector apply_gate(StateVector state, const GateOp& gate);
StateVector apply_circuit(StateVector state, std::span<const GateOp> gates);

}  // namespace spiqgan
