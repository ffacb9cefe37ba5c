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
#include <numbers>
#include <span>
#include <vector>

#include "spiqgan/binary_matrix.hpp"
#include "spiqgan/rng.hpp"
#include "spiqgan/statevec.hpp"

namespace spiqgan {

/// How noise angles are shared between the sub-generators of one sample.
enum class NoiseSharing {
  kPerPatch,  // every patch draws its own angles
  kShared,    // one draw is fed to every patch
};

/// Shape of the patch generator: `n_patches` sub-circuits of
/// `n_feature + n_aux` qubits, each with `n_layers` re-uploading layers.
struct GeneratorConfig {
  int n_feature = 2;
  int n_aux = 0;
  int n_layers = 4;
  int n_patches = 1;
  double noise_low = 0.0;
  double noise_high = std::numbers::pi;
  // Draw separate noise angles for every layer instead of re-uploading one.
  bool fresh_noise_per_layer = false;
  NoiseSharing noise_sharing = NoiseSharing::kPerPatch;

  int qubits_per_patch() const { return n_feature + n_aux; }
  std::size_t output_size() const { return static_cast<std::size_t>(n_feature) * n_patches; }
  std::size_t params_per_patch() const {
    return static_cast<std::size_t>(n_layers) * qubits_per_patch() * 2;
  }
  std::size_t param_count() const { return params_per_patch() * n_patches; }
  std::size_t noise_rows() const { return fresh_noise_per_layer ? n_layers : 1; }
  std::size_t noise_per_patch() const { return noise_rows() * qubits_per_patch(); }

  /// Throws ConfigError when a field is out of range.
  void validate() const;

  bool operator==(const GeneratorConfig&) const = default;
};

/// Rotation angles laid out [patch][layer][qubit][axis]; axis 0 drives RY,
/// axis 1 drives RZ.
struct GeneratorParams {
  std::vector<double> theta;

  static std::size_t index(const GeneratorConfig& cfg, int patch, int layer, int qubit, int axis) {
    return ((static_cast<std::size_t>(patch) * cfg.n_layers + layer) * cfg.qubits_per_patch() + qubit) * 2 +
           axis;
  }
  std::span<const double> patch(const GeneratorConfig& cfg, int p) const {
    return std::span<const double>(theta).subspan(p * cfg.params_per_patch(), cfg.params_per_patch());
  }

  bool operator==(const GeneratorParams&) const = default;
};

/// Encoding angles laid out [patch][row][qubit], where there is one row
/// unless `fresh_noise_per_layer` is set.
struct NoiseVector {
  std::vector<double> z;

  std::span<const double> patch(const GeneratorConfig& cfg, int p) const {
    return std::span<const double>(z).subspan(p * cfg.noise_per_patch(), cfg.noise_per_patch());
  }
};

/// Every angle i.i.d. uniform in [0, 2*pi).
GeneratorParams init_params(const GeneratorConfig& cfg, Rng& rng);

/// Draws one patch worth of noise angles into `out` (size noise_per_patch).
void draw_patch_noise(const GeneratorConfig& cfg, Rng& rng, std::span<double> out);

/// Draws a full noise vector from a single stream, honouring noise_sharing.
NoiseVector draw_noise(const GeneratorConfig& cfg, Rng& rng);

/// Gate list for one sub-generator: per layer, RX(z) on every qubit, then
/// RY, RZ on every qubit, then a CNOT chain (k, k+1) without wraparound.
std::vector<GateOp> build_patch_circuit(const GeneratorConfig& cfg, std::span<const double> params_patch,
                                        std::span<const double> z_patch);

StateVector patch_state(const GeneratorConfig& cfg, std::span<const double> params_patch,
                        std::span<const double> z_patch);

/// P(feature qubit k = 1) for k in [0, n_feature).
std::vector<double> patch_marginals(const GeneratorConfig& cfg, std::span<const double> params_patch,
                                    std::span<const double> z_patch);

/// Joint distribution of the feature bits of one patch (auxiliary qubits
/// traced out), indexed by the integer whose bit k is feature qubit k.
std::vector<double> patch_feature_distribution(const GeneratorConfig& cfg, std::span<const double> params_patch,
                                               std::span<const double> z_patch);

/// Concatenated patch marginals, patch-major (entry p * n_feature + k).
std::vector<double> generator_forward(const GeneratorConfig& cfg, const GeneratorParams& params,
                                      const NoiseVector& noise);

/// One sampled spike window: n_feature x n_patches, one bitstring per patch.
BinaryMatrix generator_sample(const GeneratorConfig& cfg, const GeneratorParams& params,
                              const NoiseVector& noise, Rng& rng);

/// sum_i upstream[i] * d forward[i] / d theta via the two-term shift rule.
/// Result has the layout of GeneratorParams::theta.
std::vector<double> param_shift_gradient(const GeneratorConfig& cfg, const GeneratorParams& params,
                                         const NoiseVector& noise, std::span<const double> upstream);

/// Adds param_shift_gradient(...) into `grad` without allocating a result.
void accumulate_param_shift_gradient(const GeneratorConfig& cfg, const GeneratorParams& params,
                                     const NoiseVector& noise, std::span<const double> upstream,
                                     std::span<double> grad);

/// Distribution of sampled n_feature x n_patches windows, averaged over the
/// noise prior, in state-index order (neuron 0 of bin 0 is the most
/// significant bit). Requires n_feature * n_patches <= 20.
///
/// Uses tensor Gauss-Legendre quadrature over the noise angles when the
/// integration dimension is at most 3 and the circuit is shallow enough for
/// the rule to be exact to double precision; otherwise averages
/// `mc_draws` noise draws from `rng`.
std::vector<double> generator_state_distribution(const GeneratorConfig& cfg, const GeneratorParams& params,
                                                 Rng& rng, int mc_draws = 4096);

/// True when generator_state_distribution integrates by quadrature.
bool state_distribution_uses_quadrature(const GeneratorConfig& cfg);

}  // namespace spiqgan
