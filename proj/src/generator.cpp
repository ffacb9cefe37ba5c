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

#include "spiqgan/generator.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "spiqgan/errors.hpp"

namespace spiqgan {
namespace {

constexpr double kShift = std::numbers::pi / 2;
constexpr int kQuadratureNodes = 30;
constexpr int kMaxQuadratureDims = 3;
constexpr int kMaxStateBits = 20;
// A 30-point rule integrates cos(L z) over a half period to double precision
// for L up to about 8.
constexpr int kMaxQuadratureFrequency = 8;

void check_slices(const GeneratorConfig& cfg, std::span<const double> params_patch,
                  std::span<const double> z_patch) {
  if (params_patch.size() != cfg.params_per_patch()) {
    throw ConfigError("patch parameter slice has " + std::to_string(params_patch.size()) + " entries, expected " +
                      std::to_string(cfg.params_per_patch()));
  }
  if (z_patch.size() != cfg.noise_per_patch()) {
    throw ConfigError("patch noise slice has " + std::to_string(z_patch.size()) + " entries, expected " +
                      std::to_string(cfg.noise_per_patch()));
  }
}

void check_full(const GeneratorConfig& cfg, const GeneratorParams& params, const NoiseVector& noise) {
  if (params.theta.size() != cfg.param_count()) {
    throw ConfigError("generator parameter tensor has " + std::to_string(params.theta.size()) +
                      " entries, expected " + std::to_string(cfg.param_count()));
  }
  if (noise.z.size() != cfg.noise_per_patch() * cfg.n_patches) {
    throw ConfigError("noise vector has " + std::to_string(noise.z.size()) + " entries, expected " +
                      std::to_string(cfg.noise_per_patch() * cfg.n_patches));
  }
}

// Feature bits of patch-local index f, rewritten so that neuron 0 is the
// most significant of the n_feature bits.
std::size_t reverse_feature_bits(std::size_t f, int n_feature) {
  std::size_t out = 0;
  for (int k = 0; k < n_feature; ++k) {
    if ((f >> k) & 1U) out |= std::size_t{1} << (n_feature - 1 - k);
  }
  return out;
}

// Nodes and averaging weights of a Gauss-Legendre rule on [lo, hi].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Rule gauss_rule(double lo, double hi) {
  using Gauss = boost::math::quadrature::gauss<double, kQuadratureNodes>;
  const auto& x = Gauss::abscissa();
  const auto& w = Gauss::weights();
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  Rule rule;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      rule.nodes.push_back(mid);
      rule.weights.push_back(w[i] / 2);
    } else {
      rule.nodes.push_back(mid - half * x[i]);
      rule.weights.push_back(w[i] / 2);
      rule.nodes.push_back(mid + half * x[i]);
      rule.weights.push_back(w[i] / 2);
    }
  }
  return rule;
}

// Visits every point of the tensor rule in `dims` dimensions.
template <typename Fn>
void for_each_tensor_point(const Rule& rule, std::size_t dims, Fn&& fn) {
  std::vector<std::size_t> idx(dims, 0);
  std::vector<double> point(dims);
  const std::size_t m = rule.nodes.size();
  while (true) {
    double weight = 1.0;
    for (std::size_t d = 0; d < dims; ++d) {
      point[d] = rule.nodes[idx[d]];
      weight *= rule.weights[idx[d]];
    }
    fn(std::span<const double>(point), weight);
    std::size_t d = 0;
    while (d < dims && ++idx[d] == m) idx[d++] = 0;
    if (d == dims) break;
  }
}

// Averaged feature distribution of one patch over its own noise prior.
std::vector<double> averaged_patch_distribution(const GeneratorConfig& cfg, std::span<const double> params_patch,
                                                const Rule& rule) {
  std::vector<double> avg(std::size_t{1} << cfg.n_feature, 0.0);
  for_each_tensor_point(rule, cfg.noise_per_patch(), [&](std::span<const double> z, double w) {
    const auto dist = patch_feature_distribution(cfg, params_patch, z);
    for (std::size_t f = 0; f < avg.size(); ++f) avg[f] += w * dist[f];
  });
  return avg;
}

// Joint window distribution for fixed noise, from per-patch distributions.
void accumulate_window_distribution(const GeneratorConfig& cfg, const std::vector<std::vector<double>>& patch_dists,
                                    double weight, std::vector<double>& out) {
  std::vector<double> joint{1.0};
  const std::size_t block = std::size_t{1} << cfg.n_feature;
  for (const auto& dist : patch_dists) {
    std::vector<double> next(joint.size() * block, 0.0);
    for (std::size_t prefix = 0; prefix < joint.size(); ++prefix) {
      if (joint[prefix] == 0.0) continue;
      for (std::size_t f = 0; f < block; ++f) {
        next[prefix * block + reverse_feature_bits(f, cfg.n_feature)] += joint[prefix] * dist[f];
      }
    }
    joint = std::move(next);
  }
  for (std::size_t s = 0; s < joint.size(); ++s) out[s] += weight * joint[s];
}

}  // namespace

void GeneratorConfig::validate() const {
  if (n_feature < 1) throw ConfigError("n_feature must be >= 1");
  if (n_patches < 1) throw ConfigError("n_patches must be >= 1");
  if (n_layers < 1) throw ConfigError("n_layers must be >= 1");
  if (n_aux < 0) throw ConfigError("n_aux must be >= 0");
  if (qubits_per_patch() > kMaxQubits) {
    throw ConfigError("n_feature + n_aux = " + std::to_string(qubits_per_patch()) + " exceeds " +
                      std::to_string(kMaxQubits));
  }
  if (!(noise_low <= noise_high) || !std::isfinite(noise_low) || !std::isfinite(noise_high)) {
    throw ConfigError("noise interval must satisfy noise_low <= noise_high");
  }
}

GeneratorParams init_params(const GeneratorConfig& cfg, Rng& rng) {
  cfg.validate();
  GeneratorParams params;
  params.theta.resize(cfg.param_count());
  for (double& a : params.theta) a = rng.uniform(0.0, 2 * std::numbers::pi);
  return params;
}

void draw_patch_noise(const GeneratorConfig& cfg, Rng& rng, std::span<double> out) {
  if (out.size() != cfg.noise_per_patch()) throw ConfigError("noise output slice has wrong size");
  for (double& z : out) z = rng.uniform(cfg.noise_low, cfg.noise_high);
}

NoiseVector draw_noise(const GeneratorConfig& cfg, Rng& rng) {
  NoiseVector noise;
  const std::size_t per = cfg.noise_per_patch();
  noise.z.resize(per * cfg.n_patches);
  for (int p = 0; p < cfg.n_patches; ++p) {
    std::span<double> slice(noise.z.data() + p * per, per);
    if (cfg.noise_sharing == NoiseSharing::kShared && p > 0) {
      std::copy_n(noise.z.begin(), per, slice.begin());
    } else {
      draw_patch_noise(cfg, rng, slice);
    }
  }
  return noise;
}

std::vector<GateOp> build_patch_circuit(const GeneratorConfig& cfg, std::span<const double> params_patch,
                                        std::span<const double> z_patch) {
  check_slices(cfg, params_patch, z_patch);
  const int q = cfg.qubits_per_patch();
  std::vector<GateOp> gates;
  gates.reserve(static_cast<std::size_t>(cfg.n_layers) * (4 * q - 1));
  for (int layer = 0; layer < cfg.n_layers; ++layer) {
    const std::size_t row = cfg.fresh_noise_per_layer ? layer : 0;
    for (int k = 0; k < q; ++k) gates.push_back(GateOp::rx(k, z_patch[row * q + k]));
    for (int k = 0; k < q; ++k) {
      const std::size_t base = (static_cast<std::size_t>(layer) * q + k) * 2;
      gates.push_back(GateOp::ry(k, params_patch[base]));
      gates.push_back(GateOp::rz(k, params_patch[base + 1]));
    }
    for (int k = 0; k + 1 < q; ++k) gates.push_back(GateOp::cnot(k, k + 1));
  }
  return gates;
}

StateVector patch_state(const GeneratorConfig& cfg, std::span<const double> params_patch,
                        std::span<const double> z_patch) {
  const auto gates = build_patch_circuit(cfg, params_patch, z_patch);
  StateVector state = StateVector::zero(cfg.qubits_per_patch());
  state.apply(gates);
  return state;
}

std::vector<double> patch_marginals(const GeneratorConfig& cfg, std::span<const double> params_patch,
                                    std::span<const double> z_patch) {
  const StateVector state = patch_state(cfg, params_patch, z_patch);
  // Single pass over the amplitudes instead of one marginal_one per qubit.
  std::vector<double> m(cfg.n_feature, 0.0);
  const auto amps = state.amplitudes();
  for (std::size_t b = 0; b < amps.size(); ++b) {
    const double p = std::norm(amps[b]);
    for (int k = 0; k < cfg.n_feature; ++k) {
      if ((b >> k) & 1U) m[k] += p;
    }
  }
  return m;
}

std::vector<double> patch_feature_distribution(const GeneratorConfig& cfg, std::span<const double> params_patch,
                                               std::span<const double> z_patch) {
  const StateVector state = patch_state(cfg, params_patch, z_patch);
  const std::size_t mask = (std::size_t{1} << cfg.n_feature) - 1;
  std::vector<double> dist(mask + 1, 0.0);
  const auto amps = state.amplitudes();
  for (std::size_t b = 0; b < amps.size(); ++b) dist[b & mask] += std::norm(amps[b]);
  return dist;
}

std::vector<double> generator_forward(const GeneratorConfig& cfg, const GeneratorParams& params,
                                      const NoiseVector& noise) {
  check_full(cfg, params, noise);
  std::vector<double> out;
  out.reserve(cfg.output_size());
  for (int p = 0; p < cfg.n_patches; ++p) {
    const auto m = patch_marginals(cfg, params.patch(cfg, p), noise.patch(cfg, p));
    out.insert(out.end(), m.begin(), m.end());
  }
  return out;
}

BinaryMatrix generator_sample(const GeneratorConfig& cfg, const GeneratorParams& params, const NoiseVector& noise,
                              Rng& rng) {
  check_full(cfg, params, noise);
  BinaryMatrix window(cfg.n_feature, cfg.n_patches);
  for (int p = 0; p < cfg.n_patches; ++p) {
    const StateVector state = patch_state(cfg, params.patch(cfg, p), noise.patch(cfg, p));
    const auto bits = state.sample_bitstring(rng);
    for (int k = 0; k < cfg.n_feature; ++k) window(k, p) = bits[k];
  }
  return window;
}

void accumulate_param_shift_gradient(const GeneratorConfig& cfg, const GeneratorParams& params,
                                     const NoiseVector& noise, std::span<const double> upstream,
                                     std::span<double> grad) {
  check_full(cfg, params, noise);
  if (upstream.size() != cfg.output_size()) {
    throw ConfigError("upstream gradient has " + std::to_string(upstream.size()) + " entries, expected " +
                      std::to_string(cfg.output_size()));
  }
  if (grad.size() != cfg.param_count()) throw ConfigError("gradient buffer has wrong size");

  const std::size_t per = cfg.params_per_patch();
  std::vector<double> shifted(per);
  for (int p = 0; p < cfg.n_patches; ++p) {
    const auto up = upstream.subspan(static_cast<std::size_t>(p) * cfg.n_feature, cfg.n_feature);
    // Only this patch's outputs depend on its angles.
    if (std::all_of(up.begin(), up.end(), [](double u) { return u == 0.0; })) continue;
    const auto own = params.patch(cfg, p);
    const auto z = noise.patch(cfg, p);
    std::copy(own.begin(), own.end(), shifted.begin());
    for (std::size_t j = 0; j < per; ++j) {
      shifted[j] = own[j] + kShift;
      const auto plus = patch_marginals(cfg, shifted, z);
      shifted[j] = own[j] - kShift;
      const auto minus = patch_marginals(cfg, shifted, z);
      shifted[j] = own[j];
      double g = 0.0;
      for (int k = 0; k < cfg.n_feature; ++k) g += up[k] * (plus[k] - minus[k]) / 2;
      grad[p * per + j] += g;
    }
  }
}

std::vector<double> param_shift_gradient(const GeneratorConfig& cfg, const GeneratorParams& params,
                                         const NoiseVector& noise, std::span<const double> upstream) {
  std::vector<double> grad(cfg.param_count(), 0.0);
  accumulate_param_shift_gradient(cfg, params, noise, upstream, grad);
  return grad;
}

bool state_distribution_uses_quadrature(const GeneratorConfig& cfg) {
  const std::size_t dims = cfg.noise_per_patch();
  const int frequency = cfg.fresh_noise_per_layer ? 1 : cfg.n_layers;
  return dims <= kMaxQuadratureDims && frequency <= kMaxQuadratureFrequency;
}

std::vector<double> generator_state_distribution(const GeneratorConfig& cfg, const GeneratorParams& params,
                                                 Rng& rng, int mc_draws) {
  cfg.validate();
  const int bits = cfg.n_feature * cfg.n_patches;
  if (bits > kMaxStateBits) {
    throw ConfigError("state distribution needs n * t <= 20, got " + std::to_string(bits));
  }
  if (params.theta.size() != cfg.param_count()) throw ConfigError("generator parameter tensor has wrong size");

  std::vector<double> out(std::size_t{1} << bits, 0.0);
  std::vector<std::vector<double>> patch_dists(cfg.n_patches);

  if (state_distribution_uses_quadrature(cfg)) {
    const Rule rule = gauss_rule(cfg.noise_low, cfg.noise_high);
    if (cfg.noise_sharing == NoiseSharing::kPerPatch) {
      // Independent noise per patch: the window law factorizes.
      for (int p = 0; p < cfg.n_patches; ++p) {
        patch_dists[p] = averaged_patch_distribution(cfg, params.patch(cfg, p), rule);
      }
      accumulate_window_distribution(cfg, patch_dists, 1.0, out);
    } else {
      for_each_tensor_point(rule, cfg.noise_per_patch(), [&](std::span<const double> z, double w) {
        for (int p = 0; p < cfg.n_patches; ++p) {
          patch_dists[p] = patch_feature_distribution(cfg, params.patch(cfg, p), z);
        }
        accumulate_window_distribution(cfg, patch_dists, w, out);
      });
    }
    return out;
  }

  if (mc_draws < 1) throw ConfigError("mc_draws must be positive");
  const double w = 1.0 / mc_draws;
  if (cfg.noise_sharing == NoiseSharing::kPerPatch) {
    std::vector<std::vector<double>> avg(cfg.n_patches, std::vector<double>(std::size_t{1} << cfg.n_feature, 0.0));
    for (int d = 0; d < mc_draws; ++d) {
      const NoiseVector noise = draw_noise(cfg, rng);
      for (int p = 0; p < cfg.n_patches; ++p) {
        const auto dist = patch_feature_distribution(cfg, params.patch(cfg, p), noise.patch(cfg, p));
        for (std::size_t f = 0; f < dist.size(); ++f) avg[p][f] += w * dist[f];
      }
    }
    accumulate_window_distribution(cfg, avg, 1.0, out);
    return out;
  }
  for (int d = 0; d < mc_draws; ++d) {
    const NoiseVector noise = draw_noise(cfg, rng);
    for (int p = 0; p < cfg.n_patches; ++p) {
      patch_dists[p] = patch_feature_distribution(cfg, params.patch(cfg, p), noise.patch(cfg, p));
    }
    accumulate_window_distribution(cfg, patch_dists, w, out);
  }
  return out;
}

}  // namespace spiqgan
