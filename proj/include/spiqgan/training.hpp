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
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spiqgan/adam.hpp"
#include "spiqgan/binary_matrix.hpp"
#include "spiqgan/critic.hpp"
#include "spiqgan/generator.hpp"
#include "spiqgan/spikedata.hpp"

namespace spiqgan {

/// How the spike-count term of the generator loss is formed.
enum class PenaltyMode {
  kAbsolute,  // K * |fake_count_j - real_count_j| inside the batch mean
  kSigned,    // K * (fake_count_j - real_count_j), as written in the loss
  kBatch,     // K * |mean_j (fake_count_j - real_count_j)| outside the batch mean
};

/// Lipschitz constraint applied to the critic after each update.
enum class CriticConstraint { kClip, kNone };

std::string to_string(PenaltyMode mode);
std::string to_string(CriticConstraint constraint);
PenaltyMode parse_penalty_mode(const std::string& text);
CriticConstraint parse_critic_constraint(const std::string& text);

struct TrainConfig {
  int batch_size = 32;
  double lr_gen = 0.05;
  double lr_critic = 0.002;
  double k_coeff = 1.0;
  int critic_steps_per_gen = 2;
  double clip_c = 0.01;
  CriticConstraint critic_constraint = CriticConstraint::kClip;
  PenaltyMode penalty_mode = PenaltyMode::kBatch;
  std::int64_t total_gen_steps = 1000;
  std::uint64_t seed = 0;
  int js_log_interval = 10;

  void validate() const;

  bool operator==(const TrainConfig&) const = default;
};

/// (1 / 2B) * sum_j (c_fake_j - c_real_j).
double critic_loss(std::span<const double> c_fake, std::span<const double> c_real);

/// -(1 / B) * sum_j (c_fake_j - K * penalty_j) for the per-sample modes,
/// with fake sample j paired against real sample j. kBatch instead adds
/// K * |(1 / B) * sum_j (fake_count_j - real_count_j)| to -(1 / B) sum_j c_fake_j.
double generator_loss(std::span<const double> c_fake, std::span<const double> fake_counts,
                      std::span<const double> real_counts, double k_coeff, PenaltyMode mode);

/// Everything the trainer mutates. Random draws are keyed by
/// (train seed, purpose, step counter, batch index, patch), so the two step
/// counters are the complete random state.
struct TrainState {
  GeneratorConfig gen_cfg;
  TrainConfig train_cfg;
  GeneratorParams gen;
  CriticParams critic;
  AdamState gen_adam;
  AdamState critic_adam;
  std::int64_t gen_steps = 0;
  std::int64_t critic_steps = 0;

  bool operator==(const TrainState&) const = default;
};

/// Fresh state: generator angles uniform in [0, 2 pi), critic uniform in
/// +-1/sqrt(fan_in), zero moments.
TrainState init_train_state(const GeneratorConfig& gen_cfg, const TrainConfig& train_cfg);

/// Noise for `batch_size` samples of the given step and purpose.
std::vector<NoiseVector> draw_batch_noise(const TrainState& state, StreamPurpose purpose, std::int64_t step);

struct Objective {
  double loss = 0.0;
  std::vector<double> grad;  // critic values layout or generator theta layout
  double count_gap = 0.0;    // mean over the batch of fake - real spike count
};

/// Critic loss and its gradient w.r.t. the critic parameters, generator fixed.
Objective critic_objective(const TrainState& state, std::span<const NoiseVector> noise,
                           std::span<const BinaryMatrix> real_batch);

/// Gradient of the critic-scored generator loss w.r.t. the per-sample
/// generator outputs: entry [j][i] is d loss / d marginal i of sample j.
std::vector<std::vector<double>> generator_upstream(std::span<const CriticGradients> critic_grads,
                                                    std::span<const double> fake_counts,
                                                    std::span<const double> real_counts, double k_coeff,
                                                    PenaltyMode mode);

/// Generator loss and its parameter-shift gradient, critic fixed.
Objective generator_objective(const TrainState& state, std::span<const NoiseVector> noise,
                              std::span<const BinaryMatrix> real_batch);

/// One critic update (Adam, then the configured constraint). Returns L_C.
double critic_step(TrainState& state, std::span<const BinaryMatrix> real_batch);

struct GeneratorStepResult {
  double loss = 0.0;
  double count_gap = 0.0;
};

/// One generator update with Adam. The critic is not touched.
GeneratorStepResult generator_step(TrainState& state, std::span<const BinaryMatrix> real_batch);

struct TrainLogRow {
  std::int64_t step = 0;
  double loss_critic = 0.0;
  double loss_gen = 0.0;
  double count_gap = 0.0;
  std::optional<double> js;

  bool operator==(const TrainLogRow&) const = default;
};

using LogSink = std::function<void(const TrainLogRow&)>;

/// Runs `gen_steps` rounds of [critic_steps_per_gen critic updates, one
/// generator update] on windows of `data` selected by `spec`. The JS column
/// is filled at the first step, every js_log_interval steps and at the last
/// step when n * t <= 20.
std::vector<TrainLogRow> run_training(TrainState& state, const SpikeMatrix& data, const WindowSpec& spec,
                                      std::int64_t gen_steps, const LogSink& sink = {});

struct TrainResult {
  TrainState state;
  std::vector<TrainLogRow> log;
};

/// Initializes and runs `cfg.total_gen_steps` rounds.
TrainResult train(const TrainConfig& cfg, const SpikeMatrix& data, const GeneratorConfig& gen_cfg,
                  const WindowSpec& spec, const LogSink& sink = {});

/// Law of generated windows vs the empirical window histogram, base 2.
double generator_js(const GeneratorConfig& cfg, const GeneratorParams& params, std::span<const double> reference,
                    Rng& rng);

/// Expected spikes per generated window, averaged over the noise prior.
double expected_spike_count(const GeneratorConfig& cfg, const GeneratorParams& params, Rng& rng,
                            int mc_draws = 4096);

inline constexpr const char* kTrainLogHeader = "step,loss_critic,loss_gen,count_gap,js_divergence";
std::string format_train_log_row(const TrainLogRow& row);
std::string format_train_log(std::span<const TrainLogRow> rows);
void write_train_log(std::span<const TrainLogRow> rows, const std::filesystem::path& path);

}  // namespace spiqgan
