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

#include "spiqgan/training.hpp"

#include <bit>
#include <cmath>
#include <fstream>

#include "spiqgan/config.hpp"
#include "spiqgan/errors.hpp"
#include "spiqgan/stats.hpp"

namespace spiqgan {
namespace {

constexpr std::uint64_t tag(StreamPurpose p) { return static_cast<std::uint64_t>(p); }

void check_batch(const TrainState& state, std::span<const NoiseVector> noise,
                 std::span<const BinaryMatrix> real_batch) {
  const std::size_t b = static_cast<std::size_t>(state.train_cfg.batch_size);
  if (noise.size() != b || real_batch.size() != b) {
    throw ConfigError("batch holds " + std::to_string(noise.size()) + " noise vectors and " +
                      std::to_string(real_batch.size()) + " real windows, expected " + std::to_string(b));
  }
  for (const auto& w : real_batch) {
    if (w.rows() != static_cast<std::size_t>(state.gen_cfg.n_feature) ||
        w.cols() != static_cast<std::size_t>(state.gen_cfg.n_patches)) {
      throw ConfigError("real window shape does not match the generator");
    }
  }
}

double spike_count(const BinaryMatrix& w) {
  double c = 0.0;
  for (std::uint8_t v : w.data()) c += v;
  return c;
}

double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

void require_finite(double v, const char* what, std::int64_t step) {
  if (!std::isfinite(v)) {
    throw NumericalError(std::string(what) + " is not finite at generator step " + std::to_string(step));
  }
}

}  // namespace

std::string to_string(PenaltyMode mode) {
  switch (mode) {
    case PenaltyMode::kSigned:
      return "signed";
    case PenaltyMode::kBatch:
      return "batch";
    case PenaltyMode::kAbsolute:
      break;
  }
  return "absolute";
}

std::string to_string(CriticConstraint constraint) {
  return constraint == CriticConstraint::kNone ? "none" : "clip";
}

PenaltyMode parse_penalty_mode(const std::string& text) {
  if (text == "absolute") return PenaltyMode::kAbsolute;
  if (text == "signed") return PenaltyMode::kSigned;
  if (text == "batch") return PenaltyMode::kBatch;
  throw ConfigError("unknown penalty mode '" + text + "' (expected absolute, signed or batch)");
}

CriticConstraint parse_critic_constraint(const std::string& text) {
  if (text == "clip") return CriticConstraint::kClip;
  if (text == "none") return CriticConstraint::kNone;
  throw ConfigError("unknown critic constraint '" + text + "' (expected clip or none)");
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(lr_gen > 0.0) || !(lr_critic > 0.0)) throw ConfigError("learning rates must be positive");
  if (!(k_coeff >= 0.0)) throw ConfigError("k_coeff must be >= 0");
  if (critic_steps_per_gen < 1) throw ConfigError("critic_steps_per_gen must be >= 1");
  if (!(clip_c > 0.0)) throw ConfigError("clip_c must be positive");
  if (total_gen_steps < 0) throw ConfigError("total_gen_steps must be >= 0");
  if (js_log_interval < 1) throw ConfigError("js_log_interval must be >= 1");
}

double critic_loss(std::span<const double> c_fake, std::span<const double> c_real) {
  if (c_fake.size() != c_real.size()) throw ConfigError("critic loss: fake and real batches differ in size");
  if (c_fake.empty()) throw ConfigError("critic loss: empty batch");
  double acc = 0.0;
  for (std::size_t j = 0; j < c_fake.size(); ++j) acc += c_fake[j] - c_real[j];
  return acc / (2.0 * static_cast<double>(c_fake.size()));
}

double generator_loss(std::span<const double> c_fake, std::span<const double> fake_counts,
                      std::span<const double> real_counts, double k_coeff, PenaltyMode mode) {
  if (c_fake.size() != fake_counts.size() || c_fake.size() != real_counts.size()) {
    throw ConfigError("generator loss: batch vectors differ in size");
  }
  if (c_fake.empty()) throw ConfigError("generator loss: empty batch");
  const double b = static_cast<double>(c_fake.size());
  if (mode == PenaltyMode::kBatch) {
    double score = 0.0;
    double gap = 0.0;
    for (std::size_t j = 0; j < c_fake.size(); ++j) {
      score += c_fake[j];
      gap += fake_counts[j] - real_counts[j];
    }
    return -score / b + k_coeff * std::abs(gap / b);
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < c_fake.size(); ++j) {
    const double diff = fake_counts[j] - real_counts[j];
    const double penalty = mode == PenaltyMode::kAbsolute ? std::abs(diff) : diff;
    acc += c_fake[j] - k_coeff * penalty;
  }
  return -acc / b;
}

TrainState init_train_state(const GeneratorConfig& gen_cfg, const TrainConfig& train_cfg) {
  gen_cfg.validate();
  train_cfg.validate();
  TrainState s;
  s.gen_cfg = gen_cfg;
  s.train_cfg = train_cfg;
  Rng gen_rng = Rng::keyed(train_cfg.seed, {tag(StreamPurpose::kGeneratorInit)});
  s.gen = init_params(gen_cfg, gen_rng);
  Rng critic_rng = Rng::keyed(train_cfg.seed, {tag(StreamPurpose::kCriticInit)});
  s.critic = init_critic(gen_cfg.output_size(), critic_rng);
  s.gen_adam = AdamState::zeros(s.gen.theta.size());
  s.critic_adam = AdamState::zeros(s.critic.values().size());
  return s;
}

std::vector<NoiseVector> draw_batch_noise(const TrainState& state, StreamPurpose purpose, std::int64_t step) {
  const GeneratorConfig& cfg = state.gen_cfg;
  const std::size_t per = cfg.noise_per_patch();
  std::vector<NoiseVector> batch(state.train_cfg.batch_size);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    batch[j].z.resize(per * cfg.n_patches);
    for (int p = 0; p < cfg.n_patches; ++p) {
      std::span<double> slice(batch[j].z.data() + p * per, per);
      // Shared noise reuses the patch-0 stream for every patch.
      const int key_patch = cfg.noise_sharing == NoiseSharing::kShared ? 0 : p;
      Rng rng = Rng::keyed(state.train_cfg.seed,
                           {tag(purpose), static_cast<std::uint64_t>(step), j, static_cast<std::uint64_t>(key_patch)});
      draw_patch_noise(cfg, rng, slice);
    }
  }
  return batch;
}

Objective critic_objective(const TrainState& state, std::span<const NoiseVector> noise,
                           std::span<const BinaryMatrix> real_batch) {
  check_batch(state, noise, real_batch);
  const double scale = 1.0 / (2.0 * static_cast<double>(noise.size()));
  Objective out;
  out.grad.assign(state.critic.values().size(), 0.0);
  double acc = 0.0;
  double gap = 0.0;
  for (std::size_t j = 0; j < noise.size(); ++j) {
    const auto fake = generator_forward(state.gen_cfg, state.gen, noise[j]);
    const auto real = real_batch[j].flatten_patch_major();
    acc += critic_forward(state.critic, fake) - critic_forward(state.critic, real);
    gap += sum(fake) - spike_count(real_batch[j]);
    const auto gf = critic_backward(state.critic, fake);
    const auto gr = critic_backward(state.critic, real);
    const auto vf = gf.params.values();
    const auto vr = gr.params.values();
    for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] += scale * (vf[i] - vr[i]);
  }
  out.loss = acc * scale;
  out.count_gap = gap / static_cast<double>(noise.size());
  return out;
}

std::vector<std::vector<double>> generator_upstream(std::span<const CriticGradients> critic_grads,
                                                    std::span<const double> fake_counts,
                                                    std::span<const double> real_counts, double k_coeff,
                                                    PenaltyMode mode) {
  const std::size_t b = critic_grads.size();
  if (fake_counts.size() != b || real_counts.size() != b) throw ConfigError("upstream: batch sizes differ");
  const double inv_b = 1.0 / static_cast<double>(b);
  const auto sign = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  double batch_gap = 0.0;
  for (std::size_t j = 0; j < b; ++j) batch_gap += fake_counts[j] - real_counts[j];
  std::vector<std::vector<double>> up(b);
  for (std::size_t j = 0; j < b; ++j) {
    // d penalty / d marginal; the sign subgradient is 0 at an exact tie.
    double dpen = 1.0;
    if (mode == PenaltyMode::kAbsolute) dpen = sign(fake_counts[j] - real_counts[j]);
    if (mode == PenaltyMode::kBatch) dpen = sign(batch_gap);
    up[j].resize(critic_grads[j].input.size());
    for (std::size_t i = 0; i < up[j].size(); ++i) {
      up[j][i] = -inv_b * critic_grads[j].input[i] + k_coeff * inv_b * dpen;
    }
  }
  return up;
}

Objective generator_objective(const TrainState& state, std::span<const NoiseVector> noise,
                              std::span<const BinaryMatrix> real_batch) {
  check_batch(state, noise, real_batch);
  const std::size_t b = noise.size();
  std::vector<std::vector<double>> fakes(b);
  std::vector<CriticGradients> grads(b);
  std::vector<double> c_fake(b), fake_counts(b), real_counts(b);
  for (std::size_t j = 0; j < b; ++j) {
    fakes[j] = generator_forward(state.gen_cfg, state.gen, noise[j]);
    c_fake[j] = critic_forward(state.critic, fakes[j]);
    grads[j] = critic_backward(state.critic, fakes[j]);
    fake_counts[j] = sum(fakes[j]);
    real_counts[j] = spike_count(real_batch[j]);
  }
  const TrainConfig& tc = state.train_cfg;
  Objective out;
  out.loss = generator_loss(c_fake, fake_counts, real_counts, tc.k_coeff, tc.penalty_mode);
  out.count_gap = (sum(fake_counts) - sum(real_counts)) / static_cast<double>(b);
  const auto up = generator_upstream(grads, fake_counts, real_counts, tc.k_coeff, tc.penalty_mode);
  out.grad.assign(state.gen.theta.size(), 0.0);
  // Index-ordered accumulation keeps the sum bitwise reproducible.
  for (std::size_t j = 0; j < b; ++j) {
    accumulate_param_shift_gradient(state.gen_cfg, state.gen, noise[j], up[j], out.grad);
  }
  return out;
}

double critic_step(TrainState& state, std::span<const BinaryMatrix> real_batch) {
  const auto noise = draw_batch_noise(state, StreamPurpose::kCriticNoise, state.critic_steps);
  const Objective obj = critic_objective(state, noise, real_batch);
  adam_step(state.critic.values(), obj.grad, state.critic_adam, state.train_cfg.lr_critic);
  if (state.train_cfg.critic_constraint == CriticConstraint::kClip) clip_weights(state.critic, state.train_cfg.clip_c);
  ++state.critic_steps;
  return obj.loss;
}

GeneratorStepResult generator_step(TrainState& state, std::span<const BinaryMatrix> real_batch) {
  const auto noise = draw_batch_noise(state, StreamPurpose::kGeneratorNoise, state.gen_steps);
  const Objective obj = generator_objective(state, noise, real_batch);
  adam_step(state.gen.theta, obj.grad, state.gen_adam, state.train_cfg.lr_gen);
  ++state.gen_steps;
  return {obj.loss, obj.count_gap};
}

double generator_js(const GeneratorConfig& cfg, const GeneratorParams& params, std::span<const double> reference,
                    Rng& rng) {
  const auto dist = generator_state_distribution(cfg, params, rng);
  return js_divergence(dist, reference);
}

double expected_spike_count(const GeneratorConfig& cfg, const GeneratorParams& params, Rng& rng, int mc_draws) {
  const int bits = cfg.n_feature * cfg.n_patches;
  if (bits <= kMaxStateBits) {
    const auto dist = generator_state_distribution(cfg, params, rng, mc_draws);
    double mean = 0.0;
    for (std::size_t s = 0; s < dist.size(); ++s) mean += dist[s] * std::popcount(s);
    return mean;
  }
  double mean = 0.0;
  for (int d = 0; d < mc_draws; ++d) mean += sum(generator_forward(cfg, params, draw_noise(cfg, rng)));
  return mean / mc_draws;
}

std::vector<TrainLogRow> run_training(TrainState& state, const SpikeMatrix& data, const WindowSpec& spec,
                                      std::int64_t gen_steps, const LogSink& sink) {
  const GeneratorConfig& gc = state.gen_cfg;
  const TrainConfig& tc = state.train_cfg;
  if (spec.neuron_subset.size() != static_cast<std::size_t>(gc.n_feature) ||
      spec.window_len != static_cast<std::size_t>(gc.n_patches)) {
    throw ConfigError("window spec must select n_feature neurons and n_patches bins");
  }
  if (data.neurons() < static_cast<std::size_t>(gc.n_feature) || data.bins() < static_cast<std::size_t>(gc.n_patches)) {
    throw ConfigError("data has " + std::to_string(data.neurons()) + " neurons x " + std::to_string(data.bins()) +
                      " bins, too small for n=" + std::to_string(gc.n_feature) +
                      ", t=" + std::to_string(gc.n_patches));
  }
  spec.validate(data);

  std::vector<double> reference;
  const bool log_js = gc.n_feature * gc.n_patches <= kMaxStateBits;
  if (log_js) reference = state_histogram(all_windows(data, spec));

  const std::size_t b = static_cast<std::size_t>(tc.batch_size);
  std::vector<TrainLogRow> log;
  for (std::int64_t s = 1; s <= gen_steps; ++s) {
    TrainLogRow row;
    for (int c = 0; c < tc.critic_steps_per_gen; ++c) {
      Rng real_rng =
          Rng::keyed(tc.seed, {tag(StreamPurpose::kCriticReal), static_cast<std::uint64_t>(state.critic_steps)});
      const auto real = sample_windows(data, spec, b, real_rng);
      row.loss_critic = critic_step(state, real);
    }
    Rng real_rng =
        Rng::keyed(tc.seed, {tag(StreamPurpose::kGeneratorReal), static_cast<std::uint64_t>(state.gen_steps)});
    const auto real = sample_windows(data, spec, b, real_rng);
    const GeneratorStepResult g = generator_step(state, real);
    row.step = state.gen_steps;
    row.loss_gen = g.loss;
    row.count_gap = g.count_gap;
    require_finite(row.loss_critic, "critic loss", row.step);
    require_finite(row.loss_gen, "generator loss", row.step);

    if (log_js && (s == 1 || s == gen_steps || row.step % tc.js_log_interval == 0)) {
      Rng eval_rng =
          Rng::keyed(tc.seed, {tag(StreamPurpose::kEvaluationNoise), static_cast<std::uint64_t>(row.step)});
      row.js = generator_js(gc, state.gen, reference, eval_rng);
    }
    if (sink) sink(row);
    log.push_back(row);
  }
  return log;
}

TrainResult train(const TrainConfig& cfg, const SpikeMatrix& data, const GeneratorConfig& gen_cfg,
                  const WindowSpec& spec, const LogSink& sink) {
  TrainResult result{init_train_state(gen_cfg, cfg), {}};
  result.log = run_training(result.state, data, spec, cfg.total_gen_steps, sink);
  return result;
}

std::string format_train_log_row(const TrainLogRow& r) {
  return std::to_string(r.step) + "," + format_double(r.loss_critic) + "," + format_double(r.loss_gen) + "," +
         format_double(r.count_gap) + "," + (r.js ? format_double(*r.js) : std::string()) + "\n";
}

std::string format_train_log(std::span<const TrainLogRow> rows) {
  std::string out = std::string(kTrainLogHeader) + "\n";
  for (const auto& r : rows) out += format_train_log_row(r);
  return out;
}

void write_train_log(std::span<const TrainLogRow> rows, const std::filesystem::path& path) {
  const std::string text = format_train_log(rows);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace spiqgan
