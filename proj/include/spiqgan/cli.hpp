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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spiqgan/checkpoint.hpp"
#include "spiqgan/config.hpp"
#include "spiqgan/generator.hpp"
#include "spiqgan/training.hpp"

namespace spiqgan::cli {

/// Process exit codes shared by every command.
enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kIo = 2,
  kNumerical = 3,
};

struct EvaluationSettings {
  std::size_t samples = 10000;  // generated windows per sweep cell
  std::size_t max_lag = 10;

  bool operator==(const EvaluationSettings&) const = default;
};

struct SweepSettings {
  std::vector<std::int64_t> neurons{2, 4, 6, 8, 10};
  std::vector<std::int64_t> timesteps{1, 2, 5, 10, 20, 30};
  std::vector<double> k_values{0.0, 1.0};
  std::vector<std::int64_t> seeds{0};
  bool parallel = false;

  bool operator==(const SweepSettings&) const = default;
};

/// Everything a run needs, read from an INI file with sections
/// [generator], [training], [data], [output], [evaluation] and [sweep].
struct RunConfig {
  GeneratorConfig generator;
  TrainConfig training;
  std::filesystem::path data_path;
  std::vector<std::size_t> neurons;  // empty: first n_feature rows
  std::filesystem::path output_dir = "spiqgan_out";
  std::string checkpoint_name = "checkpoint.ckpt";
  EvaluationSettings evaluation;
  SweepSettings sweep;

  /// Validates every field and rejects unknown keys.
  static RunConfig from_settings(const Settings& settings);
  Settings to_settings() const;
  WindowSpec window_spec() const;

  bool operator==(const RunConfig&) const = default;
};

struct TrainArgs {
  std::optional<std::filesystem::path> config;
  std::vector<std::string> overrides;  // section.key=value
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

struct GenerateArgs {
  std::filesystem::path checkpoint;
  std::size_t count = 0;
  std::filesystem::path out;
  std::uint64_t seed = 0;
};

struct EvaluateArgs {
  std::filesystem::path generated;
  std::filesystem::path reference;
  std::vector<std::size_t> neurons;  // reference rows; empty: first n rows
  std::size_t window = 1;
  std::size_t max_lag = 10;
  std::filesystem::path out;
};

struct SweepArgs {
  std::filesystem::path config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

struct SurrogateArgs {
  std::vector<double> rates{0.1, 0.15};
  double burst_prob = 0.9;
  double burst_gain = 3.0;
  std::size_t bins = 100000;
  double bin_width = 0.02;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

// Each command prints a one-line diagnostic to `err` on failure and
// returns an ExitCode.
int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);
int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_surrogate(const SurrogateArgs& args, std::ostream& out, std::ostream& err);

/// Builds the RunConfig for `train`/`sweep` from file, overrides and flags.
RunConfig resolve_run_config(const std::optional<std::filesystem::path>& config,
                             const std::vector<std::string>& overrides, std::optional<std::uint64_t> seed,
                             const std::optional<std::filesystem::path>& out);

/// Statistics comparison written by `evaluate`.
struct EvaluationSummary {
  double mse_kprob = 0.0;
  double mse_rate = 0.0;
  std::optional<double> mse_cov;
  std::optional<double> mse_autocorr;
  std::optional<double> js;
};

/// Samples `count` windows from a checkpoint, deterministically in `seed`.
SpikeMatrix generate_samples(const Checkpoint& ckpt, std::size_t count, std::uint64_t seed);

/// Compares generated windows against reference windows tiled from `reference`.
EvaluationSummary evaluate_files(const EvaluateArgs& args);

}  // namespace spiqgan::cli
