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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spiqgan/cli.hpp"

namespace cli = spiqgan::cli;

int main(int argc, char** argv) {
  CLI::App app{"Quantum patch generator and classical critic for spike-train synthesis"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every command");

  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  app.add_option("--config", config, "Configuration file (INI)");
  app.add_option("--seed", seed, "Seed for every random stream");
  app.add_option("--out", out, "Output directory or file");

  std::vector<std::string> overrides;
  auto add_set = [&](CLI::App* sub) {
    sub->add_option("--set", overrides, "Override a config key, section.key=value")->take_all();
  };

  auto* train = app.add_subcommand("train", "Train a generator and critic");
  train->fallthrough();
  add_set(train);

  cli::GenerateArgs gen;
  std::string gen_ckpt;
  auto* generate = app.add_subcommand("generate", "Sample spike windows from a checkpoint");
  generate->fallthrough();
  generate->add_option("checkpoint", gen_ckpt, "Checkpoint file")->required();
  generate->add_option("-n,--count", gen.count, "Number of windows")->required();

  cli::EvaluateArgs eval;
  std::string eval_gen;
  std::string eval_ref;
  auto* evaluate = app.add_subcommand("evaluate", "Compare generated windows with reference data");
  evaluate->fallthrough();
  evaluate->add_option("generated", eval_gen, "Generated SPIKES file")->required();
  evaluate->add_option("reference", eval_ref, "Reference SPIKES file")->required();
  evaluate->add_option("--neurons", eval.neurons, "Reference neuron rows (default: first n)")->delimiter(',');
  evaluate->add_option("-t,--window", eval.window, "Window length in bins")->capture_default_str();
  evaluate->add_option("--max-lag", eval.max_lag, "Autocorrelogram lags")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Run the (n, t, K, seed) grid");
  sweep->fallthrough();
  add_set(sweep);

  cli::SurrogateArgs sur;
  auto* surrogate = app.add_subcommand("surrogate", "Write a bursty surrogate raster");
  surrogate->fallthrough();
  surrogate->add_option("--rates", sur.rates, "Quiet-state spike probability per neuron")
      ->delimiter(',')
      ->capture_default_str();
  surrogate->add_option("--burst-prob", sur.burst_prob, "Hidden-state stay probability")->capture_default_str();
  surrogate->add_option("--burst-gain", sur.burst_gain, "Rate multiplier in the burst state")->capture_default_str();
  surrogate->add_option("--bins", sur.bins, "Number of time bins")->capture_default_str();
  surrogate->add_option("--bin-width", sur.bin_width, "Bin width in seconds")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kValidation;
  }

  const bool has_seed = app.count("--seed") > 0;
  const bool has_out = !out.empty();
  const bool has_config = !config.empty();

  if (train->parsed()) {
    cli::TrainArgs a;
    if (has_config) a.config = config;
    a.overrides = overrides;
    if (has_seed) a.seed = seed;
    if (has_out) a.out = out;
    return cli::cmd_train(a, std::cout, std::cerr);
  }
  if (generate->parsed()) {
    gen.checkpoint = gen_ckpt;
    gen.seed = seed;
    gen.out = has_out ? out : "generated.spikes";
    return cli::cmd_generate(gen, std::cout, std::cerr);
  }
  if (evaluate->parsed()) {
    eval.generated = eval_gen;
    eval.reference = eval_ref;
    eval.out = has_out ? out : "evaluation";
    return cli::cmd_evaluate(eval, std::cout, std::cerr);
  }
  if (sweep->parsed()) {
    if (!has_config) {
      std::cerr << "sweep: --config is required\n";
      return cli::kValidation;
    }
    cli::SweepArgs a;
    a.config = config;
    a.overrides = overrides;
    if (has_seed) a.seed = seed;
    if (has_out) a.out = out;
    return cli::cmd_sweep(a, std::cout, std::cerr);
  }
  sur.seed = seed;
  sur.out = has_out ? out : "surrogate.spikes";
  return cli::cmd_surrogate(sur, std::cout, std::cerr);
}
