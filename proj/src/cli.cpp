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

#include "spiqgan/cli.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <sstream>

#include "spiqgan/errors.hpp"
#include "spiqgan/spikedata.hpp"
#include "spiqgan/stats.hpp"

namespace spiqgan::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kResolvedConfigName = "resolved_config.ini";

template <typename Fn>
int guarded(const char* command, std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalError& e) {
    err << command << ": numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const IoError& e) {
    err << command << ": I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << command << ": I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << command << ": invalid input: " << e.what() << '\n';
    return kValidation;
  }
}

int exit_code_of(const std::exception_ptr& error) {
  std::ostringstream sink;
  return guarded("", sink, [&]() -> int { std::rethrow_exception(error); });
}

std::string message_of(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "unknown error";
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::string optional_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<std::int64_t> as_ints(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

// Trains per `rc`, writing the resolved config, the log and the checkpoint
// into rc.output_dir.
Checkpoint run_train(const RunConfig& rc) {
  if (rc.data_path.empty()) throw ConfigError("data.path is required");
  const WindowSpec spec = rc.window_spec();
  make_dir(rc.output_dir);

  RunConfig resolved = rc;
  resolved.data_path = fs::absolute(rc.data_path);
  resolved.to_settings().save(rc.output_dir / kResolvedConfigName);

  const SpikeMatrix data = load_spikes(rc.data_path);
  std::ofstream log = open_out(rc.output_dir / "train_log.csv");
  log << kTrainLogHeader << '\n';
  const TrainResult result = train(rc.training, data, rc.generator, spec, [&](const TrainLogRow& row) {
    log << format_train_log_row(row);
    if (!log) throw IoError("failed writing train_log.csv");
  });
  log.flush();

  Checkpoint ckpt{result.state, spec.neuron_subset, data.bin_width};
  save_checkpoint(ckpt, rc.output_dir / rc.checkpoint_name);
  return ckpt;
}

void write_summary(const EvaluationSummary& s, const fs::path& path) {
  std::ofstream out = open_out(path);
  out << "metric,value\n"
      << "mse_kprob," << format_double(s.mse_kprob) << '\n'
      << "mse_rate," << format_double(s.mse_rate) << '\n'
      << "mse_cov," << optional_number(s.mse_cov) << '\n'
      << "mse_autocorr," << optional_number(s.mse_autocorr) << '\n'
      << "js_divergence," << optional_number(s.js) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

struct Comparison {
  EvaluationSummary summary;
  StatReport generated;
  StatReport reference;
};

Comparison compare(const EvaluateArgs& args) {
  const SpikeMatrix gen = load_spikes(args.generated);
  const SpikeMatrix ref = load_spikes(args.reference);
  const std::size_t n = gen.neurons();
  WindowSpec spec = args.neurons.empty() ? WindowSpec::first_rows(n, args.window) : WindowSpec{args.neurons, args.window};
  if (spec.neuron_subset.size() != n) {
    throw ConfigError("generated file has " + std::to_string(n) + " neurons but " +
                      std::to_string(spec.neuron_subset.size()) + " reference neurons were selected");
  }
  if (args.window < 1 || gen.bins() % args.window != 0) {
    throw ConfigError("generated file has " + std::to_string(gen.bins()) + " bins, not a multiple of window " +
                      std::to_string(args.window));
  }
  const auto gen_windows = split_windows(gen, args.window);
  const auto ref_windows = tile_windows(ref, spec);

  Comparison c{{}, build_report(gen_windows, gen.bin_width, args.max_lag),
               build_report(ref_windows, ref.bin_width, args.max_lag)};
  c.summary.mse_kprob = stats_mse(c.generated.k_probability, c.reference.k_probability);
  c.summary.mse_rate = stats_mse(c.generated.firing_rate, c.reference.firing_rate);
  if (c.generated.pairwise_cov && c.reference.pairwise_cov) {
    c.summary.mse_cov = stats_mse(*c.generated.pairwise_cov, *c.reference.pairwise_cov);
  }
  if (c.generated.autocorrelogram && c.reference.autocorrelogram) {
    c.summary.mse_autocorr = stats_mse(*c.generated.autocorrelogram, *c.reference.autocorrelogram);
  }
  if (c.generated.state_histogram && c.reference.state_histogram) {
    c.summary.js = js_divergence(*c.generated.state_histogram, *c.reference.state_histogram);
  }
  return c;
}

EvaluationSummary evaluate_and_write(const EvaluateArgs& args) {
  const Comparison c = compare(args);
  make_dir(args.out);
  write_report(c.generated, args.out / "generated");
  write_report(c.reference, args.out / "reference");
  write_summary(c.summary, args.out / "summary.csv");

  Settings snapshot;
  snapshot.set("evaluate", "generated", fs::absolute(args.generated).string());
  snapshot.set("evaluate", "reference", fs::absolute(args.reference).string());
  snapshot.set("evaluate", "neurons", join_numbers(as_ints(args.neurons)));
  snapshot.set("evaluate", "window", std::to_string(args.window));
  snapshot.set("evaluate", "max_lag", std::to_string(args.max_lag));
  snapshot.save(args.out / kResolvedConfigName);
  return c.summary;
}

struct Cell {
  std::int64_t n;
  std::int64_t t;
  double k;
  std::int64_t seed;

  std::string name() const {
    return "n" + std::to_string(n) + "_t" + std::to_string(t) + "_K" + format_double(k) + "_s" + std::to_string(seed);
  }
};

EvaluationSummary run_cell(const RunConfig& base, const Cell& cell) {
  RunConfig rc = base;
  rc.generator.n_feature = static_cast<int>(cell.n);
  rc.generator.n_patches = static_cast<int>(cell.t);
  rc.training.k_coeff = cell.k;
  rc.training.seed = static_cast<std::uint64_t>(cell.seed);
  rc.output_dir = base.output_dir / "cells" / cell.name();
  if (cell.n < 1 || cell.t < 1) throw ConfigError("sweep cell " + cell.name() + " has a non-positive size");
  rc.generator.validate();
  rc.training.validate();

  const Checkpoint ckpt = run_train(rc);
  const fs::path generated = rc.output_dir / "generated.spikes";
  save_spikes(generate_samples(ckpt, rc.evaluation.samples, rc.training.seed), generated);

  EvaluateArgs ea;
  ea.generated = generated;
  ea.reference = rc.data_path;
  ea.neurons = ckpt.neuron_subset;
  ea.window = static_cast<std::size_t>(cell.t);
  ea.max_lag = rc.evaluation.max_lag;
  ea.out = rc.output_dir / "evaluation";
  return evaluate_and_write(ea);
}

}  // namespace

RunConfig RunConfig::from_settings(const Settings& settings) {
  SettingsReader r(settings);
  RunConfig rc;
  rc.generator = read_generator_config(r);
  rc.training = read_train_config(r);
  rc.data_path = r.get_string("data", "path", "");
  for (std::int64_t v : r.get_ints("data", "neurons", {})) {
    if (v < 0) throw ConfigError("data.neurons entries must be non-negative");
    rc.neurons.push_back(static_cast<std::size_t>(v));
  }
  rc.output_dir = r.get_string("output", "dir", rc.output_dir.string());
  rc.checkpoint_name = r.get_string("output", "checkpoint", rc.checkpoint_name);
  if (rc.checkpoint_name.empty()) throw ConfigError("output.checkpoint must not be empty");

  const auto samples = r.get_int64("evaluation", "samples", static_cast<std::int64_t>(rc.evaluation.samples));
  const auto max_lag = r.get_int64("evaluation", "max_lag", static_cast<std::int64_t>(rc.evaluation.max_lag));
  if (samples < 1) throw ConfigError("evaluation.samples must be >= 1");
  if (max_lag < 0) throw ConfigError("evaluation.max_lag must be >= 0");
  rc.evaluation.samples = static_cast<std::size_t>(samples);
  rc.evaluation.max_lag = static_cast<std::size_t>(max_lag);

  rc.sweep.neurons = r.get_ints("sweep", "neurons", rc.sweep.neurons);
  rc.sweep.timesteps = r.get_ints("sweep", "timesteps", rc.sweep.timesteps);
  rc.sweep.k_values = r.get_doubles("sweep", "k_values", rc.sweep.k_values);
  rc.sweep.seeds = r.get_ints("sweep", "seeds", rc.sweep.seeds);
  rc.sweep.parallel = r.get_bool("sweep", "parallel", rc.sweep.parallel);
  if (rc.sweep.neurons.empty() || rc.sweep.timesteps.empty() || rc.sweep.k_values.empty() || rc.sweep.seeds.empty()) {
    throw ConfigError("sweep lists must not be empty");
  }
  for (std::int64_t s : rc.sweep.seeds) {
    if (s < 0) throw ConfigError("sweep seeds must be non-negative");
  }
  r.reject_unknown();
  return rc;
}

Settings RunConfig::to_settings() const {
  Settings s;
  write_generator_config(generator, s);
  write_train_config(training, s);
  s.set("data", "path", data_path.string());
  s.set("data", "neurons", join_numbers(as_ints(neurons)));
  s.set("output", "dir", output_dir.string());
  s.set("output", "checkpoint", checkpoint_name);
  s.set("evaluation", "samples", std::to_string(evaluation.samples));
  s.set("evaluation", "max_lag", std::to_string(evaluation.max_lag));
  s.set("sweep", "neurons", join_numbers(sweep.neurons));
  s.set("sweep", "timesteps", join_numbers(sweep.timesteps));
  s.set("sweep", "k_values", join_numbers(sweep.k_values));
  s.set("sweep", "seeds", join_numbers(sweep.seeds));
  s.set("sweep", "parallel", sweep.parallel ? "true" : "false");
  return s;
}

WindowSpec RunConfig::window_spec() const {
  const auto n = static_cast<std::size_t>(generator.n_feature);
  if (neurons.empty()) return WindowSpec::first_rows(n, generator.n_patches);
  if (neurons.size() < n) {
    throw ConfigError("data.neurons lists " + std::to_string(neurons.size()) + " neurons, need " + std::to_string(n));
  }
  return WindowSpec{std::vector<std::size_t>(neurons.begin(), neurons.begin() + n),
                    static_cast<std::size_t>(generator.n_patches)};
}

RunConfig resolve_run_config(const std::optional<fs::path>& config, const std::vector<std::string>& overrides,
                             std::optional<std::uint64_t> seed, const std::optional<fs::path>& out) {
  Settings settings = config ? Settings::load(*config) : Settings{};
  for (const auto& o : overrides) settings.apply_override(o);
  if (seed) settings.set("training", "seed", std::to_string(*seed));
  if (out) settings.set("output", "dir", out->string());
  return RunConfig::from_settings(settings);
}

SpikeMatrix generate_samples(const Checkpoint& ckpt, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ConfigError("refusing to write an empty spike matrix (count = 0)");
  const GeneratorConfig& cfg = ckpt.state.gen_cfg;
  std::vector<BinaryMatrix> windows;
  windows.reserve(count);
  constexpr auto kPurpose = static_cast<std::uint64_t>(StreamPurpose::kSampling);
  for (std::size_t i = 0; i < count; ++i) {
    Rng noise_rng = Rng::keyed(seed, {kPurpose, i, 0});
    const NoiseVector noise = draw_noise(cfg, noise_rng);
    Rng measure_rng = Rng::keyed(seed, {kPurpose, i, 1});
    windows.push_back(generator_sample(cfg, ckpt.state.gen, noise, measure_rng));
  }
  return concat_windows(windows, ckpt.bin_width);
}

EvaluationSummary evaluate_files(const EvaluateArgs& args) { return compare(args).summary; }

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  return guarded("train", err, [&] {
    const RunConfig rc = resolve_run_config(args.config, args.overrides, args.seed, args.out);
    const Checkpoint ckpt = run_train(rc);
    out << "trained " << ckpt.state.gen_steps << " generator steps; wrote " << (rc.output_dir / rc.checkpoint_name).string()
        << '\n';
    return int{kOk};
  });
}

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded("generate", err, [&] {
    if (args.out.empty()) throw ConfigError("an output path is required");
    const Checkpoint ckpt = load_checkpoint(args.checkpoint);
    save_spikes(generate_samples(ckpt, args.count, args.seed), args.out);
    out << "wrote " << args.count << " windows to " << args.out.string() << '\n';
    return int{kOk};
  });
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded("evaluate", err, [&] {
    if (args.out.empty()) throw ConfigError("an output directory is required");
    const EvaluationSummary s = evaluate_and_write(args);
    out << "mse_kprob=" << format_double(s.mse_kprob) << " mse_rate=" << format_double(s.mse_rate);
    if (s.js) out << " js=" << format_double(*s.js);
    out << '\n';
    return int{kOk};
  });
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  return guarded("sweep", err, [&] {
    RunConfig rc = resolve_run_config(args.config, args.overrides, std::nullopt, args.out);
    if (args.seed) rc.sweep.seeds = {static_cast<std::int64_t>(*args.seed)};
    if (rc.data_path.empty()) throw ConfigError("data.path is required");
    make_dir(rc.output_dir);
    rc.to_settings().save(rc.output_dir / kResolvedConfigName);

    std::vector<Cell> cells;
    for (auto n : rc.sweep.neurons)
      for (auto t : rc.sweep.timesteps)
        for (double k : rc.sweep.k_values)
          for (auto seed : rc.sweep.seeds) cells.push_back({n, t, k, seed});

    std::vector<std::optional<EvaluationSummary>> results(cells.size());
    std::vector<std::exception_ptr> errors(cells.size());
    auto run_one = [&](std::size_t i) {
      try {
        results[i] = run_cell(rc, cells[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    };
    if (rc.sweep.parallel) {
      std::vector<std::future<void>> pending;
      for (std::size_t i = 0; i < cells.size(); ++i) pending.push_back(std::async(std::launch::async, run_one, i));
      for (auto& f : pending) f.get();
    } else {
      for (std::size_t i = 0; i < cells.size(); ++i) run_one(i);
    }

    std::ofstream table = open_out(rc.output_dir / "sweep_results.csv");
    table << "n,t,K,seed,mse_kprob,mse_rate,js\n";
    int status = kOk;
    std::ostringstream failures;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const Cell& c = cells[i];
      if (errors[i]) {
        if (status == kOk) status = exit_code_of(errors[i]);
        const std::string msg = message_of(errors[i]);
        err << "sweep: cell " << c.name() << " failed: " << msg << '\n';
        std::string quoted = msg;
        std::replace(quoted.begin(), quoted.end(), '"', '\'');
        failures << c.n << ',' << c.t << ',' << format_double(c.k) << ',' << c.seed << ",\"" << quoted << "\"\n";
        continue;
      }
      const auto& s = *results[i];
      table << c.n << ',' << c.t << ',' << format_double(c.k) << ',' << c.seed << ',' << format_double(s.mse_kprob)
            << ',' << format_double(s.mse_rate) << ',' << optional_number(s.js) << '\n';
    }
    if (!table) throw IoError("failed writing sweep_results.csv");
    if (status != kOk) {
      std::ofstream f = open_out(rc.output_dir / "sweep_failures.csv");
      f << "n,t,K,seed,error\n" << failures.str();
    }

    // Standard (K = 0) minus K-loss MSE, averaged over seeds where both
    // cells succeeded. Positive means the K-loss error is lower.
    std::ofstream diff = open_out(rc.output_dir / "sweep_diff.csv");
    diff << "n,t,K,paired_seeds,diff_mse_kprob,diff_mse_rate\n";
    std::map<std::tuple<std::int64_t, std::int64_t, double, std::int64_t>, EvaluationSummary> by_cell;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (results[i]) by_cell[{cells[i].n, cells[i].t, cells[i].k, cells[i].seed}] = *results[i];
    }
    const bool has_standard = std::find(rc.sweep.k_values.begin(), rc.sweep.k_values.end(), 0.0) != rc.sweep.k_values.end();
    if (has_standard) {
      for (auto n : rc.sweep.neurons) {
        for (auto t : rc.sweep.timesteps) {
          for (double k : rc.sweep.k_values) {
            if (k == 0.0) continue;
            double d_kprob = 0.0;
            double d_rate = 0.0;
            int pairs = 0;
            for (auto seed : rc.sweep.seeds) {
              const auto std_it = by_cell.find({n, t, 0.0, seed});
              const auto k_it = by_cell.find({n, t, k, seed});
              if (std_it == by_cell.end() || k_it == by_cell.end()) continue;
              d_kprob += std_it->second.mse_kprob - k_it->second.mse_kprob;
              d_rate += std_it->second.mse_rate - k_it->second.mse_rate;
              ++pairs;
            }
            if (pairs == 0) continue;
            diff << n << ',' << t << ',' << format_double(k) << ',' << pairs << ',' << format_double(d_kprob / pairs)
                 << ',' << format_double(d_rate / pairs) << '\n';
          }
        }
      }
    }
    if (!diff) throw IoError("failed writing sweep_diff.csv");
    out << "sweep: " << cells.size() << " cells, "
        << std::count_if(errors.begin(), errors.end(), [](const auto& e) { return e != nullptr; }) << " failed\n";
    return status;
  });
}

int cmd_surrogate(const SurrogateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded("surrogate", err, [&] {
    if (args.out.empty()) throw ConfigError("an output path is required");
    if (!(args.bin_width > 0.0)) throw ConfigError("bin width must be positive");
    SurrogateParams params{args.rates, args.burst_prob, args.burst_gain};
    params.validate();
    Rng rng = Rng::keyed(args.seed, {static_cast<std::uint64_t>(StreamPurpose::kSampling)});
    save_spikes(synthesize_surrogate(params, args.bins, rng, args.bin_width), args.out);
    out << "wrote " << args.rates.size() << " x " << args.bins << " surrogate raster to " << args.out.string() << '\n';
    return int{kOk};
  });
}

}  // namespace spiqgan::cli
