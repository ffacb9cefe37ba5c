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
#include <string>
#include <string_view>
#include <vector>

#include "spiqgan/binary_matrix.hpp"
#include "spiqgan/rng.hpp"

namespace spiqgan {

inline constexpr double kDefaultBinWidth = 0.02;

/// Binary spike raster: rows are neurons, columns are time bins of
/// `bin_width` seconds.
struct SpikeMatrix {
  BinaryMatrix data;
  double bin_width = kDefaultBinWidth;
  std::vector<std::string> neuron_ids;  // optional, not serialized

  std::size_t neurons() const { return data.rows(); }
  std::size_t bins() const { return data.cols(); }
};

/// Which neurons (rows, in order) and how many consecutive bins make up
/// one training window.
struct WindowSpec {
  std::vector<std::size_t> neuron_subset;
  std::size_t window_len = 1;

  /// First `n` rows, windows of `t` bins.
  static WindowSpec first_rows(std::size_t n, std::size_t t);

  /// Throws ConfigError if the spec does not fit `m`.
  void validate(const SpikeMatrix& m) const;
};

// `SPIKES v1 <neurons> <bins> <bin_width_seconds>` followed by one line of
// 0/1 characters per neuron.
SpikeMatrix parse_spikes(std::string_view text);
std::string format_spikes(const SpikeMatrix& m);
SpikeMatrix load_spikes(const std::filesystem::path& path);
void save_spikes(const SpikeMatrix& m, const std::filesystem::path& path);

/// Concatenates equally shaped windows column-wise into one raster.
SpikeMatrix concat_windows(const std::vector<BinaryMatrix>& windows, double bin_width);

/// Splits a raster into consecutive blocks of `window_len` columns.
std::vector<BinaryMatrix> split_windows(const SpikeMatrix& m, std::size_t window_len);

/// Window with the spec's rows starting at column `start`.
BinaryMatrix extract_window(const SpikeMatrix& m, const WindowSpec& spec, std::size_t start);

/// B windows with start column uniform in [0, bins - window_len].
std::vector<BinaryMatrix> sample_windows(const SpikeMatrix& m, const WindowSpec& spec, std::size_t count,
                                         Rng& rng);

/// Non-overlapping windows starting at columns 0, t, 2t, ...; a trailing
/// partial window is dropped.
std::vector<BinaryMatrix> tile_windows(const SpikeMatrix& m, const WindowSpec& spec);

/// Every sliding window (stride 1), in start-column order.
std::vector<BinaryMatrix> all_windows(const SpikeMatrix& m, const WindowSpec& spec);

/// Debug export with header `window,neuron,bin,spike`.
void export_windows_csv(const std::vector<BinaryMatrix>& windows, const std::filesystem::path& path);

/// Markov-modulated Bernoulli surrogate. A hidden two-state chain (quiet,
/// burst) keeps its state with probability `burst_prob` per bin and starts
/// from its stationary law (1/2, 1/2). Neuron i spikes with rates[i] in
/// quiet bins and burst_gain * rates[i] in burst bins.
struct SurrogateParams {
  std::vector<double> rates;
  double burst_prob = 0.9;
  double burst_gain = 1.0;

  void validate() const;
};

SpikeMatrix synthesize_surrogate(const SurrogateParams& params, std::size_t bins, Rng& rng,
                                 double bin_width = kDefaultBinWidth);

/// Exact distribution of a t-bin surrogate window in state-index order.
/// Requires rates.size() * t <= 20.
std::vector<double> surrogate_state_distribution(const SurrogateParams& params, std::size_t t);

inline constexpr int kMaxStateBits = 20;

/// Patch-major bit string of an n x t window read as an integer: neuron 0
/// of bin 0 is the most significant bit. Throws ConfigError if n*t > 20.
std::uint64_t state_index(const BinaryMatrix& window);

}  // namespace spiqgan
