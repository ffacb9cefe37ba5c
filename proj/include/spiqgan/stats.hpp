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
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "spiqgan/binary_matrix.hpp"

namespace spiqgan {

// All estimators take a list of equally shaped n x t windows and pool
// their bins. Moments use divisor N throughout.

/// Spikes per second for each neuron.
std::vector<double> firing_rate(std::span<const BinaryMatrix> samples, double bin_width);

/// E[s_i s_j] - E[s_i] E[s_j] for i < j, upper triangle in row-major order.
std::vector<double> pairwise_covariance(std::span<const BinaryMatrix> samples);

/// Fraction of bins in which exactly k neurons spike, k = 0..n.
std::vector<double> k_probability(std::span<const BinaryMatrix> samples);

/// Neuron-averaged Pearson autocorrelation for lags 0..max_lag. Each
/// neuron's mean and variance come from all of its bins; lag-tau products
/// are averaged over the (u, u + tau) pairs that fit inside a window.
/// Neurons with zero variance are skipped; if all are constant the
/// normalization is undefined and ConfigError is thrown.
std::vector<double> autocorrelogram(std::span<const BinaryMatrix> samples, std::size_t max_lag);

/// Empirical law of state_index over the windows (requires n * t <= 20).
std::vector<double> state_histogram(std::span<const BinaryMatrix> samples);

/// Base-2 Jensen-Shannon divergence, in [0, 1].
double js_divergence(std::span<const double> p, std::span<const double> q);

/// Mean squared difference of two equally long vectors.
double stats_mse(std::span<const double> a, std::span<const double> b);

struct SampleMeta {
  std::size_t n = 0;
  std::size_t t = 0;
  std::size_t sample_count = 0;
  double bin_width = 0.0;
};

struct StatReport {
  std::vector<double> firing_rate;
  std::optional<std::vector<double>> pairwise_cov;     // absent for a single neuron
  std::vector<double> k_probability;
  std::optional<std::vector<double>> autocorrelogram;  // absent when every neuron is constant
  std::optional<std::vector<double>> state_histogram;  // absent when n * t > 20
  SampleMeta meta;
};

/// All statistics at once. The autocorrelogram uses lags up to
/// min(max_lag, t - 1).
StatReport build_report(std::span<const BinaryMatrix> samples, double bin_width, std::size_t max_lag);

/// One `stat,index,value` CSV per statistic plus meta.csv, under `dir`.
void write_report(const StatReport& report, const std::filesystem::path& dir);

}  // namespace spiqgan
