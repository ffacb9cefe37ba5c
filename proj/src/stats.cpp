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

#include "spiqgan/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "spiqgan/errors.hpp"
#include "spiqgan/spikedata.hpp"

namespace spiqgan {
namespace {

void check_samples(std::span<const BinaryMatrix> samples) {
  if (samples.empty()) throw ConfigError("statistics need at least one sample");
  const std::size_t n = samples.front().rows();
  const std::size_t t = samples.front().cols();
  if (n == 0 || t == 0) throw ConfigError("samples must be non-empty matrices");
  for (const auto& s : samples) {
    if (s.rows() != n || s.cols() != t) throw ConfigError("samples differ in shape");
  }
}

std::vector<double> neuron_means(std::span<const BinaryMatrix> samples) {
  const std::size_t n = samples.front().rows();
  const double bins = static_cast<double>(samples.size() * samples.front().cols());
  std::vector<double> mean(n, 0.0);
  for (const auto& s : samples)
    for (std::size_t i = 0; i < n; ++i)
      for (std::uint8_t v : s.row(i)) mean[i] += v;
  for (double& m : mean) m /= bins;
  return mean;
}

double kl_base2(std::span<const double> p, std::span<const double> m) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) kl += p[i] * std::log2(p[i] / m[i]);
  }
  return kl;
}

std::vector<double> normalized(std::span<const double> p) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw ConfigError("probability vector has a negative or NaN entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw ConfigError("probability vector sums to " + std::to_string(sum));
  std::vector<double> out(p.begin(), p.end());
  for (double& v : out) v /= sum;
  return out;
}

void write_stat(const std::filesystem::path& path, const char* name, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "stat,index,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) out << name << ',' << i << ',' << values[i] << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::vector<double> firing_rate(std::span<const BinaryMatrix> samples, double bin_width) {
  check_samples(samples);
  if (!(bin_width > 0.0)) throw ConfigError("bin width must be positive");
  auto rate = neuron_means(samples);
  for (double& r : rate) r /= bin_width;
  return rate;
}

std::vector<double> pairwise_covariance(std::span<const BinaryMatrix> samples) {
  check_samples(samples);
  const std::size_t n = samples.front().rows();
  const std::size_t t = samples.front().cols();
  if (n < 2) throw ConfigError("pairwise covariance needs at least two neurons");
  const auto mean = neuron_means(samples);
  const double bins = static_cast<double>(samples.size() * t);
  std::vector<double> cov;
  cov.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double both = 0.0;
      for (const auto& s : samples)
        for (std::size_t c = 0; c < t; ++c) both += s(i, c) & s(j, c);
      cov.push_back(both / bins - mean[i] * mean[j]);
    }
  }
  return cov;
}

std::vector<double> k_probability(std::span<const BinaryMatrix> samples) {
  check_samples(samples);
  const std::size_t n = samples.front().rows();
  const std::size_t t = samples.front().cols();
  std::vector<double> counts(n + 1, 0.0);
  for (const auto& s : samples) {
    for (std::size_t c = 0; c < t; ++c) {
      std::size_t k = 0;
      for (std::size_t i = 0; i < n; ++i) k += s(i, c);
      counts[k] += 1.0;
    }
  }
  const double bins = static_cast<double>(samples.size() * t);
  for (double& c : counts) c /= bins;
  return counts;
}

std::vector<double> autocorrelogram(std::span<const BinaryMatrix> samples, std::size_t max_lag) {
  check_samples(samples);
  const std::size_t n = samples.front().rows();
  const std::size_t t = samples.front().cols();
  if (max_lag >= t) {
    throw ConfigError("max lag " + std::to_string(max_lag) + " needs windows longer than " + std::to_string(t));
  }
  const auto mean = neuron_means(samples);
  std::vector<double> acg(max_lag + 1, 0.0);
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double var = mean[i] * (1.0 - mean[i]);
    if (var <= 0.0) continue;
    ++used;
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
      double acc = 0.0;
      for (const auto& s : samples)
        for (std::size_t u = 0; u + lag < t; ++u) acc += (s(i, u) - mean[i]) * (s(i, u + lag) - mean[i]);
      const double pairs = static_cast<double>(samples.size() * (t - lag));
      acg[lag] += acc / pairs / var;
    }
  }
  if (used == 0) throw ConfigError("autocorrelogram undefined: every neuron is constant");
  for (double& a : acg) a /= static_cast<double>(used);
  return acg;
}

std::vector<double> state_histogram(std::span<const BinaryMatrix> samples) {
  check_samples(samples);
  const std::size_t bits = samples.front().rows() * samples.front().cols();
  if (bits > static_cast<std::size_t>(kMaxStateBits)) {
    throw ConfigError("state histogram needs n * t <= 20, got " + std::to_string(bits));
  }
  std::vector<double> hist(std::size_t{1} << bits, 0.0);
  for (const auto& s : samples) hist[state_index(s)] += 1.0;
  for (double& h : hist) h /= static_cast<double>(samples.size());
  return hist;
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ConfigError("JS divergence of vectors with different lengths");
  const auto pn = normalized(p);
  const auto qn = normalized(q);
  std::vector<double> m(pn.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (pn[i] + qn[i]);
  const double js = 0.5 * kl_base2(pn, m) + 0.5 * kl_base2(qn, m);
  return std::clamp(js, 0.0, 1.0);
}

double stats_mse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("MSE of vectors with different lengths");
  if (a.empty()) throw ConfigError("MSE of empty vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

StatReport build_report(std::span<const BinaryMatrix> samples, double bin_width, std::size_t max_lag) {
  check_samples(samples);
  StatReport r;
  const std::size_t n = samples.front().rows();
  const std::size_t t = samples.front().cols();
  r.meta = {n, t, samples.size(), bin_width};
  r.firing_rate = firing_rate(samples, bin_width);
  if (n >= 2) r.pairwise_cov = pairwise_covariance(samples);
  r.k_probability = k_probability(samples);
  try {
    r.autocorrelogram = autocorrelogram(samples, std::min(max_lag, t - 1));
  } catch (const ConfigError&) {
    r.autocorrelogram.reset();
  }
  if (n * t <= static_cast<std::size_t>(kMaxStateBits)) r.state_histogram = state_histogram(samples);
  return r;
}

void write_report(const StatReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_stat(dir / "firing_rate.csv", "firing_rate", report.firing_rate);
  if (report.pairwise_cov) write_stat(dir / "pairwise_cov.csv", "pairwise_cov", *report.pairwise_cov);
  write_stat(dir / "k_probability.csv", "k_probability", report.k_probability);
  if (report.autocorrelogram) write_stat(dir / "autocorrelogram.csv", "autocorrelogram", *report.autocorrelogram);
  if (report.state_histogram) write_stat(dir / "state_histogram.csv", "state_histogram", *report.state_histogram);

  std::ofstream meta(dir / "meta.csv", std::ios::binary | std::ios::trunc);
  if (!meta) throw IoError("cannot write " + (dir / "meta.csv").string());
  meta.precision(17);
  meta << "key,value\n"
       << "n," << report.meta.n << '\n'
       << "t," << report.meta.t << '\n'
       << "samples," << report.meta.sample_count << '\n'
       << "bin_width," << report.meta.bin_width << '\n';
}

}  // namespace spiqgan
