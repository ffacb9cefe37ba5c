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

#include "spiqgan/spikedata.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "spiqgan/errors.hpp"

namespace spiqgan {
namespace {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

WindowSpec WindowSpec::first_rows(std::size_t n, std::size_t t) {
  WindowSpec spec;
  spec.window_len = t;
  for (std::size_t i = 0; i < n; ++i) spec.neuron_subset.push_back(i);
  return spec;
}

void WindowSpec::validate(const SpikeMatrix& m) const {
  if (neuron_subset.empty()) throw ConfigError("window spec selects no neurons");
  if (window_len < 1) throw ConfigError("window length must be >= 1");
  if (window_len > m.bins()) {
    throw ConfigError("window length " + std::to_string(window_len) + " exceeds " + std::to_string(m.bins()) +
                      " bins");
  }
  std::set<std::size_t> seen;
  for (std::size_t r : neuron_subset) {
    if (r >= m.neurons()) {
      throw ConfigError("neuron index " + std::to_string(r) + " outside " + std::to_string(m.neurons()) +
                        " rows");
    }
    if (!seen.insert(r).second) throw ConfigError("neuron index " + std::to_string(r) + " repeated");
  }
}

SpikeMatrix parse_spikes(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw FormatError("empty spike file");

  const auto header = split_ws(lines[0]);
  std::size_t neurons = 0;
  std::size_t bins = 0;
  double bin_width = 0.0;
  if (header.size() != 5 || header[0] != "SPIKES" || header[1] != "v1" || !parse_number(header[2], neurons) ||
      !parse_number(header[3], bins) || !parse_number(header[4], bin_width)) {
    throw FormatError("malformed header, expected 'SPIKES v1 <neurons> <bins> <bin_width_seconds>'");
  }
  if (neurons < 1 || bins < 1) throw FormatError("header declares an empty matrix");
  if (!(bin_width > 0.0)) throw FormatError("bin width must be positive");
  if (lines.size() - 1 != neurons) {
    throw FormatError("header declares " + std::to_string(neurons) + " neurons but file has " +
                      std::to_string(lines.size() - 1) + " rows");
  }

  SpikeMatrix m;
  m.bin_width = bin_width;
  m.data = BinaryMatrix(neurons, bins);
  for (std::size_t r = 0; r < neurons; ++r) {
    const std::string_view row = lines[r + 1];
    if (row.size() != bins) {
      throw FormatError("row " + std::to_string(r) + " has " + std::to_string(row.size()) + " entries, expected " +
                        std::to_string(bins));
    }
    for (std::size_t c = 0; c < bins; ++c) {
      if (row[c] != '0' && row[c] != '1') {
        throw FormatError("non-binary entry '" + std::string(1, row[c]) + "' at row " + std::to_string(r) +
                          ", column " + std::to_string(c));
      }
      m.data(r, c) = static_cast<std::uint8_t>(row[c] - '0');
    }
  }
  return m;
}

std::string format_spikes(const SpikeMatrix& m) {
  if (m.data.empty()) throw ConfigError("refusing to write an empty spike matrix");
  if (!(m.bin_width > 0.0)) throw ConfigError("bin width must be positive");
  std::string out = "SPIKES v1 " + std::to_string(m.neurons()) + " " + std::to_string(m.bins()) + " " +
                    format_double(m.bin_width) + "\n";
  out.reserve(out.size() + m.neurons() * (m.bins() + 1));
  for (std::size_t r = 0; r < m.neurons(); ++r) {
    for (std::uint8_t v : m.data.row(r)) out.push_back(v ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

SpikeMatrix load_spikes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open spike file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return parse_spikes(buf.str());
}

void save_spikes(const SpikeMatrix& m, const std::filesystem::path& path) {
  const std::string text = format_spikes(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

SpikeMatrix concat_windows(const std::vector<BinaryMatrix>& windows, double bin_width) {
  if (windows.empty()) throw ConfigError("no windows to concatenate");
  const std::size_t rows = windows.front().rows();
  const std::size_t t = windows.front().cols();
  SpikeMatrix m;
  m.bin_width = bin_width;
  m.data = BinaryMatrix(rows, t * windows.size());
  for (std::size_t w = 0; w < windows.size(); ++w) {
    if (windows[w].rows() != rows || windows[w].cols() != t) throw ConfigError("windows differ in shape");
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < t; ++c) m.data(r, w * t + c) = windows[w](r, c);
  }
  return m;
}

std::vector<BinaryMatrix> split_windows(const SpikeMatrix& m, std::size_t window_len) {
  if (window_len < 1 || m.bins() % window_len != 0) {
    throw ConfigError("raster of " + std::to_string(m.bins()) + " bins is not a whole number of " +
                      std::to_string(window_len) + "-bin windows");
  }
  std::vector<BinaryMatrix> out;
  const WindowSpec spec = WindowSpec::first_rows(m.neurons(), window_len);
  for (std::size_t start = 0; start < m.bins(); start += window_len) out.push_back(extract_window(m, spec, start));
  return out;
}

BinaryMatrix extract_window(const SpikeMatrix& m, const WindowSpec& spec, std::size_t start) {
  if (start + spec.window_len > m.bins()) throw ConfigError("window runs past the end of the raster");
  BinaryMatrix w(spec.neuron_subset.size(), spec.window_len);
  for (std::size_t k = 0; k < spec.neuron_subset.size(); ++k) {
    const auto row = m.data.row(spec.neuron_subset[k]);
    for (std::size_t c = 0; c < spec.window_len; ++c) w(k, c) = row[start + c];
  }
  return w;
}

std::vector<BinaryMatrix> sample_windows(const SpikeMatrix& m, const WindowSpec& spec, std::size_t count,
                                         Rng& rng) {
  spec.validate(m);
  const std::size_t starts = m.bins() - spec.window_len + 1;
  std::vector<BinaryMatrix> out;
  out.reserve(count);
  for (std::size_t b = 0; b < count; ++b) out.push_back(extract_window(m, spec, rng.below(starts)));
  return out;
}

std::vector<BinaryMatrix> tile_windows(const SpikeMatrix& m, const WindowSpec& spec) {
  spec.validate(m);
  std::vector<BinaryMatrix> out;
  out.reserve(m.bins() / spec.window_len);
  for (std::size_t s = 0; s + spec.window_len <= m.bins(); s += spec.window_len) {
    out.push_back(extract_window(m, spec, s));
  }
  return out;
}

std::vector<BinaryMatrix> all_windows(const SpikeMatrix& m, const WindowSpec& spec) {
  spec.validate(m);
  std::vector<BinaryMatrix> out;
  out.reserve(m.bins() - spec.window_len + 1);
  for (std::size_t s = 0; s + spec.window_len <= m.bins(); ++s) out.push_back(extract_window(m, spec, s));
  return out;
}

void export_windows_csv(const std::vector<BinaryMatrix>& windows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "window,neuron,bin,spike\n";
  for (std::size_t w = 0; w < windows.size(); ++w)
    for (std::size_t r = 0; r < windows[w].rows(); ++r)
      for (std::size_t c = 0; c < windows[w].cols(); ++c)
        out << w << ',' << r << ',' << c << ',' << int{windows[w](r, c)} << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

void SurrogateParams::validate() const {
  if (rates.empty()) throw ConfigError("surrogate needs at least one neuron rate");
  double max_rate = 0.0;
  for (double r : rates) {
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("surrogate rates must lie in (0, 1)");
    max_rate = std::max(max_rate, r);
  }
  if (!(burst_prob >= 0.0 && burst_prob <= 1.0)) throw ConfigError("burst_prob must lie in [0, 1]");
  if (!(burst_gain > 0.0)) throw ConfigError("burst_gain must be positive");
  if (burst_gain * max_rate > 1.0) throw ConfigError("burst_gain * max(rates) exceeds 1");
}

SpikeMatrix synthesize_surrogate(const SurrogateParams& params, std::size_t bins, Rng& rng, double bin_width) {
  params.validate();
  if (bins < 1) throw ConfigError("surrogate needs at least one bin");
  SpikeMatrix m;
  m.bin_width = bin_width;
  m.data = BinaryMatrix(params.rates.size(), bins);
  bool burst = rng.uniform() < 0.5;
  for (std::size_t c = 0; c < bins; ++c) {
    if (c > 0 && rng.uniform() >= params.burst_prob) burst = !burst;
    const double gain = burst ? params.burst_gain : 1.0;
    for (std::size_t i = 0; i < params.rates.size(); ++i) {
      m.data(i, c) = rng.uniform() < gain * params.rates[i] ? 1 : 0;
    }
  }
  return m;
}

std::vector<double> surrogate_state_distribution(const SurrogateParams& params, std::size_t t) {
  params.validate();
  const std::size_t n = params.rates.size();
  if (t < 1 || n * t > static_cast<std::size_t>(kMaxStateBits)) {
    throw ConfigError("surrogate state distribution needs 1 <= n * t <= 20");
  }
  const std::size_t patterns = std::size_t{1} << n;
  // emission[h][pattern], pattern read with neuron 0 as its most significant bit
  std::array<std::vector<double>, 2> emission;
  for (int h = 0; h < 2; ++h) {
    const double gain = h == 1 ? params.burst_gain : 1.0;
    emission[h].assign(patterns, 1.0);
    for (std::size_t pat = 0; pat < patterns; ++pat) {
      for (std::size_t i = 0; i < n; ++i) {
        const bool spike = (pat >> (n - 1 - i)) & 1U;
        const double r = gain * params.rates[i];
        emission[h][pat] *= spike ? r : 1.0 - r;
      }
    }
  }
  // joint[prefix][h]: probability of the prefix with hidden state h at its last bin
  std::vector<std::array<double, 2>> joint{{0.5, 0.5}};
  for (std::size_t bin = 0; bin < t; ++bin) {
    if (bin > 0) {
      for (auto& hs : joint) {
        const double quiet = hs[0] * params.burst_prob + hs[1] * (1.0 - params.burst_prob);
        const double burst = hs[1] * params.burst_prob + hs[0] * (1.0 - params.burst_prob);
        hs = {quiet, burst};
      }
    }
    std::vector<std::array<double, 2>> next(joint.size() * patterns);
    for (std::size_t prefix = 0; prefix < joint.size(); ++prefix)
      for (std::size_t pat = 0; pat < patterns; ++pat)
        for (int h = 0; h < 2; ++h) next[prefix * patterns + pat][h] = joint[prefix][h] * emission[h][pat];
    joint = std::move(next);
  }
  std::vector<double> out(joint.size());
  for (std::size_t s = 0; s < joint.size(); ++s) out[s] = joint[s][0] + joint[s][1];
  return out;
}

std::uint64_t state_index(const BinaryMatrix& window) {
  const std::size_t bits = window.rows() * window.cols();
  if (bits > static_cast<std::size_t>(kMaxStateBits)) {
    throw ConfigError("state index needs n * t <= 20, got " + std::to_string(bits));
  }
  std::uint64_t idx = 0;
  for (std::size_t p = 0; p < window.cols(); ++p)
    for (std::size_t k = 0; k < window.rows(); ++k) idx = (idx << 1) | window(k, p);
  return idx;
}

}  // namespace spiqgan
