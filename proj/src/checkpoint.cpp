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

#include "spiqgan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <zlib.h>

#include "spiqgan/config.hpp"
#include "spiqgan/errors.hpp"

namespace spiqgan {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");
static_assert(sizeof(double) == 8);

class Writer {
 public:
  void bytes(std::string_view b) { out_.append(b); }
  template <typename T>
  void scalar(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void tensor(std::span<const double> values) {
    scalar<std::uint64_t>(values.size());
    for (double v : values) scalar(v);
  }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  std::string_view bytes(std::size_t n) {
    need(n);
    std::string_view b = in_.substr(pos_, n);
    pos_ += n;
    return b;
  }
  template <typename T>
  T scalar() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::vector<double> tensor() {
    const auto n = scalar<std::uint64_t>();
    if (n > (in_.size() - pos_) / sizeof(double)) throw FormatError("checkpoint tensor length exceeds file size");
    std::vector<double> v(n);
    for (auto& x : v) x = scalar<double>();
    return v;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw FormatError("checkpoint truncated");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

std::string config_block(const Checkpoint& ckpt) {
  Settings s;
  write_generator_config(ckpt.state.gen_cfg, s);
  write_train_config(ckpt.state.train_cfg, s);
  std::vector<std::int64_t> neurons(ckpt.neuron_subset.begin(), ckpt.neuron_subset.end());
  s.set("data", "neurons", join_numbers(neurons));
  s.set("data", "bin_width", format_double(ckpt.bin_width));
  return s.to_ini();
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  const TrainState& st = ckpt.state;
  Writer w;
  w.bytes(kCheckpointMagic);
  w.scalar<std::uint32_t>(kCheckpointVersion);
  const std::string cfg = config_block(ckpt);
  w.scalar<std::uint64_t>(cfg.size());
  w.bytes(cfg);
  w.scalar<std::int64_t>(st.gen_steps);
  w.scalar<std::int64_t>(st.critic_steps);
  w.tensor(st.gen.theta);
  w.tensor(st.critic.values());
  w.tensor(st.gen_adam.m);
  w.tensor(st.gen_adam.v);
  w.tensor(st.critic_adam.m);
  w.tensor(st.critic_adam.v);
  w.scalar<std::int64_t>(st.gen_adam.step_count);
  w.scalar<std::int64_t>(st.critic_adam.step_count);
  w.scalar<std::uint32_t>(crc32_of(w.str()));
  return std::move(w.str());
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < kCheckpointMagic.size() || bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic) {
    throw FormatError("not a checkpoint file (bad magic)");
  }
  if (bytes.size() >= kCheckpointMagic.size() + 4) {
    std::uint32_t version;
    std::memcpy(&version, bytes.data() + kCheckpointMagic.size(), 4);
    if (version != kCheckpointVersion) {
      throw VersionError("checkpoint version " + std::to_string(version) + " is not supported by reader version " +
                         std::to_string(kCheckpointVersion));
    }
  }
  if (bytes.size() < kCheckpointMagic.size() + 8) throw FormatError("checkpoint checksum mismatch (file truncated)");
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body.size(), 4);
  if (stored != crc32_of(body)) throw FormatError("checkpoint checksum mismatch");

  Reader r(body);
  r.bytes(kCheckpointMagic.size());
  r.scalar<std::uint32_t>();
  const auto cfg_len = r.scalar<std::uint64_t>();
  if (cfg_len > body.size()) throw FormatError("checkpoint config block exceeds file size");
  const Settings settings = Settings::parse(r.bytes(cfg_len));

  Checkpoint ckpt;
  SettingsReader sr(settings);
  TrainState& st = ckpt.state;
  st.gen_cfg = read_generator_config(sr);
  st.train_cfg = read_train_config(sr);
  for (std::int64_t n : sr.get_ints("data", "neurons", {})) {
    if (n < 0) throw FormatError("checkpoint lists a negative neuron index");
    ckpt.neuron_subset.push_back(static_cast<std::size_t>(n));
  }
  ckpt.bin_width = sr.get_double("data", "bin_width", kDefaultBinWidth);
  sr.reject_unknown();

  st.gen_steps = r.scalar<std::int64_t>();
  st.critic_steps = r.scalar<std::int64_t>();
  st.gen.theta = r.tensor();
  const auto critic_values = r.tensor();
  st.gen_adam.m = r.tensor();
  st.gen_adam.v = r.tensor();
  st.critic_adam.m = r.tensor();
  st.critic_adam.v = r.tensor();
  st.gen_adam.step_count = r.scalar<std::int64_t>();
  st.critic_adam.step_count = r.scalar<std::int64_t>();
  if (!r.done()) throw FormatError("checkpoint has trailing bytes");

  st.critic = CriticParams(st.gen_cfg.output_size());
  if (critic_values.size() != st.critic.values().size() || st.gen.theta.size() != st.gen_cfg.param_count() ||
      st.gen_adam.m.size() != st.gen.theta.size() || st.gen_adam.v.size() != st.gen.theta.size() ||
      st.critic_adam.m.size() != critic_values.size() || st.critic_adam.v.size() != critic_values.size()) {
    throw FormatError("checkpoint tensor shapes do not match its config");
  }
  std::copy(critic_values.begin(), critic_values.end(), st.critic.values().begin());
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

}  // namespace spiqgan
