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

#include "spiqgan/training.hpp"

namespace spiqgan {

inline constexpr std::string_view kCheckpointMagic = "SPIQGAN-CKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Complete training snapshot plus the data selection it was trained on.
struct Checkpoint {
  TrainState state;
  std::vector<std::size_t> neuron_subset;
  double bin_width = kDefaultBinWidth;

  bool operator==(const Checkpoint&) const = default;
};

// Layout, all integers little-endian:
//   magic "SPIQGAN-CKPT" | u32 version | u64 n + n bytes of INI config |
//   i64 gen_steps | i64 critic_steps |
//   tensors (u64 count + count IEEE-754 doubles): generator theta,
//   critic values, generator Adam m, v, critic Adam m, v |
//   i64 generator Adam step | i64 critic Adam step | u32 CRC-32 of all
//   preceding bytes.
std::string serialize_checkpoint(const Checkpoint& ckpt);

/// Throws VersionError for another format version and FormatError for a
/// bad magic, a checksum mismatch or truncated contents.
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace spiqgan
