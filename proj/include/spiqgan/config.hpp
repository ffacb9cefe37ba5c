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

#include <boost/property_tree/ptree.hpp>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "spiqgan/generator.hpp"
#include "spiqgan/training.hpp"

namespace spiqgan {

/// Sectioned key=value settings (INI syntax, `;` or `#` comments).
/// Sections and keys keep their insertion order when written back.
class Settings {
 public:
  static Settings parse(std::string_view text);
  static Settings load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  std::string to_ini() const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  /// Applies a `section.key=value` override.
  void apply_override(std::string_view assignment);
  const std::string* find(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  /// Every `section.key` in order.
  std::vector<std::string> keys() const;

 private:
  boost::property_tree::ptree tree_;
};

/// Typed access that remembers which keys were read, so unknown keys can
/// be rejected once every consumer has had its turn.
class SettingsReader {
 public:
  explicit SettingsReader(const Settings& settings) : settings_(settings) {}
  explicit SettingsReader(const Settings&&) = delete;

  int get_int(const std::string& section, const std::string& key, int fallback);
  std::int64_t get_int64(const std::string& section, const std::string& key, std::int64_t fallback);
  std::uint64_t get_uint64(const std::string& section, const std::string& key, std::uint64_t fallback);
  double get_double(const std::string& section, const std::string& key, double fallback);
  bool get_bool(const std::string& section, const std::string& key, bool fallback);
  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback);
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback);
  std::vector<std::int64_t> get_ints(const std::string& section, const std::string& key,
                                     const std::vector<std::int64_t>& fallback);
  bool contains(const std::string& section, const std::string& key) const;

  /// Throws ConfigError naming the first key that was never read.
  void reject_unknown() const;

 private:
  const std::string* lookup(const std::string& section, const std::string& key);

  const Settings& settings_;
  std::set<std::string> consumed_;
};

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
std::string join_numbers(const std::vector<double>& values);
std::string join_numbers(const std::vector<std::int64_t>& values);

void write_generator_config(const GeneratorConfig& cfg, Settings& out);
GeneratorConfig read_generator_config(SettingsReader& in);

void write_train_config(const TrainConfig& cfg, Settings& out);
TrainConfig read_train_config(SettingsReader& in);

}  // namespace spiqgan
