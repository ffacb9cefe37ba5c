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

#include "spiqgan/config.hpp"

#include <array>
#include <boost/property_tree/ini_parser.hpp>
#include <charconv>
#include <fstream>
#include <sstream>

#include "spiqgan/errors.hpp"

namespace spiqgan {
namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_value(const std::string& text, const std::string& name) {
  T out{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("cannot parse '" + text + "' for " + name);
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

std::string join_numbers(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + format_double(values[i]);
  return out;
}

std::string join_numbers(const std::vector<std::int64_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
  return out;
}

Settings Settings::parse(std::string_view text) {
  Settings s;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, s.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  std::istringstream lines{std::string(text)};
  for (std::string line; std::getline(lines, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == ';' || line[first] == '#') continue;
    if (line[first] == '[') break;
    throw ConfigError("'" + line.substr(first) + "' appears outside any [section]");
  }
  return s;
}

Settings Settings::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void Settings::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << to_ini();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string Settings::to_ini() const {
  std::string out;
  bool first = true;
  for (const auto& [section, node] : tree_) {
    if (!first) out += '\n';
    first = false;
    out += "[" + section + "]\n";
    for (const auto& [key, value] : node) out += key + " = " + value.data() + "\n";
  }
  return out;
}

void Settings::set(const std::string& section, const std::string& key, const std::string& value) {
  auto it = tree_.find(section);
  if (it == tree_.not_found()) {
    tree_.push_back({section, pt::ptree()});
    it = tree_.find(section);
  }
  pt::ptree& node = it->second;
  auto kit = node.find(key);
  if (kit == node.not_found()) {
    node.push_back({key, pt::ptree(value)});
  } else {
    kit->second.put_value(value);
  }
}

void Settings::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.substr(0, eq).find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form section.key=value");
  }
  const std::string section = trim(assignment.substr(0, dot));
  const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
  if (section.empty() || key.empty()) throw ConfigError("override '" + std::string(assignment) + "' lacks a key");
  set(section, key, trim(assignment.substr(eq + 1)));
}

const std::string* Settings::find(const std::string& section, const std::string& key) const {
  const auto it = tree_.find(section);
  if (it == tree_.not_found()) return nullptr;
  const auto kit = it->second.find(key);
  if (kit == it->second.not_found()) return nullptr;
  return &kit->second.data();
}

bool Settings::has_section(const std::string& section) const { return tree_.find(section) != tree_.not_found(); }

std::vector<std::string> Settings::keys() const {
  std::vector<std::string> out;
  for (const auto& [section, node] : tree_)
    for (const auto& [key, value] : node) out.push_back(section + "." + key);
  return out;
}

const std::string* SettingsReader::lookup(const std::string& section, const std::string& key) {
  consumed_.insert(section + "." + key);
  return settings_.find(section, key);
}

bool SettingsReader::contains(const std::string& section, const std::string& key) const {
  return settings_.find(section, key) != nullptr;
}

int SettingsReader::get_int(const std::string& section, const std::string& key, int fallback) {
  const auto* v = lookup(section, key);
  return v ? parse_value<int>(*v, section + "." + key) : fallback;
}

std::int64_t SettingsReader::get_int64(const std::string& section, const std::string& key, std::int64_t fallback) {
  const auto* v = lookup(section, key);
  return v ? parse_value<std::int64_t>(*v, section + "." + key) : fallback;
}

std::uint64_t SettingsReader::get_uint64(const std::string& section, const std::string& key,
                                         std::uint64_t fallback) {
  const auto* v = lookup(section, key);
  return v ? parse_value<std::uint64_t>(*v, section + "." + key) : fallback;
}

double SettingsReader::get_double(const std::string& section, const std::string& key, double fallback) {
  const auto* v = lookup(section, key);
  return v ? parse_value<double>(*v, section + "." + key) : fallback;
}

bool SettingsReader::get_bool(const std::string& section, const std::string& key, bool fallback) {
  const auto* v = lookup(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1") return true;
  if (*v == "false" || *v == "0") return false;
  throw ConfigError("cannot parse '" + *v + "' as a boolean for " + section + "." + key);
}

std::string SettingsReader::get_string(const std::string& section, const std::string& key,
                                       const std::string& fallback) {
  const auto* v = lookup(section, key);
  return v ? *v : fallback;
}

std::vector<double> SettingsReader::get_doubles(const std::string& section, const std::string& key,
                                                const std::vector<double>& fallback) {
  const auto* v = lookup(section, key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(*v)) out.push_back(parse_value<double>(item, section + "." + key));
  return out;
}

std::vector<std::int64_t> SettingsReader::get_ints(const std::string& section, const std::string& key,
                                                   const std::vector<std::int64_t>& fallback) {
  const auto* v = lookup(section, key);
  if (!v) return fallback;
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(*v)) out.push_back(parse_value<std::int64_t>(item, section + "." + key));
  return out;
}

void SettingsReader::reject_unknown() const {
  for (const auto& key : settings_.keys()) {
    if (!consumed_.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
}

void write_generator_config(const GeneratorConfig& cfg, Settings& out) {
  out.set("generator", "n_feature", std::to_string(cfg.n_feature));
  out.set("generator", "n_aux", std::to_string(cfg.n_aux));
  out.set("generator", "n_layers", std::to_string(cfg.n_layers));
  out.set("generator", "n_patches", std::to_string(cfg.n_patches));
  out.set("generator", "noise_low", format_double(cfg.noise_low));
  out.set("generator", "noise_high", format_double(cfg.noise_high));
  out.set("generator", "fresh_noise_per_layer", cfg.fresh_noise_per_layer ? "true" : "false");
  out.set("generator", "noise_sharing", cfg.noise_sharing == NoiseSharing::kShared ? "shared" : "per_patch");
}

GeneratorConfig read_generator_config(SettingsReader& in) {
  GeneratorConfig cfg;
  cfg.n_feature = in.get_int("generator", "n_feature", cfg.n_feature);
  cfg.n_aux = in.get_int("generator", "n_aux", cfg.n_aux);
  cfg.n_layers = in.get_int("generator", "n_layers", cfg.n_layers);
  cfg.n_patches = in.get_int("generator", "n_patches", cfg.n_patches);
  cfg.noise_low = in.get_double("generator", "noise_low", cfg.noise_low);
  cfg.noise_high = in.get_double("generator", "noise_high", cfg.noise_high);
  cfg.fresh_noise_per_layer = in.get_bool("generator", "fresh_noise_per_layer", cfg.fresh_noise_per_layer);
  const std::string sharing = in.get_string("generator", "noise_sharing", "per_patch");
  if (sharing == "per_patch") {
    cfg.noise_sharing = NoiseSharing::kPerPatch;
  } else if (sharing == "shared") {
    cfg.noise_sharing = NoiseSharing::kShared;
  } else {
    throw ConfigError("generator.noise_sharing must be 'per_patch' or 'shared', got '" + sharing + "'");
  }
  cfg.validate();
  return cfg;
}

void write_train_config(const TrainConfig& cfg, Settings& out) {
  out.set("training", "batch_size", std::to_string(cfg.batch_size));
  out.set("training", "lr_gen", format_double(cfg.lr_gen));
  out.set("training", "lr_critic", format_double(cfg.lr_critic));
  out.set("training", "k_coeff", format_double(cfg.k_coeff));
  out.set("training", "critic_steps_per_gen", std::to_string(cfg.critic_steps_per_gen));
  out.set("training", "clip_c", format_double(cfg.clip_c));
  out.set("training", "critic_constraint", to_string(cfg.critic_constraint));
  out.set("training", "penalty_mode", to_string(cfg.penalty_mode));
  out.set("training", "total_gen_steps", std::to_string(cfg.total_gen_steps));
  out.set("training", "seed", std::to_string(cfg.seed));
  out.set("training", "js_log_interval", std::to_string(cfg.js_log_interval));
}

TrainConfig read_train_config(SettingsReader& in) {
  TrainConfig cfg;
  cfg.batch_size = in.get_int("training", "batch_size", cfg.batch_size);
  cfg.lr_gen = in.get_double("training", "lr_gen", cfg.lr_gen);
  cfg.lr_critic = in.get_double("training", "lr_critic", cfg.lr_critic);
  cfg.k_coeff = in.get_double("training", "k_coeff", cfg.k_coeff);
  cfg.critic_steps_per_gen = in.get_int("training", "critic_steps_per_gen", cfg.critic_steps_per_gen);
  cfg.clip_c = in.get_double("training", "clip_c", cfg.clip_c);
  cfg.critic_constraint =
      parse_critic_constraint(in.get_string("training", "critic_constraint", to_string(cfg.critic_constraint)));
  cfg.penalty_mode = parse_penalty_mode(in.get_string("training", "penalty_mode", to_string(cfg.penalty_mode)));
  cfg.total_gen_steps = in.get_int64("training", "total_gen_steps", cfg.total_gen_steps);
  cfg.seed = in.get_uint64("training", "seed", cfg.seed);
  cfg.js_log_interval = in.get_int("training", "js_log_interval", cfg.js_log_interval);
  cfg.validate();
  return cfg;
}

}  // namespace spiqgan
