// Copyright 2026 The gerry Authors
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

#include "gerry/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "gerry/errors.hpp"

namespace gerry {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = first + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw ParseError("config key " + key + ": not a number: '" + value + "'");
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&, const std::filesystem::path&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    const auto path = [](std::filesystem::path RunConfig::*field) {
      return [field](RunConfig& c, const std::string&, const std::string& v, const std::filesystem::path& base) {
        c.*field = resolve(base, v);
      };
    };
    const auto real = [](auto get) {
      return [get](RunConfig& c, const std::string& k, const std::string& v, const std::filesystem::path&) {
        get(c) = parse_number<double>(k, v);
      };
    };
    const auto integer = [](auto get) {
      return [get](RunConfig& c, const std::string& k, const std::string& v, const std::filesystem::path&) {
        using T = std::remove_reference_t<decltype(get(c))>;
        get(c) = parse_number<T>(k, v);
      };
    };
    t["wards"] = path(&RunConfig::wards);
    t["adjacency"] = path(&RunConfig::adjacency);
    t["votes"] = path(&RunConfig::votes);
    t["ensemble"] = path(&RunConfig::ensemble);
    t["out"] = path(&RunConfig::out);
    t["districts"] = integer([](RunConfig& c) -> int& { return c.districts; });
    t["w_pop"] = real([](RunConfig& c) -> double& { return c.weights.pop; });
    t["w_comp"] = real([](RunConfig& c) -> double& { return c.weights.comp; });
    t["w_county"] = real([](RunConfig& c) -> double& { return c.weights.county; });
    t["w_vra"] = real([](RunConfig& c) -> double& { return c.weights.vra; });
    t["w_town"] = real([](RunConfig& c) -> double& { return c.weights.town; });
    t["vra_black_districts"] = integer([](RunConfig& c) -> int& { return c.vra.black_districts; });
    t["vra_black_threshold"] = real([](RunConfig& c) -> double& { return c.vra.black_threshold; });
    t["vra_hispanic_districts"] = integer([](RunConfig& c) -> int& { return c.vra.hispanic_districts; });
    t["vra_hispanic_threshold"] = real([](RunConfig& c) -> double& { return c.vra.hispanic_threshold; });
    t["max_pop_deviation"] = real([](RunConfig& c) -> double& { return c.max_pop_deviation; });
    t["max_compactness"] = [](RunConfig& c, const std::string& k, const std::string& v, const std::filesystem::path&) {
      if (v != "none" && v != "ref") parse_number<double>(k, v);
      c.max_compactness = v;
    };
    t["steps_beta0"] = integer([](RunConfig& c) -> std::int64_t& { return c.schedule.steps_beta0; });
    t["steps_ramp"] = integer([](RunConfig& c) -> std::int64_t& { return c.schedule.steps_ramp; });
    t["steps_beta1"] = integer([](RunConfig& c) -> std::int64_t& { return c.schedule.steps_beta1; });
    t["ensemble_size"] = integer([](RunConfig& c) -> std::size_t& { return c.ensemble_size; });
    t["max_attempts"] = integer([](RunConfig& c) -> std::uint64_t& { return c.max_attempts; });
    t["seed"] = integer([](RunConfig& c) -> std::uint64_t& { return c.seed; });
    t["workers"] = integer([](RunConfig& c) -> int& { return c.workers; });
    t["stall_cap"] = integer([](RunConfig& c) -> std::int64_t& { return c.stall_cap; });
    t["shift_min"] = real([](RunConfig& c) -> double& { return c.shift_min; });
    t["shift_max"] = real([](RunConfig& c) -> double& { return c.shift_max; });
    t["shift_step"] = real([](RunConfig& c) -> double& { return c.shift_step; });
    t["variant_halfwidth"] = real([](RunConfig& c) -> double& { return c.variant_halfwidth; });
    t["ramp_width"] = real([](RunConfig& c) -> double& { return c.ramp_width; });
    return t;
  }();
  return table;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value, const std::filesystem::path& base) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ParseError("unknown config key: " + key);
  it->second(*this, key, value, base);
}

void RunConfig::validate() const {
  if (districts < 1) throw ValidationError("districts must be positive");
  weights.validate();
  vra.validate();
  schedule.validate();
  if (!(max_pop_deviation > 0.0)) throw ValidationError("max_pop_deviation must be positive");
  if (ensemble_size < 1) throw ValidationError("ensemble_size must be at least 1");
  if (workers < 1) throw ValidationError("workers must be at least 1");
  if (stall_cap < 1) throw ValidationError("stall_cap must be positive");
  if (!(shift_step > 0.0) || shift_max < shift_min) throw ValidationError("shift grid needs min <= max and step > 0");
  if (!(variant_halfwidth >= 0.0)) throw ValidationError("variant_halfwidth must be nonnegative");
  if (!(ramp_width > 0.0)) throw ValidationError("ramp_width must be positive");
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base, const std::string& source) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(source + ":" + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      c.set(key, value, base);
    } catch (const ParseError& e) {
      throw ParseError(source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path(), path.string());
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, v] : setters()) keys.push_back(k);
  return keys;
}

}  // namespace gerry
