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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gerry/sampler.hpp"
#include "gerry/scores.hpp"

namespace gerry {

/// Settings of one pipeline run. Read from a flat `key = value` file; `#`
/// starts a comment. Relative paths resolve against the file's directory.
struct RunConfig {
  std::filesystem::path wards;
  std::filesystem::path adjacency;
  std::filesystem::path votes;
  std::filesystem::path ensemble;  // defaults to <out>/ensemble.jsonl
  std::filesystem::path out = ".";
  int districts = 99;

  ScoreWeights weights;
  VraTargets vra;  // shared by the score and the filter
  double max_pop_deviation = 0.05;
  std::string max_compactness = "none";  // none | ref | number

  AnnealingSchedule schedule;
  std::size_t ensemble_size = 19184;
  std::uint64_t max_attempts = 0;
  std::uint64_t seed = 1;
  int workers = 1;
  std::int64_t stall_cap = 10'000'000;

  double shift_min = 45.0;
  double shift_max = 55.0;
  double shift_step = 0.5;
  double variant_halfwidth = 7.5;
  double ramp_width = 0.02;

  /// Sets one key from its textual value; relative paths resolve against base.
  void set(const std::string& key, const std::string& value, const std::filesystem::path& base = {});
  void validate() const;

  std::filesystem::path ensemble_path() const { return ensemble.empty() ? out / "ensemble.jsonl" : ensemble; }
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::filesystem::path& base = {},
                       const std::string& source = "<config>");

std::vector<std::string> config_keys();

}  // namespace gerry
