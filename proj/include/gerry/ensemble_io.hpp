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

#include <filesystem>
#include <iosfwd>

#include "gerry/geography.hpp"
#include "gerry/sampler.hpp"

namespace gerry {

// One JSON object per line:
// {"plan_id":..,"seed":..,"scores":{"pop","comp","county","vra","town","total"},"assignment":[..]}
void write_ensemble_jsonl(std::ostream& out, const Ensemble& ens);
void write_ensemble_jsonl(const std::filesystem::path& path, const Ensemble& ens);

// Sidecar with attempts, acceptance rate and the filter-failure histogram.
void write_ensemble_summary(const std::filesystem::path& path, const Ensemble& ens);

/// Reads an ensemble file and validates each plan against g.
Ensemble read_ensemble_jsonl(const std::filesystem::path& path, const Geography& g);

}  // namespace gerry
