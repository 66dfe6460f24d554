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

#include "gerry/ensemble_io.hpp"

#include <fstream>
#include <ostream>
#include <string>

#include "gerry/errors.hpp"
#include "json.hpp"

namespace gerry {

using ordered_json = nlohmann::ordered_json;

void write_ensemble_jsonl(std::ostream& out, const Ensemble& ens) {
  for (std::size_t i = 0; i < ens.plans.size(); ++i) {
    const auto& prov = ens.provenance[i];
    ordered_json line;
    line["plan_id"] = i;
    line["seed"] = prov.seed;
    line["scores"] = ordered_json{{"pop", prov.score.pop},       {"comp", prov.score.comp},
                                  {"county", prov.score.county}, {"vra", prov.score.vra},
                                  {"town", prov.score.town},     {"total", prov.score.total}};
    line["assignment"] = ens.plans[i].assignment;
    out << line.dump() << '\n';
  }
}

void write_ensemble_jsonl(const std::filesystem::path& path, const Ensemble& ens) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_ensemble_jsonl(out, ens);
}

void write_ensemble_summary(const std::filesystem::path& path, const Ensemble& ens) {
  ordered_json s;
  s["plans"] = ens.size();
  s["attempts"] = ens.attempts;
  s["acceptance_rate"] = ens.acceptance_rate();
  s["master_seed"] = ens.master_seed;
  s["filter_failures"] = ordered_json::object();
  for (const auto& [reason, count] : ens.filter_failures) s["filter_failures"][reason] = count;
  ordered_json runs = ordered_json::array();
  for (const auto& p : ens.provenance) {
    runs.push_back(ordered_json{{"run", p.run_index},
                                {"seed", p.seed},
                                {"accepted_steps", p.accepted_steps},
                                {"proposals", p.proposals}});
  }
  s["runs"] = std::move(runs);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << s.dump(2) << '\n';
}

Ensemble read_ensemble_jsonl(const std::filesystem::path& path, const Geography& g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  Ensemble ens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      Plan p{j.at("assignment").get<std::vector<DistrictId>>()};
      PlanProvenance prov;
      prov.run_index = ens.plans.size();
      prov.seed = j.at("seed").get<std::uint64_t>();
      const auto& s = j.at("scores");
      prov.score = ScoreBreakdown{s.at("pop").get<double>(),    s.at("comp").get<double>(),
                                  s.at("county").get<double>(), s.at("vra").get<double>(),
                                  s.at("town").get<double>(),   s.at("total").get<double>()};
      ens.plans.push_back(std::move(p));
      ens.provenance.push_back(prov);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    try {
      validate_plan(g, ens.plans.back());
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  ens.attempts = ens.plans.size();
  return ens;
}

}  // namespace gerry
