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
#include <span>
#include <vector>

#include "gerry/geography.hpp"

namespace gerry {

/// Weights of the score components. Defaults are the Wisconsin values; the
/// township term is off unless w_town is set (0.005 in the township ensemble).
struct ScoreWeights {
  double pop = 2200.0;
  double comp = 0.8;
  double county = 0.6;
  double vra = 100.0;
  double town = 0.0;

  void validate() const;  // throws ValidationError on a negative weight
};

/// Minority-district targets shared by the soft VRA score and the hard filter.
struct VraTargets {
  int black_districts = 6;
  double black_threshold = 0.40;
  int hispanic_districts = 1;
  double hispanic_threshold = 0.40;

  void validate() const;
};

struct ScoreBreakdown {
  double pop = 0.0;
  double comp = 0.0;
  double county = 0.0;
  double vra = 0.0;
  double town = 0.0;
  double total = 0.0;
};

double score_population(const Geography& g, const Plan& p);
double score_compactness(const Geography& g, const Plan& p);
double score_county(const Geography& g, const Plan& p);
double score_town(const Geography& g, const Plan& p);
double score_vra(const Geography& g, const Plan& p, const VraTargets& targets = {});

ScoreBreakdown total_score(const Geography& g, const Plan& p, const ScoreWeights& w,
                           const VraTargets& targets = {});

double weighted_total(const ScoreBreakdown& b, const ScoreWeights& w);

// Component formulas over district aggregates. The full and the incremental
// evaluators both go through these so they agree bit for bit on equal input.
double population_score_from(std::span<const DistrictAggregate> agg, std::int64_t total_population);
double compactness_score_from(std::span<const DistrictAggregate> agg);
double vra_score_from(std::span<const DistrictAggregate> agg, const VraTargets& targets);

double black_fraction(const DistrictAggregate& a);
double hispanic_fraction(const DistrictAggregate& a);

/// Plan with incrementally maintained aggregates, split counts and score.
/// A move touches two districts; revert() restores the previous state exactly.
class ScoreState {
 public:
  ScoreState(const Geography& g, Plan plan, ScoreWeights weights, VraTargets targets = {});

  struct Undo {
    WardId ward;
    DistrictId from;
    DistrictId to;
    DistrictAggregate from_agg;
    DistrictAggregate to_agg;
    int county_splits;
    int town_splits;
    ScoreBreakdown score;
  };

  const Plan& plan() const { return plan_; }
  const ScoreBreakdown& score() const { return score_; }
  const std::vector<DistrictAggregate>& aggregates() const { return agg_; }
  const Geography& geography() const { return *g_; }
  const ScoreWeights& weights() const { return weights_; }
  const VraTargets& vra_targets() const { return targets_; }

  Undo apply(WardId w, DistrictId to);
  void revert(const Undo& u);

 private:
  void move_split_counts(WardId w, DistrictId from, DistrictId to);
  void rescore();

  const Geography* g_;
  Plan plan_;
  ScoreWeights weights_;
  VraTargets targets_;
  std::vector<DistrictAggregate> agg_;
  std::vector<int> county_members_;  // [county * k + district] -> ward count
  std::vector<int> town_members_;
  std::vector<int> county_pieces_;
  std::vector<int> town_pieces_;
  int county_splits_ = 0;
  int town_splits_ = 0;
  ScoreBreakdown score_;
};

}  // namespace gerry
