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
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gerry/elections.hpp"
#include "gerry/geography.hpp"
#include "gerry/sampler.hpp"
#include "gerry/scores.hpp"

namespace gerry {

enum class PopulationField { uniform, urban_cluster };

/// Parameters of a synthetic rectangular ward grid.
struct SyntheticSpec {
  int width = 8;
  int height = 8;
  int k = 4;
  std::uint64_t seed = 1;

  PopulationField population = PopulationField::uniform;
  std::int64_t base_population = 1000;
  double population_jitter = 0.0;  // relative, uniform in [-j, j]

  double baseline_rep_share = 0.55;
  double dem_cluster_amplitude = 0.15;  // Democratic boost at the urban center
  double share_noise = 0.03;

  int county_block = 4;  // side of the square county tiles, in wards
  int town_block = 2;

  double black_peak = 0.6;  // minority fraction at the cluster center
  double hispanic_peak = 0.5;
  double cluster_radius = 0.0;  // 0: a quarter of the shorter side, at least 1

  double unopposed_fraction = 0.25;  // of the wards in the partially opposed election

  void validate() const;
};

/// A synthetic geography with its election data. Elections, in order:
/// "full" (every ward opposed), "partial" (the same race with some wards
/// unopposed), and two complete reference races "ref_a" and "ref_b".
struct SyntheticInstance {
  Geography geography;
  std::vector<Election> elections;
  Plan reference_plan;  // contiguous boustrophedon strips

  const Election& election(const std::string& id) const;
};

SyntheticInstance synth_geography(const SyntheticSpec& spec);

/// Grid graph alone: unit areas, unit shared sides, outer boundary equal to
/// the number of sides on the grid's border.
Geography grid_geography(int width, int height, int k, std::span<const std::int64_t> populations = {});

/// Interpolation fixture whose reference totals and shares relate to the
/// target exactly linearly (V = 2U + 3, shares in thirds), plus a noise
/// candidate that does not.
struct ExactLinearFixture {
  Election target;               // some wards unopposed
  Election truth;                // the target's true counts, all opposed
  ReferenceElection linear;      // id "linear"
  ReferenceElection noise;       // id "noise"
};

ExactLinearFixture exact_linear_fixture(std::size_t num_wards, std::uint64_t seed, double unopposed_fraction = 0.3);

class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Labels districts by first appearance in ward order.
Plan canonicalize(const Plan& p);

/// Every contiguous plan with k nonempty districts passing crit, each once,
/// canonically labeled, in lexicographic order of assignments.
std::vector<Plan> enumerate_plans(const Geography& g, int k, const FilterCriteria& crit = FilterCriteria::none());

/// Stirling number of the second kind S(n, k) in floating point.
double stirling2(int n, int k);

struct ExactDistribution {
  std::vector<Plan> plans;
  std::vector<double> score;        // J of each plan
  std::vector<double> probability;  // e^{-beta J} / Z
  double log_z = 0.0;

  std::size_t size() const { return plans.size(); }
  // Index of the plan's canonical form; nullopt outside the support.
  std::optional<std::size_t> find(const Plan& p) const;

  std::map<std::vector<DistrictId>, std::size_t> index;
};

ExactDistribution exact_boltzmann(std::vector<Plan> plans, const Geography& g, const ScoreWeights& w, double beta,
                                  const VraTargets& vra = {});

/// Half the L1 distance between two distributions over the same indexing.
double tv_distance(std::span<const double> empirical, std::span<const double> exact);
/// Counts are normalized first; throws if their support size differs.
double tv_distance(std::span<const std::uint64_t> counts, const ExactDistribution& exact);

/// Runs the chain at its current beta until `accepted_steps` more moves are
/// accepted and counts the plan held after every iteration, rejected
/// proposals included. Throws if the chain leaves the exact support.
std::vector<std::uint64_t> visit_counts(Chain& chain, const ExactDistribution& exact, std::int64_t accepted_steps);

struct StationarityCheck {
  std::size_t support = 0;
  double tv = 1.0;
  std::int64_t accepted = 0;
  std::int64_t proposals = 0;
};

/// Fixed-beta chain from a random initial plan against the exact Boltzmann
/// distribution over every enumerated plan of g.
StationarityCheck stationarity_check(const Geography& g, const ScoreWeights& w, const VraTargets& vra, double beta,
                                     std::int64_t accepted_steps, std::uint64_t seed,
                                     AcceptanceRule rule = AcceptanceRule::metropolis_hastings);

}  // namespace gerry
