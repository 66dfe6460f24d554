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

#include "gerry/scores.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gerry/errors.hpp"

namespace gerry {

namespace {

double split_count(const Geography& g, const Plan& p, int (Geography::*label)(WardId) const, int num_labels) {
  const auto k = static_cast<std::size_t>(g.num_districts());
  std::vector<char> present(static_cast<std::size_t>(num_labels) * k, 0);
  for (std::size_t w = 0; w < g.num_wards(); ++w) {
    const auto c = static_cast<std::size_t>((g.*label)(static_cast<WardId>(w)));
    present[c * k + static_cast<std::size_t>(p.assignment[w])] = 1;
  }
  long splits = 0;
  for (int c = 0; c < num_labels; ++c) {
    const auto begin = present.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(c) * k);
    const long pieces = std::count(begin, begin + static_cast<std::ptrdiff_t>(k), 1);
    splits += std::max(0L, pieces - 1);
  }
  return static_cast<double>(splits);
}

double shortfall_sum(std::vector<double>& fractions, int count, double threshold) {
  if (count <= 0) return 0.0;
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(count), fractions.size());
  std::partial_sort(fractions.begin(), fractions.begin() + static_cast<std::ptrdiff_t>(take), fractions.end(),
                    std::greater<>());
  double s = 0.0;
  for (int j = 0; j < count; ++j) {
    // Ranks beyond the number of districts count as a zero fraction.
    const double f = static_cast<std::size_t>(j) < take ? fractions[static_cast<std::size_t>(j)] : 0.0;
    s += std::sqrt(std::max(0.0, threshold - f));
  }
  return s;
}

}  // namespace

void ScoreWeights::validate() const {
  for (double w : {pop, comp, county, vra, town}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("score weights must be finite and nonnegative");
  }
}

void VraTargets::validate() const {
  if (black_districts < 0 || hispanic_districts < 0) throw ValidationError("VRA district counts must be nonnegative");
  for (double t : {black_threshold, hispanic_threshold}) {
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("VRA thresholds must lie in [0, 1]");
  }
}

double black_fraction(const DistrictAggregate& a) {
  return a.population > 0 ? static_cast<double>(a.black_population) / static_cast<double>(a.population) : 0.0;
}

double hispanic_fraction(const DistrictAggregate& a) {
  return a.population > 0 ? static_cast<double>(a.hispanic_population) / static_cast<double>(a.population) : 0.0;
}

double population_score_from(std::span<const DistrictAggregate> agg, std::int64_t total_population) {
  if (total_population <= 0 || agg.empty()) return 0.0;
  const double ideal = static_cast<double>(total_population) / static_cast<double>(agg.size());
  double s = 0.0;
  for (const auto& a : agg) {
    const double rel = (static_cast<double>(a.population) - ideal) / ideal;
    s += rel * rel;
  }
  return std::sqrt(s);
}

double compactness_score_from(std::span<const DistrictAggregate> agg) {
  double s = 0.0;
  for (const auto& a : agg) s += a.perimeter * a.perimeter / a.area;
  return s;
}

double vra_score_from(std::span<const DistrictAggregate> agg, const VraTargets& targets) {
  std::vector<double> fractions(agg.size());
  std::transform(agg.begin(), agg.end(), fractions.begin(), black_fraction);
  double s = shortfall_sum(fractions, targets.black_districts, targets.black_threshold);
  std::transform(agg.begin(), agg.end(), fractions.begin(), hispanic_fraction);
  s += shortfall_sum(fractions, targets.hispanic_districts, targets.hispanic_threshold);
  return s;
}

double score_population(const Geography& g, const Plan& p) {
  return population_score_from(district_aggregates(g, p), g.total_population());
}

double score_compactness(const Geography& g, const Plan& p) { return compactness_score_from(district_aggregates(g, p)); }

double score_county(const Geography& g, const Plan& p) {
  return split_count(g, p, &Geography::county_index, g.num_counties());
}

double score_town(const Geography& g, const Plan& p) { return split_count(g, p, &Geography::town_index, g.num_towns()); }

double score_vra(const Geography& g, const Plan& p, const VraTargets& targets) {
  return vra_score_from(district_aggregates(g, p), targets);
}

double weighted_total(const ScoreBreakdown& b, const ScoreWeights& w) {
  return w.comp * b.comp + w.pop * b.pop + w.county * b.county + w.vra * b.vra + w.town * b.town;
}

ScoreBreakdown total_score(const Geography& g, const Plan& p, const ScoreWeights& w, const VraTargets& targets) {
  const auto agg = district_aggregates(g, p);
  ScoreBreakdown b;
  b.pop = population_score_from(agg, g.total_population());
  b.comp = compactness_score_from(agg);
  b.county = score_county(g, p);
  b.vra = vra_score_from(agg, targets);
  b.town = score_town(g, p);
  b.total = weighted_total(b, w);
  return b;
}

ScoreState::ScoreState(const Geography& g, Plan plan, ScoreWeights weights, VraTargets targets)
    : g_(&g), plan_(std::move(plan)), weights_(weights), targets_(targets) {
  validate_plan(g, plan_);
  agg_ = district_aggregates(g, plan_);
  const auto k = static_cast<std::size_t>(g.num_districts());
  county_members_.assign(static_cast<std::size_t>(g.num_counties()) * k, 0);
  town_members_.assign(static_cast<std::size_t>(g.num_towns()) * k, 0);
  county_pieces_.assign(static_cast<std::size_t>(g.num_counties()), 0);
  town_pieces_.assign(static_cast<std::size_t>(g.num_towns()), 0);
  for (std::size_t w = 0; w < g.num_wards(); ++w) {
    const auto d = static_cast<std::size_t>(plan_.assignment[w]);
    const auto c = static_cast<std::size_t>(g.county_index(static_cast<WardId>(w)));
    const auto t = static_cast<std::size_t>(g.town_index(static_cast<WardId>(w)));
    if (county_members_[c * k + d]++ == 0) ++county_pieces_[c];
    if (town_members_[t * k + d]++ == 0) ++town_pieces_[t];
  }
  for (int pieces : county_pieces_) county_splits_ += std::max(0, pieces - 1);
  for (int pieces : town_pieces_) town_splits_ += std::max(0, pieces - 1);
  rescore();
}

void ScoreState::move_split_counts(WardId w, DistrictId from, DistrictId to) {
  const auto k = static_cast<std::size_t>(g_->num_districts());
  const auto shift = [&](std::vector<int>& members, std::vector<int>& pieces, int& splits, std::size_t label) {
    const int before = std::max(0, pieces[label] - 1);
    if (--members[label * k + static_cast<std::size_t>(from)] == 0) --pieces[label];
    if (members[label * k + static_cast<std::size_t>(to)]++ == 0) ++pieces[label];
    splits += std::max(0, pieces[label] - 1) - before;
  };
  shift(county_members_, county_pieces_, county_splits_, static_cast<std::size_t>(g_->county_index(w)));
  shift(town_members_, town_pieces_, town_splits_, static_cast<std::size_t>(g_->town_index(w)));
}

void ScoreState::rescore() {
  score_.pop = population_score_from(agg_, g_->total_population());
  score_.comp = compactness_score_from(agg_);
  score_.county = static_cast<double>(county_splits_);
  score_.town = static_cast<double>(town_splits_);
  score_.vra = vra_score_from(agg_, targets_);
  score_.total = weighted_total(score_, weights_);
}

ScoreState::Undo ScoreState::apply(WardId w, DistrictId to) {
  const DistrictId from = plan_[w];
  Undo u{w,
         from,
         to,
         agg_[static_cast<std::size_t>(from)],
         agg_[static_cast<std::size_t>(to)],
         county_splits_,
         town_splits_,
         score_};
  if (from == to) return u;
  update_aggregates_for_move(*g_, plan_, agg_, w, to);
  move_split_counts(w, from, to);
  plan_.assignment[static_cast<std::size_t>(w)] = to;
  rescore();
  return u;
}

void ScoreState::revert(const Undo& u) {
  if (u.from == u.to) return;
  move_split_counts(u.ward, u.to, u.from);
  plan_.assignment[static_cast<std::size_t>(u.ward)] = u.from;
  agg_[static_cast<std::size_t>(u.from)] = u.from_agg;
  agg_[static_cast<std::size_t>(u.to)] = u.to_agg;
  county_splits_ = u.county_splits;
  town_splits_ = u.town_splits;
  score_ = u.score;
}

}  // namespace gerry
