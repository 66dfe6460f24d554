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
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gerry/geography.hpp"
#include "gerry/rng.hpp"
#include "gerry/scores.hpp"

namespace gerry {

/// Accepted-step counts of the three annealing phases: beta held at 0, beta
/// rising linearly from 0 to 1, beta held at 1.
struct AnnealingSchedule {
  std::int64_t steps_beta0 = 20000;
  std::int64_t steps_ramp = 80000;
  std::int64_t steps_beta1 = 20000;

  std::int64_t total() const { return steps_beta0 + steps_ramp + steps_beta1; }
  double beta_at(std::int64_t accepted) const;
  void validate() const;
};

struct FilterCriteria {
  double max_pop_deviation = 0.05;
  VraTargets vra;
  std::optional<double> max_compactness;

  static FilterCriteria none();
  void validate() const;
};

enum class FilterReason { population_deviation, black_vra, hispanic_vra, compactness };

std::string to_string(FilterReason r);

struct FilterResult {
  bool passed = true;
  std::vector<FilterReason> reasons;

  explicit operator bool() const { return passed; }
};

FilterResult passes_filter(const Geography& g, const Plan& p, const FilterCriteria& crit);
double max_population_deviation(const Geography& g, const Plan& p);

struct Move {
  WardId ward;
  DistrictId from;
  DistrictId to;
};

/// Sum over wards of the count of distinct foreign districts among the
/// ward's neighbors, kept in a Fenwick tree so that a uniformly random
/// (ward, district) pair can be drawn in O(log n).
class BoundaryIndex {
 public:
  BoundaryIndex(const Geography& g, const Plan& p);

  std::int64_t total() const { return total_; }
  std::pair<WardId, DistrictId> pick(const Plan& p, Rng& rng) const;
  // Refresh the counts of w and its neighbors after w changed district.
  void refresh_around(const Plan& p, WardId w);

 private:
  void set_count(std::size_t w, int count);
  int count_for(const Plan& p, WardId w) const;

  const Geography* g_;
  std::vector<int> count_;
  std::vector<std::int64_t> tree_;
  std::int64_t total_ = 0;
  mutable std::vector<DistrictId> scratch_;
};

enum class AcceptanceRule {
  metropolis_hastings,
  // Fault fixtures for the validation harness; never the default.
  no_proposal_correction,
  always_accept,
};

/// Metropolis-Hastings acceptance probability for the single-flip chain:
/// min(1, (c_old / c_new) * exp(-beta * (j_new - j_old))).
double acceptance_probability(double j_old, double j_new, double beta, std::int64_t c_old, std::int64_t c_new);

bool accept_move(double j_old, double j_new, double beta, std::int64_t c_old, std::int64_t c_new, Rng& rng);

class StallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChainOptions {
  std::int64_t stall_cap = 10'000'000;  // consecutive rejected proposals
  bool check_invariants = false;        // full recompute after every accepted step
  AcceptanceRule rule = AcceptanceRule::metropolis_hastings;
};

/// One Markov chain over plans. The state keeps its score and proposal
/// support incrementally; beta is set by the caller.
class Chain {
 public:
  Chain(const Geography& g, Plan initial, const ScoreWeights& w, const VraTargets& vra, std::uint64_t seed,
        ChainOptions options = {});

  const Plan& plan() const { return state_.plan(); }
  const ScoreBreakdown& score() const { return state_.score(); }
  double beta() const { return beta_; }
  void set_beta(double beta) { beta_ = beta; }
  std::int64_t accepted_steps() const { return accepted_; }
  std::int64_t proposals() const { return proposals_; }
  std::int64_t proposal_support() const { return boundary_.total(); }
  std::uint64_t seed() const { return seed_; }
  Rng& rng() { return rng_; }

  /// Draws a (ward, district) pair uniformly from the conflicted pairs and
  /// returns it if the donor district stays nonempty and contiguous.
  std::optional<Move> propose();

  /// One proposal/acceptance iteration; true when a move was accepted.
  bool step();

  /// Iterates until `count` more moves are accepted. The observer, when
  /// set, sees the state after every iteration, accepted or not.
  void advance(std::int64_t count, const std::function<void(const Chain&)>& observer = {});

  void check_invariants() const;

 private:
  bool donor_stays_connected(WardId w) const;

  const Geography* g_;
  ScoreState state_;
  BoundaryIndex boundary_;
  Rng rng_;
  std::uint64_t seed_;
  ChainOptions options_;
  double beta_ = 0.0;
  std::int64_t accepted_ = 0;
  std::int64_t proposals_ = 0;
  std::int64_t consecutive_rejections_ = 0;
  mutable std::vector<std::uint32_t> visit_mark_;
  mutable std::uint32_t visit_epoch_ = 0;
  mutable std::vector<WardId> stack_;
};

/// Seeded region growing: k distinct random seed wards, then repeatedly a
/// uniformly random unassigned ward bordering the grown region joins one of
/// its assigned neighbors' districts.
Plan random_initial_plan(const Geography& g, int k, std::uint64_t seed);

struct ChainResult {
  Plan plan;
  ScoreBreakdown score;
  std::int64_t accepted_steps = 0;
  std::int64_t proposals = 0;
};

using ChainObserver = std::function<void(const Chain&)>;

ChainResult run_annealed_chain(const Geography& g, const ScoreWeights& w, const VraTargets& vra,
                               const AnnealingSchedule& schedule, std::uint64_t seed, const ChainOptions& options = {},
                               const ChainObserver& on_accept = {});

struct PlanProvenance {
  std::uint64_t run_index = 0;
  std::uint64_t seed = 0;
  std::int64_t accepted_steps = 0;
  std::int64_t proposals = 0;
  ScoreBreakdown score;
};

struct Ensemble {
  std::vector<Plan> plans;
  std::vector<PlanProvenance> provenance;
  std::uint64_t master_seed = 0;
  std::uint64_t attempts = 0;
  std::map<std::string, std::uint64_t> filter_failures;  // reason -> failed runs

  std::size_t size() const { return plans.size(); }
  double acceptance_rate() const { return attempts ? static_cast<double>(plans.size()) / attempts : 0.0; }
};

class BudgetExhaustedError : public std::runtime_error {
 public:
  BudgetExhaustedError(const std::string& what, std::map<std::string, std::uint64_t> failures)
      : std::runtime_error(what), failures_(std::move(failures)) {}
  const std::map<std::string, std::uint64_t>& failures() const { return failures_; }

 private:
  std::map<std::string, std::uint64_t> failures_;
};

struct EnsembleOptions {
  std::uint64_t max_attempts = 0;  // 0: 100 * n_target
  int workers = 1;
  ChainOptions chain;
  std::function<void(std::size_t accepted, std::uint64_t attempts)> progress;
};

/// Independent annealed chains with seeds derive_seed(master, run index);
/// each contributes its final plan if it passes the filter. Results are
/// merged in run-index order, so the output does not depend on workers.
Ensemble generate_ensemble(const Geography& g, const ScoreWeights& w, const AnnealingSchedule& schedule,
                           const FilterCriteria& crit, std::size_t n_target, std::uint64_t seed,
                           const EnsembleOptions& options = {});

}  // namespace gerry
