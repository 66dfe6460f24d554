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

#include "gerry/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "gerry/errors.hpp"

namespace gerry {

double AnnealingSchedule::beta_at(std::int64_t accepted) const {
  if (accepted < steps_beta0) return 0.0;
  if (accepted < steps_beta0 + steps_ramp) {
    return static_cast<double>(accepted - steps_beta0) / static_cast<double>(steps_ramp);
  }
  return 1.0;
}

void AnnealingSchedule::validate() const {
  if (steps_beta0 < 0 || steps_ramp < 0 || steps_beta1 < 0) {
    throw ValidationError("annealing step counts must be nonnegative");
  }
}

FilterCriteria FilterCriteria::none() {
  FilterCriteria c;
  c.max_pop_deviation = std::numeric_limits<double>::infinity();
  c.vra.black_districts = 0;
  c.vra.hispanic_districts = 0;
  c.max_compactness.reset();
  return c;
}

void FilterCriteria::validate() const {
  if (!(max_pop_deviation > 0.0)) throw ValidationError("max population deviation must be positive");
  vra.validate();
  if (max_compactness && !(*max_compactness >= 0.0)) throw ValidationError("max compactness must be nonnegative");
}

std::string to_string(FilterReason r) {
  switch (r) {
    case FilterReason::population_deviation: return "population_deviation";
    case FilterReason::black_vra: return "black_vra";
    case FilterReason::hispanic_vra: return "hispanic_vra";
    case FilterReason::compactness: return "compactness";
  }
  return "unknown";
}

double max_population_deviation(const Geography& g, const Plan& p) {
  const auto agg = district_aggregates(g, p);
  const double ideal = static_cast<double>(g.total_population()) / g.num_districts();
  if (ideal <= 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& a : agg) worst = std::max(worst, std::abs(static_cast<double>(a.population) - ideal) / ideal);
  return worst;
}

FilterResult passes_filter(const Geography& g, const Plan& p, const FilterCriteria& crit) {
  FilterResult r;
  const auto agg = district_aggregates(g, p);
  const double ideal = static_cast<double>(g.total_population()) / g.num_districts();
  double worst = 0.0;
  if (ideal > 0.0) {
    for (const auto& a : agg) worst = std::max(worst, std::abs(static_cast<double>(a.population) - ideal) / ideal);
  }
  // Strict: a deviation equal to the bound fails.
  if (!(worst < crit.max_pop_deviation)) r.reasons.push_back(FilterReason::population_deviation);

  const auto count_at_least = [&](double (*fraction)(const DistrictAggregate&), double threshold) {
    return std::count_if(agg.begin(), agg.end(), [&](const DistrictAggregate& a) { return fraction(a) >= threshold; });
  };
  if (count_at_least(black_fraction, crit.vra.black_threshold) < crit.vra.black_districts) {
    r.reasons.push_back(FilterReason::black_vra);
  }
  if (count_at_least(hispanic_fraction, crit.vra.hispanic_threshold) < crit.vra.hispanic_districts) {
    r.reasons.push_back(FilterReason::hispanic_vra);
  }
  if (crit.max_compactness && compactness_score_from(agg) > *crit.max_compactness) {
    r.reasons.push_back(FilterReason::compactness);
  }
  r.passed = r.reasons.empty();
  return r;
}

// BoundaryIndex

BoundaryIndex::BoundaryIndex(const Geography& g, const Plan& p)
    : g_(&g), count_(g.num_wards(), 0), tree_(g.num_wards() + 1, 0) {
  for (std::size_t w = 0; w < g.num_wards(); ++w) set_count(w, count_for(p, static_cast<WardId>(w)));
}

int BoundaryIndex::count_for(const Plan& p, WardId w) const {
  neighbor_districts(*g_, p, w, scratch_);
  return static_cast<int>(scratch_.size());
}

void BoundaryIndex::set_count(std::size_t w, int count) {
  const std::int64_t delta = count - count_[w];
  if (delta == 0) return;
  count_[w] = count;
  total_ += delta;
  for (std::size_t i = w + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
}

std::pair<WardId, DistrictId> BoundaryIndex::pick(const Plan& p, Rng& rng) const {
  auto rem = static_cast<std::int64_t>(rng.below(static_cast<std::size_t>(total_)));
  const std::size_t n = tree_.size() - 1;
  std::size_t pos = 0;
  std::size_t step = 1;
  while (step * 2 <= n) step *= 2;
  for (; step > 0; step >>= 1) {
    if (pos + step <= n && tree_[pos + step] <= rem) {
      pos += step;
      rem -= tree_[pos];
    }
  }
  const auto w = static_cast<WardId>(pos);
  neighbor_districts(*g_, p, w, scratch_);
  return {w, scratch_[static_cast<std::size_t>(rem)]};
}

void BoundaryIndex::refresh_around(const Plan& p, WardId w) {
  set_count(static_cast<std::size_t>(w), count_for(p, w));
  for (const auto& nb : g_->neighbors(w)) set_count(static_cast<std::size_t>(nb.ward), count_for(p, nb.ward));
}

// Acceptance

double acceptance_probability(double j_old, double j_new, double beta, std::int64_t c_old, std::int64_t c_new) {
  double log_ratio = std::log(static_cast<double>(c_old) / static_cast<double>(c_new));
  if (beta != 0.0) log_ratio -= beta * (j_new - j_old);
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

bool accept_move(double j_old, double j_new, double beta, std::int64_t c_old, std::int64_t c_new, Rng& rng) {
  return rng.uniform() < acceptance_probability(j_old, j_new, beta, c_old, c_new);
}

// Chain

Chain::Chain(const Geography& g, Plan initial, const ScoreWeights& w, const VraTargets& vra, std::uint64_t seed,
             ChainOptions options)
    : g_(&g),
      state_(g, std::move(initial), w, vra),
      boundary_(g, state_.plan()),
      rng_(seed),
      seed_(seed),
      options_(options),
      visit_mark_(g.num_wards(), 0) {}

bool Chain::donor_stays_connected(WardId w) const {
  const Plan& p = state_.plan();
  const DistrictId from = p[w];
  const int size = state_.aggregates()[static_cast<std::size_t>(from)].num_wards;
  if (size <= 1) return false;
  WardId start = -1;
  for (const auto& nb : g_->neighbors(w)) {
    if (p[nb.ward] == from) {
      start = nb.ward;
      break;
    }
  }
  if (start < 0) return false;

  if (++visit_epoch_ == 0) {
    std::fill(visit_mark_.begin(), visit_mark_.end(), 0);
    visit_epoch_ = 1;
  }
  visit_mark_[static_cast<std::size_t>(w)] = visit_epoch_;
  visit_mark_[static_cast<std::size_t>(start)] = visit_epoch_;
  stack_.clear();
  stack_.push_back(start);
  int reached = 1;
  while (!stack_.empty()) {
    const WardId x = stack_.back();
    stack_.pop_back();
    for (const auto& nb : g_->neighbors(x)) {
      const auto u = static_cast<std::size_t>(nb.ward);
      if (visit_mark_[u] != visit_epoch_ && p[nb.ward] == from) {
        visit_mark_[u] = visit_epoch_;
        ++reached;
        stack_.push_back(nb.ward);
      }
    }
  }
  return reached == size - 1;
}

std::optional<Move> Chain::propose() {
  if (boundary_.total() == 0) return std::nullopt;
  const auto [w, to] = boundary_.pick(state_.plan(), rng_);
  if (!donor_stays_connected(w)) return std::nullopt;
  return Move{w, state_.plan()[w], to};
}

bool Chain::step() {
  ++proposals_;
  const auto move = propose();
  bool accepted = false;
  if (move) {
    const std::int64_t c_old = boundary_.total();
    const double j_old = state_.score().total;
    const auto undo = state_.apply(move->ward, move->to);
    boundary_.refresh_around(state_.plan(), move->ward);
    const std::int64_t c_new = boundary_.total();
    const double j_new = state_.score().total;
    switch (options_.rule) {
      case AcceptanceRule::metropolis_hastings:
        accepted = accept_move(j_old, j_new, beta_, c_old, c_new, rng_);
        break;
      case AcceptanceRule::no_proposal_correction:
        accepted = accept_move(j_old, j_new, beta_, 1, 1, rng_);
        break;
      case AcceptanceRule::always_accept:
        accepted = true;
        break;
    }
    if (!accepted) {
      state_.revert(undo);
      boundary_.refresh_around(state_.plan(), move->ward);
    }
  }
  if (accepted) {
    ++accepted_;
    consecutive_rejections_ = 0;
    if (options_.check_invariants) check_invariants();
  } else if (++consecutive_rejections_ > options_.stall_cap) {
    throw StallError("chain stalled: " + std::to_string(consecutive_rejections_) +
                     " consecutive rejected proposals (seed " + std::to_string(seed_) + ")");
  }
  return accepted;
}

void Chain::advance(std::int64_t count, const std::function<void(const Chain&)>& observer) {
  const std::int64_t target = accepted_ + count;
  while (accepted_ < target) {
    step();
    if (observer) observer(*this);
  }
}

void Chain::check_invariants() const {
  const Plan& p = state_.plan();
  validate_plan(*g_, p);
  const ScoreBreakdown full = total_score(*g_, p, state_.weights(), state_.vra_targets());
  const ScoreBreakdown& inc = state_.score();
  const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
  if (!close(inc.pop, full.pop) || !close(inc.comp, full.comp) || inc.county != full.county ||
      inc.town != full.town || inc.vra != full.vra || !close(inc.total, full.total)) {
    throw std::logic_error("incremental score diverged from full recomputation");
  }
  if (boundary_.total() != static_cast<std::int64_t>(conflicted_wards(*g_, p).size())) {
    throw std::logic_error("proposal support count diverged from conflicted pairs");
  }
}

// Initial plans

Plan random_initial_plan(const Geography& g, int k, std::uint64_t seed) {
  const std::size_t n = g.num_wards();
  if (k < 1 || static_cast<std::size_t>(k) > n) throw ValidationError("district count must lie in [1, wards]");
  Rng rng(seed);
  std::vector<WardId> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<WardId>(i);
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(order[i], order[j]);
  }

  Plan plan{std::vector<DistrictId>(n, -1)};
  std::vector<WardId> frontier;
  std::vector<std::ptrdiff_t> frontier_pos(n, -1);
  const auto push_neighbors = [&](WardId w) {
    for (const auto& nb : g.neighbors(w)) {
      const auto u = static_cast<std::size_t>(nb.ward);
      if (plan.assignment[u] < 0 && frontier_pos[u] < 0) {
        frontier_pos[u] = static_cast<std::ptrdiff_t>(frontier.size());
        frontier.push_back(nb.ward);
      }
    }
  };
  const auto remove_from_frontier = [&](WardId w) {
    const auto pos = frontier_pos[static_cast<std::size_t>(w)];
    if (pos < 0) return;
    const WardId last = frontier.back();
    frontier[static_cast<std::size_t>(pos)] = last;
    frontier_pos[static_cast<std::size_t>(last)] = pos;
    frontier.pop_back();
    frontier_pos[static_cast<std::size_t>(w)] = -1;
  };

  for (int d = 0; d < k; ++d) {
    const WardId s = order[static_cast<std::size_t>(d)];
    plan.assignment[static_cast<std::size_t>(s)] = d;
    remove_from_frontier(s);
    push_neighbors(s);
  }
  std::size_t assigned = static_cast<std::size_t>(k);
  std::vector<DistrictId> options;
  while (!frontier.empty()) {
    const WardId w = frontier[rng.below(frontier.size())];
    remove_from_frontier(w);
    options.clear();
    for (const auto& nb : g.neighbors(w)) {
      if (plan[nb.ward] >= 0) options.push_back(plan[nb.ward]);
    }
    std::sort(options.begin(), options.end());
    options.erase(std::unique(options.begin(), options.end()), options.end());
    plan.assignment[static_cast<std::size_t>(w)] = options[rng.below(options.size())];
    ++assigned;
    push_neighbors(w);
  }
  if (assigned != n) throw ValidationError("region growing stalled: ward graph is not connected");
  return plan;
}

ChainResult run_annealed_chain(const Geography& g, const ScoreWeights& w, const VraTargets& vra,
                               const AnnealingSchedule& schedule, std::uint64_t seed, const ChainOptions& options,
                               const ChainObserver& on_accept) {
  schedule.validate();
  Chain chain(g, random_initial_plan(g, g.num_districts(), derive_seed(seed, 1)), w, vra, derive_seed(seed, 2),
              options);
  const std::int64_t total = schedule.total();
  while (chain.accepted_steps() < total) {
    chain.set_beta(schedule.beta_at(chain.accepted_steps()));
    if (chain.step() && on_accept) on_accept(chain);
  }
  return ChainResult{chain.plan(), chain.score(), chain.accepted_steps(), chain.proposals()};
}

// Ensembles

namespace {

struct RunOutcome {
  ChainResult result;
  FilterResult filter;
  std::exception_ptr error;
};

}  // namespace

Ensemble generate_ensemble(const Geography& g, const ScoreWeights& w, const AnnealingSchedule& schedule,
                           const FilterCriteria& crit, std::size_t n_target, std::uint64_t seed,
                           const EnsembleOptions& options) {
  if (n_target < 1) throw ValidationError("ensemble target size must be at least 1");
  w.validate();
  schedule.validate();
  crit.validate();
  const std::uint64_t budget = options.max_attempts ? options.max_attempts : 100 * static_cast<std::uint64_t>(n_target);
  const int workers = std::max(1, options.workers);
  const std::uint64_t batch = workers == 1 ? 1 : 2 * static_cast<std::uint64_t>(workers);

  Ensemble ens;
  ens.master_seed = seed;
  std::uint64_t next = 0;
  std::vector<RunOutcome> outcomes;
  while (ens.size() < n_target && next < budget) {
    const std::uint64_t end = std::min(budget, next + batch);
    outcomes.assign(static_cast<std::size_t>(end - next), RunOutcome{});
    std::atomic<std::uint64_t> cursor{next};
    const auto work = [&] {
      for (std::uint64_t run = cursor++; run < end; run = cursor++) {
        auto& out = outcomes[static_cast<std::size_t>(run - next)];
        try {
          out.result = run_annealed_chain(g, w, crit.vra, schedule, derive_seed(seed, run), options.chain);
          out.filter = passes_filter(g, out.result.plan, crit);
        } catch (...) {
          out.error = std::current_exception();
        }
      }
    };
    if (workers == 1 || end - next == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      const auto n_threads = std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), end - next);
      for (std::uint64_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    for (std::uint64_t run = next; run < end && ens.size() < n_target; ++run) {
      auto& out = outcomes[static_cast<std::size_t>(run - next)];
      if (out.error) std::rethrow_exception(out.error);
      ++ens.attempts;
      if (out.filter.passed) {
        ens.plans.push_back(std::move(out.result.plan));
        ens.provenance.push_back(PlanProvenance{run, derive_seed(seed, run), out.result.accepted_steps,
                                                out.result.proposals, out.result.score});
      } else {
        for (auto reason : out.filter.reasons) ++ens.filter_failures[to_string(reason)];
      }
    }
    next = end;
    if (options.progress) options.progress(ens.size(), ens.attempts);
  }
  if (ens.size() < n_target) {
    std::ostringstream msg;
    msg << "attempt budget of " << budget << " runs exhausted with " << ens.size() << " of " << n_target
        << " plans accepted; filter failures:";
    for (const auto& [reason, count] : ens.filter_failures) msg << ' ' << reason << '=' << count;
    throw BudgetExhaustedError(msg.str(), ens.filter_failures);
  }
  return ens;
}

}  // namespace gerry
