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

#include "gerry/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gerry/errors.hpp"
#include "gerry/rng.hpp"

namespace gerry {

void SyntheticSpec::validate() const {
  if (width < 1 || height < 1) throw ValidationError("grid dimensions must be positive");
  if (k < 1) throw ValidationError("district count must be positive");
  if (static_cast<std::int64_t>(width) * height < k) {
    throw ValidationError("grid " + std::to_string(width) + "x" + std::to_string(height) + " has fewer wards than " +
                          std::to_string(k) + " districts");
  }
  if (base_population < 1) throw ValidationError("base population must be positive");
  if (!(population_jitter >= 0.0 && population_jitter < 1.0)) throw ValidationError("population jitter outside [0, 1)");
  if (!(baseline_rep_share > 0.0 && baseline_rep_share < 1.0)) throw ValidationError("baseline share outside (0, 1)");
  if (!(dem_cluster_amplitude >= 0.0 && dem_cluster_amplitude < 1.0)) throw ValidationError("cluster amplitude outside [0, 1)");
  if (!(share_noise >= 0.0 && share_noise < 0.5)) throw ValidationError("share noise outside [0, 0.5)");
  if (county_block < 1 || town_block < 1) throw ValidationError("county and town blocks must be positive");
  if (!(black_peak >= 0.0 && black_peak <= 1.0) || !(hispanic_peak >= 0.0 && hispanic_peak <= 1.0)) {
    throw ValidationError("minority peaks outside [0, 1]");
  }
  if (!(cluster_radius >= 0.0)) throw ValidationError("cluster radius must be nonnegative");
  if (!(unopposed_fraction >= 0.0 && unopposed_fraction < 1.0)) throw ValidationError("unopposed fraction outside [0, 1)");
}

const Election& SyntheticInstance::election(const std::string& id) const {
  for (const auto& e : elections) {
    if (e.id() == id) return e;
  }
  throw ValidationError("no synthetic election " + id);
}

namespace {

std::vector<AdjacencyEdge> grid_edges(int width, int height) {
  std::vector<AdjacencyEdge> edges;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int w = y * width + x;
      if (x + 1 < width) edges.push_back({w, w + 1, 1.0});
      if (y + 1 < height) edges.push_back({w, w + width, 1.0});
    }
  }
  return edges;
}

std::vector<Ward> grid_wards(int width, int height) {
  std::vector<Ward> wards;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      Ward w;
      w.id = y * width + x;
      w.population = 1000;
      w.county = "c0";
      w.town = "t0";
      w.area = 1.0;
      w.outer_boundary = (x == 0) + (x == width - 1) + (y == 0) + (y == height - 1);
      wards.push_back(w);
    }
  }
  return wards;
}

// Gaussian bump with unit height.
double bump(double dx, double dy, double radius) { return std::exp(-(dx * dx + dy * dy) / (2.0 * radius * radius)); }

WardVotes two_party_votes(std::int64_t two_party, double rep_share, double third_party) {
  WardVotes v;
  v.rep = std::llround(static_cast<double>(two_party) * rep_share);
  v.dem = two_party - v.rep;
  v.total = two_party + std::llround(static_cast<double>(two_party) * third_party);
  return v;
}

Plan strip_plan(int width, int height, int k) {
  const int n = width * height;
  Plan p;
  p.assignment.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    const int y = i / width;
    const int c = i % width;
    const int x = y % 2 == 0 ? c : width - 1 - c;
    p.assignment[static_cast<std::size_t>(y * width + x)] =
        static_cast<DistrictId>(static_cast<std::int64_t>(i) * k / n);
  }
  return p;
}

}  // namespace

Geography grid_geography(int width, int height, int k, std::span<const std::int64_t> populations) {
  if (width < 1 || height < 1) throw ValidationError("grid dimensions must be positive");
  auto wards = grid_wards(width, height);
  if (!populations.empty()) {
    if (populations.size() != wards.size()) throw ValidationError("population count does not match grid size");
    for (std::size_t i = 0; i < wards.size(); ++i) wards[i].population = populations[i];
  }
  return Geography(std::move(wards), grid_edges(width, height), k);
}

SyntheticInstance synth_geography(const SyntheticSpec& spec) {
  spec.validate();
  const int W = spec.width;
  const int H = spec.height;
  const std::size_t n = static_cast<std::size_t>(W) * static_cast<std::size_t>(H);
  const double radius = spec.cluster_radius > 0.0 ? spec.cluster_radius : std::max(1.0, std::min(W, H) / 4.0);
  const double cx = (W - 1) / 2.0;
  const double cy = (H - 1) / 2.0;
  const double hx = (W - 1) * 0.75;
  const double hy = (H - 1) * 0.25;

  // Independent streams so that changing one field leaves the others intact.
  Rng pop_rng(derive_seed(spec.seed, 10));
  Rng share_rng(derive_seed(spec.seed, 11));
  Rng opposed_rng(derive_seed(spec.seed, 12));
  Rng ref_rng(derive_seed(spec.seed, 13));
  const auto symmetric = [](Rng& r) { return 2.0 * r.uniform() - 1.0; };

  auto wards = grid_wards(W, H);
  std::vector<double> share(n);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const auto i = static_cast<std::size_t>(y * W + x);
      Ward& w = wards[i];
      const double urban = bump(x - cx, y - cy, radius);
      double pop = static_cast<double>(spec.base_population);
      if (spec.population == PopulationField::urban_cluster) pop *= 1.0 + 3.0 * urban;
      pop *= 1.0 + spec.population_jitter * symmetric(pop_rng);
      w.population = std::max<std::int64_t>(1, std::llround(pop));
      w.black_population = std::llround(static_cast<double>(w.population) * spec.black_peak * urban);
      w.hispanic_population = std::min<std::int64_t>(
          w.population - w.black_population,
          std::llround(static_cast<double>(w.population) * spec.hispanic_peak * bump(x - hx, y - hy, radius)));
      w.county = "C" + std::to_string(x / spec.county_block) + "-" + std::to_string(y / spec.county_block);
      w.town = "T" + std::to_string(x / spec.town_block) + "-" + std::to_string(y / spec.town_block);

      double noise = spec.share_noise * symmetric(share_rng);
      const double dist2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      // Inside the cluster noise only pushes toward the Democrats, so the
      // cluster stays strictly more Democratic than the baseline.
      if (dist2 <= radius * radius) noise = -std::abs(noise);
      share[i] = std::clamp(spec.baseline_rep_share - spec.dem_cluster_amplitude * urban + noise, 0.02, 0.98);
    }
  }

  std::vector<WardVotes> full(n);
  std::vector<WardVotes> ref_a(n);
  std::vector<WardVotes> ref_b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto pop = static_cast<double>(wards[i].population);
    full[i] = two_party_votes(std::max<std::int64_t>(1, std::llround(pop * 0.55)), share[i], 0.02);
    const double sa = std::clamp(share[i] + 0.02 + 0.01 * symmetric(ref_rng), 0.01, 0.99);
    const double sb = std::clamp(share[i] - 0.03 + 0.02 * symmetric(ref_rng), 0.01, 0.99);
    ref_a[i] = two_party_votes(std::max<std::int64_t>(1, std::llround(pop * 0.50)), sa, 0.03);
    ref_b[i] = two_party_votes(std::max<std::int64_t>(1, std::llround(pop * 0.62)), sb, 0.01);
  }

  std::vector<bool> opposed(n, true);
  for (std::size_t i = 0; i < n; ++i) opposed[i] = !(opposed_rng.uniform() < spec.unopposed_fraction);
  // Keep enough contested wards for interpolation and reference selection.
  const std::size_t min_opposed = std::min<std::size_t>(n, 3);
  for (std::size_t i = 0; std::count(opposed.begin(), opposed.end(), true) < static_cast<long>(min_opposed); ++i) {
    opposed[i] = true;
  }
  std::vector<WardVotes> partial = full;
  for (std::size_t i = 0; i < n; ++i) {
    if (opposed[i]) continue;
    const std::int64_t winner = std::llround(static_cast<double>(full[i].rep + full[i].dem) * 0.9);
    partial[i] = share[i] < 0.5 ? WardVotes{winner, winner, 0} : WardVotes{winner, 0, winner};
  }

  Geography g(std::move(wards), grid_edges(W, H), spec.k);
  std::vector<Election> elections;
  elections.emplace_back("full", std::move(full));
  elections.emplace_back("partial", std::move(partial), std::move(opposed));
  elections.emplace_back("ref_a", std::move(ref_a));
  elections.emplace_back("ref_b", std::move(ref_b));
  return SyntheticInstance{std::move(g), std::move(elections), strip_plan(W, H, spec.k)};
}

ExactLinearFixture exact_linear_fixture(std::size_t num_wards, std::uint64_t seed, double unopposed_fraction) {
  if (num_wards < 6) throw ValidationError("exact-linear fixture needs at least 6 wards");
  Rng rng(seed);
  std::vector<WardVotes> linear(num_wards), noise(num_wards), truth(num_wards), target(num_wards);
  std::vector<bool> opposed(num_wards, true);
  for (std::size_t i = 0; i < num_wards; ++i) {
    // Multiples of 3 keep every count integral with shares in thirds.
    const std::int64_t u = 3 * (10 + static_cast<std::int64_t>(rng.below(200)));
    const std::int64_t thirds = 1 + static_cast<std::int64_t>(rng.below(2));
    const std::int64_t v = 2 * u + 3;
    linear[i] = {u, u * thirds / 3, u - u * thirds / 3};
    truth[i] = {v, v * thirds / 3, v - v * thirds / 3};

    const auto nt = std::max<std::int64_t>(1, std::llround(static_cast<double>(u) * (0.5 + rng.uniform())));
    const std::int64_t nd = std::llround(static_cast<double>(nt) * (0.1 + 0.8 * rng.uniform()));
    noise[i] = {nt, nd, nt - nd};

    opposed[i] = !(rng.uniform() < unopposed_fraction);
  }
  for (std::size_t i = 0; std::count(opposed.begin(), opposed.end(), true) < 4; ++i) opposed[i] = true;
  for (std::size_t i = 0; i < num_wards; ++i) {
    target[i] = truth[i];
    if (!opposed[i]) {
      target[i] = truth[i].dem > truth[i].rep ? WardVotes{truth[i].total, truth[i].total, 0}
                                              : WardVotes{truth[i].total, 0, truth[i].total};
    }
  }
  return ExactLinearFixture{Election("target", std::move(target), std::move(opposed)),
                            Election("target", std::move(truth)),
                            ReferenceElection(Election("linear", std::move(linear))),
                            ReferenceElection(Election("noise", std::move(noise)))};
}

// Enumeration

Plan canonicalize(const Plan& p) {
  std::map<DistrictId, DistrictId> relabel;
  Plan out;
  out.assignment.reserve(p.size());
  for (DistrictId d : p.assignment) {
    auto [it, inserted] = relabel.emplace(d, static_cast<DistrictId>(relabel.size()));
    out.assignment.push_back(it->second);
  }
  return out;
}

double stirling2(int n, int k) {
  if (n < 0 || k < 0) return 0.0;
  // Row-by-row recurrence S(i, j) = j S(i-1, j) + S(i-1, j-1).
  std::vector<double> row(static_cast<std::size_t>(k) + 1, 0.0);
  row[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = std::min(i, k); j >= 1; --j) row[static_cast<std::size_t>(j)] = j * row[static_cast<std::size_t>(j)] + row[static_cast<std::size_t>(j) - 1];
    row[0] = 0.0;
  }
  return row[static_cast<std::size_t>(k)];
}

namespace {

class Enumerator {
 public:
  Enumerator(const Geography& g, int k, const FilterCriteria& crit)
      : g_(g), k_(k), crit_(crit), n_(static_cast<int>(g.num_wards())), label_(g.num_wards(), -1),
        mark_(g.num_wards(), 0) {}

  std::vector<Plan> run() {
    dfs(0, 0);
    return std::move(out_);
  }

 private:
  void dfs(int w, int used) {
    if (w == n_) {
      if (used != k_) return;
      Plan p{label_};
      if (passes_filter(g_, p, crit_)) out_.push_back(std::move(p));
      return;
    }
    const int top = std::min(used, k_ - 1);
    for (int l = 0; l <= top; ++l) {
      const int now_used = used + (l == used);
      // Every label still missing needs a ward of its own.
      if (k_ - now_used > n_ - w - 1) continue;
      label_[static_cast<std::size_t>(w)] = l;
      if (can_stay_contiguous(now_used)) dfs(w + 1, now_used);
    }
    label_[static_cast<std::size_t>(w)] = -1;
  }

  // Each label's wards must lie in one component of label-or-unassigned wards.
  bool can_stay_contiguous(int used) {
    for (int l = 0; l < used; ++l) {
      int members = 0;
      int start = -1;
      for (int w = 0; w < n_; ++w) {
        if (label_[static_cast<std::size_t>(w)] == l) {
          ++members;
          if (start < 0) start = w;
        }
      }
      ++epoch_;
      stack_.assign(1, start);
      mark_[static_cast<std::size_t>(start)] = epoch_;
      int reached = 0;
      while (!stack_.empty()) {
        const WardId v = stack_.back();
        stack_.pop_back();
        if (label_[static_cast<std::size_t>(v)] == l) ++reached;
        for (const auto& nb : g_.neighbors(v)) {
          const auto u = static_cast<std::size_t>(nb.ward);
          if (mark_[u] == epoch_) continue;
          if (label_[u] != l && label_[u] != -1) continue;
          mark_[u] = epoch_;
          stack_.push_back(nb.ward);
        }
      }
      if (reached != members) return false;
    }
    return true;
  }

  const Geography& g_;
  int k_;
  const FilterCriteria& crit_;
  int n_;
  std::vector<DistrictId> label_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t epoch_ = 0;
  std::vector<WardId> stack_;
  std::vector<Plan> out_;
};

}  // namespace

std::vector<Plan> enumerate_plans(const Geography& g, int k, const FilterCriteria& crit) {
  if (k != g.num_districts()) throw ValidationError("enumeration k must match the geography's district count");
  const int n = static_cast<int>(g.num_wards());
  if (n > 16 && stirling2(n, k) > 1e6) {
    throw InstanceTooLarge("instance too large to enumerate: " + std::to_string(n) + " wards into " +
                           std::to_string(k) + " districts");
  }
  return Enumerator(g, k, crit).run();
}

std::optional<std::size_t> ExactDistribution::find(const Plan& p) const {
  const auto it = index.find(canonicalize(p).assignment);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

ExactDistribution exact_boltzmann(std::vector<Plan> plans, const Geography& g, const ScoreWeights& w, double beta,
                                  const VraTargets& vra) {
  if (plans.empty()) throw ValidationError("exact distribution over no plans");
  ExactDistribution d;
  d.plans = std::move(plans);
  std::vector<double> log_w;
  for (std::size_t i = 0; i < d.plans.size(); ++i) {
    d.plans[i] = canonicalize(d.plans[i]);
    if (!d.index.emplace(d.plans[i].assignment, i).second) throw ValidationError("duplicate plan in exact distribution");
    const double j = total_score(g, d.plans[i], w, vra).total;
    d.score.push_back(j);
    log_w.push_back(-beta * j);
  }
  const double m = *std::max_element(log_w.begin(), log_w.end());
  double sum = 0.0;
  for (double x : log_w) sum += std::exp(x - m);
  d.log_z = m + std::log(sum);
  for (double x : log_w) d.probability.push_back(std::exp(x - d.log_z));
  return d;
}

double tv_distance(std::span<const double> empirical, std::span<const double> exact) {
  if (empirical.size() != exact.size()) throw ValidationError("distributions have different supports");
  double s = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) s += std::abs(empirical[i] - exact[i]);
  return 0.5 * s;
}

double tv_distance(std::span<const std::uint64_t> counts, const ExactDistribution& exact) {
  if (counts.size() != exact.size()) throw ValidationError("count vector does not match the exact support");
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  if (!(total > 0.0)) throw ValidationError("no samples");
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / total;
  return tv_distance(p, exact.probability);
}

std::vector<std::uint64_t> visit_counts(Chain& chain, const ExactDistribution& exact, std::int64_t accepted_steps) {
  std::vector<std::uint64_t> counts(exact.size(), 0);
  const auto locate = [&](const Plan& p) {
    const auto idx = exact.find(p);
    if (!idx) throw std::logic_error("chain visited a plan outside the enumerated support");
    return *idx;
  };
  std::size_t current = locate(chain.plan());
  std::int64_t seen = chain.accepted_steps();
  chain.advance(accepted_steps, [&](const Chain& c) {
    if (c.accepted_steps() != seen) {
      seen = c.accepted_steps();
      current = locate(c.plan());
    }
    ++counts[current];
  });
  return counts;
}

StationarityCheck stationarity_check(const Geography& g, const ScoreWeights& w, const VraTargets& vra, double beta,
                                     std::int64_t accepted_steps, std::uint64_t seed, AcceptanceRule rule) {
  const ExactDistribution exact = exact_boltzmann(enumerate_plans(g, g.num_districts()), g, w, beta, vra);
  ChainOptions options;
  options.rule = rule;
  Chain chain(g, random_initial_plan(g, g.num_districts(), derive_seed(seed, 1)), w, vra, derive_seed(seed, 2), options);
  chain.set_beta(beta);
  const auto counts = visit_counts(chain, exact, accepted_steps);
  StationarityCheck r;
  r.support = exact.size();
  r.tv = tv_distance(counts, exact);
  r.accepted = chain.accepted_steps();
  r.proposals = chain.proposals();
  return r;
}

}  // namespace gerry
