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

#include "doctest.h"

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "gerry/errors.hpp"
#include "gerry/oracle.hpp"
#include "gerry/sampler.hpp"

using namespace gerry;
using fixtures::plan;

namespace {

bool connected_part(const Geography& g, const std::vector<int>& label, int d) {
  std::vector<char> seen(g.num_wards(), 0);
  std::vector<WardId> stack;
  std::size_t members = 0;
  for (std::size_t w = 0; w < label.size(); ++w) {
    if (label[w] != d) continue;
    ++members;
    if (stack.empty() && !seen[w]) {
      stack.push_back(static_cast<WardId>(w));
      seen[w] = 1;
    }
  }
  if (members == 0) return false;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const WardId w = stack.back();
    stack.pop_back();
    ++reached;
    for (const auto& nb : g.neighbors(w)) {
      const auto vi = static_cast<std::size_t>(nb.ward);
      if (label[vi] == d && !seen[vi]) {
        seen[vi] = 1;
        stack.push_back(nb.ward);
      }
    }
  }
  return reached == members;
}

// Every k^n labeling, kept when all parts are nonempty and connected, then
// deduplicated by first-appearance relabeling.
std::set<std::vector<DistrictId>> brute_force(const Geography& g, int k) {
  const std::size_t n = g.num_wards();
  std::set<std::vector<DistrictId>> out;
  std::vector<int> label(n, 0);
  for (;;) {
    bool ok = true;
    for (int d = 0; d < k && ok; ++d) ok = connected_part(g, label, d);
    if (ok) {
      std::vector<int> relabel(static_cast<std::size_t>(k), -1);
      std::vector<DistrictId> canon(n);
      int next = 0;
      for (std::size_t w = 0; w < n; ++w) {
        auto& r = relabel[static_cast<std::size_t>(label[w])];
        if (r < 0) r = next++;
        canon[w] = r;
      }
      out.insert(canon);
    }
    std::size_t i = 0;
    while (i < n && ++label[i] == k) label[i++] = 0;
    if (i == n) break;
  }
  return out;
}

}  // namespace

TEST_CASE("synthetic geography") {
  SUBCASE("2x2") {
    SyntheticSpec s;
    s.width = 2;
    s.height = 2;
    s.k = 2;
    const auto inst = synth_geography(s);
    CHECK(inst.geography.num_wards() == 4);
    CHECK(inst.geography.edge_list().size() == 4);
    CHECK_NOTHROW(validate_plan(inst.geography, inst.reference_plan));
  }
  SUBCASE("urban cluster is more Democratic than the baseline") {
    SyntheticSpec s;
    s.width = 12;
    s.height = 12;
    s.k = 4;
    s.population = PopulationField::urban_cluster;
    const auto inst = synth_geography(s);
    const auto& full = inst.election("full");
    // The center ward sits inside the cluster.
    const auto& c = full.votes(6 * 12 + 6);
    CHECK(static_cast<double>(c.dem) / (c.dem + c.rep) > 1.0 - s.baseline_rep_share);
    for (const auto& v : full.votes()) {
      const double share = static_cast<double>(v.rep) / (v.rep + v.dem);
      CHECK(share > 0.0);
      CHECK(share < 1.0);
    }
    CHECK(inst.geography.ward(6 * 12 + 6).population > inst.geography.ward(0).population);
  }
  SUBCASE("elections") {
    const auto inst = synth_geography(SyntheticSpec{});
    REQUIRE(inst.elections.size() == 4);
    CHECK(inst.election("full").fully_opposed());
    CHECK_FALSE(inst.election("partial").fully_opposed());
    CHECK(inst.election("partial").num_opposed() >= 3);
    CHECK(inst.election("ref_a").fully_opposed());
    CHECK_THROWS_AS(inst.election("nope"), ValidationError);
    for (std::size_t w = 0; w < inst.geography.num_wards(); ++w) {
      if (inst.election("partial").opposed(static_cast<WardId>(w))) {
        CHECK(inst.election("partial").votes()[w] == inst.election("full").votes()[w]);
      }
    }
  }
  SUBCASE("deterministic files") {
    SyntheticSpec s;
    s.population_jitter = 0.1;
    fixtures::TempDir dir;
    const auto a = synth_geography(s);
    const auto b = synth_geography(s);
    write_wards_csv(dir / "wa.csv", a.geography, &a.reference_plan);
    write_wards_csv(dir / "wb.csv", b.geography, &b.reference_plan);
    write_adjacency_csv(dir / "aa.csv", a.geography);
    write_adjacency_csv(dir / "ab.csv", b.geography);
    write_votes_csv(dir / "va.csv", a.geography, a.elections);
    write_votes_csv(dir / "vb.csv", b.geography, b.elections);
    CHECK(fixtures::read_file(dir / "wa.csv") == fixtures::read_file(dir / "wb.csv"));
    CHECK(fixtures::read_file(dir / "aa.csv") == fixtures::read_file(dir / "ab.csv"));
    CHECK(fixtures::read_file(dir / "va.csv") == fixtures::read_file(dir / "vb.csv"));
    s.seed = 2;
    const auto c = synth_geography(s);
    CHECK(c.elections[0].votes() != a.elections[0].votes());
  }
  SUBCASE("invalid specs") {
    SyntheticSpec s;
    s.width = 2;
    s.height = 2;
    s.k = 5;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    CHECK_THROWS_AS(synth_geography(s), ValidationError);
  }
}

TEST_CASE("enumeration") {
  SUBCASE("three-ward path") {
    const auto plans = enumerate_plans(fixtures::path_graph(3, 2), 2);
    REQUIRE(plans.size() == 2);
    CHECK(plans[0].assignment == std::vector<DistrictId>{0, 0, 1});
    CHECK(plans[1].assignment == std::vector<DistrictId>{0, 1, 1});
  }
  SUBCASE("2x2 grid") {
    // Four single-ward cuts plus two straight halvings.
    CHECK(enumerate_plans(fixtures::grid(2, 2, 2), 2).size() == 6);
  }
  SUBCASE("k equals ward count") {
    const auto plans = enumerate_plans(fixtures::grid(3, 2, 6), 6);
    REQUIRE(plans.size() == 1);
    CHECK(plans[0].assignment == std::vector<DistrictId>{0, 1, 2, 3, 4, 5});
  }
  SUBCASE("agrees with brute force over all labelings") {
    for (auto [w, h, k] : {std::tuple{3, 3, 2}, {3, 3, 3}, {4, 3, 3}, {4, 2, 4}, {2, 5, 2}}) {
      const auto g = fixtures::grid(w, h, k);
      const auto plans = enumerate_plans(g, k);
      std::set<std::vector<DistrictId>> got;
      for (const auto& p : plans) got.insert(p.assignment);
      CHECK(got.size() == plans.size());
      CHECK(got == brute_force(g, k));
      std::vector<std::vector<DistrictId>> order;
      for (const auto& p : plans) order.push_back(p.assignment);
      CHECK(std::is_sorted(order.begin(), order.end()));
    }
  }
  SUBCASE("closed under single flips") {
    const auto g = fixtures::grid(3, 3, 3);
    const auto plans = enumerate_plans(g, 3);
    std::set<std::vector<DistrictId>> all;
    for (const auto& p : plans) all.insert(p.assignment);
    std::size_t flips = 0;
    for (const auto& p : plans) {
      for (std::size_t w = 0; w < g.num_wards(); ++w) {
        for (const auto& nb : g.neighbors(static_cast<WardId>(w))) {
          Plan q = p;
          q.assignment[w] = p.assignment[static_cast<std::size_t>(nb.ward)];
          if (q == p) continue;
          std::vector<int> label(q.assignment.begin(), q.assignment.end());
          bool ok = true;
          for (int d = 0; d < 3 && ok; ++d) ok = connected_part(g, label, d);
          if (!ok) continue;
          ++flips;
          CHECK(all.count(canonicalize(q).assignment) == 1);
        }
      }
    }
    CHECK(flips > 0);
  }
  SUBCASE("filters") {
    const auto g = fixtures::grid(3, 3, 2);
    FilterCriteria crit = FilterCriteria::none();
    crit.max_pop_deviation = 0.15;  // only 4/5 splits
    const auto plans = enumerate_plans(g, 2, crit);
    CHECK_FALSE(plans.empty());
    for (const auto& p : plans) CHECK(passes_filter(g, p, crit).passed);
    std::size_t expected = 0;
    for (const auto& p : enumerate_plans(g, 2)) expected += passes_filter(g, p, crit).passed;
    CHECK(plans.size() == expected);
  }
  SUBCASE("size guard") {
    CHECK_THROWS_AS(enumerate_plans(fixtures::grid(6, 6, 4), 4), InstanceTooLarge);
    CHECK_THROWS_AS(enumerate_plans(fixtures::grid(3, 3, 2), 3), ValidationError);
  }
}

TEST_CASE("canonical labels") {
  CHECK(canonicalize(plan({2, 2, 0, 1})).assignment == std::vector<DistrictId>{0, 0, 1, 2});
  const Plan c = canonicalize(plan({1, 0, 2, 0, 1}));
  CHECK(canonicalize(c) == c);
  CHECK(stirling2(4, 2) == 7.0);
  CHECK(stirling2(9, 3) == 3025.0);
  CHECK(stirling2(5, 0) == 0.0);
}

TEST_CASE("exact Boltzmann distribution") {
  const auto g = fixtures::grid(3, 3, 2);
  const VraTargets no_vra{0, 0.4, 0, 0.4};
  SUBCASE("beta zero is uniform") {
    const auto d = exact_boltzmann(enumerate_plans(g, 2), g, ScoreWeights{}, 0.0, no_vra);
    for (double p : d.probability) CHECK(p == doctest::Approx(1.0 / d.size()).epsilon(1e-12));
  }
  SUBCASE("normalization and plan lookup") {
    const auto plans = enumerate_plans(g, 2);
    const auto d = exact_boltzmann(plans, g, ScoreWeights{}, 1.0, no_vra);
    double sum = 0.0;
    for (double p : d.probability) sum += p;
    CHECK(std::abs(sum - 1.0) < 1e-12);
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(d.score[i] == doctest::Approx(total_score(g, plans[i], ScoreWeights{}, no_vra).total));
      CHECK(d.probability[i] == doctest::Approx(std::exp(-d.score[i] - d.log_z)).epsilon(1e-12));
      Plan swapped = plans[i];
      for (auto& a : swapped.assignment) a = 1 - a;
      CHECK(d.find(swapped) == i);
    }
  }
  SUBCASE("two plans with J differing by ln 2") {
    // Compactness alone: a 1x2 strip split vs a 2x2 block split differ in
    // J_comp; choose the weight so the gap is ln 2.
    const auto path = fixtures::path_graph(3, 2);
    const auto plans = enumerate_plans(path, 2);
    ScoreWeights w{0, 1, 0, 0, 0};
    const double j0 = total_score(path, plans[0], w, no_vra).total;
    const double j1 = total_score(path, plans[1], w, no_vra).total;
    REQUIRE(j0 == j1);  // mirror images
    const std::vector<std::int64_t> pops{10, 10, 20};
    const auto skew = fixtures::path_graph(3, 2, pops);
    ScoreWeights wp{1, 0, 0, 0, 0};
    const double a = total_score(skew, plans[0], wp, no_vra).total;  // {0,1 | 2}: balanced
    const double b = total_score(skew, plans[1], wp, no_vra).total;
    REQUIRE(a == 0.0);
    wp.pop = std::log(2.0) / b;
    const auto d = exact_boltzmann(plans, skew, wp, 1.0, no_vra);
    CHECK(d.probability[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(d.probability[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("adding a constant to J changes nothing") {
    // A county split present in every plan adds 0.6 to each J.
    const auto split = fixtures::custom_grid(3, 3, 2, [](Ward& w, int, int) { w.county = "one"; });
    const auto plans = enumerate_plans(split, 2);
    const auto a = exact_boltzmann(plans, split, ScoreWeights{}, 1.0, no_vra);
    ScoreWeights none = ScoreWeights{};
    none.county = 0.0;
    const auto b = exact_boltzmann(plans, split, none, 1.0, no_vra);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.score[i] == doctest::Approx(b.score[i] + 0.6));
      CHECK(a.probability[i] == doctest::Approx(b.probability[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("total variation") {
  const std::vector<double> p{0.5, 0.5};
  CHECK(tv_distance(p, p) == 0.0);
  CHECK(tv_distance(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 1.0);
  CHECK(tv_distance(std::vector<double>{0.6, 0.4}, p) == doctest::Approx(0.1));
  CHECK_THROWS_AS(tv_distance(std::vector<double>{1.0}, p), ValidationError);

  const auto path = fixtures::path_graph(3, 2);
  const auto d = exact_boltzmann(enumerate_plans(path, 2), path, ScoreWeights{}, 0.0, {0, 0.4, 0, 0.4});
  CHECK(tv_distance(std::vector<std::uint64_t>{6, 4}, d) == doctest::Approx(0.1));
  CHECK_THROWS_AS(tv_distance(std::vector<std::uint64_t>{6, 4, 1}, d), ValidationError);
}

TEST_CASE("chain converges toward the exact distribution") {
  const auto g = fixtures::grid(3, 3, 2);
  const VraTargets no_vra{0, 0.4, 0, 0.4};
  double prev = 1.0;
  for (std::int64_t steps : {10'000, 100'000, 1'000'000}) {
    const auto r = stationarity_check(g, ScoreWeights{}, no_vra, 0.0, steps, 5);
    CHECK(r.accepted == steps);
    CHECK(r.tv < prev);
    prev = r.tv;
  }
  CHECK(prev < 0.05);
  // Without the proposal correction the walk is biased toward plans with
  // long boundaries.
  const auto biased =
      stationarity_check(g, ScoreWeights{}, no_vra, 0.0, 1'000'000, 5, AcceptanceRule::no_proposal_correction);
  CHECK(biased.tv > prev);
}
