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

#include "fixtures.hpp"
#include "gerry/elections.hpp"
#include "gerry/errors.hpp"
#include "gerry/rng.hpp"
#include "gerry/sampler.hpp"

using namespace gerry;
using fixtures::plan;

namespace {

Election from_rep_dem(std::string id, const std::vector<std::pair<std::int64_t, std::int64_t>>& rd) {
  std::vector<WardVotes> v;
  for (auto [r, d] : rd) v.push_back({r + d, d, r});
  return Election(std::move(id), v);
}

}  // namespace

TEST_CASE("election validation") {
  CHECK_THROWS_AS(Election("e", {{5, 3, 3}}), ValidationError);
  CHECK_THROWS_AS(Election("e", {{5, -1, 3}}), ValidationError);
  CHECK_THROWS_AS(Election("e", {{5, 1, 3}}, {true, false}), ValidationError);
  CHECK_THROWS_AS(ReferenceElection(Election("r", {{0, 0, 0}, {4, 2, 2}})), ValidationError);
  const Election e("e", {{10, 4, 5}, {3, 0, 3}}, {true, false});
  CHECK(e.num_opposed() == 1);
  CHECK_FALSE(e.fully_opposed());
}

TEST_CASE("statewide fraction") {
  CHECK(statewide_rep_fraction(from_rep_dem("e", {{5, 5}, {7, 7}})) == 0.5);
  CHECK(statewide_rep_fraction(from_rep_dem("e", {{5291, 4709}})) == doctest::Approx(0.5291).epsilon(1e-12));
  CHECK(statewide_rep_fraction(from_rep_dem("e", {{3, 1}})) == 0.75);
  // Third-party votes do not enter the two-party fraction.
  CHECK(statewide_rep_fraction(Election("e", {{100, 10, 30}})) == 0.75);
  CHECK_THROWS_AS(statewide_rep_fraction(Election("e", {{5, 0, 0}})), ValidationError);
}

TEST_CASE("district tallies") {
  const auto g = fixtures::grid(2, 2, 2);
  const auto e = from_rep_dem("e", {{6, 4}, {6, 4}, {2, 8}, {2, 8}});
  const auto t = district_tallies(g, plan({0, 0, 1, 1}), e);
  CHECK(t.rep_votes == std::vector<std::int64_t>{12, 4});
  CHECK(t.dem_votes == std::vector<std::int64_t>{8, 16});
  CHECK(t.rep_share[0] == doctest::Approx(0.6));
  CHECK(t.rep_share[1] == doctest::Approx(0.2));
  CHECK(seats(t) == SeatCount{1, 1});

  SUBCASE("one-ward districts reproduce the ward counts") {
    const auto g4 = fixtures::grid(2, 2, 4);
    const auto t4 = district_tallies(g4, plan({0, 1, 2, 3}), e);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(t4.rep_votes[i] == e.votes()[i].rep);
      CHECK(t4.dem_votes[i] == e.votes()[i].dem);
    }
  }
  SUBCASE("district totals sum to the statewide totals") {
    SyntheticSpec spec;
    spec.width = 6;
    spec.height = 6;
    spec.k = 4;
    const auto inst = synth_geography(spec);
    const auto& full = inst.election("full");
    std::int64_t rep = 0, dem = 0;
    for (const auto& v : full.votes()) {
      rep += v.rep;
      dem += v.dem;
    }
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto ts = district_tallies(inst.geography, random_initial_plan(inst.geography, 4, s), full);
      CHECK(std::accumulate(ts.rep_votes.begin(), ts.rep_votes.end(), std::int64_t{0}) == rep);
      CHECK(std::accumulate(ts.dem_votes.begin(), ts.dem_votes.end(), std::int64_t{0}) == dem);
    }
  }
}

TEST_CASE("seats and shifts") {
  const std::vector<double> two{0.6, 0.2};
  CHECK(seats(two) == SeatCount{1, 1});
  CHECK(seats(std::vector<double>(5, 0.5)) == SeatCount{0, 5});

  std::vector<double> wi(99, 0.4);
  for (int i = 0; i < 60; ++i) wi[static_cast<std::size_t>(i)] = 0.55;
  CHECK(seats(wi) == SeatCount{60, 39});

  const auto id = shift_election(two, 0.0);
  CHECK(id.shares == two);
  CHECK(seats(id) == SeatCount{1, 1});

  const auto down = shift_election(two, -15.0);
  CHECK(down.shares[0] == doctest::Approx(0.45));
  CHECK(down.shares[1] == doctest::Approx(0.05));
  CHECK(seats(down) == SeatCount{0, 2});
  CHECK(shifted_share(0.99, 5.0) == 1.0);
  CHECK(shifted_share(0.02, -5.0) == 0.0);
  CHECK(delta_for_target(55.0, 0.5291) == doctest::Approx(2.09));

  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> shares(9);
    for (auto& s : shares) s = 0.2 + 0.6 * rng.uniform();
    int prev = -1;
    for (double d = -40.0; d <= 40.0; d += 0.25) {
      const int r = rep_seats(shares, d);
      CHECK(r >= prev);
      prev = r;
      CHECK(seats(shift_election(shares, d)).rep + seats(shift_election(shares, d)).dem == 9);
    }
    const auto back = shift_election(shift_election(shares, 7.5).shares, -7.5);
    for (std::size_t i = 0; i < shares.size(); ++i) CHECK(back.shares[i] == doctest::Approx(shares[i]).epsilon(1e-12));
  }
}

TEST_CASE("votes file") {
  const auto g = fixtures::grid(2, 1, 1);
  fixtures::TempDir dir;

  SUBCASE("round trip") {
    const std::vector<Election> es{Election("a", {{10, 4, 5}, {7, 3, 3}}, {true, false}),
                                   Election("b", {{3, 1, 2}, {9, 0, 9}})};
    write_votes_csv(dir / "v.csv", g, es);
    const auto back = load_votes(dir / "v.csv", g);
    REQUIRE(back.size() == 2);
    CHECK(back[0].id() == "a");
    CHECK(back[0].votes() == es[0].votes());
    CHECK(back[0].opposed_flags() == es[0].opposed_flags());
    CHECK(back[1].votes() == es[1].votes());
  }
  SUBCASE("errors") {
    fixtures::write_file(dir / "v.csv", "election_id,ward_id,total,dem,rep,opposed\na,0,10,4,5,1\n");
    CHECK_THROWS_AS(load_votes(dir / "v.csv", g), ValidationError);  // ward 1 missing
    fixtures::write_file(dir / "v.csv", "election_id,ward_id,total,dem,rep,opposed\na,0,10,4,5,1\na,9,1,0,0,1\n");
    CHECK_THROWS_AS(load_votes(dir / "v.csv", g), ValidationError);
    fixtures::write_file(dir / "v.csv", "election_id,ward_id,total,dem,rep,opposed\na,0,10,4,5,2\na,1,1,0,0,1\n");
    CHECK_THROWS_AS(load_votes(dir / "v.csv", g), ParseError);
    fixtures::write_file(dir / "v.csv", "election_id,ward_id,total,dem,rep,opposed\na,0,10,8,5,1\na,1,1,0,0,1\n");
    CHECK_THROWS_AS(load_votes(dir / "v.csv", g), ValidationError);
    fixtures::write_file(dir / "v.csv", "election_id,ward_id,total,dem,opposed\na,0,10,8,1\n");
    CHECK_THROWS_AS(load_votes(dir / "v.csv", g), ParseError);
  }
}

TEST_CASE("interpolation on a hand-checked instance") {
  // Reference totals 10..60 with Republican fractions rho; the target has
  // V_tot = 2 U_tot and the same fractions, so every local fit is exact.
  const std::vector<std::int64_t> u{10, 20, 30, 40, 50, 60};
  const std::vector<double> rho{0.5, 0.4, 0.6, 0.7, 0.3, 0.2};
  std::vector<WardVotes> ref, target;
  std::vector<bool> opposed(6, true);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto ur = static_cast<std::int64_t>(std::lround(rho[i] * u[i]));
    ref.push_back({u[i], u[i] - ur, ur});
    const auto vr = static_cast<std::int64_t>(std::lround(rho[i] * 2 * u[i]));
    target.push_back({2 * u[i], 2 * u[i] - vr, vr});
  }
  // Wards 2 and 4 carry unopposed placeholder counts.
  target[2] = {60, 60, 0};
  target[4] = {100, 0, 100};
  opposed[2] = opposed[4] = false;
  const std::vector<ReferenceElection> refs{ReferenceElection(Election("ref", ref))};
  const auto r = interpolate_election(Election("t", target, opposed), refs);

  CHECK(r.interpolated == std::vector<bool>{false, false, true, false, true, false});
  CHECK(r.election.votes(2) == WardVotes{60, 24, 36});
  CHECK(r.election.votes(4) == WardVotes{100, 70, 30});
  for (WardId w : {0, 1, 3, 5}) CHECK(r.election.votes(w) == target[static_cast<std::size_t>(w)]);
  CHECK(r.election.fully_opposed());
}

TEST_CASE("interpolation on exact-linear data stays within one vote") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto fx = exact_linear_fixture(40, seed);
    const std::vector<ReferenceElection> refs{fx.linear};
    const auto r = interpolate_election(fx.target, refs);
    for (std::size_t w = 0; w < 40; ++w) {
      const auto& got = r.election.votes()[w];
      const auto& want = fx.truth.votes()[w];
      if (fx.target.opposed(static_cast<WardId>(w))) {
        CHECK(got == fx.target.votes()[w]);
        CHECK_FALSE(r.interpolated[w]);
      } else {
        CHECK(r.interpolated[w]);
        CHECK(std::abs(got.total - want.total) <= 1);
        CHECK(std::abs(got.rep - want.rep) <= 1);
        CHECK(std::abs(got.dem - want.dem) <= 1);
      }
    }
  }
}

TEST_CASE("interpolation is the identity on fully opposed elections") {
  const auto fx = exact_linear_fixture(20, 3);
  const std::vector<ReferenceElection> refs{fx.linear, fx.noise};
  const auto r = interpolate_election(fx.truth, refs);
  CHECK(r.election.votes() == fx.truth.votes());
  CHECK(std::none_of(r.interpolated.begin(), r.interpolated.end(), [](bool b) { return b; }));
  const auto again = interpolate_election(r.election, refs);
  CHECK(again.election.votes() == r.election.votes());
}

TEST_CASE("interpolation preconditions") {
  const std::vector<ReferenceElection> refs{ReferenceElection(Election("r", {{10, 5, 5}, {10, 5, 5}, {10, 5, 5}}))};
  CHECK_THROWS_AS(interpolate_election(Election("t", {{4, 2, 2}, {4, 0, 4}, {4, 4, 0}}, {true, false, false}), refs),
                  ValidationError);
  const Election four("t", {{4, 2, 2}, {4, 1, 3}, {4, 0, 4}, {4, 3, 1}}, {true, true, false, true});
  CHECK_THROWS_AS(interpolate_election(four, refs), ValidationError);
  CHECK_THROWS_AS(interpolate_election(four, {}), ValidationError);
}

TEST_CASE("reference selection") {
  const auto fx = exact_linear_fixture(60, 8);
  const std::vector<ReferenceElection> one{fx.noise};
  CHECK(select_reference_set(fx.target, one).ids == std::vector<std::string>{"noise"});

  const std::vector<ReferenceElection> both{fx.noise, fx.linear};
  const auto sel = select_reference_set(fx.target, both, 2);
  CHECK(sel.ids == std::vector<std::string>{"linear"});
  CHECK(sel.indices == std::vector<std::size_t>{1});
  CHECK(sel.squared_error == doctest::Approx(held_out_squared_error(fx.target, std::vector{fx.linear})));
  CHECK(held_out_squared_error(fx.target, std::vector{fx.linear}) <
        held_out_squared_error(fx.target, std::vector{fx.noise}));

  SUBCASE("ties go to the smaller subset then to lexicographic ids") {
    const ReferenceElection twin(Election("alpha", fx.linear.election().votes()));
    const std::vector<ReferenceElection> twins{fx.linear, twin};
    const auto t = select_reference_set(fx.target, twins, 2);
    CHECK(t.ids == std::vector<std::string>{"alpha"});
  }
  CHECK_THROWS_AS(select_reference_set(fx.target, {}), ValidationError);
  CHECK_THROWS_AS(select_reference_set(fx.target, both, 0), ValidationError);
}
