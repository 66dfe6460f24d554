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

#include "gerry/elections.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "gerry/csv.hpp"
#include "gerry/errors.hpp"

namespace gerry {

Election::Election(std::string id, std::vector<WardVotes> votes, std::vector<bool> opposed)
    : id_(std::move(id)), votes_(std::move(votes)), opposed_(std::move(opposed)) {
  if (opposed_.size() != votes_.size()) throw ValidationError("election " + id_ + ": opposed flags do not match wards");
  for (std::size_t w = 0; w < votes_.size(); ++w) {
    const auto& v = votes_[w];
    if (v.total < 0 || v.dem < 0 || v.rep < 0) {
      throw ValidationError("election " + id_ + ", ward " + std::to_string(w) + ": negative vote count");
    }
    if (v.dem + v.rep > v.total) {
      throw ValidationError("election " + id_ + ", ward " + std::to_string(w) + ": dem + rep exceeds total");
    }
  }
}

Election::Election(std::string id, std::vector<WardVotes> votes)
    : Election(std::move(id), votes, std::vector<bool>(votes.size(), true)) {}

std::size_t Election::num_opposed() const {
  return static_cast<std::size_t>(std::count(opposed_.begin(), opposed_.end(), true));
}

ReferenceElection::ReferenceElection(Election e) : election_(std::move(e)) {
  for (std::size_t w = 0; w < election_.num_wards(); ++w) {
    if (election_.votes()[w].total <= 0) {
      throw ValidationError("reference election " + election_.id() + ": ward " + std::to_string(w) +
                            " has no votes");
    }
  }
}

double statewide_rep_fraction(const Election& e) {
  std::int64_t rep = 0;
  std::int64_t two_party = 0;
  for (const auto& v : e.votes()) {
    rep += v.rep;
    two_party += v.rep + v.dem;
  }
  if (two_party <= 0) throw ValidationError("election " + e.id() + " has no two-party votes");
  return static_cast<double>(rep) / static_cast<double>(two_party);
}

DistrictTally district_tallies(const Geography& g, const Plan& p, const Election& e) {
  if (e.num_wards() != g.num_wards()) throw ValidationError("election " + e.id() + " does not cover every ward");
  const auto k = static_cast<std::size_t>(g.num_districts());
  DistrictTally t{std::vector<std::int64_t>(k, 0), std::vector<std::int64_t>(k, 0), std::vector<double>(k, 0.5)};
  for (std::size_t w = 0; w < g.num_wards(); ++w) {
    const auto d = static_cast<std::size_t>(p.assignment[w]);
    t.rep_votes[d] += e.votes()[w].rep;
    t.dem_votes[d] += e.votes()[w].dem;
  }
  for (std::size_t d = 0; d < k; ++d) {
    const std::int64_t both = t.rep_votes[d] + t.dem_votes[d];
    if (both > 0) t.rep_share[d] = static_cast<double>(t.rep_votes[d]) / static_cast<double>(both);
  }
  return t;
}

double shifted_share(double share, double delta_points) {
  return std::clamp(share + delta_points / 100.0, 0.0, 1.0);
}

ShiftedElection shift_election(std::span<const double> shares, double delta_points) {
  ShiftedElection s{std::vector<double>(shares.begin(), shares.end()), delta_points, {}};
  s.shares.reserve(shares.size());
  for (double x : shares) s.shares.push_back(shifted_share(x, delta_points));
  return s;
}

ShiftedElection shift_election(const DistrictTally& t, double delta_points) {
  return shift_election(std::span<const double>(t.rep_share), delta_points);
}

double delta_for_target(double target_percent, double statewide_fraction) {
  return target_percent - 100.0 * statewide_fraction;
}

int rep_seats(std::span<const double> shares, double delta_points) {
  int n = 0;
  for (double x : shares) n += shifted_share(x, delta_points) > 0.5 ? 1 : 0;
  return n;
}

SeatCount seats(std::span<const double> shares) {
  const int rep = rep_seats(shares);
  return {rep, static_cast<int>(shares.size()) - rep};
}

SeatCount seats(const DistrictTally& t) { return seats(std::span<const double>(t.rep_share)); }
SeatCount seats(const ShiftedElection& s) { return seats(std::span<const double>(s.shares)); }

std::vector<Election> load_votes(const std::filesystem::path& path, const Geography& g) {
  const csv::Table t = csv::read_file(path);
  const std::size_t c_election = t.column("election_id");
  const std::size_t c_ward = t.column("ward_id");
  const std::size_t c_total = t.column("total");
  const std::size_t c_dem = t.column("dem");
  const std::size_t c_rep = t.column("rep");
  const std::size_t c_opp = t.column("opposed");

  struct Pending {
    std::vector<WardVotes> votes;
    std::vector<bool> opposed;
    std::vector<char> seen;
  };
  std::vector<std::string> order;
  std::map<std::string, Pending> pending;
  const std::size_t n = g.num_wards();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string& id = t.rows[r][c_election];
    const std::string line = t.source + ":" + std::to_string(t.line_numbers[r]);
    if (id.empty()) throw ParseError(line + ": empty election_id");
    auto [it, inserted] = pending.try_emplace(id);
    if (inserted) {
      order.push_back(id);
      it->second.votes.assign(n, WardVotes{});
      it->second.opposed.assign(n, true);
      it->second.seen.assign(n, 0);
    }
    const auto ward = g.find_ward(t.rows[r][c_ward]);
    if (!ward) throw ValidationError(line + ": unknown ward id '" + t.rows[r][c_ward] + "'");
    const auto w = static_cast<std::size_t>(*ward);
    if (it->second.seen[w]) throw ValidationError(line + ": ward listed twice for election " + id);
    it->second.seen[w] = 1;
    it->second.votes[w] = WardVotes{csv::to_int(t, r, c_total), csv::to_int(t, r, c_dem), csv::to_int(t, r, c_rep)};
    const std::int64_t opp = csv::to_int(t, r, c_opp);
    if (opp != 0 && opp != 1) throw ParseError(line + ": opposed must be 0 or 1");
    it->second.opposed[w] = opp == 1;
  }
  std::vector<Election> out;
  for (const auto& id : order) {
    auto& p = pending.at(id);
    const auto missing = std::count(p.seen.begin(), p.seen.end(), 0);
    if (missing) throw ValidationError("election " + id + " is missing " + std::to_string(missing) + " wards");
    out.emplace_back(id, std::move(p.votes), std::move(p.opposed));
  }
  return out;
}

namespace {

void write_vote_rows(std::ostream& out, const Geography& g, const Election& e, const std::vector<bool>* interpolated) {
  for (std::size_t w = 0; w < e.num_wards(); ++w) {
    const auto& v = e.votes()[w];
    std::vector<std::string> row{e.id(),
                                 g.external_ids()[w],
                                 std::to_string(v.total),
                                 std::to_string(v.dem),
                                 std::to_string(v.rep),
                                 e.opposed(static_cast<WardId>(w)) ? "1" : "0"};
    if (interpolated) row.emplace_back((*interpolated)[w] ? "1" : "0");
    csv::write_row(out, row);
  }
}

}  // namespace

void write_votes_csv(const std::filesystem::path& path, const Geography& g, std::span<const Election> elections) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  csv::write_row(out, {"election_id", "ward_id", "total", "dem", "rep", "opposed"});
  for (const auto& e : elections) write_vote_rows(out, g, e, nullptr);
}

void write_interpolated_csv(const std::filesystem::path& path, const Geography& g, const Election& e,
                            const std::vector<bool>& interpolated) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  csv::write_row(out, {"election_id", "ward_id", "total", "dem", "rep", "opposed", "interpolated"});
  write_vote_rows(out, g, e, &interpolated);
}

// Interpolation

namespace {

// One regressor variable of a reference election, with wards sorted by it.
struct SortedRegressor {
  std::vector<double> x;
  std::vector<WardId> order;
  std::vector<std::size_t> position;

  explicit SortedRegressor(std::vector<double> values) : x(std::move(values)), order(x.size()), position(x.size()) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [this](WardId a, WardId b) {
      return x[static_cast<std::size_t>(a)] < x[static_cast<std::size_t>(b)];
    });
    for (std::size_t i = 0; i < order.size(); ++i) position[static_cast<std::size_t>(order[i])] = i;
  }
};

struct ReferenceIndex {
  SortedRegressor total;
  SortedRegressor rep_ratio;
  SortedRegressor dem_ratio;
};

ReferenceIndex index_reference(const Election& u) {
  std::vector<double> tot, rep, dem;
  for (const auto& v : u.votes()) {
    const auto ut = static_cast<double>(v.total);
    tot.push_back(ut);
    rep.push_back(static_cast<double>(v.rep) / ut);
    dem.push_back(static_cast<double>(v.dem) / ut);
  }
  return ReferenceIndex{SortedRegressor(std::move(tot)), SortedRegressor(std::move(rep)),
                        SortedRegressor(std::move(dem))};
}

struct TargetView {
  const Election* e;
  std::vector<double> total;
  std::vector<double> rep_ratio;
  std::vector<double> dem_ratio;

  explicit TargetView(const Election& election) : e(&election) {
    for (const auto& v : election.votes()) {
      total.push_back(static_cast<double>(v.total));
      rep_ratio.push_back(v.total > 0 ? static_cast<double>(v.rep) / static_cast<double>(v.total) : 0.0);
      dem_ratio.push_back(v.total > 0 ? static_cast<double>(v.dem) / static_cast<double>(v.total) : 0.0);
    }
  }
};

// Ordinary least squares through the up-to-two usable points on each side of
// ward i in the sorted order, evaluated at x(i). When every chosen point has
// the same regressor value the window widens outward until a distinct value
// joins, so ties at the ends of the order still give a proper line.
template <class Usable>
double local_fit(const SortedRegressor& r, const std::vector<double>& y, WardId i, Usable usable) {
  std::vector<double> xs;
  std::vector<double> ys;
  const std::size_t pos = r.position[static_cast<std::size_t>(i)];
  std::size_t below = pos;  // next candidate is below - 1
  std::size_t above = pos + 1;
  const auto take_below = [&]() {
    while (below > 0) {
      const WardId j = r.order[--below];
      if (j != i && usable(j)) {
        xs.push_back(r.x[static_cast<std::size_t>(j)]);
        ys.push_back(y[static_cast<std::size_t>(j)]);
        return true;
      }
    }
    return false;
  };
  const auto take_above = [&]() {
    while (above < r.order.size()) {
      const WardId j = r.order[above++];
      if (j != i && usable(j)) {
        xs.push_back(r.x[static_cast<std::size_t>(j)]);
        ys.push_back(y[static_cast<std::size_t>(j)]);
        return true;
      }
    }
    return false;
  };
  for (int t = 0; t < 2; ++t) take_below();
  for (int t = 0; t < 2; ++t) take_above();
  const auto all_equal = [&]() { return std::all_of(xs.begin(), xs.end(), [&](double v) { return v == xs.front(); }); };
  while (xs.size() >= 2 && all_equal()) {
    const bool lo = take_below();
    const bool hi = take_above();
    if (!lo && !hi) break;
  }
  const int n = static_cast<int>(xs.size());
  if (n < 2) throw ValidationError("interpolation needs at least two usable neighboring wards");
  double mx = 0.0;
  double my = 0.0;
  for (int a = 0; a < n; ++a) {
    mx += xs[a];
    my += ys[a];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (int a = 0; a < n; ++a) {
    sxx += (xs[a] - mx) * (xs[a] - mx);
    sxy += (xs[a] - mx) * (ys[a] - my);
  }
  // All regressor values equal: the least-squares line is the mean.
  if (sxx == 0.0) return my;
  return my + (sxy / sxx) * (r.x[static_cast<std::size_t>(i)] - mx);
}

struct Estimate {
  double total = 0.0;
  double rep = 0.0;
  double dem = 0.0;
};

Estimate estimate_ward(const ReferenceIndex& ref, const TargetView& t, WardId i) {
  const Election& e = *t.e;
  const auto usable_total = [&](WardId j) { return e.opposed(j); };
  const auto usable_ratio = [&](WardId j) { return e.opposed(j) && e.votes(j).total > 0; };
  const double vt = local_fit(ref.total, t.total, i, usable_total);
  const double rho_rep = local_fit(ref.rep_ratio, t.rep_ratio, i, usable_ratio);
  const double rho_dem = local_fit(ref.dem_ratio, t.dem_ratio, i, usable_ratio);
  // floor() is applied to the first Republican term only; the small offset
  // keeps products that are integers up to rounding noise from dropping a vote.
  const double rep_direct = rho_rep * vt;
  const double rep_floor = std::floor(rep_direct + 1e-9 * std::max(1.0, std::abs(rep_direct)));
  Estimate est;
  est.total = vt;
  est.rep = 0.5 * (rep_floor + (vt - rho_dem * vt));
  est.dem = 0.5 * (rho_dem * vt + (vt - rho_rep * vt));
  return est;
}

WardVotes finalize(const Estimate& sum, std::size_t count) {
  const auto round_clamped = [count](double v) {
    return std::max<std::int64_t>(0, std::llround(v / static_cast<double>(count)));
  };
  WardVotes out{round_clamped(sum.total), round_clamped(sum.dem), round_clamped(sum.rep)};
  out.total = std::max(out.total, out.dem + out.rep);
  return out;
}

void require_shapes(const Election& target, std::span<const ReferenceElection> refs) {
  for (const auto& r : refs) {
    if (r.election().num_wards() != target.num_wards()) {
      throw ValidationError("reference election " + r.id() + " does not cover the target's wards");
    }
  }
}

}  // namespace

InterpolationResult interpolate_election(const Election& target, std::span<const ReferenceElection> refs) {
  std::vector<bool> interpolated(target.num_wards(), false);
  if (target.fully_opposed()) return {target, interpolated};
  if (refs.empty()) throw ValidationError("interpolation of " + target.id() + " needs at least one reference election");
  if (target.num_opposed() < 2) throw ValidationError("interpolation of " + target.id() + " needs two opposed wards");
  require_shapes(target, refs);

  std::vector<ReferenceIndex> indexed;
  indexed.reserve(refs.size());
  for (const auto& r : refs) indexed.push_back(index_reference(r.election()));
  const TargetView view(target);

  std::vector<WardVotes> votes = target.votes();
  for (std::size_t w = 0; w < target.num_wards(); ++w) {
    const auto i = static_cast<WardId>(w);
    if (target.opposed(i)) continue;
    Estimate sum;
    for (const auto& ref : indexed) {
      const Estimate e = estimate_ward(ref, view, i);
      sum.total += e.total;
      sum.rep += e.rep;
      sum.dem += e.dem;
    }
    votes[w] = finalize(sum, indexed.size());
    interpolated[w] = true;
  }
  return {Election(target.id(), std::move(votes), std::vector<bool>(target.num_wards(), true)), interpolated};
}

namespace {

// Held-out estimates of every opposed ward, per reference.
std::vector<std::vector<Estimate>> held_out_estimates(const Election& target, std::span<const ReferenceElection> refs) {
  if (target.num_opposed() < 3) {
    throw ValidationError("reference selection for " + target.id() + " needs three opposed wards");
  }
  require_shapes(target, refs);
  const TargetView view(target);
  std::vector<std::vector<Estimate>> out;
  for (const auto& r : refs) {
    const ReferenceIndex idx = index_reference(r.election());
    std::vector<Estimate> est(target.num_wards());
    for (std::size_t w = 0; w < target.num_wards(); ++w) {
      if (target.opposed(static_cast<WardId>(w))) est[w] = estimate_ward(idx, view, static_cast<WardId>(w));
    }
    out.push_back(std::move(est));
  }
  return out;
}

double subset_error(const Election& target, const std::vector<std::vector<Estimate>>& est,
                    const std::vector<std::size_t>& subset) {
  double err = 0.0;
  for (std::size_t w = 0; w < target.num_wards(); ++w) {
    if (!target.opposed(static_cast<WardId>(w))) continue;
    Estimate sum;
    for (std::size_t s : subset) {
      sum.total += est[s][w].total;
      sum.rep += est[s][w].rep;
      sum.dem += est[s][w].dem;
    }
    const WardVotes pred = finalize(sum, subset.size());
    const WardVotes& truth = target.votes()[w];
    const auto sq = [](std::int64_t a, std::int64_t b) {
      const double d = static_cast<double>(a - b);
      return d * d;
    };
    err += sq(pred.total, truth.total) + sq(pred.rep, truth.rep) + sq(pred.dem, truth.dem);
  }
  return err;
}

}  // namespace

double held_out_squared_error(const Election& target, std::span<const ReferenceElection> refs) {
  const auto est = held_out_estimates(target, refs);
  std::vector<std::size_t> all(refs.size());
  std::iota(all.begin(), all.end(), 0);
  return subset_error(target, est, all);
}

ReferenceSelection select_reference_set(const Election& target, std::span<const ReferenceElection> candidates,
                                        std::size_t max_size) {
  if (candidates.empty()) throw ValidationError("no candidate reference elections");
  if (max_size < 1) throw ValidationError("reference set size must be at least 1");
  const auto est = held_out_estimates(target, candidates);

  // Candidates are visited in id order so lexicographic ties resolve naturally.
  std::vector<std::size_t> by_id(candidates.size());
  std::iota(by_id.begin(), by_id.end(), 0);
  std::stable_sort(by_id.begin(), by_id.end(),
                   [&](std::size_t a, std::size_t b) { return candidates[a].id() < candidates[b].id(); });

  ReferenceSelection best;
  bool have_best = false;
  const auto ids_of = [&](const std::vector<std::size_t>& subset) {
    std::vector<std::string> ids;
    for (std::size_t s : subset) ids.push_back(candidates[s].id());
    return ids;
  };
  const std::size_t limit = std::min(max_size, candidates.size());
  std::vector<std::size_t> pick;
  for (std::size_t size = 1; size <= limit; ++size) {
    // Lexicographic combinations of positions in by_id.
    std::vector<std::size_t> comb(size);
    std::iota(comb.begin(), comb.end(), 0);
    for (;;) {
      pick.clear();
      for (std::size_t c : comb) pick.push_back(by_id[c]);
      const double err = subset_error(target, est, pick);
      if (!have_best || err < best.squared_error) {
        best.indices = pick;
        best.squared_error = err;
        have_best = true;
      }
      std::size_t i = size;
      while (i > 0 && comb[i - 1] == candidates.size() - size + (i - 1)) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t j = i; j < size; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  best.ids = ids_of(best.indices);
  std::sort(best.indices.begin(), best.indices.end());
  return best;
}

}  // namespace gerry
