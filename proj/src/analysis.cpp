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

#include "gerry/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gerry/errors.hpp"
#include "json.hpp"

namespace gerry {

EnsembleShares ensemble_shares(const Geography& g, std::span<const Plan> plans, const Election& e) {
  EnsembleShares out;
  out.rep_fraction = statewide_rep_fraction(e);
  out.num_districts = g.num_districts();
  out.by_plan.reserve(plans.size());
  for (const auto& p : plans) out.by_plan.push_back(district_tallies(g, p, e).rep_share);
  return out;
}

// Seat histograms

std::size_t SeatHistogram::count(int seats) const {
  auto it = counts.find(seats);
  return it == counts.end() ? 0 : it->second;
}

double SeatHistogram::frequency(int seats) const {
  return total ? static_cast<double>(count(seats)) / static_cast<double>(total) : 0.0;
}

double SeatHistogram::gaussian_bin_mass(int seats) const {
  if (!(sd > 0.0)) return 0.0;
  const double s = sd * std::sqrt(2.0);
  const double a = (seats - 0.5 - mean) / s;
  const double b = (seats + 0.5 - mean) / s;
  // Evaluate on the side of the mean where erfc keeps tail precision.
  if (a >= 0.0) return 0.5 * (std::erfc(a) - std::erfc(b));
  if (b <= 0.0) return 0.5 * (std::erfc(-b) - std::erfc(-a));
  return 1.0 - 0.5 * (std::erfc(-a) + std::erfc(b));
}

namespace {

SeatHistogram histogram_of(const std::vector<int>& seats) {
  SeatHistogram h;
  h.total = seats.size();
  for (int s : seats) ++h.counts[s];
  if (h.total == 0) return h;
  double sum = 0.0;
  for (const auto& [s, c] : h.counts) sum += static_cast<double>(s) * static_cast<double>(c);
  h.mean = sum / static_cast<double>(h.total);
  double var = 0.0;
  for (const auto& [s, c] : h.counts) var += (s - h.mean) * (s - h.mean) * static_cast<double>(c);
  h.sd = std::sqrt(var / static_cast<double>(h.total));
  return h;
}

std::vector<int> ensemble_seats(const EnsembleShares& ens, double delta) {
  std::vector<int> seats;
  seats.reserve(ens.size());
  for (const auto& shares : ens.by_plan) seats.push_back(rep_seats(shares, delta));
  return seats;
}

void require_nonempty(const EnsembleShares& ens) {
  if (ens.size() == 0) throw ValidationError("ensemble is empty");
}

}  // namespace

SeatHistogram seat_histogram(const EnsembleShares& ens, double delta_points) {
  require_nonempty(ens);
  return histogram_of(ensemble_seats(ens, delta_points));
}

// Sorted shares and box statistics

std::vector<double> sorted_copy(std::span<const double> shares) {
  std::vector<double> v(shares.begin(), shares.end());
  std::stable_sort(v.begin(), v.end());
  return v;
}

std::vector<double> sorted_shares(const Geography& g, const Plan& p, const Election& e) {
  return sorted_copy(district_tallies(g, p, e).rep_share);
}

namespace {

double median_of(std::span<const double> sorted) {
  const std::size_t n = sorted.size();
  if (n == 0) return 0.0;
  return n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

}  // namespace

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw ValidationError("box statistics of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const std::span<const double> all(values);
  BoxStats b;
  b.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  b.median = median_of(all);
  const std::size_t half = n / 2;
  if (half == 0) {
    b.q1 = b.q3 = b.median;
  } else {
    b.q1 = median_of(all.subspan(0, half));
    b.q3 = median_of(all.subspan(n - half, half));
  }
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.lo = *std::lower_bound(values.begin(), values.end(), lo_fence);
  b.hi = *(std::upper_bound(values.begin(), values.end(), hi_fence) - 1);
  return b;
}

MarginalBoxStats marginal_box_stats(const EnsembleShares& ens) {
  if (ens.size() < 5) throw ValidationError("box statistics need an ensemble of at least 5 plans");
  const auto k = static_cast<std::size_t>(ens.num_districts);
  std::vector<std::vector<double>> by_rank(k);
  for (const auto& shares : ens.by_plan) {
    const auto sorted = sorted_copy(shares);
    for (std::size_t r = 0; r < k; ++r) by_rank[r].push_back(sorted[r]);
  }
  MarginalBoxStats out;
  out.ranks.reserve(k);
  for (auto& values : by_rank) out.ranks.push_back(box_stats(std::move(values)));
  return out;
}

double percent_greater(double value, std::span<const double> population) {
  if (population.empty()) return 0.0;
  const auto n = std::count_if(population.begin(), population.end(), [value](double x) { return x > value; });
  return 100.0 * static_cast<double>(n) / static_cast<double>(population.size());
}

double percent_at_most(double value, std::span<const double> population) {
  if (population.empty()) return 0.0;
  const auto n = std::count_if(population.begin(), population.end(), [value](double x) { return x <= value; });
  return 100.0 * static_cast<double>(n) / static_cast<double>(population.size());
}

// Gerrymandering and representativeness indices

double gerrymandering_index(std::span<const double> plan_shares, const MarginalBoxStats& stats) {
  const auto sorted = sorted_copy(plan_shares);
  if (sorted.size() != stats.ranks.size()) throw ValidationError("plan and box statistics disagree on district count");
  // Sorting Democratic shares ascending reverses the Republican order, and
  // (1 - a) - (1 - b) = b - a, so the sum is taken over Republican ranks.
  double s = 0.0;
  for (std::size_t r = 0; r < sorted.size(); ++r) {
    const double d = sorted[r] - stats.ranks[r].mean;
    s += d * d;
  }
  return std::sqrt(s);
}

IndexValue gerrymandering_index(std::span<const double> plan_shares, const MarginalBoxStats& stats,
                                const EnsembleShares& ens) {
  require_nonempty(ens);
  std::vector<double> population;
  population.reserve(ens.size());
  for (const auto& shares : ens.by_plan) population.push_back(gerrymandering_index(shares, stats));
  const double gi = gerrymandering_index(plan_shares, stats);
  return {gi, percent_greater(gi, population)};
}

double continuous_seats(std::span<const double> shares, double ramp_width) {
  double c = 0.0;
  for (double p : shares) c += std::clamp((p - 0.5) / ramp_width + 0.5, 0.0, 1.0);
  return c;
}

IndexValue representativeness_index(std::span<const double> plan_shares, const EnsembleShares& ens,
                                    double ramp_width) {
  require_nonempty(ens);
  std::vector<double> c(ens.size());
  for (std::size_t i = 0; i < ens.size(); ++i) c[i] = continuous_seats(ens.by_plan[i], ramp_width);
  const double mean = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
  std::vector<double> ri(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) ri[i] = std::abs(c[i] - mean);
  const double value = std::abs(continuous_seats(plan_shares, ramp_width) - mean);
  return {value, percent_greater(value, ri)};
}

// Shift grids

ShiftGrid ShiftGrid::range(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw ValidationError("shift grid needs lo <= hi and a positive step");
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  ShiftGrid g;
  for (std::size_t i = 0; i < n; ++i) g.targets.push_back(lo + static_cast<double>(i) * step);
  return g;
}

ShiftGrid ShiftGrid::standard() { return range(45.0, 55.0, 0.5); }

ShiftGrid ShiftGrid::centered(double center_percent, double half_width, double step) {
  if (!(step > 0.0) || half_width < 0.0) throw ValidationError("shift grid needs a positive step");
  const auto m = std::llround(half_width / step);
  ShiftGrid g;
  for (long long i = -m; i <= m; ++i) g.targets.push_back(center_percent + static_cast<double>(i) * step);
  return g;
}

std::vector<double> ShiftGrid::deltas(double rep_fraction) const {
  std::vector<double> d;
  d.reserve(targets.size());
  for (double t : targets) d.push_back(delta_for_target(t, rep_fraction));
  return d;
}

// Shift-based outlier statistics

ShiftAnalysis::ShiftAnalysis(const EnsembleShares& ens, const ShiftGrid& grid)
    : n_(ens.size()), k_(ens.num_districts), deltas_(grid.deltas(ens.rep_fraction)) {
  require_nonempty(ens);
  if (deltas_.empty()) throw ValidationError("shift grid is empty");
  const std::size_t shifts = deltas_.size();
  std::vector<std::vector<int>> seats(shifts);
  for (std::size_t s = 0; s < shifts; ++s) {
    seats[s] = ensemble_seats(ens, deltas_[s]);
    hist_.push_back(histogram_of(seats[s]));
    std::vector<std::size_t> at_least(static_cast<std::size_t>(k_) + 2, 0);
    for (int x : seats[s]) ++at_least[static_cast<std::size_t>(x)];
    for (std::size_t v = static_cast<std::size_t>(k_) + 1; v-- > 0;) at_least[v] += at_least[v + 1];
    at_least_.push_back(std::move(at_least));
  }
  ens_ell_.reserve(n_);
  ens_h_.reserve(n_);
  std::vector<int> member(shifts);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t s = 0; s < shifts; ++s) member[s] = seats[s][i];
    ens_ell_.push_back(ell(member));
    ens_h_.push_back(h(member));
  }
}

std::vector<int> ShiftAnalysis::seats_at_shifts(std::span<const double> shares) const {
  std::vector<int> out;
  out.reserve(deltas_.size());
  for (double d : deltas_) out.push_back(rep_seats(shares, d));
  return out;
}

double ShiftAnalysis::seat_probability(std::size_t shift, int seats) const {
  const auto& hist = hist_[shift];
  const std::size_t c = hist.count(seats);
  if (c > 0) return static_cast<double>(c) / static_cast<double>(n_);
  const double mass = hist.gaussian_bin_mass(seats);
  const double floor = 1.0 / (10.0 * static_cast<double>(n_));
  return mass > 0.0 ? mass : floor;
}

EllValues ShiftAnalysis::ell(const std::vector<int>& seats) const {
  EllValues v;
  const auto n = static_cast<double>(n_);
  for (std::size_t s = 0; s < deltas_.size(); ++s) {
    const auto& at_least = at_least_[s];
    const auto x = static_cast<std::size_t>(std::clamp(seats[s], 0, k_));
    // P(Rep(Xi) >= Rep(plan)) and P(Dem(Xi) >= Dem(plan)) = P(Rep(Xi) <= Rep(plan)).
    v.rep = std::min(v.rep, static_cast<double>(at_least[x]) / n);
    v.dem = std::min(v.dem, static_cast<double>(n_ - at_least[x + 1]) / n);
  }
  return v;
}

double ShiftAnalysis::h(const std::vector<int>& seats) const {
  double sum = 0.0;
  for (std::size_t s = 0; s < deltas_.size(); ++s) sum += std::log(seat_probability(s, seats[s]));
  return -sum / static_cast<double>(deltas_.size());
}

std::pair<double, double> ShiftAnalysis::L(const EllValues& plan_ell) const {
  std::vector<double> rep(n_), dem(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    rep[i] = ens_ell_[i].rep;
    dem[i] = ens_ell_[i].dem;
  }
  return {percent_greater(plan_ell.rep, rep), percent_greater(plan_ell.dem, dem)};
}

double ShiftAnalysis::H(double plan_h) const { return percent_at_most(plan_h, ens_h_); }

EllValues ell_stats(std::span<const double> plan_shares, const ShiftAnalysis& sa) {
  return sa.ell(sa.seats_at_shifts(plan_shares));
}

std::pair<double, double> L_stats(std::span<const double> plan_shares, const ShiftAnalysis& sa) {
  return sa.L(ell_stats(plan_shares, sa));
}

double h_stat(std::span<const double> plan_shares, const ShiftAnalysis& sa) {
  return sa.h(sa.seats_at_shifts(plan_shares));
}

double H_stat(std::span<const double> plan_shares, const ShiftAnalysis& sa) { return sa.H(h_stat(plan_shares, sa)); }

VariantStats variant_stats(std::span<const double> plan_shares, const EnsembleShares& ens, double half_width) {
  const ShiftAnalysis sa(ens, ShiftGrid::centered(100.0 * ens.rep_fraction, half_width, 0.5));
  const auto seats = sa.seats_at_shifts(plan_shares);
  const auto [l_rep, l_dem] = sa.L(sa.ell(seats));
  return {sa.H(sa.h(seats)), l_rep, l_dem};
}

// Envelopes

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<EnvelopeRow> shift_envelope(const EnsembleShares& ens, const std::vector<double>* reference_shares,
                                        double range, double step) {
  require_nonempty(ens);
  if (!(step > 0.0) || range < 0.0) throw ValidationError("envelope needs a positive step");
  const auto m = std::llround(range / step);
  std::vector<EnvelopeRow> rows;
  std::vector<double> values(ens.size());
  for (long long i = -m; i <= m; ++i) {
    const double delta = static_cast<double>(i) * step;
    const auto seats = ensemble_seats(ens, delta);
    const SeatHistogram hist = histogram_of(seats);
    std::transform(seats.begin(), seats.end(), values.begin(), [](int s) { return static_cast<double>(s); });
    std::sort(values.begin(), values.end());
    EnvelopeRow row;
    row.shift = delta;
    row.mean = hist.mean;
    row.sd = hist.sd;
    row.p5 = quantile_sorted(values, 0.05);
    row.p95 = quantile_sorted(values, 0.95);
    row.min = values.front();
    row.max = values.back();
    if (reference_shares) row.ref_seats = rep_seats(*reference_shares, delta);
    rows.push_back(row);
  }
  return rows;
}

// Parity

namespace {

double pivot_share(std::span<const double> shares) {
  if (shares.size() % 2 == 0) throw ValidationError("parity analysis needs an odd number of districts");
  std::vector<double> v(shares.begin(), shares.end());
  const std::size_t m = (v.size() + 1) / 2;  // m-th largest
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m - 1), v.end(), std::greater<>());
  return v[m - 1];
}

}  // namespace

double plan_parity_fraction(std::span<const double> plan_shares, double rep_fraction) {
  return rep_fraction + (0.5 - pivot_share(plan_shares));
}

ParityShift ensemble_parity_shift(const EnsembleShares& ens) {
  require_nonempty(ens);
  std::vector<double> pivots;
  pivots.reserve(ens.size());
  for (const auto& shares : ens.by_plan) pivots.push_back(pivot_share(shares));
  // A plan has a Republican majority at delta iff its pivot district does.
  const auto majority = [&](long long i) {
    const double delta = static_cast<double>(i) / 100.0;
    return static_cast<std::size_t>(std::count_if(pivots.begin(), pivots.end(),
                                                  [delta](double p) { return shifted_share(p, delta) > 0.5; }));
  };
  const long long lo_end = -5000;
  const long long hi_end = 5000;
  const double half = static_cast<double>(ens.size()) / 2.0;
  if (static_cast<double>(majority(hi_end)) < half || static_cast<double>(majority(lo_end)) > half) {
    throw ValidationError("ensemble parity is not reachable within +/-50 points");
  }
  // First index with majority >= half.
  long long a = lo_end;
  long long b = hi_end;
  while (a < b) {
    const long long mid = a + (b - a) / 2;
    if (static_cast<double>(majority(mid)) >= half) b = mid; else a = mid + 1;
  }
  const long long first = a;
  long long chosen = first;
  if (static_cast<double>(majority(first)) == half) {
    // Last index with majority <= half closes the tie interval.
    a = first;
    b = hi_end;
    while (a < b) {
      const long long mid = a + (b - a + 1) / 2;
      if (static_cast<double>(majority(mid)) <= half) a = mid; else b = mid - 1;
    }
    chosen = std::clamp(0LL, first, a);
  }
  ParityShift out;
  out.delta = static_cast<double>(chosen) / 100.0;
  out.statewide_fraction = ens.rep_fraction + out.delta / 100.0;
  out.majority_plans = majority(chosen);
  return out;
}

// Index report

IndexReport index_report(std::span<const double> plan_shares, const EnsembleShares& ens,
                         const std::string& election_id, const IndexOptions& options) {
  IndexReport r;
  r.election = election_id;
  r.rep_fraction = ens.rep_fraction;
  r.ensemble_size = ens.size();
  r.rep_seats = rep_seats(plan_shares);
  const auto stats = marginal_box_stats(ens);
  const auto gi = gerrymandering_index(plan_shares, stats, ens);
  r.gerrymandering_index = gi.value;
  r.gerrymandering_percentile = gi.percentile;
  const auto ri = representativeness_index(plan_shares, ens, options.ramp_width);
  r.representativeness_index = ri.value;
  r.representativeness_percentile = ri.percentile;

  const ShiftAnalysis sa(ens, options.grid);
  const auto seats = sa.seats_at_shifts(plan_shares);
  const EllValues ell = sa.ell(seats);
  r.ell_rep = ell.rep;
  r.ell_dem = ell.dem;
  std::tie(r.L_rep, r.L_dem) = sa.L(ell);
  r.h = sa.h(seats);
  r.H = sa.H(r.h);

  const auto variant = variant_stats(plan_shares, ens, options.variant_half_width);
  r.H_variant = variant.H;
  r.L_rep_variant = variant.L_rep;
  r.L_dem_variant = variant.L_dem;
  if (plan_shares.size() % 2 == 1) r.parity_fraction = plan_parity_fraction(plan_shares, ens.rep_fraction);
  return r;
}

std::string IndexReport::to_json() const {
  nlohmann::ordered_json j;
  j["election"] = election;
  j["rep_fraction"] = rep_fraction;
  j["ensemble_size"] = ensemble_size;
  j["rep_seats"] = rep_seats;
  j["gerrymandering_index"] = gerrymandering_index;
  j["gerrymandering_percentile"] = gerrymandering_percentile;
  j["representativeness_index"] = representativeness_index;
  j["representativeness_percentile"] = representativeness_percentile;
  j["ell_rep"] = ell_rep;
  j["ell_dem"] = ell_dem;
  j["L_rep"] = L_rep;
  j["L_dem"] = L_dem;
  j["h"] = h;
  j["H"] = H;
  j["H_variant"] = H_variant;
  j["L_rep_variant"] = L_rep_variant;
  j["L_dem_variant"] = L_dem_variant;
  j["parity_fraction"] = parity_fraction ? nlohmann::ordered_json(*parity_fraction) : nlohmann::ordered_json();
  return j.dump(2);
}

}  // namespace gerry
