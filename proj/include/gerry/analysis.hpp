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

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gerry/elections.hpp"
#include "gerry/geography.hpp"

namespace gerry {

/// District Republican shares of every ensemble plan under one election.
struct EnsembleShares {
  std::vector<std::vector<double>> by_plan;
  double rep_fraction = 0.5;  // statewide two-party fraction of the election
  int num_districts = 0;

  std::size_t size() const { return by_plan.size(); }
};

EnsembleShares ensemble_shares(const Geography& g, std::span<const Plan> plans, const Election& e);

struct SeatHistogram {
  std::map<int, std::size_t> counts;  // Republican seats -> plans
  std::size_t total = 0;
  double mean = 0.0;
  double sd = 0.0;  // population standard deviation

  std::size_t count(int seats) const;
  double frequency(int seats) const;
  // Mass of [seats - 0.5, seats + 0.5] under N(mean, sd); 0 when sd == 0.
  double gaussian_bin_mass(int seats) const;
};

SeatHistogram seat_histogram(const EnsembleShares& ens, double delta_points = 0.0);

/// Ascending district Republican shares of one plan.
std::vector<double> sorted_shares(const Geography& g, const Plan& p, const Election& e);
std::vector<double> sorted_copy(std::span<const double> shares);

struct BoxStats {
  double mean = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double lo = 0.0;  // lower whisker
  double hi = 0.0;  // upper whisker
};

// Quartiles are medians of the lower and upper halves; an odd middle value
// belongs to neither half. Whiskers reach the furthest observation within
// 1.5 IQR of their quartile.
BoxStats box_stats(std::vector<double> values);

struct MarginalBoxStats {
  std::vector<BoxStats> ranks;  // rank 1 (most Republican-poor) first
};

MarginalBoxStats marginal_box_stats(const EnsembleShares& ens);

/// Percent of `population` strictly greater than `value`.
double percent_greater(double value, std::span<const double> population);
/// Percent of `population` less than or equal to `value`.
double percent_at_most(double value, std::span<const double> population);

struct IndexValue {
  double value = 0.0;
  double percentile = 0.0;  // percent of the ensemble with a strictly larger value
};

/// Root-sum-square deviation of the plan's rank-sorted Democratic shares from
/// the ensemble's rank-wise means.
double gerrymandering_index(std::span<const double> plan_shares, const MarginalBoxStats& stats);
IndexValue gerrymandering_index(std::span<const double> plan_shares, const MarginalBoxStats& stats,
                                const EnsembleShares& ens);

constexpr double kDefaultRampWidth = 0.02;

/// Seat count with each district contributing clamp((p - 0.5) / width + 0.5, 0, 1).
double continuous_seats(std::span<const double> shares, double ramp_width = kDefaultRampWidth);
IndexValue representativeness_index(std::span<const double> plan_shares, const EnsembleShares& ens,
                                    double ramp_width = kDefaultRampWidth);

/// Statewide Republican percentages at which elections are evaluated.
struct ShiftGrid {
  std::vector<double> targets;

  static ShiftGrid range(double lo, double hi, double step);
  static ShiftGrid standard();  // 45, 45.5, ..., 55
  static ShiftGrid centered(double center_percent, double half_width = 7.5, double step = 0.5);

  std::vector<double> deltas(double rep_fraction) const;
};

struct EllValues {
  double rep = 1.0;
  double dem = 1.0;
};

/// Seat counts of the ensemble at every shift of a grid, with the ell and h
/// values of every ensemble member cached for ranking.
class ShiftAnalysis {
 public:
  ShiftAnalysis(const EnsembleShares& ens, const ShiftGrid& grid);

  std::size_t num_shifts() const { return deltas_.size(); }
  std::size_t ensemble_size() const { return n_; }
  const std::vector<double>& deltas() const { return deltas_; }
  const SeatHistogram& histogram(std::size_t shift) const { return hist_[shift]; }

  std::vector<int> seats_at_shifts(std::span<const double> shares) const;

  // Probability that an ensemble plan wins exactly `seats` at the shift: the
  // empirical frequency, or the Gaussian bin mass outside the observed
  // support, floored at 1 / (10 N).
  double seat_probability(std::size_t shift, int seats) const;

  EllValues ell(const std::vector<int>& seats) const;
  double h(const std::vector<int>& seats) const;

  const std::vector<EllValues>& ensemble_ell() const { return ens_ell_; }
  const std::vector<double>& ensemble_h() const { return ens_h_; }

  // Percent of ensemble members with strictly larger ell.
  std::pair<double, double> L(const EllValues& plan_ell) const;
  // Percent of ensemble members with h at most the plan's.
  double H(double plan_h) const;

 private:
  std::size_t n_ = 0;
  int k_ = 0;
  std::vector<double> deltas_;
  std::vector<SeatHistogram> hist_;
  std::vector<std::vector<std::size_t>> at_least_;  // [shift][s]: plans with >= s Republican seats
  std::vector<EllValues> ens_ell_;
  std::vector<double> ens_h_;
};

EllValues ell_stats(std::span<const double> plan_shares, const ShiftAnalysis& sa);
std::pair<double, double> L_stats(std::span<const double> plan_shares, const ShiftAnalysis& sa);
double h_stat(std::span<const double> plan_shares, const ShiftAnalysis& sa);
double H_stat(std::span<const double> plan_shares, const ShiftAnalysis& sa);

struct VariantStats {
  double H = 0.0;
  double L_rep = 0.0;
  double L_dem = 0.0;
};

/// H and L over a symmetric window of +/- half_width points around the
/// election's own statewide fraction.
VariantStats variant_stats(std::span<const double> plan_shares, const EnsembleShares& ens, double half_width = 7.5);

struct EnvelopeRow {
  double shift = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double p5 = 0.0;
  double p95 = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::optional<int> ref_seats;
};

std::vector<EnvelopeRow> shift_envelope(const EnsembleShares& ens, const std::vector<double>* reference_shares,
                                        double range = 10.0, double step = 0.5);

/// Linear-interpolation quantile of sorted data, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

struct ParityShift {
  double delta = 0.0;               // percentage points
  double statewide_fraction = 0.0;  // rep_fraction + delta / 100
  std::size_t majority_plans = 0;   // plans with a Republican majority at delta
};

/// Swing on a 0.01-point grid at which half of the ensemble has a Republican
/// majority. Within a tie interval the swing closest to zero is returned;
/// otherwise the first swing where at least half do.
ParityShift ensemble_parity_shift(const EnsembleShares& ens);

/// Statewide fraction at which the plan's majority-pivot district sits at 50%.
double plan_parity_fraction(std::span<const double> plan_shares, double rep_fraction);

struct IndexOptions {
  ShiftGrid grid = ShiftGrid::standard();
  double variant_half_width = 7.5;
  double ramp_width = kDefaultRampWidth;
};

struct IndexReport {
  std::string election;
  double rep_fraction = 0.0;
  std::size_t ensemble_size = 0;
  int rep_seats = 0;
  double gerrymandering_index = 0.0;
  double gerrymandering_percentile = 0.0;
  double representativeness_index = 0.0;
  double representativeness_percentile = 0.0;
  double ell_rep = 0.0;
  double ell_dem = 0.0;
  double L_rep = 0.0;
  double L_dem = 0.0;
  double h = 0.0;
  double H = 0.0;
  double H_variant = 0.0;
  double L_rep_variant = 0.0;
  double L_dem_variant = 0.0;
  std::optional<double> parity_fraction;  // odd district counts only

  std::string to_json() const;
};

IndexReport index_report(std::span<const double> plan_shares, const EnsembleShares& ens,
                         const std::string& election_id, const IndexOptions& options = {});

}  // namespace gerry
