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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gerry/geography.hpp"

namespace gerry {

struct WardVotes {
  std::int64_t total = 0;
  std::int64_t dem = 0;
  std::int64_t rep = 0;

  friend bool operator==(const WardVotes&, const WardVotes&) = default;
};

/// Per-ward vote counts of one race. Wards flagged unopposed hold data that
/// does not reflect partisan preference and are the targets of interpolation.
class Election {
 public:
  Election(std::string id, std::vector<WardVotes> votes, std::vector<bool> opposed);
  Election(std::string id, std::vector<WardVotes> votes);  // all wards opposed

  const std::string& id() const { return id_; }
  std::size_t num_wards() const { return votes_.size(); }
  const std::vector<WardVotes>& votes() const { return votes_; }
  const WardVotes& votes(WardId w) const { return votes_[static_cast<std::size_t>(w)]; }
  bool opposed(WardId w) const { return opposed_[static_cast<std::size_t>(w)]; }
  const std::vector<bool>& opposed_flags() const { return opposed_; }
  std::size_t num_opposed() const;
  bool fully_opposed() const { return num_opposed() == votes_.size(); }

 private:
  std::string id_;
  std::vector<WardVotes> votes_;
  std::vector<bool> opposed_;
};

/// Complete election used as a regressor; every ward has a positive total.
class ReferenceElection {
 public:
  explicit ReferenceElection(Election e);
  const Election& election() const { return election_; }
  const std::string& id() const { return election_.id(); }

 private:
  Election election_;
};

/// Republican two-party fraction: sum(rep) / sum(rep + dem).
double statewide_rep_fraction(const Election& e);

struct DistrictTally {
  std::vector<std::int64_t> rep_votes;
  std::vector<std::int64_t> dem_votes;
  std::vector<double> rep_share;  // rep / (rep + dem); 0.5 for a district without two-party votes
};

DistrictTally district_tallies(const Geography& g, const Plan& p, const Election& e);

/// Republican share after a uniform swing of delta percentage points, clamped to [0, 1].
double shifted_share(double share, double delta_points);

struct ShiftedElection {
  std::vector<double> base_shares;
  double delta_points = 0.0;
  std::vector<double> shares;
};

ShiftedElection shift_election(const DistrictTally& t, double delta_points);
ShiftedElection shift_election(std::span<const double> shares, double delta_points);

/// Swing (points) that moves a statewide fraction to a target percentage.
double delta_for_target(double target_percent, double statewide_fraction);

struct SeatCount {
  int rep = 0;
  int dem = 0;
  friend bool operator==(const SeatCount&, const SeatCount&) = default;
};

// A district elects a Republican iff its share is strictly above one half.
int rep_seats(std::span<const double> shares, double delta_points = 0.0);
SeatCount seats(std::span<const double> shares);
SeatCount seats(const DistrictTally& t);
SeatCount seats(const ShiftedElection& s);

// Votes file: election_id,ward_id,total,dem,rep,opposed[,interpolated]
std::vector<Election> load_votes(const std::filesystem::path& path, const Geography& g);
void write_votes_csv(const std::filesystem::path& path, const Geography& g, std::span<const Election> elections);
void write_interpolated_csv(const std::filesystem::path& path, const Geography& g, const Election& e,
                            const std::vector<bool>& interpolated);

struct InterpolationResult {
  Election election;
  std::vector<bool> interpolated;  // true for the wards whose counts were estimated
};

/// Replaces the counts of every unopposed ward by local least-squares
/// estimates from the reference elections; opposed wards pass through.
InterpolationResult interpolate_election(const Election& target, std::span<const ReferenceElection> refs);

struct ReferenceSelection {
  std::vector<std::size_t> indices;  // into the candidate list, ascending
  std::vector<std::string> ids;
  double squared_error = 0.0;  // over opposed wards, each predicted with itself held out
};

/// Held-out squared error of predicting every opposed ward of the target
/// from the given references (totals, Democratic and Republican counts).
double held_out_squared_error(const Election& target, std::span<const ReferenceElection> refs);

/// Subset of at most max_size candidates with the smallest held-out error;
/// ties go to the smaller subset, then to the lexicographically smaller ids.
ReferenceSelection select_reference_set(const Election& target, std::span<const ReferenceElection> candidates,
                                        std::size_t max_size = 3);

}  // namespace gerry
