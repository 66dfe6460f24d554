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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gerry {

using WardId = int;
using DistrictId = int;

struct Ward {
  WardId id = 0;
  std::int64_t population = 0;
  std::int64_t black_population = 0;
  std::int64_t hispanic_population = 0;
  std::string county;
  std::string town;
  double area = 1.0;
  double outer_boundary = 0.0;
};

struct Neighbor {
  WardId ward;
  double shared_length;
};

struct AdjacencyEdge {
  WardId a;
  WardId b;
  double shared_length;
};

/// Districting plan: district label in [0, k) for every ward.
struct Plan {
  std::vector<DistrictId> assignment;

  DistrictId operator[](WardId w) const { return assignment[static_cast<std::size_t>(w)]; }
  std::size_t size() const { return assignment.size(); }
  friend bool operator==(const Plan&, const Plan&) = default;
};

/// Immutable ward adjacency graph. Construction validates every invariant:
/// symmetric irreflexive adjacency with positive shared lengths, a connected
/// graph, positive areas and minority counts bounded by population.
class Geography {
 public:
  Geography(std::vector<Ward> wards, const std::vector<AdjacencyEdge>& edges, int num_districts,
            std::vector<std::string> external_ids = {});

  std::size_t num_wards() const { return wards_.size(); }
  std::size_t num_edges() const { return num_edges_; }
  int num_districts() const { return num_districts_; }

  const Ward& ward(WardId w) const { return wards_[static_cast<std::size_t>(w)]; }
  std::span<const Ward> wards() const { return wards_; }
  std::span<const Neighbor> neighbors(WardId w) const {
    const auto b = offsets_[static_cast<std::size_t>(w)];
    const auto e = offsets_[static_cast<std::size_t>(w) + 1];
    return std::span<const Neighbor>(neighbors_).subspan(b, e - b);
  }

  std::int64_t total_population() const { return total_population_; }

  // Dense county / town indices, numbered by first appearance in ward order.
  int county_index(WardId w) const { return county_index_[static_cast<std::size_t>(w)]; }
  int town_index(WardId w) const { return town_index_[static_cast<std::size_t>(w)]; }
  int num_counties() const { return num_counties_; }
  int num_towns() const { return num_towns_; }

  // External ward id strings, in dense index order.
  const std::vector<std::string>& external_ids() const { return external_ids_; }
  std::optional<WardId> find_ward(const std::string& external_id) const;

  std::vector<AdjacencyEdge> edge_list() const;

 private:
  std::vector<Ward> wards_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> neighbors_;
  std::size_t num_edges_ = 0;
  int num_districts_ = 1;
  std::int64_t total_population_ = 0;
  std::vector<int> county_index_;
  std::vector<int> town_index_;
  int num_counties_ = 0;
  int num_towns_ = 0;
  std::vector<std::string> external_ids_;
  std::vector<std::pair<std::string, WardId>> id_lookup_;  // sorted by id
};

struct LoadedGeography {
  Geography geography;
  std::optional<Plan> reference_plan;            // from the optional ref_district column
  std::vector<std::string> reference_labels;     // external label of each district index
};

/// Reads the wards table and the adjacency table. Malformed rows raise
/// ParseError; invariant violations raise ValidationError.
LoadedGeography load_geography(const std::filesystem::path& wards_path,
                               const std::filesystem::path& adjacency_path, int num_districts);

void write_wards_csv(const std::filesystem::path& path, const Geography& g,
                     const Plan* reference = nullptr);
void write_adjacency_csv(const std::filesystem::path& path, const Geography& g);
void write_ward_index_csv(const std::filesystem::path& path, const Geography& g);

/// Throws ValidationError unless p labels every ward in [0, k), uses every
/// label and every district is contiguous.
void validate_plan(const Geography& g, const Plan& p);

/// True iff the wards of district d induce a nonempty connected subgraph.
bool is_contiguous(const Geography& g, const Plan& p, DistrictId d);

/// Pairs (w, d') with d' != p(w) and some neighbor of w in d', ordered by (w, d').
std::vector<std::pair<WardId, DistrictId>> conflicted_wards(const Geography& g, const Plan& p);

/// Distinct districts bordering w other than its own, ascending.
void neighbor_districts(const Geography& g, const Plan& p, WardId w, std::vector<DistrictId>& out);

struct DistrictAggregate {
  std::int64_t population = 0;
  std::int64_t black_population = 0;
  std::int64_t hispanic_population = 0;
  double area = 0.0;
  double perimeter = 0.0;
  int num_wards = 0;

  friend bool operator==(const DistrictAggregate&, const DistrictAggregate&) = default;
};

std::vector<DistrictAggregate> district_aggregates(const Geography& g, const Plan& p);

/// Updates aggregates for moving ward w into district `to`, touching only
/// the donor and the receiving district. Call before changing p.
void update_aggregates_for_move(const Geography& g, const Plan& p, std::vector<DistrictAggregate>& agg,
                                WardId w, DistrictId to);

}  // namespace gerry
