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

#include "gerry/geography.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_map>

#include "gerry/csv.hpp"
#include "gerry/errors.hpp"

namespace gerry {

namespace {

std::vector<int> dense_labels(const std::vector<Ward>& wards, std::string Ward::*field, int& count) {
  std::unordered_map<std::string, int> index;
  std::vector<int> out;
  out.reserve(wards.size());
  for (const auto& w : wards) {
    auto [it, inserted] = index.emplace(w.*field, static_cast<int>(index.size()));
    out.push_back(it->second);
  }
  count = static_cast<int>(index.size());
  return out;
}

}  // namespace

Geography::Geography(std::vector<Ward> wards, const std::vector<AdjacencyEdge>& edges, int num_districts,
                     std::vector<std::string> external_ids)
    : wards_(std::move(wards)), num_districts_(num_districts) {
  const std::size_t n = wards_.size();
  if (n == 0) throw ValidationError("geography has no wards");
  if (num_districts_ < 1) throw ValidationError("number of districts must be positive");
  if (static_cast<std::size_t>(num_districts_) > n) {
    throw ValidationError("number of districts (" + std::to_string(num_districts_) +
                          ") exceeds number of wards (" + std::to_string(n) + ")");
  }

  for (std::size_t i = 0; i < n; ++i) {
    Ward& w = wards_[i];
    w.id = static_cast<WardId>(i);
    const std::string name = "ward " + std::to_string(i);
    if (w.population < 0 || w.black_population < 0 || w.hispanic_population < 0) {
      throw ValidationError(name + ": negative population count");
    }
    if (w.black_population > w.population || w.hispanic_population > w.population) {
      throw ValidationError(name + ": minority population exceeds total population");
    }
    if (!(w.area > 0.0)) throw ValidationError(name + ": area must be positive");
    if (!(w.outer_boundary >= 0.0)) throw ValidationError(name + ": outer boundary must be nonnegative");
    total_population_ += w.population;
  }

  if (external_ids.empty()) {
    external_ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) external_ids.push_back(std::to_string(i));
  }
  if (external_ids.size() != n) throw ValidationError("external id count does not match ward count");
  external_ids_ = std::move(external_ids);
  id_lookup_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) id_lookup_.emplace_back(external_ids_[i], static_cast<WardId>(i));
  std::sort(id_lookup_.begin(), id_lookup_.end());
  for (std::size_t i = 1; i < n; ++i) {
    if (id_lookup_[i].first == id_lookup_[i - 1].first) {
      throw ValidationError("duplicate ward id '" + id_lookup_[i].first + "'");
    }
  }

  std::set<std::pair<WardId, WardId>> seen;
  std::vector<std::vector<Neighbor>> adj(n);
  for (const auto& e : edges) {
    if (e.a < 0 || e.b < 0 || static_cast<std::size_t>(e.a) >= n || static_cast<std::size_t>(e.b) >= n) {
      throw ValidationError("adjacency references unknown ward index");
    }
    if (e.a == e.b) throw ValidationError("self-adjacency for ward " + external_ids_[e.a]);
    if (!(e.shared_length > 0.0)) {
      throw ValidationError("nonpositive shared length between " + external_ids_[e.a] + " and " +
                            external_ids_[e.b]);
    }
    const auto key = std::minmax(e.a, e.b);
    if (!seen.insert(key).second) {
      throw ValidationError("edge listed twice: " + external_ids_[e.a] + " - " + external_ids_[e.b]);
    }
    adj[static_cast<std::size_t>(e.a)].push_back({e.b, e.shared_length});
    adj[static_cast<std::size_t>(e.b)].push_back({e.a, e.shared_length});
  }
  num_edges_ = seen.size();

  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end(), [](const Neighbor& x, const Neighbor& y) { return x.ward < y.ward; });
    offsets_[i + 1] = offsets_[i] + adj[i].size();
  }
  neighbors_.reserve(offsets_[n]);
  for (auto& list : adj) neighbors_.insert(neighbors_.end(), list.begin(), list.end());

  std::vector<char> visited(n, 0);
  std::vector<WardId> stack{0};
  visited[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const WardId w = stack.back();
    stack.pop_back();
    for (const auto& nb : neighbors(w)) {
      if (!visited[static_cast<std::size_t>(nb.ward)]) {
        visited[static_cast<std::size_t>(nb.ward)] = 1;
        ++reached;
        stack.push_back(nb.ward);
      }
    }
  }
  if (reached != n) {
    throw ValidationError("ward graph is disconnected: " + std::to_string(n - reached) +
                          " wards unreachable from ward " + external_ids_[0]);
  }

  county_index_ = dense_labels(wards_, &Ward::county, num_counties_);
  town_index_ = dense_labels(wards_, &Ward::town, num_towns_);
}

std::optional<WardId> Geography::find_ward(const std::string& external_id) const {
  auto it = std::lower_bound(id_lookup_.begin(), id_lookup_.end(), external_id,
                             [](const auto& entry, const std::string& key) { return entry.first < key; });
  if (it == id_lookup_.end() || it->first != external_id) return std::nullopt;
  return it->second;
}

std::vector<AdjacencyEdge> Geography::edge_list() const {
  std::vector<AdjacencyEdge> out;
  out.reserve(num_edges_);
  for (std::size_t w = 0; w < wards_.size(); ++w) {
    for (const auto& nb : neighbors(static_cast<WardId>(w))) {
      if (static_cast<std::size_t>(nb.ward) > w) out.push_back({static_cast<WardId>(w), nb.ward, nb.shared_length});
    }
  }
  return out;
}

LoadedGeography load_geography(const std::filesystem::path& wards_path,
                               const std::filesystem::path& adjacency_path, int num_districts) {
  const csv::Table wt = csv::read_file(wards_path);
  const std::size_t c_id = wt.column("ward_id");
  const std::size_t c_county = wt.column("county");
  const std::size_t c_town = wt.column("town");
  const std::size_t c_pop = wt.column("population");
  const std::size_t c_black = wt.column("black_pop");
  const std::size_t c_hisp = wt.column("hisp_pop");
  const std::size_t c_area = wt.column("area");
  const std::size_t c_outer = wt.column("outer_boundary");
  const auto c_ref = wt.find_column("ref_district");

  std::vector<Ward> wards;
  std::vector<std::string> ids;
  std::vector<std::string> ref_raw;
  wards.reserve(wt.rows.size());
  for (std::size_t r = 0; r < wt.rows.size(); ++r) {
    Ward w;
    w.id = static_cast<WardId>(r);
    w.county = wt.rows[r][c_county];
    w.town = wt.rows[r][c_town];
    w.population = csv::to_int(wt, r, c_pop);
    w.black_population = csv::to_int(wt, r, c_black);
    w.hispanic_population = csv::to_int(wt, r, c_hisp);
    w.area = csv::to_double(wt, r, c_area);
    w.outer_boundary = csv::to_double(wt, r, c_outer);
    if (wt.rows[r][c_id].empty()) throw ParseError(wt.source + ":" + std::to_string(wt.line_numbers[r]) + ": empty ward_id");
    ids.push_back(wt.rows[r][c_id]);
    if (c_ref) ref_raw.push_back(wt.rows[r][*c_ref]);
    wards.push_back(std::move(w));
  }

  std::unordered_map<std::string, WardId> index;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!index.emplace(ids[i], static_cast<WardId>(i)).second) {
      throw ValidationError("duplicate ward id '" + ids[i] + "'");
    }
  }

  const csv::Table at = csv::read_file(adjacency_path);
  const std::size_t c_a = at.column("ward_a");
  const std::size_t c_b = at.column("ward_b");
  const std::size_t c_len = at.column("shared_length");
  std::vector<AdjacencyEdge> edges;
  edges.reserve(at.rows.size());
  for (std::size_t r = 0; r < at.rows.size(); ++r) {
    const double len = csv::to_double(at, r, c_len);
    const auto lookup = [&](std::size_t col) {
      auto it = index.find(at.rows[r][col]);
      if (it == index.end()) {
        throw ValidationError(at.source + ":" + std::to_string(at.line_numbers[r]) + ": unknown ward id '" +
                              at.rows[r][col] + "'");
      }
      return it->second;
    };
    edges.push_back({lookup(c_a), lookup(c_b), len});
  }

  LoadedGeography out{Geography(std::move(wards), edges, num_districts, std::move(ids)), std::nullopt, {}};

  if (c_ref) {
    // Labels are ordered numerically when they are all integers, else lexically.
    bool numeric = true;
    for (std::size_t r = 0; r < ref_raw.size(); ++r) {
      const std::string& s = ref_raw[r];
      if (s.empty()) {
        throw ValidationError(wt.source + ":" + std::to_string(wt.line_numbers[r]) +
                              ": ward has no reference district assignment");
      }
      long long v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) numeric = false;
    }
    std::vector<std::string> labels(ref_raw.begin(), ref_raw.end());
    std::sort(labels.begin(), labels.end(), [numeric](const std::string& x, const std::string& y) {
      if (numeric) return std::stoll(x) < std::stoll(y);
      return x < y;
    });
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    if (static_cast<int>(labels.size()) != num_districts) {
      throw ValidationError("reference plan uses " + std::to_string(labels.size()) + " districts, expected " +
                            std::to_string(num_districts));
    }
    std::map<std::string, DistrictId> label_index;
    for (std::size_t i = 0; i < labels.size(); ++i) label_index[labels[i]] = static_cast<DistrictId>(i);
    Plan ref;
    ref.assignment.reserve(ref_raw.size());
    for (const auto& s : ref_raw) ref.assignment.push_back(label_index.at(s));
    validate_plan(out.geography, ref);
    out.reference_plan = std::move(ref);
    out.reference_labels = std::move(labels);
  }
  return out;
}

void write_wards_csv(const std::filesystem::path& path, const Geography& g, const Plan* reference) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::vector<std::string> header{"ward_id", "county", "town", "population", "black_pop", "hisp_pop", "area",
                                  "outer_boundary"};
  if (reference) header.emplace_back("ref_district");
  csv::write_row(out, header);
  for (const auto& w : g.wards()) {
    std::vector<std::string> row{g.external_ids()[static_cast<std::size_t>(w.id)],
                                 w.county,
                                 w.town,
                                 std::to_string(w.population),
                                 std::to_string(w.black_population),
                                 std::to_string(w.hispanic_population),
                                 csv::format_double(w.area),
                                 csv::format_double(w.outer_boundary)};
    if (reference) row.push_back(std::to_string((*reference)[w.id] + 1));
    csv::write_row(out, row);
  }
}

void write_adjacency_csv(const std::filesystem::path& path, const Geography& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  csv::write_row(out, {"ward_a", "ward_b", "shared_length"});
  const auto& ids = g.external_ids();
  for (const auto& e : g.edge_list()) {
    csv::write_row(out, {ids[static_cast<std::size_t>(e.a)], ids[static_cast<std::size_t>(e.b)],
                         csv::format_double(e.shared_length)});
  }
}

void write_ward_index_csv(const std::filesystem::path& path, const Geography& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  csv::write_row(out, {"index", "ward_id"});
  for (std::size_t i = 0; i < g.num_wards(); ++i) csv::write_row(out, {std::to_string(i), g.external_ids()[i]});
}

void validate_plan(const Geography& g, const Plan& p) {
  if (p.size() != g.num_wards()) {
    throw ValidationError("plan has " + std::to_string(p.size()) + " labels for " +
                          std::to_string(g.num_wards()) + " wards");
  }
  const int k = g.num_districts();
  std::vector<int> used(static_cast<std::size_t>(k), 0);
  for (std::size_t w = 0; w < p.size(); ++w) {
    const DistrictId d = p.assignment[w];
    if (d < 0 || d >= k) throw ValidationError("ward " + std::to_string(w) + " has district label out of range");
    used[static_cast<std::size_t>(d)] = 1;
  }
  for (int d = 0; d < k; ++d) {
    if (!used[static_cast<std::size_t>(d)]) throw ValidationError("district " + std::to_string(d) + " is empty");
    if (!is_contiguous(g, p, d)) throw ValidationError("district " + std::to_string(d) + " is not contiguous");
  }
}

bool is_contiguous(const Geography& g, const Plan& p, DistrictId d) {
  if (d < 0 || d >= g.num_districts()) throw std::out_of_range("district label out of range");
  const std::size_t n = g.num_wards();
  WardId start = -1;
  std::size_t members = 0;
  for (std::size_t w = 0; w < n; ++w) {
    if (p.assignment[w] == d) {
      if (start < 0) start = static_cast<WardId>(w);
      ++members;
    }
  }
  if (start < 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<WardId> stack{start};
  seen[static_cast<std::size_t>(start)] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const WardId w = stack.back();
    stack.pop_back();
    for (const auto& nb : g.neighbors(w)) {
      const auto u = static_cast<std::size_t>(nb.ward);
      if (!seen[u] && p.assignment[u] == d) {
        seen[u] = 1;
        ++reached;
        stack.push_back(nb.ward);
      }
    }
  }
  return reached == members;
}

void neighbor_districts(const Geography& g, const Plan& p, WardId w, std::vector<DistrictId>& out) {
  out.clear();
  const DistrictId own = p[w];
  for (const auto& nb : g.neighbors(w)) {
    const DistrictId d = p[nb.ward];
    if (d != own) out.push_back(d);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

std::vector<std::pair<WardId, DistrictId>> conflicted_wards(const Geography& g, const Plan& p) {
  std::vector<std::pair<WardId, DistrictId>> out;
  std::vector<DistrictId> scratch;
  for (std::size_t w = 0; w < g.num_wards(); ++w) {
    neighbor_districts(g, p, static_cast<WardId>(w), scratch);
    for (DistrictId d : scratch) out.emplace_back(static_cast<WardId>(w), d);
  }
  return out;
}

std::vector<DistrictAggregate> district_aggregates(const Geography& g, const Plan& p) {
  std::vector<DistrictAggregate> agg(static_cast<std::size_t>(g.num_districts()));
  for (const auto& w : g.wards()) {
    auto& a = agg[static_cast<std::size_t>(p[w.id])];
    a.population += w.population;
    a.black_population += w.black_population;
    a.hispanic_population += w.hispanic_population;
    a.area += w.area;
    a.perimeter += w.outer_boundary;
    a.num_wards += 1;
    for (const auto& nb : g.neighbors(w.id)) {
      if (p[nb.ward] != p[w.id]) a.perimeter += nb.shared_length;
    }
  }
  return agg;
}

void update_aggregates_for_move(const Geography& g, const Plan& p, std::vector<DistrictAggregate>& agg, WardId w,
                                DistrictId to) {
  const DistrictId from = p[w];
  if (from == to) return;
  const Ward& ward = g.ward(w);
  auto& src = agg[static_cast<std::size_t>(from)];
  auto& dst = agg[static_cast<std::size_t>(to)];
  src.population -= ward.population;
  dst.population += ward.population;
  src.black_population -= ward.black_population;
  dst.black_population += ward.black_population;
  src.hispanic_population -= ward.hispanic_population;
  dst.hispanic_population += ward.hispanic_population;
  src.area -= ward.area;
  dst.area += ward.area;
  src.num_wards -= 1;
  dst.num_wards += 1;
  src.perimeter -= ward.outer_boundary;
  dst.perimeter += ward.outer_boundary;
  // Edges to a third district move from the donor's boundary to the receiver's.
  for (const auto& nb : g.neighbors(w)) {
    const DistrictId d = p[nb.ward];
    const double len = nb.shared_length;
    if (d == from) {
      src.perimeter += len;
      dst.perimeter += len;
    } else if (d == to) {
      src.perimeter -= len;
      dst.perimeter -= len;
    } else {
      src.perimeter -= len;
      dst.perimeter += len;
    }
  }
}

}  // namespace gerry
