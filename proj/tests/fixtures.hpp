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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "gerry/geography.hpp"
#include "gerry/oracle.hpp"

namespace fixtures {

using namespace gerry;

inline Geography path_graph(int n, int k, std::vector<std::int64_t> pops = {}) {
  std::vector<Ward> wards;
  for (int i = 0; i < n; ++i) {
    Ward w;
    w.id = i;
    w.population = pops.empty() ? 10 : pops[static_cast<std::size_t>(i)];
    w.county = "c";
    w.town = "t";
    w.area = 1.0;
    w.outer_boundary = (i == 0 || i == n - 1) ? 3.0 : 2.0;
    wards.push_back(w);
  }
  std::vector<AdjacencyEdge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return Geography(std::move(wards), edges, k);
}

inline Geography grid(int w, int h, int k) { return grid_geography(w, h, k); }

// Unit grid with per-ward overrides applied by a callback.
template <class F>
Geography custom_grid(int width, int height, int k, F&& edit) {
  std::vector<Ward> wards;
  std::vector<AdjacencyEdge> edges;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      Ward w;
      w.id = y * width + x;
      w.population = 10;
      w.county = "c";
      w.town = "t";
      w.area = 1.0;
      w.outer_boundary = (x == 0) + (x == width - 1) + (y == 0) + (y == height - 1);
      edit(w, x, y);
      wards.push_back(w);
      if (x + 1 < width) edges.push_back({w.id, w.id + 1, 1.0});
      if (y + 1 < height) edges.push_back({w.id, w.id + width, 1.0});
    }
  }
  return Geography(std::move(wards), edges, k);
}

inline Plan plan(std::vector<DistrictId> a) { return Plan{std::move(a)}; }

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("gerry_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fixtures
