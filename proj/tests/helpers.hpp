#pragma once

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "facies_qc/grid.hpp"
#include "oracles.hpp"

namespace testutil {

using namespace facies_qc;

inline CategoricalGrid cat(std::initializer_list<std::initializer_list<int>> rows, std::size_t alphabet = 2) {
  std::vector<FaciesCode> cells;
  std::size_t n_rows = 0, n_cols = 0;
  for (auto r : rows) {
    n_cols = r.size();
    ++n_rows;
    for (int v : r) cells.push_back(static_cast<FaciesCode>(v));
  }
  return CategoricalGrid({n_rows, n_cols}, std::move(cells), alphabet);
}

inline CategoricalGrid from_cells(const oracle::Cells& c, std::size_t alphabet = 2) {
  std::vector<FaciesCode> cells;
  for (const auto& row : c)
    for (int v : row) cells.push_back(static_cast<FaciesCode>(v));
  return CategoricalGrid({c.size(), c[0].size()}, std::move(cells), alphabet);
}

inline CategoricalGrid random_grid(std::mt19937& rng, std::size_t rows, std::size_t cols, double p = 0.5) {
  return from_cells(oracle::random_cells(rng, rows, cols, p));
}

inline ConditioningSet points(std::initializer_list<std::initializer_list<std::size_t>> pts, GridShape bounds) {
  std::vector<ConditioningPoint> v;
  for (auto p : pts) {
    auto it = p.begin();
    v.push_back({it[0], it[1], static_cast<FaciesCode>(it[2])});
  }
  return ConditioningSet(std::move(v), bounds);
}

/// Fresh scratch directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("facies_qc_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string str(const std::string& leaf = "") const { return leaf.empty() ? path.string() : (path / leaf).string(); }
};

}  // namespace testutil
