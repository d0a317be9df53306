#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "facies_qc/error.hpp"

namespace facies_qc {

/// Facies class of a cell. 0 is mud and 1 is channel in the default binary alphabet.
using FaciesCode = std::uint8_t;

inline constexpr FaciesCode mud = 0;
inline constexpr FaciesCode channel = 1;

struct GridShape {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;

  std::size_t size() const { return n_rows * n_cols; }
  bool contains(std::ptrdiff_t row, std::ptrdiff_t col) const {
    return row >= 0 && col >= 0 && static_cast<std::size_t>(row) < n_rows &&
           static_cast<std::size_t>(col) < n_cols;
  }
  std::size_t index(std::size_t row, std::size_t col) const { return row * n_cols + col; }

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

inline std::string to_string(const GridShape& s) {
  return std::to_string(s.n_rows) + "x" + std::to_string(s.n_cols);
}

namespace detail {

inline void check_shape(const GridShape& shape, std::size_t n_values) {
  if (shape.n_rows < 1 || shape.n_cols < 1) {
    throw invalid_argument("grid dimensions must be positive, got " + to_string(shape));
  }
  if (n_values != shape.size()) {
    throw invalid_argument("grid " + to_string(shape) + " needs " + std::to_string(shape.size()) +
                           " values, got " + std::to_string(n_values));
  }
}

}  // namespace detail

/// Row-major raster of facies codes. Row 0 is the top row.
///
/// The alphabet is the code range [0, alphabet_size); every cell must lie in it.
class CategoricalGrid {
 public:
  CategoricalGrid() = default;

  CategoricalGrid(GridShape shape, std::vector<FaciesCode> cells, std::size_t alphabet_size = 2)
      : shape_(shape), cells_(std::move(cells)), alphabet_size_(alphabet_size) {
    detail::check_shape(shape_, cells_.size());
    if (alphabet_size_ < 1 || alphabet_size_ > 256) {
      throw invalid_argument("alphabet size must be in [1, 256]");
    }
    for (FaciesCode c : cells_) {
      if (c >= alphabet_size_) {
        throw invalid_argument("facies code " + std::to_string(c) + " outside alphabet of size " +
                               std::to_string(alphabet_size_));
      }
    }
  }

  static CategoricalGrid filled(GridShape shape, FaciesCode code, std::size_t alphabet_size = 2) {
    return CategoricalGrid(shape, std::vector<FaciesCode>(shape.size(), code), alphabet_size);
  }

  const GridShape& shape() const { return shape_; }
  std::size_t n_rows() const { return shape_.n_rows; }
  std::size_t n_cols() const { return shape_.n_cols; }
  std::size_t size() const { return cells_.size(); }
  std::size_t alphabet_size() const { return alphabet_size_; }

  FaciesCode at(std::size_t row, std::size_t col) const { return cells_[shape_.index(row, col)]; }
  std::span<const FaciesCode> cells() const { return cells_; }

  /// Same cells under a wider alphabet.
  CategoricalGrid with_alphabet(std::size_t alphabet_size) const {
    return CategoricalGrid(shape_, cells_, alphabet_size);
  }

  friend bool operator==(const CategoricalGrid&, const CategoricalGrid&) = default;

 private:
  GridShape shape_;
  std::vector<FaciesCode> cells_;
  std::size_t alphabet_size_ = 2;
};

/// Row-major raster of finite reals.
class RealGrid {
 public:
  RealGrid() = default;

  RealGrid(GridShape shape, std::vector<double> cells) : shape_(shape), cells_(std::move(cells)) {
    detail::check_shape(shape_, cells_.size());
    for (double v : cells_) {
      if (!std::isfinite(v)) throw invalid_argument("real grid contains a non-finite value");
    }
  }

  static RealGrid filled(GridShape shape, double value) {
    return RealGrid(shape, std::vector<double>(shape.size(), value));
  }

  const GridShape& shape() const { return shape_; }
  std::size_t n_rows() const { return shape_.n_rows; }
  std::size_t n_cols() const { return shape_.n_cols; }
  std::size_t size() const { return cells_.size(); }

  double at(std::size_t row, std::size_t col) const { return cells_[shape_.index(row, col)]; }
  std::span<const double> cells() const { return cells_; }

  friend bool operator==(const RealGrid&, const RealGrid&) = default;

 private:
  GridShape shape_;
  std::vector<double> cells_;
};

/// Cells >= cutoff become channel (1), the rest mud (0).
inline CategoricalGrid threshold_grid(const RealGrid& g, double cutoff = 0.5) {
  if (!std::isfinite(cutoff)) throw invalid_argument("threshold cutoff must be finite");
  std::vector<FaciesCode> out(g.size());
  auto in = g.cells();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = in[i] >= cutoff ? channel : mud;
  return CategoricalGrid(g.shape(), std::move(out), 2);
}

/// Ordered, non-empty set of same-shaped realizations.
class Ensemble {
 public:
  Ensemble(std::vector<CategoricalGrid> members, std::string provenance = "external")
      : members_(std::move(members)), provenance_(std::move(provenance)) {
    if (members_.empty()) throw invalid_argument("ensemble must have at least one member");
    const auto& first = members_.front();
    for (const auto& m : members_) {
      if (m.shape() != first.shape()) {
        throw invalid_argument("ensemble members differ in shape: " + to_string(first.shape()) +
                               " vs " + to_string(m.shape()));
      }
      if (m.alphabet_size() != first.alphabet_size()) {
        throw invalid_argument("ensemble members differ in alphabet");
      }
    }
  }

  const std::vector<CategoricalGrid>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  const GridShape& shape() const { return members_.front().shape(); }
  const std::string& provenance() const { return provenance_; }
  const CategoricalGrid& operator[](std::size_t i) const { return members_[i]; }

 private:
  std::vector<CategoricalGrid> members_;
  std::string provenance_;
};

struct ConditioningPoint {
  std::size_t row = 0;
  std::size_t col = 0;
  FaciesCode value = 0;

  friend bool operator==(const ConditioningPoint&, const ConditioningPoint&) = default;
};

/// Well data: facies observations at distinct in-bounds cells, in input order.
class ConditioningSet {
 public:
  ConditioningSet() = default;

  ConditioningSet(std::vector<ConditioningPoint> points, GridShape bounds)
      : points_(std::move(points)), bounds_(bounds) {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& p : points_) {
      if (p.row >= bounds.n_rows || p.col >= bounds.n_cols) {
        throw invalid_argument("conditioning point (" + std::to_string(p.row) + "," +
                               std::to_string(p.col) + ") out of bounds " + to_string(bounds));
      }
      if (!seen.emplace(p.row, p.col).second) {
        throw invalid_argument("duplicate conditioning location (" + std::to_string(p.row) + "," +
                               std::to_string(p.col) + ")");
      }
    }
  }

  const std::vector<ConditioningPoint>& points() const { return points_; }
  const GridShape& bounds() const { return bounds_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  friend bool operator==(const ConditioningSet&, const ConditioningSet&) = default;

 private:
  std::vector<ConditioningPoint> points_;
  GridShape bounds_;
};

}  // namespace facies_qc
