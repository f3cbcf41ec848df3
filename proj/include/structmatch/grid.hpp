// Copyright 2026 The structmatch Authors
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

#ifndef STRUCTMATCH_GRID_HPP_
#define STRUCTMATCH_GRID_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace structmatch {

// Integer grid coordinate (row, col, depth). 2D grids keep depth at 0.
struct Point {
  std::int32_t row = 0;
  std::int32_t col = 0;
  std::int32_t depth = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline std::int64_t squared_distance(const Point& a, const Point& b) {
  const std::int64_t dr = a.row - b.row;
  const std::int64_t dc = a.col - b.col;
  const std::int64_t dd = a.depth - b.depth;
  return dr * dr + dc * dc + dd * dd;
}

// Extents of a 2D (rows x cols) or 3D (rows x cols x depth) grid, row-major.
class GridDims {
 public:
  GridDims() = default;
  GridDims(std::size_t rows, std::size_t cols) : rank_(2), extents_{rows, cols, 1} {}
  GridDims(std::size_t rows, std::size_t cols, std::size_t depth)
      : rank_(3), extents_{rows, cols, depth} {}

  std::size_t rank() const { return rank_; }
  std::size_t rows() const { return extents_[0]; }
  std::size_t cols() const { return extents_[1]; }
  std::size_t depth() const { return extents_[2]; }
  std::size_t extent(std::size_t axis) const { return extents_[axis]; }
  std::size_t size() const { return extents_[0] * extents_[1] * extents_[2]; }

  std::size_t index(const Point& p) const {
    return (static_cast<std::size_t>(p.row) * extents_[1] + static_cast<std::size_t>(p.col)) *
               extents_[2] +
           static_cast<std::size_t>(p.depth);
  }

  Point point(std::size_t index) const {
    Point p;
    p.depth = static_cast<std::int32_t>(index % extents_[2]);
    index /= extents_[2];
    p.col = static_cast<std::int32_t>(index % extents_[1]);
    p.row = static_cast<std::int32_t>(index / extents_[1]);
    return p;
  }

  bool contains(const Point& p) const {
    return p.row >= 0 && p.col >= 0 && p.depth >= 0 &&
           static_cast<std::size_t>(p.row) < extents_[0] &&
           static_cast<std::size_t>(p.col) < extents_[1] &&
           static_cast<std::size_t>(p.depth) < extents_[2];
  }

  // Euclidean length of the grid diagonal, i.e. the largest distance between
  // two elements of the grid. A single-element grid reports 1 so that it can
  // be used as a normalizer.
  double diagonal() const {
    double sum = 0.0;
    for (std::size_t a = 0; a < rank_; ++a) {
      const double e = static_cast<double>(extents_[a]) - 1.0;
      sum += e * e;
    }
    return sum > 0.0 ? std::sqrt(sum) : 1.0;
  }

  std::vector<std::size_t> shape() const {
    return {extents_.begin(), extents_.begin() + static_cast<std::ptrdiff_t>(rank_)};
  }

  friend bool operator==(const GridDims&, const GridDims&) = default;

 private:
  std::size_t rank_ = 2;
  std::array<std::size_t, 3> extents_{0, 0, 1};
};

enum class Connectivity {
  Face,  // 4 neighbours in 2D, 6 in 3D
  Full,  // 8 neighbours in 2D, 26 in 3D
};

// Neighbour offsets for the given rank and connectivity.
std::vector<Point> neighbour_offsets(std::size_t rank, Connectivity connectivity);

}  // namespace structmatch

#endif  // STRUCTMATCH_GRID_HPP_
