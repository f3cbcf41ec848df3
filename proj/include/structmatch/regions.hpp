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

#ifndef STRUCTMATCH_REGIONS_HPP_
#define STRUCTMATCH_REGIONS_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include "structmatch/grid.hpp"
#include "structmatch/tensor_io.hpp"

namespace structmatch {

inline constexpr std::size_t kDiameterSubsampleCap = 4096;

// A connected set of grid elements sharing one argmax class.
//
// `elements` holds sorted linear indices and is the membership structure;
// `points` lists the same elements as coordinates in the same order.
// `boundary` holds every element with at least one face neighbour outside
// the region (or outside the grid). Euclidean distance extrema between two
// disjoint regions, and within one region, are attained on these points.
struct Region {
  std::uint32_t id = 0;
  std::uint32_t class_hint = 0;
  std::vector<std::size_t> elements;
  std::vector<Point> points;
  std::vector<Point> boundary;
  std::array<double, 3> centroid{0.0, 0.0, 0.0};
  double diameter = 0.0;  // normalized by the scene constant
  bool diameter_approximate = false;

  std::size_t size() const { return elements.size(); }
  bool contains(std::size_t element) const;
};

struct RegionOptions {
  Connectivity connectivity = Connectivity::Face;
  std::size_t min_region_size = 1;
  std::size_t diameter_cap = kDiameterSubsampleCap;
};

struct RegionSet {
  GridDims dims;
  std::size_t num_classes = 0;      // channel count of the source tensor
  double scene_scale = 1.0;         // C_s, the grid diagonal
  std::vector<Region> regions;      // regions[i].id == i
  std::vector<std::vector<std::uint32_t>> by_class;  // by_class[n] -> region ids, ascending
};

// Per-element argmax; ties go to the lowest class index.
LabelMap argmax_labels(const ProbabilityTensor& tensor);

// One region per connected component of every non-background class.
// Region ids follow raster order of each component's first element.
RegionSet extract_regions(const LabelMap& map, std::size_t num_classes,
                          const RegionOptions& options = {});

// Builds a region from a set of element indices: sorts them, fills points,
// boundary, centroid and diameter. Connectivity is not checked, so it is
// also used for merged regions and per-class unions.
Region make_region(std::uint32_t id, std::uint32_t class_hint, std::vector<std::size_t> elements,
                   const GridDims& dims, double scene_scale,
                   std::size_t diameter_cap = kDiameterSubsampleCap);

// Union of two disjoint regions; keeps a's id and class hint.
Region merge_regions(const Region& a, const Region& b, const GridDims& dims, double scene_scale,
                     std::size_t diameter_cap = kDiameterSubsampleCap);

// Mean of the per-element probability vectors over the region.
std::vector<double> region_mean_probability(const Region& region,
                                            const ProbabilityTensor& tensor);

struct RegionDistances {
  double d_min = 0.0;
  double d_max = 0.0;
};

// Minimal and maximal Euclidean distance between the two regions divided by
// `scene_scale`. Throws InvalidArgument if both arguments have the same id.
RegionDistances pairwise_region_distances(const Region& a, const Region& b, double scene_scale);

struct Diameter {
  double value = 0.0;
  bool approximate = false;
};

// Largest intra-region distance divided by `scene_scale`. Boundaries larger
// than `cap` are stride-subsampled and the result is flagged approximate.
Diameter region_diameter(const Region& region, double scene_scale,
                         std::size_t cap = kDiameterSubsampleCap);

// (centroid(b) - centroid(a)) / scene_scale, one component per grid axis.
std::vector<double> centroid_vector(const Region& a, const Region& b, double scene_scale,
                                    std::size_t rank);

}  // namespace structmatch

#endif  // STRUCTMATCH_REGIONS_HPP_
