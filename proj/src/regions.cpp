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

#include "structmatch/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "structmatch/error.hpp"

namespace structmatch {

bool Region::contains(std::size_t element) const {
  return std::binary_search(elements.begin(), elements.end(), element);
}

LabelMap argmax_labels(const ProbabilityTensor& tensor) {
  LabelMap map(tensor.dims());
  const std::size_t n_classes = tensor.num_classes();
  for (std::size_t p = 0; p < tensor.num_elements(); ++p) {
    const auto e = tensor.element(p);
    std::uint32_t best = 0;
    for (std::size_t n = 1; n < n_classes; ++n) {
      if (e[n] > e[best]) best = static_cast<std::uint32_t>(n);
    }
    map[p] = best;
  }
  return map;
}

Diameter region_diameter(const Region& region, double scene_scale, std::size_t cap) {
  const auto& b = region.boundary;
  Diameter out;
  if (b.size() < 2) return out;

  std::vector<Point> sampled;
  const std::vector<Point>* pts = &b;
  if (cap > 0 && b.size() > cap) {
    const std::size_t stride = (b.size() + cap - 1) / cap;
    sampled.reserve(cap);
    for (std::size_t i = 0; i < b.size(); i += stride) sampled.push_back(b[i]);
    pts = &sampled;
    out.approximate = true;
  }
  std::int64_t best = 0;
  for (std::size_t i = 0; i < pts->size(); ++i) {
    for (std::size_t j = i + 1; j < pts->size(); ++j) {
      best = std::max(best, squared_distance((*pts)[i], (*pts)[j]));
    }
  }
  out.value = std::sqrt(static_cast<double>(best)) / scene_scale;
  return out;
}

Region make_region(std::uint32_t id, std::uint32_t class_hint, std::vector<std::size_t> elements,
                   const GridDims& dims, double scene_scale, std::size_t diameter_cap) {
  if (elements.empty()) {
    throw Error(ErrorKind::InvalidArgument, "regions", "a region needs at least one element");
  }
  std::sort(elements.begin(), elements.end());
  Region r;
  r.id = id;
  r.class_hint = class_hint;
  r.elements = std::move(elements);
  r.points.reserve(r.elements.size());

  const auto faces = neighbour_offsets(dims.rank(), Connectivity::Face);
  std::array<double, 3> sum{0.0, 0.0, 0.0};
  for (const std::size_t e : r.elements) {
    const Point p = dims.point(e);
    r.points.push_back(p);
    sum[0] += p.row;
    sum[1] += p.col;
    sum[2] += p.depth;
    for (const Point& o : faces) {
      const Point q{p.row + o.row, p.col + o.col, p.depth + o.depth};
      if (!dims.contains(q) || !r.contains(dims.index(q))) {
        r.boundary.push_back(p);
        break;
      }
    }
  }
  const double n = static_cast<double>(r.elements.size());
  r.centroid = {sum[0] / n, sum[1] / n, sum[2] / n};
  const Diameter d = region_diameter(r, scene_scale, diameter_cap);
  r.diameter = d.value;
  r.diameter_approximate = d.approximate;
  return r;
}

Region merge_regions(const Region& a, const Region& b, const GridDims& dims, double scene_scale,
                     std::size_t diameter_cap) {
  std::vector<std::size_t> elements;
  elements.reserve(a.size() + b.size());
  std::merge(a.elements.begin(), a.elements.end(), b.elements.begin(), b.elements.end(),
             std::back_inserter(elements));
  if (std::adjacent_find(elements.begin(), elements.end()) != elements.end()) {
    throw Error(ErrorKind::InvalidArgument, "regions", "merged regions overlap");
  }
  return make_region(a.id, a.class_hint, std::move(elements), dims, scene_scale, diameter_cap);
}

RegionSet extract_regions(const LabelMap& map, std::size_t num_classes,
                          const RegionOptions& options) {
  const GridDims& dims = map.dims();
  if (map.max_label() >= num_classes) {
    throw Error(ErrorKind::InvalidArgument, "regions",
                "label map references class " + std::to_string(map.max_label()) +
                    " but only " + std::to_string(num_classes) + " classes are declared");
  }
  RegionSet rs;
  rs.dims = dims;
  rs.num_classes = num_classes;
  rs.scene_scale = dims.diagonal();
  rs.by_class.assign(num_classes, {});

  const auto offsets = neighbour_offsets(dims.rank(), options.connectivity);
  std::vector<bool> visited(map.size(), false);
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < map.size(); ++seed) {
    const std::uint32_t label = map[seed];
    if (label == 0 || visited[seed]) continue;
    std::vector<std::size_t> component;
    visited[seed] = true;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      component.push_back(cur);
      const Point p = dims.point(cur);
      for (const Point& o : offsets) {
        const Point q{p.row + o.row, p.col + o.col, p.depth + o.depth};
        if (!dims.contains(q)) continue;
        const std::size_t qi = dims.index(q);
        if (!visited[qi] && map[qi] == label) {
          visited[qi] = true;
          stack.push_back(qi);
        }
      }
    }
    if (component.size() < options.min_region_size) continue;
    const auto id = static_cast<std::uint32_t>(rs.regions.size());
    rs.regions.push_back(make_region(id, label, std::move(component), dims, rs.scene_scale,
                                     options.diameter_cap));
    rs.by_class[label].push_back(id);
  }
  return rs;
}

std::vector<double> region_mean_probability(const Region& region,
                                            const ProbabilityTensor& tensor) {
  if (region.elements.empty()) {
    throw Error(ErrorKind::InvalidArgument, "regions", "mean probability of an empty region");
  }
  const std::size_t n_classes = tensor.num_classes();
  std::vector<double> mean(n_classes, 0.0);
  for (const std::size_t e : region.elements) {
    if (e >= tensor.num_elements()) {
      throw Error(ErrorKind::InvalidArgument, "regions", "region element outside the tensor grid");
    }
    const auto v = tensor.element(e);
    double sum = 0.0;
    for (const float x : v) sum += x;
    for (std::size_t n = 0; n < n_classes; ++n) mean[n] += static_cast<double>(v[n]) / sum;
  }
  const double size = static_cast<double>(region.elements.size());
  for (double& m : mean) m /= size;
  return mean;
}

RegionDistances pairwise_region_distances(const Region& a, const Region& b, double scene_scale) {
  if (a.id == b.id) {
    throw Error(ErrorKind::InvalidArgument, "regions",
                "distances requested between region " + std::to_string(a.id) + " and itself");
  }
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = 0;
  for (const Point& p : a.boundary) {
    for (const Point& q : b.boundary) {
      const std::int64_t d = squared_distance(p, q);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  return {std::sqrt(static_cast<double>(lo)) / scene_scale,
          std::sqrt(static_cast<double>(hi)) / scene_scale};
}

std::vector<double> centroid_vector(const Region& a, const Region& b, double scene_scale,
                                    std::size_t rank) {
  std::vector<double> v(rank);
  for (std::size_t k = 0; k < rank; ++k) v[k] = (b.centroid[k] - a.centroid[k]) / scene_scale;
  return v;
}

}  // namespace structmatch
