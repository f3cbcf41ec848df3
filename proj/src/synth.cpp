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

#include "structmatch/synth.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "structmatch/error.hpp"

namespace structmatch {

namespace {

constexpr int kArtifactMargin = 4;
constexpr int kPlacementAttempts = 10000;

[[noreturn]] void synth_error(const std::string& msg) {
  throw Error(ErrorKind::InvalidArgument, "synth", msg);
}

bool box_in_grid(const Box& b, const GridDims& dims) {
  const Point far{b.origin.row + static_cast<int>(b.extent[0]) - 1,
                  b.origin.col + static_cast<int>(b.extent[1]) - 1,
                  b.origin.depth + static_cast<int>(b.extent[2]) - 1};
  return dims.contains(b.origin) && dims.contains(far);
}

// Uniform integer in [0, n) straight from the engine, so that output does
// not depend on the standard library's distribution implementation.
std::int64_t draw(std::mt19937_64& rng, std::int64_t n) {
  return n <= 0 ? 0 : static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n));
}

template <typename F>
void for_each_point(const Box& b, F&& f) {
  for (std::size_t r = 0; r < b.extent[0]; ++r)
    for (std::size_t c = 0; c < b.extent[1]; ++c)
      for (std::size_t d = 0; d < b.extent[2]; ++d)
        f(Point{b.origin.row + static_cast<int>(r), b.origin.col + static_cast<int>(c),
                b.origin.depth + static_cast<int>(d)});
}

std::vector<long> parse_ints(const std::string& key, const std::string& value) {
  std::vector<long> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      while (used < item.size() && item[used] == ' ') ++used;
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      synth_error("key '" + key + "' expects comma-separated integers, got '" + value + "'");
    }
  }
  return out;
}

}  // namespace

bool Box::contains(const Point& p) const {
  return p.row >= origin.row && p.col >= origin.col && p.depth >= origin.depth &&
         p.row < origin.row + static_cast<int>(extent[0]) &&
         p.col < origin.col + static_cast<int>(extent[1]) &&
         p.depth < origin.depth + static_cast<int>(extent[2]);
}

bool Box::overlaps(const Box& o, int margin) const {
  auto axis = [&](int a0, std::size_t ae, int b0, std::size_t be) {
    return a0 - margin < b0 + static_cast<int>(be) && b0 - margin < a0 + static_cast<int>(ae);
  };
  return axis(origin.row, extent[0], o.origin.row, o.extent[0]) &&
         axis(origin.col, extent[1], o.origin.col, o.extent[1]) &&
         axis(origin.depth, extent[2], o.origin.depth, o.extent[2]);
}

SyntheticScene generate_scene(const SyntheticSceneSpec& spec) {
  if (spec.num_classes < 1) synth_error("a scene needs at least one class");
  if (!(spec.sharpness > 0.0 && spec.sharpness <= 1.0)) synth_error("sharpness must be in (0,1]");
  const GridDims& dims = spec.dims;
  const std::size_t channels = spec.num_classes + 1;

  for (std::size_t i = 0; i < spec.blobs.size(); ++i) {
    const Blob& b = spec.blobs[i];
    if (b.cls == 0 || b.cls > spec.num_classes) synth_error("blob class out of range");
    if (!box_in_grid(b.box, dims)) synth_error("blob " + std::to_string(i) + " leaves the grid");
    for (std::size_t j = 0; j < i; ++j) {
      if (b.box.overlaps(spec.blobs[j].box)) {
        synth_error("blobs " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
      }
    }
  }
  auto blob_of = [&](std::uint32_t cls) -> const Blob& {
    for (const Blob& b : spec.blobs) {
      if (b.cls == cls) return b;
    }
    synth_error("corruption refers to class " + std::to_string(cls) + " which has no blob");
  };

  std::vector<std::uint32_t> gt(dims.size(), 0);
  std::vector<std::uint32_t> dominant(dims.size(), 0);
  for (const Blob& b : spec.blobs) {
    for_each_point(b.box, [&](const Point& p) {
      gt[dims.index(p)] = b.cls;
      dominant[dims.index(p)] = b.cls;
    });
  }

  for (const auto& [a, b] : spec.swaps) {
    const Blob& ba = blob_of(a);
    const Blob& bb = blob_of(b);
    for_each_point(ba.box, [&](const Point& p) { dominant[dims.index(p)] = b; });
    for_each_point(bb.box, [&](const Point& p) { dominant[dims.index(p)] = a; });
  }

  for (const std::uint32_t cls : spec.splits) {
    const Blob& b = blob_of(cls);
    // Carve a background slab across the longest axis through the middle.
    const std::size_t axis = static_cast<std::size_t>(
        std::max_element(b.box.extent.begin(), b.box.extent.end()) - b.box.extent.begin());
    if (b.box.extent[axis] < spec.split_gap + 2) synth_error("blob too small to split");
    Box slab = b.box;
    const std::size_t start = (b.box.extent[axis] - spec.split_gap) / 2;
    int* coord = axis == 0 ? &slab.origin.row : axis == 1 ? &slab.origin.col : &slab.origin.depth;
    *coord += static_cast<int>(start);
    slab.extent[axis] = spec.split_gap;
    for_each_point(slab, [&](const Point& p) { dominant[dims.index(p)] = 0; });
  }

  std::mt19937_64 rng(spec.seed);
  SyntheticScene scene;
  for (const ArtifactPlan& a : spec.artifacts) {
    if (a.cls == 0 || a.cls > spec.num_classes) synth_error("artifact class out of range");
    if (a.size == 0) synth_error("artifact size must be >= 1");
    Box box;
    box.extent = {a.size, a.size, dims.rank() == 3 ? a.size : 1};
    auto free = [&](const Box& candidate) {
      if (!box_in_grid(candidate, dims)) return false;
      for (const Blob& b : spec.blobs) {
        if (candidate.overlaps(b.box, kArtifactMargin)) return false;
      }
      for (const Box& other : scene.artifact_boxes) {
        if (candidate.overlaps(other, kArtifactMargin)) return false;
      }
      return true;
    };
    if (a.location) {
      box.origin = *a.location;
      if (!box_in_grid(box, dims)) synth_error("artifact leaves the grid");
      for (const Blob& b : spec.blobs) {
        if (box.overlaps(b.box)) synth_error("artifact overlaps a blob");
      }
    } else {
      bool placed = false;
      for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
        box.origin.row = static_cast<int>(draw(rng, static_cast<std::int64_t>(dims.rows() - box.extent[0] + 1)));
        box.origin.col = static_cast<int>(draw(rng, static_cast<std::int64_t>(dims.cols() - box.extent[1] + 1)));
        box.origin.depth = static_cast<int>(draw(rng, static_cast<std::int64_t>(dims.depth() - box.extent[2] + 1)));
        placed = free(box);
      }
      if (!placed) synth_error("no free location for an artifact");
    }
    for_each_point(box, [&](const Point& p) { dominant[dims.index(p)] = a.cls; });
    scene.artifact_boxes.push_back(box);
  }

  const float peak = static_cast<float>(spec.sharpness);
  const float rest = static_cast<float>((1.0 - spec.sharpness) / static_cast<double>(channels - 1));
  std::vector<float> values(dims.size() * channels, rest);
  for (std::size_t p = 0; p < dims.size(); ++p) values[p * channels + dominant[p]] = peak;

  scene.tensor = ProbabilityTensor(dims, channels, std::move(values));
  scene.ground_truth = LabelMap(dims, std::move(gt));
  return scene;
}

SyntheticSceneSpec scene_spec_from_key_values(const KeyValues& values) {
  SyntheticSceneSpec spec;
  spec.blobs.clear();
  for (const auto& [key, value] : values) {
    if (key == "layout") {
      if (value != "mirrored") synth_error("unknown layout '" + value + "'");
      // Uses the seed and dims given so far; later blob keys add to it.
      const std::uint64_t seed = spec.seed;
      const std::size_t grid = spec.dims.rows();
      if (spec.dims.rank() != 2 || spec.dims.cols() != grid) {
        synth_error("the mirrored layout needs square 2D dims");
      }
      auto blobs = mirrored_layout(seed, grid).blobs;
      spec.num_classes = 6;
      spec.blobs.insert(spec.blobs.end(), blobs.begin(), blobs.end());
    } else if (key == "dims") {
      const auto v = parse_ints(key, value);
      if (v.size() == 2 && v[0] > 0 && v[1] > 0) {
        spec.dims = GridDims(static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]));
      } else if (v.size() == 3 && v[0] > 0 && v[1] > 0 && v[2] > 0) {
        spec.dims = GridDims(static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]),
                             static_cast<std::size_t>(v[2]));
      } else {
        synth_error("dims expects 2 or 3 positive integers");
      }
    } else if (key == "classes") {
      spec.num_classes = static_cast<std::size_t>(parse_ints(key, value).at(0));
    } else if (key == "seed") {
      const auto v = parse_ints(key, value);
      if (v.size() != 1 || v[0] < 0) synth_error("seed expects one non-negative integer");
      spec.seed = static_cast<std::uint64_t>(v[0]);
    } else if (key == "sharpness") {
      try {
        spec.sharpness = std::stod(value);
      } catch (const std::exception&) {
        synth_error("sharpness expects a number, got '" + value + "'");
      }
    } else if (key == "split_gap") {
      spec.split_gap = static_cast<std::size_t>(parse_ints(key, value).at(0));
    } else if (key == "blob") {
      // cls,row,col,height,width  or  cls,row,col,depth,height,width,thickness
      const auto v = parse_ints(key, value);
      Blob b;
      if (v.size() == 5) {
        b.box.origin = {static_cast<int>(v[1]), static_cast<int>(v[2]), 0};
        b.box.extent = {static_cast<std::size_t>(v[3]), static_cast<std::size_t>(v[4]), 1};
      } else if (v.size() == 7) {
        b.box.origin = {static_cast<int>(v[1]), static_cast<int>(v[2]), static_cast<int>(v[3])};
        b.box.extent = {static_cast<std::size_t>(v[4]), static_cast<std::size_t>(v[5]),
                        static_cast<std::size_t>(v[6])};
      } else {
        synth_error("blob expects 5 (2D) or 7 (3D) integers");
      }
      if (v[0] <= 0 || std::any_of(v.begin() + 1, v.end(), [](long x) { return x < 0; })) {
        synth_error("blob entries must be non-negative with class >= 1");
      }
      b.cls = static_cast<std::uint32_t>(v[0]);
      spec.blobs.push_back(b);
    } else if (key == "split") {
      spec.splits.push_back(static_cast<std::uint32_t>(parse_ints(key, value).at(0)));
    } else if (key == "swap") {
      const auto v = parse_ints(key, value);
      if (v.size() != 2) synth_error("swap expects two classes");
      spec.swaps.emplace_back(static_cast<std::uint32_t>(v[0]), static_cast<std::uint32_t>(v[1]));
    } else if (key == "artifact") {
      // cls,size[,row,col[,depth]]
      const auto v = parse_ints(key, value);
      if (v.size() < 2 || v.size() == 3 || v.size() > 5) {
        synth_error("artifact expects cls,size[,row,col[,depth]]");
      }
      ArtifactPlan a;
      a.cls = static_cast<std::uint32_t>(v[0]);
      a.size = static_cast<std::size_t>(v[1]);
      if (v.size() >= 4) {
        a.location = Point{static_cast<int>(v[2]), static_cast<int>(v[3]),
                           v.size() == 5 ? static_cast<int>(v[4]) : 0};
      }
      spec.artifacts.push_back(a);
    } else {
      synth_error("unknown scene key '" + key + "'");
    }
  }
  return spec;
}

SyntheticSceneSpec mirrored_layout(std::uint64_t seed, std::size_t grid, int jitter) {
  if (grid < 128) synth_error("the mirrored layout needs a canvas of at least 128x128");
  SyntheticSceneSpec spec;
  spec.dims = GridDims(grid, grid);
  spec.num_classes = 6;
  spec.seed = seed;
  std::mt19937_64 rng(seed ^ 0x5eedf00dULL);
  const int offset = static_cast<int>(grid - 128) / 2;
  auto add = [&](std::uint32_t cls, int row, int col, std::size_t h, std::size_t w) {
    Blob b;
    b.cls = cls;
    b.box.origin.row = row + static_cast<int>(draw(rng, 2 * jitter + 1)) - jitter;
    b.box.origin.col = offset + col + static_cast<int>(draw(rng, 2 * jitter + 1)) - jitter;
    b.box.extent = {h, w, 1};
    spec.blobs.push_back(b);
  };
  add(1, 8, 44, 20, 40);
  add(2, 36, 40, 10, 14);
  add(3, 36, 74, 10, 14);
  add(4, 56, 34, 10, 14);
  add(5, 56, 80, 10, 14);
  add(6, 76, 52, 10, 24);
  return spec;
}

}  // namespace structmatch
