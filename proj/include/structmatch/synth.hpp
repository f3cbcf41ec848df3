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

// Deterministic synthetic scenes: axis-aligned class blobs rendered into a
// probability tensor, with optional corruptions (split, swap, artifact) that
// only affect the tensor. The ground truth always shows the clean layout.

#ifndef STRUCTMATCH_SYNTH_HPP_
#define STRUCTMATCH_SYNTH_HPP_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "structmatch/grid.hpp"
#include "structmatch/profile.hpp"
#include "structmatch/tensor_io.hpp"

namespace structmatch {

struct Box {
  Point origin;
  std::array<std::size_t, 3> extent{1, 1, 1};  // rows, cols, depth

  bool contains(const Point& p) const;
  bool overlaps(const Box& other, int margin = 0) const;
};

struct Blob {
  std::uint32_t cls = 1;
  Box box;
};

struct ArtifactPlan {
  std::uint32_t cls = 1;   // wrong dominant class planted by the artifact
  std::size_t size = 2;    // side length of the artifact cube/square
  std::optional<Point> location;  // seeded free location when absent
};

struct SyntheticSceneSpec {
  GridDims dims{64, 64};
  std::size_t num_classes = 6;   // non-background classes
  std::vector<Blob> blobs;
  std::vector<std::uint32_t> splits;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> swaps;
  std::vector<ArtifactPlan> artifacts;
  double sharpness = 0.8;
  std::size_t split_gap = 2;
  std::uint64_t seed = 0;
};

struct SyntheticScene {
  ProbabilityTensor tensor;
  LabelMap ground_truth;
  std::vector<Box> artifact_boxes;
};

// Throws InvalidArgument on overlapping or out-of-grid blobs.
SyntheticScene generate_scene(const SyntheticSceneSpec& spec);

// Parses the flat key/value scene description (see README).
SyntheticSceneSpec scene_spec_from_key_values(const KeyValues& values);

// Six-class 2D layout: one wide blob on top, two mirrored pairs of small
// blobs, one wide blob below them, all in a 128x88 block centred at the top
// of a `grid` x `grid` canvas. Every blob origin is jittered by up to
// `jitter` elements per axis. The lower part of the canvas stays free for
// artifacts.
SyntheticSceneSpec mirrored_layout(std::uint64_t seed, std::size_t grid = 224, int jitter = 2);

}  // namespace structmatch

#endif  // STRUCTMATCH_SYNTH_HPP_
