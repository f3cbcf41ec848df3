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

#ifndef STRUCTMATCH_PIPELINE_HPP_
#define STRUCTMATCH_PIPELINE_HPP_

#include "structmatch/graph.hpp"
#include "structmatch/matching.hpp"
#include "structmatch/profile.hpp"
#include "structmatch/regions.hpp"
#include "structmatch/tensor_io.hpp"

namespace structmatch {

struct PipelineResult {
  LabelMap argmax;
  RegionSet regions;
  SceneGraph scene;
  DissimilarityMatrix k;
  Assignment initial;
  RefineResult refined;
  LabelMap output;
};

// argmax -> regions -> scene graph -> K -> one-to-one -> refinement ->
// relabelled map. Propagates EmptyCandidateClassError and
// CandidateExplosion unchanged.
PipelineResult run_pipeline(const ProbabilityTensor& tensor, const ModelGraph& model,
                            const Profile& profile);

}  // namespace structmatch

#endif  // STRUCTMATCH_PIPELINE_HPP_
