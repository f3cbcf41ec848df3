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

#include "structmatch/pipeline.hpp"

#include "structmatch/error.hpp"

namespace structmatch {

PipelineResult run_pipeline(const ProbabilityTensor& tensor, const ModelGraph& model,
                            const Profile& profile) {
  profile.validate();
  if (model.family() != profile.family) {
    throw Error(ErrorKind::InvalidArgument, "matching",
                "model uses the " + std::string(to_string(model.family())) +
                    " family but the profile asks for " + std::string(to_string(profile.family)));
  }
  if (tensor.num_classes() != model.num_channels()) {
    throw Error(ErrorKind::InvalidArgument, "matching",
                "tensor has " + std::to_string(tensor.num_classes()) + " channels, model expects " +
                    std::to_string(model.num_channels()) + " (background + classes)");
  }

  PipelineResult r;
  r.argmax = argmax_labels(tensor);
  RegionOptions ro;
  ro.connectivity = profile.connectivity;
  ro.min_region_size = profile.min_region_size;
  r.regions = extract_regions(r.argmax, tensor.num_classes(), ro);
  const CandidateLists candidates = candidates_from_regions(r.regions, model.num_vertices());
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    if (candidates[j].empty()) throw EmptyCandidateClassError(static_cast<std::uint32_t>(j + 1));
  }

  r.scene = build_scene_graph(r.regions, tensor, profile.family);
  r.k = assemble_k(r.scene, model, profile.weights);

  MatchOptions mo;
  mo.candidate_budget = profile.candidate_budget;
  mo.top_k = profile.top_k;
  mo.threads = profile.threads;
  r.initial = initial_matching(r.scene, model, r.k, candidates, mo);

  RefineOptions rfo;
  rfo.weights = profile.weights;
  rfo.threshold = profile.threshold;
  r.refined = refine(r.initial, r.scene, model, r.regions, tensor, rfo);
  r.output = relabel(r.argmax, r.refined.assignment, r.regions);
  return r;
}

}  // namespace structmatch
