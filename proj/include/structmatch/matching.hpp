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

// Inexact matching of a scene graph onto a model graph, formulated as a QAP
// minimizing vec(X)^T K vec(X).
//
// Pair (scene vertex i, model vertex j) has index i * n_m + j in vec(X) and
// in both axes of K. Matching runs in two stages: an exact one-to-one search
// restricted to each class's candidate regions, then a greedy
// many-to-one-or-none refinement of the left-over scene vertices.

#ifndef STRUCTMATCH_MATCHING_HPP_
#define STRUCTMATCH_MATCHING_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "json.hpp"
#include "structmatch/graph.hpp"
#include "structmatch/regions.hpp"
#include "structmatch/tensor_io.hpp"

namespace structmatch {

struct BlendWeights {
  double lambda = 0.5;    // vertex vs edge terms in K
  double lambda_v = 0.5;  // probability vs diameter (direction family)
  double lambda_e = 0.5;  // d_min vs d_max, or angle vs length
};

class DissimilarityMatrix {
 public:
  DissimilarityMatrix() = default;
  DissimilarityMatrix(std::size_t n_scene, std::size_t n_model, double lambda)
      : n_scene_(n_scene),
        n_model_(n_model),
        lambda_(lambda),
        data_(n_scene * n_model * n_scene * n_model, 0.0) {}

  std::size_t n_scene() const { return n_scene_; }
  std::size_t n_model() const { return n_model_; }
  std::size_t side() const { return n_scene_ * n_model_; }
  double lambda() const { return lambda_; }

  std::size_t pair_index(std::size_t scene, std::size_t model) const {
    return scene * n_model_ + model;
  }
  double operator()(std::size_t p, std::size_t q) const { return data_[p * side() + q]; }
  double& operator()(std::size_t p, std::size_t q) { return data_[p * side() + q]; }

 private:
  std::size_t n_scene_ = 0;
  std::size_t n_model_ = 0;
  double lambda_ = 0.5;
  std::vector<double> data_;
};

// Entry ((i,j),(k,l)) with i != k and j != l holds
// (1 - lambda) * edge_dissimilarity(scene edge (i,k), model edge (j,l)).
// Entries sharing exactly one endpoint are 0; the diagonal holds
// lambda * vertex_dissimilarity(i, j).
DissimilarityMatrix assemble_k(const SceneGraph& scene, const ModelGraph& model,
                               const BlendWeights& weights);

enum class AssignmentStage { Initial, Refined };

struct Assignment {
  // Model vertex of each scene vertex. During the initial stage nullopt
  // means "not yet matched"; after refinement it means "none" (background).
  std::vector<std::optional<std::uint32_t>> model_of;
  AssignmentStage stage = AssignmentStage::Initial;
  double cost = 0.0;
};

// vec(X)^T K vec(X), summed row by row in ascending pair order.
double qap_cost(const Assignment& x, const DissimilarityMatrix& k);

// candidates[j] lists the scene vertices eligible for model vertex j.
using CandidateLists = std::vector<std::vector<std::uint32_t>>;

// Candidates for model vertex j are the regions whose argmax class is j + 1.
CandidateLists candidates_from_regions(const RegionSet& regions, std::size_t num_model_vertices);

struct MatchOptions {
  double candidate_budget = 1e7;
  std::optional<std::size_t> top_k;  // keep the k most probable candidates per class
  unsigned threads = 1;
};

// Exact minimum-cost one-to-one assignment over the Cartesian product of the
// candidate lists. Throws EmptyCandidateClassError when a list is empty and
// Error(CandidateExplosion) when the product exceeds the budget. Ties are
// resolved toward the lexicographically smallest candidate tuple.
Assignment initial_matching(const SceneGraph& scene, const ModelGraph& model,
                            const DissimilarityMatrix& k, const CandidateLists& candidates,
                            const MatchOptions& options = {});

// Test oracle: plain enumeration of every assignment satisfying the three
// one-to-one constraints, costed with a dense vector-matrix-vector product.
// Refuses instances whose candidate product exceeds 1e5.
Assignment brute_force_qap(const SceneGraph& scene, const ModelGraph& model,
                           const DissimilarityMatrix& k, const CandidateLists& candidates);

struct MergeCandidate {
  std::uint32_t target = 0;  // scene vertex l in L
  double cost = 0.0;         // total cost after merging k into l
};

struct RefineDecision {
  std::uint32_t vertex = 0;  // scene vertex k in U
  std::size_t region_size = 0;
  std::vector<MergeCandidate> candidates;
  std::optional<std::uint32_t> best;
  double best_cost = std::numeric_limits<double>::infinity();
  bool merged = false;
};

struct RefineResult {
  Assignment assignment;
  double initial_cost = 0.0;  // C^I on the unmodified graph
  double threshold = 0.0;
  std::vector<RefineDecision> decisions;
};

struct RefineOptions {
  BlendWeights weights;
  double threshold = 1.01;
  std::size_t diameter_cap = kDiameterSubsampleCap;
};

// Many-to-one-or-none refinement. Every unmatched scene vertex k, visited by
// descending region size then ascending id, is tentatively merged into each
// matched vertex l; the matched-subgraph cost is recomputed on the merged
// geometry and the cheapest l is committed iff that cost is below the
// threshold. Otherwise k goes to none. Commits update the working graph.
RefineResult refine(const Assignment& initial, const SceneGraph& scene, const ModelGraph& model,
                    const RegionSet& regions, const ProbabilityTensor& tensor,
                    const RefineOptions& options);

// Paints every region with its assigned class (model vertex + 1) and none
// regions with background.
LabelMap relabel(const LabelMap& map, const Assignment& x, const RegionSet& regions);

nlohmann::json decision_log_to_json(const RefineResult& result);

}  // namespace structmatch

#endif  // STRUCTMATCH_MATCHING_HPP_
