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

#ifndef STRUCTMATCH_GRAPH_HPP_
#define STRUCTMATCH_GRAPH_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "structmatch/regions.hpp"
#include "structmatch/tensor_io.hpp"

namespace structmatch {

// Which spatial relation the graphs carry on their edges.
//   Distance:  normalized min/max inter-region distances, probability-only
//              vertices.
//   Direction: normalized centroid displacement vectors, vertices also carry
//              the region diameter.
enum class RelationFamily { Distance, Direction };

std::string_view to_string(RelationFamily family);
RelationFamily relation_family_from_string(std::string_view name);

struct VertexAttr {
  std::vector<double> prob;
  std::optional<double> diameter;  // present iff family == Direction
};

struct DistancePair {
  double d_min = 0.0;
  double d_max = 0.0;
};

struct DirectionVector {
  std::vector<double> v;
  double norm = 0.0;
};

using EdgeAttr = std::variant<DistancePair, DirectionVector>;

DirectionVector make_direction(std::vector<double> v);

// Complete directed graph stored densely; the diagonal is unused.
template <typename VertexT>
class CompleteGraph {
 public:
  RelationFamily family() const { return family_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return vertices_.size() * (vertices_.size() - (vertices_.empty() ? 0 : 1)); }

  const VertexT& vertex(std::size_t i) const { return vertices_[i]; }
  VertexT& vertex(std::size_t i) { return vertices_[i]; }
  const EdgeAttr& edge(std::size_t i, std::size_t j) const { return edges_[i * vertices_.size() + j]; }
  EdgeAttr& edge(std::size_t i, std::size_t j) { return edges_[i * vertices_.size() + j]; }

 protected:
  void reset(RelationFamily family, std::size_t n) {
    family_ = family;
    vertices_.assign(n, VertexT{});
    edges_.assign(n * n, EdgeAttr{});
  }

  RelationFamily family_ = RelationFamily::Distance;
  std::vector<VertexT> vertices_;
  std::vector<EdgeAttr> edges_;
};

struct SceneVertex {
  std::uint32_t region_id = 0;
  VertexAttr attr;
};

class SceneGraph : public CompleteGraph<SceneVertex> {
 public:
  SceneGraph() = default;
  SceneGraph(RelationFamily family, std::size_t n) { reset(family, n); }
};

// One vertex per non-background class; vertex k stands for label k + 1.
class ModelGraph : public CompleteGraph<VertexAttr> {
 public:
  ModelGraph() = default;
  ModelGraph(RelationFamily family, std::size_t num_classes) { reset(family, num_classes); }

  std::size_t num_classes() const { return num_vertices(); }
  // Length of the probability vectors: classes plus the background channel.
  std::size_t num_channels() const { return num_vertices() + 1; }

  std::vector<std::string> class_names;
  std::size_t num_samples = 0;
};

// Scene attributes for one region: mean class probability plus the
// diameter when the family needs it.
VertexAttr scene_vertex_attr(const Region& region, std::span<const double> prob,
                             RelationFamily family);
EdgeAttr region_edge_attr(const Region& from, const Region& to, double scene_scale,
                          std::size_t rank, RelationFamily family);

SceneGraph build_scene_graph(const RegionSet& regions, const ProbabilityTensor& tensor,
                             RelationFamily family);

// Trains the model graph from annotation maps whose labels are 0
// (background) and 1..num_classes. All components of a class are merged
// into one region before relations are measured.
ModelGraph train_model_graph(std::span<const LabelMap> annotations, RelationFamily family,
                             std::size_t num_classes);

double vertex_dissimilarity(RelationFamily family, const VertexAttr& scene,
                            const VertexAttr& model, double lambda_v);
double edge_dissimilarity(const EdgeAttr& scene, const EdgeAttr& model, double lambda_e);

// Mean squared difference of two equal-length vectors.
double mean_squared_error(std::span<const double> a, std::span<const double> b);

nlohmann::json model_to_json(const ModelGraph& model);
ModelGraph model_from_json(const nlohmann::json& j);
void save_model(const ModelGraph& model, const std::filesystem::path& path);
ModelGraph load_model(const std::filesystem::path& path);

}  // namespace structmatch

#endif  // STRUCTMATCH_GRAPH_HPP_
