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

#include "structmatch/graph.hpp"

#include <cmath>
#include <fstream>

#include "structmatch/error.hpp"

namespace structmatch {

namespace {

constexpr int kModelFormatVersion = 1;
constexpr double kZeroNorm = 1e-12;

[[noreturn]] void graph_error(const std::string& msg) {
  throw Error(ErrorKind::InvalidArgument, "graph", msg);
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::string_view to_string(RelationFamily family) {
  return family == RelationFamily::Distance ? "distance" : "direction";
}

RelationFamily relation_family_from_string(std::string_view name) {
  if (name == "distance") return RelationFamily::Distance;
  if (name == "direction") return RelationFamily::Direction;
  graph_error("unknown relation family '" + std::string(name) + "'");
}

DirectionVector make_direction(std::vector<double> v) {
  DirectionVector d;
  d.norm = l2_norm(v);
  d.v = std::move(v);
  return d;
}

double mean_squared_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    graph_error("probability vectors differ in length (" + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()) + ")");
  }
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    const double d = b[n] - a[n];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

double vertex_dissimilarity(RelationFamily family, const VertexAttr& scene,
                            const VertexAttr& model, double lambda_v) {
  const double mse = mean_squared_error(scene.prob, model.prob);
  if (family == RelationFamily::Distance) return mse;
  if (!scene.diameter || !model.diameter) {
    graph_error("direction family needs region diameters on both vertices");
  }
  return lambda_v * mse + (1.0 - lambda_v) * std::abs(*model.diameter - *scene.diameter);
}

double edge_dissimilarity(const EdgeAttr& scene, const EdgeAttr& model, double lambda_e) {
  if (scene.index() != model.index()) graph_error("edge attributes of different relation families");
  if (const auto* r = std::get_if<DistancePair>(&scene)) {
    const auto& m = std::get<DistancePair>(model);
    return lambda_e * std::abs(r->d_min - m.d_min) + (1.0 - lambda_e) * std::abs(r->d_max - m.d_max);
  }
  const auto& r = std::get<DirectionVector>(scene);
  const auto& m = std::get<DirectionVector>(model);
  if (r.v.size() != m.v.size()) graph_error("direction vectors differ in dimension");
  double cos_theta = 1.0;
  if (r.norm >= kZeroNorm && m.norm >= kZeroNorm) {
    double dot = 0.0;
    for (std::size_t k = 0; k < r.v.size(); ++k) dot += r.v[k] * m.v[k];
    cos_theta = std::clamp(dot / (r.norm * m.norm), -1.0, 1.0);
  }
  return lambda_e * std::abs(cos_theta - 1.0) / 2.0 + (1.0 - lambda_e) * std::abs(r.norm - m.norm);
}

VertexAttr scene_vertex_attr(const Region& region, std::span<const double> prob,
                             RelationFamily family) {
  VertexAttr a;
  a.prob.assign(prob.begin(), prob.end());
  if (family == RelationFamily::Direction) a.diameter = region.diameter;
  return a;
}

EdgeAttr region_edge_attr(const Region& from, const Region& to, double scene_scale,
                          std::size_t rank, RelationFamily family) {
  if (family == RelationFamily::Distance) {
    const auto d = pairwise_region_distances(from, to, scene_scale);
    return DistancePair{d.d_min, d.d_max};
  }
  return make_direction(centroid_vector(from, to, scene_scale, rank));
}

SceneGraph build_scene_graph(const RegionSet& regions, const ProbabilityTensor& tensor,
                             RelationFamily family) {
  if (regions.regions.empty()) graph_error("cannot build a scene graph from an empty region set");
  if (tensor.dims() != regions.dims) graph_error("tensor and region set grids differ");
  const std::size_t n = regions.regions.size();
  SceneGraph g(family, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Region& r = regions.regions[i];
    g.vertex(i).region_id = r.id;
    g.vertex(i).attr = scene_vertex_attr(r, region_mean_probability(r, tensor), family);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Region& a = regions.regions[i];
      const Region& b = regions.regions[j];
      g.edge(i, j) = region_edge_attr(a, b, regions.scene_scale, regions.dims.rank(), family);
      if (family == RelationFamily::Distance) {
        g.edge(j, i) = g.edge(i, j);
      } else {
        g.edge(j, i) = region_edge_attr(b, a, regions.scene_scale, regions.dims.rank(), family);
      }
    }
  }
  return g;
}

ModelGraph train_model_graph(std::span<const LabelMap> annotations, RelationFamily family,
                             std::size_t num_classes) {
  if (annotations.empty()) graph_error("model training needs at least one annotation");
  if (num_classes < 1) graph_error("model training needs at least one class");
  const std::size_t rank = annotations.front().dims().rank();
  const std::size_t n = num_classes;

  std::vector<double> diameter_sum(n, 0.0);
  std::vector<double> dmin_sum(n * n, 0.0), dmax_sum(n * n, 0.0);
  std::vector<std::vector<double>> vec_sum(n * n, std::vector<double>(rank, 0.0));

  for (std::size_t a = 0; a < annotations.size(); ++a) {
    const LabelMap& map = annotations[a];
    if (map.dims().rank() != rank) graph_error("annotations mix 2D and 3D grids");
    std::vector<std::vector<std::size_t>> members(n + 1);
    for (std::size_t p = 0; p < map.size(); ++p) {
      const std::uint32_t label = map[p];
      if (label > n) {
        graph_error("annotation " + std::to_string(a) + " uses label " + std::to_string(label) +
                    " but the model declares " + std::to_string(n) + " classes");
      }
      members[label].push_back(p);
    }
    const double scale = map.dims().diagonal();
    std::vector<Region> regions;
    regions.reserve(n);
    for (std::size_t c = 1; c <= n; ++c) {
      if (members[c].empty()) {
        throw Error(ErrorKind::InvalidArgument, "graph",
                    "annotation " + std::to_string(a) + " is missing class " + std::to_string(c));
      }
      regions.push_back(make_region(static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c),
                                    std::move(members[c]), map.dims(), scale));
    }
    for (std::size_t i = 0; i < n; ++i) {
      diameter_sum[i] += regions[i].diameter;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        if (family == RelationFamily::Distance) {
          if (j < i) continue;
          const auto d = pairwise_region_distances(regions[i], regions[j], scale);
          dmin_sum[i * n + j] += d.d_min;
          dmax_sum[i * n + j] += d.d_max;
        } else {
          const auto v = centroid_vector(regions[i], regions[j], scale, rank);
          for (std::size_t k = 0; k < rank; ++k) vec_sum[i * n + j][k] += v[k];
        }
      }
    }
  }

  const double count = static_cast<double>(annotations.size());
  ModelGraph m(family, n);
  m.num_samples = annotations.size();
  for (std::size_t i = 0; i < n; ++i) {
    m.class_names.push_back("class" + std::to_string(i + 1));
    VertexAttr& v = m.vertex(i);
    v.prob.assign(n + 1, 0.0);
    v.prob[i + 1] = 1.0;
    if (family == RelationFamily::Direction) v.diameter = diameter_sum[i] / count;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (family == RelationFamily::Distance) {
        const std::size_t key = i < j ? i * n + j : j * n + i;
        m.edge(i, j) = DistancePair{dmin_sum[key] / count, dmax_sum[key] / count};
      } else {
        std::vector<double> mean(rank);
        for (std::size_t k = 0; k < rank; ++k) mean[k] = vec_sum[i * n + j][k] / count;
        m.edge(i, j) = make_direction(std::move(mean));
      }
    }
  }
  return m;
}

nlohmann::json model_to_json(const ModelGraph& model) {
  using nlohmann::json;
  json j;
  j["version"] = kModelFormatVersion;
  j["family"] = std::string(to_string(model.family()));
  j["num_classes"] = model.num_classes();
  j["class_names"] = model.class_names;
  json vertices = json::array();
  for (std::size_t i = 0; i < model.num_vertices(); ++i) {
    json v;
    v["prob"] = model.vertex(i).prob;
    if (model.vertex(i).diameter) v["diameter"] = *model.vertex(i).diameter;
    vertices.push_back(std::move(v));
  }
  j["vertex_attrs"] = std::move(vertices);
  json edges = json::object();
  for (std::size_t a = 0; a < model.num_vertices(); ++a) {
    for (std::size_t b = 0; b < model.num_vertices(); ++b) {
      if (a == b) continue;
      json e;
      if (const auto* d = std::get_if<DistancePair>(&model.edge(a, b))) {
        e["d_min"] = d->d_min;
        e["d_max"] = d->d_max;
      } else {
        const auto& dv = std::get<DirectionVector>(model.edge(a, b));
        e["v"] = dv.v;
        e["norm"] = dv.norm;
      }
      edges[std::to_string(a) + "," + std::to_string(b)] = std::move(e);
    }
  }
  j["edge_attrs"] = std::move(edges);
  j["training"] = {{"num_samples", model.num_samples}};
  return j;
}

ModelGraph model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != kModelFormatVersion) {
      graph_error("unsupported model version " + j.at("version").dump());
    }
    const auto family = relation_family_from_string(j.at("family").get<std::string>());
    const auto n = j.at("num_classes").get<std::size_t>();
    ModelGraph m(family, n);
    m.class_names = j.at("class_names").get<std::vector<std::string>>();
    if (m.class_names.size() != n) graph_error("class_names length differs from num_classes");
    const auto& vertices = j.at("vertex_attrs");
    if (vertices.size() != n) graph_error("vertex_attrs length differs from num_classes");
    for (std::size_t i = 0; i < n; ++i) {
      m.vertex(i).prob = vertices[i].at("prob").get<std::vector<double>>();
      if (m.vertex(i).prob.size() != n + 1) graph_error("vertex prob vectors must have N+1 entries");
      if (vertices[i].contains("diameter")) m.vertex(i).diameter = vertices[i]["diameter"].get<double>();
      if (family == RelationFamily::Direction && !m.vertex(i).diameter) {
        graph_error("direction model lacks vertex diameters");
      }
    }
    const auto& edges = j.at("edge_attrs");
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        const auto& e = edges.at(std::to_string(a) + "," + std::to_string(b));
        if (family == RelationFamily::Distance) {
          m.edge(a, b) = DistancePair{e.at("d_min").get<double>(), e.at("d_max").get<double>()};
        } else {
          m.edge(a, b) = make_direction(e.at("v").get<std::vector<double>>());
        }
      }
    }
    m.num_samples = j.at("training").at("num_samples").get<std::size_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, "graph", std::string("malformed model graph: ") + e.what());
  }
}

void save_model(const ModelGraph& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "graph", "cannot write " + path.string());
  out << model_to_json(model).dump(2) << "\n";
}

ModelGraph load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "graph", "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, "graph", "cannot parse " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace structmatch
