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

#include "structmatch/matching.hpp"

#include <algorithm>
#include <numeric>
#include <thread>

#include "structmatch/error.hpp"

namespace structmatch {

namespace {

constexpr double kBruteForceLimit = 1e5;
// Partial costs are accumulated in a different order than qap_cost; a branch
// is only cut when it is worse than the incumbent by more than this slack.
constexpr double kPruneSlack = 1e-9;

[[noreturn]] void matching_error(const std::string& msg) {
  throw Error(ErrorKind::InvalidArgument, "matching", msg);
}

void check_compatible(const SceneGraph& scene, const ModelGraph& model) {
  if (scene.num_vertices() == 0 || model.num_vertices() == 0) {
    matching_error("cannot match empty graphs");
  }
  if (scene.family() != model.family()) {
    matching_error("scene graph uses the " + std::string(to_string(scene.family())) +
                   " family but the model uses " + std::string(to_string(model.family())));
  }
}

void check_candidates(const DissimilarityMatrix& k, const CandidateLists& candidates) {
  if (candidates.size() != k.n_model()) {
    matching_error("expected one candidate list per model vertex");
  }
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    if (candidates[j].empty()) throw EmptyCandidateClassError(static_cast<std::uint32_t>(j + 1));
    for (const auto i : candidates[j]) {
      if (i >= k.n_scene()) matching_error("candidate index out of range");
    }
  }
}

double candidate_product(const CandidateLists& candidates) {
  double product = 1.0;
  for (const auto& c : candidates) product *= static_cast<double>(c.size());
  return product;
}

Assignment assignment_from_tuple(std::size_t n_scene, const std::vector<std::uint32_t>& tuple) {
  Assignment x;
  x.model_of.assign(n_scene, std::nullopt);
  for (std::size_t j = 0; j < tuple.size(); ++j) x.model_of[tuple[j]] = static_cast<std::uint32_t>(j);
  return x;
}

struct SearchResult {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> tuple;  // scene vertex per model vertex
  bool found = false;

  bool better_than(const SearchResult& other) const {
    if (!found) return false;
    if (!other.found) return true;
    if (cost != other.cost) return cost < other.cost;
    return tuple < other.tuple;
  }
};

// Depth-first enumeration of candidate tuples in lexicographic order.
class ProductSearch {
 public:
  ProductSearch(const DissimilarityMatrix& k, const CandidateLists& candidates)
      : k_(k), candidates_(candidates), used_(k.n_scene(), false), pairs_(candidates.size()) {}

  SearchResult run(std::span<const std::uint32_t> first_level) {
    tuple_.assign(candidates_.size(), 0);
    for (const auto i : first_level) descend(0, i, 0.0);
    return best_;
  }

 private:
  void descend(std::size_t depth, std::uint32_t scene, double partial) {
    const std::size_t p = k_.pair_index(scene, depth);
    partial += k_(p, p);
    for (std::size_t d = 0; d < depth; ++d) partial += k_(p, pairs_[d]) + k_(pairs_[d], p);
    if (best_.found && partial > best_.cost + kPruneSlack) return;

    tuple_[depth] = scene;
    pairs_[depth] = p;
    if (depth + 1 == candidates_.size()) {
      leaf();
      return;
    }
    used_[scene] = true;
    for (const auto next : candidates_[depth + 1]) {
      if (!used_[next]) descend(depth + 1, next, partial);
    }
    used_[scene] = false;
  }

  void leaf() {
    Assignment x = assignment_from_tuple(k_.n_scene(), tuple_);
    const double exact = qap_cost(x, k_);
    if (!best_.found || exact < best_.cost) {
      best_.found = true;
      best_.cost = exact;
      best_.tuple = tuple_;
    }
  }

  const DissimilarityMatrix& k_;
  const CandidateLists& candidates_;
  std::vector<bool> used_;
  std::vector<std::size_t> pairs_;
  std::vector<std::uint32_t> tuple_;
  SearchResult best_;
};

}  // namespace

DissimilarityMatrix assemble_k(const SceneGraph& scene, const ModelGraph& model,
                               const BlendWeights& w) {
  check_compatible(scene, model);
  const std::size_t nr = scene.num_vertices();
  const std::size_t nm = model.num_vertices();
  DissimilarityMatrix k(nr, nm, w.lambda);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nm; ++j) {
      const std::size_t p = k.pair_index(i, j);
      k(p, p) = w.lambda *
                vertex_dissimilarity(scene.family(), scene.vertex(i).attr, model.vertex(j), w.lambda_v);
      for (std::size_t a = 0; a < nr; ++a) {
        if (a == i) continue;
        for (std::size_t b = 0; b < nm; ++b) {
          if (b == j) continue;
          k(p, k.pair_index(a, b)) =
              (1.0 - w.lambda) * edge_dissimilarity(scene.edge(i, a), model.edge(j, b), w.lambda_e);
        }
      }
    }
  }
  return k;
}

double qap_cost(const Assignment& x, const DissimilarityMatrix& k) {
  if (x.model_of.size() != k.n_scene()) {
    matching_error("assignment covers " + std::to_string(x.model_of.size()) +
                   " scene vertices but K has " + std::to_string(k.n_scene()));
  }
  std::vector<std::size_t> pairs;
  for (std::size_t i = 0; i < x.model_of.size(); ++i) {
    if (!x.model_of[i]) continue;
    if (*x.model_of[i] >= k.n_model()) matching_error("assignment references an unknown model vertex");
    pairs.push_back(k.pair_index(i, *x.model_of[i]));
  }
  double total = 0.0;
  for (const std::size_t p : pairs) {
    double row = 0.0;
    for (const std::size_t q : pairs) row += k(p, q);
    total += row;
  }
  return total;
}

CandidateLists candidates_from_regions(const RegionSet& regions, std::size_t num_model_vertices) {
  CandidateLists c(num_model_vertices);
  for (std::size_t j = 0; j < num_model_vertices; ++j) {
    if (j + 1 < regions.by_class.size()) c[j] = regions.by_class[j + 1];
  }
  return c;
}

Assignment initial_matching(const SceneGraph& scene, const ModelGraph& model,
                            const DissimilarityMatrix& k, const CandidateLists& input,
                            const MatchOptions& options) {
  check_compatible(scene, model);
  if (k.n_scene() != scene.num_vertices() || k.n_model() != model.num_vertices()) {
    matching_error("K does not match the graphs");
  }
  check_candidates(k, input);

  CandidateLists candidates = input;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    auto& c = candidates[j];
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    if (options.top_k && c.size() > *options.top_k) {
      const std::size_t channel = j + 1;
      std::stable_sort(c.begin(), c.end(), [&](std::uint32_t a, std::uint32_t b) {
        return scene.vertex(a).attr.prob[channel] > scene.vertex(b).attr.prob[channel];
      });
      c.resize(*options.top_k);
      std::sort(c.begin(), c.end());
    }
  }

  const double product = candidate_product(candidates);
  if (product > options.candidate_budget) {
    throw Error(ErrorKind::CandidateExplosion, "matching",
                "candidate product " + std::to_string(product) + " exceeds the budget " +
                    std::to_string(options.candidate_budget) +
                    "; raise the budget or prune candidates with top-k");
  }

  const auto& first = candidates.front();
  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(first.size())));
  SearchResult best;
  if (threads == 1) {
    best = ProductSearch(k, candidates).run(first);
  } else {
    // Contiguous slices of the first level keep each worker lexicographic;
    // the reduction compares (cost, tuple).
    std::vector<SearchResult> partial(threads);
    {
      std::vector<std::jthread> workers;
      const std::size_t chunk = (first.size() + threads - 1) / threads;
      for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = std::min(first.size(), t * chunk);
        const std::size_t hi = std::min(first.size(), lo + chunk);
        workers.emplace_back([&, t, lo, hi] {
          partial[t] = ProductSearch(k, candidates)
                           .run(std::span<const std::uint32_t>(first.data() + lo, hi - lo));
        });
      }
    }
    for (const auto& r : partial) {
      if (r.better_than(best)) best = r;
    }
  }
  if (!best.found) {
    throw Error(ErrorKind::InvalidArgument, "matching",
                "no one-to-one assignment exists: candidate lists force a scene vertex reuse");
  }
  Assignment x = assignment_from_tuple(k.n_scene(), best.tuple);
  x.stage = AssignmentStage::Initial;
  x.cost = best.cost;
  return x;
}

Assignment brute_force_qap(const SceneGraph& scene, const ModelGraph& model,
                           const DissimilarityMatrix& k, const CandidateLists& candidates) {
  check_compatible(scene, model);
  check_candidates(k, candidates);
  if (candidate_product(candidates) > kBruteForceLimit) {
    throw Error(ErrorKind::InstanceTooLarge, "matching", "brute force limited to 1e5 candidate tuples");
  }
  const std::size_t nr = k.n_scene();
  const std::size_t nm = k.n_model();
  const std::size_t side = k.side();

  std::vector<std::size_t> odometer(nm, 0);
  bool have_best = false;
  double best_cost = 0.0;
  std::vector<double> best_x;
  std::vector<double> x(side);
  while (true) {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t j = 0; j < nm; ++j) x[candidates[j][odometer[j]] * nm + j] = 1.0;

    bool valid = true;
    for (std::size_t i = 0; i < nr && valid; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < nm; ++j) row += x[i * nm + j];
      valid = row <= 1.0;
    }
    for (std::size_t j = 0; j < nm && valid; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < nr; ++i) {
        if (x[i * nm + j] == 0.0) continue;
        col += 1.0;
        const auto& c = candidates[j];
        valid = valid && std::find(c.begin(), c.end(), i) != c.end();
      }
      valid = valid && col == 1.0;
    }
    if (valid) {
      double total = 0.0;
      for (std::size_t p = 0; p < side; ++p) {
        double row = 0.0;
        for (std::size_t q = 0; q < side; ++q) row += k(p, q) * x[q];
        total += x[p] * row;
      }
      if (!have_best || total < best_cost) {
        have_best = true;
        best_cost = total;
        best_x = x;
      }
    }

    std::size_t j = nm;
    while (j > 0) {
      --j;
      if (++odometer[j] < candidates[j].size()) break;
      odometer[j] = 0;
      if (j == 0) {
        j = nm + 1;
        break;
      }
    }
    if (j == nm + 1) break;
  }
  if (!have_best) matching_error("no one-to-one assignment exists");

  Assignment out;
  out.model_of.assign(nr, std::nullopt);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nm; ++j) {
      if (best_x[i * nm + j] == 1.0) out.model_of[i] = static_cast<std::uint32_t>(j);
    }
  }
  out.cost = best_cost;
  return out;
}

namespace {

// Matched subgraph of the scene, mutated as refinement commits merges.
class WorkingGraph {
 public:
  WorkingGraph(const Assignment& x, const SceneGraph& scene, const ModelGraph& model,
               const RegionSet& regions, const RefineOptions& options)
      : model_(model), regions_(regions), options_(options), family_(scene.family()) {
    for (std::size_t i = 0; i < x.model_of.size(); ++i) {
      if (!x.model_of[i]) continue;
      Slot s;
      s.vertex = static_cast<std::uint32_t>(i);
      s.model = *x.model_of[i];
      s.region = regions.regions.at(scene.vertex(i).region_id);
      s.attr = scene.vertex(i).attr;
      slots_.push_back(std::move(s));
    }
    const std::size_t m = slots_.size();
    terms_.assign(m * m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
      terms_[a * m + a] = vertex_term(slots_[a].attr, slots_[a].model);
      for (std::size_t b = 0; b < m; ++b) {
        if (a == b) continue;
        terms_[a * m + b] = edge_term(scene.edge(slots_[a].vertex, slots_[b].vertex),
                                      slots_[a].model, slots_[b].model);
      }
    }
  }

  std::size_t size() const { return slots_.size(); }
  std::uint32_t vertex(std::size_t a) const { return slots_[a].vertex; }
  std::uint32_t model(std::size_t a) const { return slots_[a].model; }

  double cost() const { return total(terms_); }

  // Tentative merge of `region` (scene vertex attr `attr`) into slot a.
  struct Proposal {
    Region region;
    VertexAttr attr;
    std::vector<double> terms;
  };

  Proposal propose(std::size_t a, const Region& region, const VertexAttr& attr) const {
    const Slot& s = slots_[a];
    Proposal p;
    p.region = merge_regions(s.region, region, regions_.dims, regions_.scene_scale,
                             options_.diameter_cap);
    const double ws = static_cast<double>(s.region.size());
    const double wk = static_cast<double>(region.size());
    p.attr.prob.resize(s.attr.prob.size());
    for (std::size_t n = 0; n < p.attr.prob.size(); ++n) {
      p.attr.prob[n] = (ws * s.attr.prob[n] + wk * attr.prob[n]) / (ws + wk);
    }
    if (family_ == RelationFamily::Direction) p.attr.diameter = p.region.diameter;

    const std::size_t m = slots_.size();
    p.terms = terms_;
    p.terms[a * m + a] = vertex_term(p.attr, s.model);
    const std::size_t rank = regions_.dims.rank();
    for (std::size_t b = 0; b < m; ++b) {
      if (b == a) continue;
      const EdgeAttr out = region_edge_attr(p.region, slots_[b].region, regions_.scene_scale, rank, family_);
      const EdgeAttr in = region_edge_attr(slots_[b].region, p.region, regions_.scene_scale, rank, family_);
      p.terms[a * m + b] = edge_term(out, s.model, slots_[b].model);
      p.terms[b * m + a] = edge_term(in, slots_[b].model, s.model);
    }
    return p;
  }

  double cost_of(const Proposal& p) const { return total(p.terms); }

  void commit(std::size_t a, Proposal p) {
    slots_[a].region = std::move(p.region);
    slots_[a].attr = std::move(p.attr);
    terms_ = std::move(p.terms);
  }

 private:
  struct Slot {
    std::uint32_t vertex = 0;
    std::uint32_t model = 0;
    Region region;
    VertexAttr attr;
  };

  double vertex_term(const VertexAttr& attr, std::uint32_t j) const {
    return options_.weights.lambda *
           vertex_dissimilarity(family_, attr, model_.vertex(j), options_.weights.lambda_v);
  }
  double edge_term(const EdgeAttr& e, std::uint32_t j, std::uint32_t l) const {
    return (1.0 - options_.weights.lambda) *
           edge_dissimilarity(e, model_.edge(j, l), options_.weights.lambda_e);
  }

  // Same summation order as qap_cost: slots ascend by scene vertex, and a
  // scene vertex has at most one pair.
  double total(const std::vector<double>& terms) const {
    const std::size_t m = slots_.size();
    double sum = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < m; ++b) row += terms[a * m + b];
      sum += row;
    }
    return sum;
  }

  const ModelGraph& model_;
  const RegionSet& regions_;
  const RefineOptions& options_;
  RelationFamily family_;
  std::vector<Slot> slots_;
  std::vector<double> terms_;
};

}  // namespace

RefineResult refine(const Assignment& initial, const SceneGraph& scene, const ModelGraph& model,
                    const RegionSet& regions, const ProbabilityTensor& tensor,
                    const RefineOptions& options) {
  check_compatible(scene, model);
  if (initial.model_of.size() != scene.num_vertices()) {
    matching_error("assignment size differs from the scene graph");
  }
  if (tensor.dims() != regions.dims) matching_error("tensor and region set grids differ");

  RefineResult result;
  result.threshold = options.threshold;
  result.assignment = initial;
  if (initial.stage == AssignmentStage::Refined) {
    result.initial_cost = initial.cost;
    return result;
  }

  WorkingGraph work(initial, scene, model, regions, options);
  result.initial_cost = work.cost();

  std::vector<std::uint32_t> unlabeled;
  for (std::size_t i = 0; i < initial.model_of.size(); ++i) {
    if (!initial.model_of[i]) unlabeled.push_back(static_cast<std::uint32_t>(i));
  }
  auto region_of = [&](std::uint32_t v) -> const Region& {
    return regions.regions.at(scene.vertex(v).region_id);
  };
  std::stable_sort(unlabeled.begin(), unlabeled.end(), [&](std::uint32_t a, std::uint32_t b) {
    const std::size_t sa = region_of(a).size();
    const std::size_t sb = region_of(b).size();
    if (sa != sb) return sa > sb;
    return region_of(a).id < region_of(b).id;
  });

  for (const std::uint32_t k : unlabeled) {
    RefineDecision d;
    d.vertex = k;
    d.region_size = region_of(k).size();
    std::optional<WorkingGraph::Proposal> best;
    std::size_t best_slot = 0;
    for (std::size_t a = 0; a < work.size(); ++a) {
      auto proposal = work.propose(a, region_of(k), scene.vertex(k).attr);
      const double c = work.cost_of(proposal);
      d.candidates.push_back({work.vertex(a), c});
      if (c < d.best_cost) {
        d.best_cost = c;
        d.best = work.vertex(a);
        best_slot = a;
        best = std::move(proposal);
      }
    }
    if (best && d.best_cost < options.threshold) {
      d.merged = true;
      result.assignment.model_of[k] = work.model(best_slot);
      work.commit(best_slot, std::move(*best));
    } else {
      result.assignment.model_of[k] = std::nullopt;
    }
    result.decisions.push_back(std::move(d));
  }

  result.assignment.stage = AssignmentStage::Refined;
  result.assignment.cost = work.cost();
  return result;
}

LabelMap relabel(const LabelMap& map, const Assignment& x, const RegionSet& regions) {
  if (map.dims() != regions.dims) {
    throw Error(ErrorKind::InvalidArgument, "matching", "label map and region set grids differ");
  }
  if (x.model_of.size() != regions.regions.size()) {
    throw Error(ErrorKind::InvalidArgument, "matching",
                "assignment covers " + std::to_string(x.model_of.size()) + " vertices but there are " +
                    std::to_string(regions.regions.size()) + " regions");
  }
  LabelMap out(map.dims());
  for (std::size_t i = 0; i < regions.regions.size(); ++i) {
    const Region& r = regions.regions[i];
    const std::uint32_t label = x.model_of[i] ? *x.model_of[i] + 1 : 0;
    for (const std::size_t e : r.elements) {
      if (map[e] != r.class_hint) {
        throw Error(ErrorKind::InvalidArgument, "matching",
                    "region " + std::to_string(r.id) + " does not agree with the label map");
      }
      out[e] = label;
    }
  }
  return out;
}

nlohmann::json decision_log_to_json(const RefineResult& result) {
  using nlohmann::json;
  json decisions = json::array();
  for (const auto& d : result.decisions) {
    json candidates = json::array();
    for (const auto& c : d.candidates) candidates.push_back({{"target", c.target}, {"cost", c.cost}});
    json entry;
    entry["vertex"] = d.vertex;
    entry["region_size"] = d.region_size;
    entry["candidates"] = std::move(candidates);
    entry["best"] = d.best ? json(*d.best) : json(nullptr);
    entry["best_cost"] = d.best ? json(d.best_cost) : json(nullptr);
    entry["action"] = d.merged ? "merge" : "discard";
    decisions.push_back(std::move(entry));
  }
  json j;
  j["threshold"] = result.threshold;
  j["initial_cost"] = result.initial_cost;
  j["final_cost"] = result.assignment.cost;
  j["decisions"] = std::move(decisions);
  return j;
}

}  // namespace structmatch
