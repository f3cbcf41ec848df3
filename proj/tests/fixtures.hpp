// Random and hand-built matching instances shared by the unit and acceptance
// tests.

#ifndef STRUCTMATCH_TESTS_FIXTURES_HPP_
#define STRUCTMATCH_TESTS_FIXTURES_HPP_

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "structmatch/graph.hpp"
#include "structmatch/matching.hpp"

namespace fixtures {

using namespace structmatch;

struct Instance {
  SceneGraph scene;
  ModelGraph model;
};

inline EdgeAttr random_edge(std::mt19937_64& rng, RelationFamily family) {
  if (family == RelationFamily::Distance) {
    double a = oracle::uniform(rng), b = oracle::uniform(rng);
    if (a > b) std::swap(a, b);
    return DistancePair{a, b};
  }
  return make_direction({0.7 * (oracle::uniform(rng) - 0.5), 0.7 * (oracle::uniform(rng) - 0.5)});
}

inline Instance random_instance(std::mt19937_64& rng, std::size_t nr, std::size_t nm, RelationFamily family) {
  Instance in{SceneGraph(family, nr), ModelGraph(family, nm)};
  for (std::size_t i = 0; i < nr; ++i) {
    in.scene.vertex(i).region_id = static_cast<std::uint32_t>(i);
    in.scene.vertex(i).attr.prob = oracle::simplex(rng, nm + 1);
    if (family == RelationFamily::Direction) in.scene.vertex(i).attr.diameter = oracle::uniform(rng);
    for (std::size_t k = 0; k < nr; ++k) {
      if (k != i) in.scene.edge(i, k) = random_edge(rng, family);
    }
  }
  for (std::size_t j = 0; j < nm; ++j) {
    in.model.vertex(j).prob.assign(nm + 1, 0.0);
    in.model.vertex(j).prob[j + 1] = 1.0;
    if (family == RelationFamily::Direction) in.model.vertex(j).diameter = oracle::uniform(rng);
    for (std::size_t l = 0; l < nm; ++l) {
      if (l != j) in.model.edge(j, l) = random_edge(rng, family);
    }
  }
  return in;
}

inline CandidateLists random_candidates(std::mt19937_64& rng, std::size_t nr, std::size_t nm, std::size_t max_bucket) {
  CandidateLists c(nm);
  for (auto& bucket : c) {
    const std::size_t size = 1 + oracle::pick(rng, max_bucket);
    while (bucket.size() < size) {
      const auto v = static_cast<std::uint32_t>(oracle::pick(rng, nr));
      if (std::find(bucket.begin(), bucket.end(), v) == bucket.end()) bucket.push_back(v);
    }
    std::sort(bucket.begin(), bucket.end());
  }
  return c;
}

// Three scene vertices (1, 2, 3) and two model vertices (a, b). Channels are
// ordered (background, a, b).
inline Instance worked_example() {
  Instance in{SceneGraph(RelationFamily::Distance, 3), ModelGraph(RelationFamily::Distance, 2)};
  in.scene.vertex(0).attr.prob = {0.1, 0.1, 0.8};
  in.scene.vertex(1).attr.prob = {0.2, 0.6, 0.2};
  in.scene.vertex(2).attr.prob = {0.2, 0.1, 0.7};
  for (std::size_t i = 0; i < 3; ++i) in.scene.vertex(i).region_id = static_cast<std::uint32_t>(i);
  const double d[3][3] = {{0, 0.3, 0.5}, {0.3, 0, 0.8}, {0.5, 0.8, 0}};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k)
      if (i != k) in.scene.edge(i, k) = DistancePair{d[i][k], d[i][k]};
  in.model.vertex(0).prob = {0.0, 1.0, 0.0};
  in.model.vertex(1).prob = {0.0, 0.0, 1.0};
  in.model.edge(0, 1) = DistancePair{0.6, 0.6};
  in.model.edge(1, 0) = DistancePair{0.6, 0.6};
  return in;
}

}  // namespace fixtures

#endif  // STRUCTMATCH_TESTS_FIXTURES_HPP_
