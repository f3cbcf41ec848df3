#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "structmatch/error.hpp"
#include "structmatch/graph.hpp"
#include "structmatch/synth.hpp"

using namespace structmatch;

namespace {

// Boxes of classes 1..n laid out left to right on one row band.
LabelMap strip_layout(std::size_t n, int shift = 0) {
  LabelMap m(GridDims(12, static_cast<std::size_t>(6 * n + 4)));
  for (std::size_t c = 1; c <= n; ++c) {
    for (int r = 2 + shift; r < 6 + shift + static_cast<int>(c % 3); ++r) {
      for (int col = 0; col < 4; ++col) {
        m[m.dims().index({r, static_cast<int>(6 * (c - 1)) + col + 1, 0})] = static_cast<std::uint32_t>(c);
      }
    }
  }
  return m;
}

double mse_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

}  // namespace

TEST_CASE("worked-example vertex and edge terms") {
  const std::vector<double> s{0.6, 0.2, 0.2}, m{1.0, 0.0, 0.0};
  CHECK(std::abs(mean_squared_error(s, m) - 0.08) <= 1e-12);
  CHECK(mean_squared_error(s, s) == 0.0);
  // Single-distance reading: only d_min carries information.
  CHECK(std::abs(edge_dissimilarity(DistancePair{0.8, 0.0}, DistancePair{0.6, 0.0}, 1.0) - 0.2) <= 1e-12);
  const EdgeAttr e = DistancePair{0.3, 0.7};
  CHECK(edge_dissimilarity(e, e, 0.5) == 0.0);
  CHECK_THROWS_AS(mean_squared_error(s, std::vector<double>{1.0, 0.0}), Error);
  CHECK_THROWS_AS(edge_dissimilarity(e, make_direction({0.1, 0.0}), 0.5), Error);
}

TEST_CASE("direction family terms") {
  const auto a = make_direction({0.3, 0.0});
  const auto b = make_direction({-0.3, 0.0});
  CHECK(a.norm == doctest::Approx(0.3));
  CHECK(edge_dissimilarity(a, b, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(edge_dissimilarity(a, a, 0.5) == 0.0);
  // Zero vectors carry no angular evidence; only the length term remains.
  const auto z = make_direction({0.0, 0.0});
  CHECK(edge_dissimilarity(z, b, 0.5) == doctest::Approx(0.5 * 0.3));

  VertexAttr s{{0.6, 0.2, 0.2}, 0.4};
  VertexAttr m{{1.0, 0.0, 0.0}, 0.1};
  CHECK(vertex_dissimilarity(RelationFamily::Direction, s, m, 0.5) ==
        doctest::Approx(0.5 * 0.08 + 0.5 * 0.3).epsilon(1e-15));
  CHECK(vertex_dissimilarity(RelationFamily::Distance, s, m, 0.5) == doctest::Approx(0.08));
  VertexAttr bare{{1.0, 0.0, 0.0}, std::nullopt};
  CHECK_THROWS_AS(vertex_dissimilarity(RelationFamily::Direction, s, bare, 0.5), Error);
}

TEST_CASE("random attributes match formula oracles and stay in [0,1]") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20000; ++trial) {
    const std::size_t n = 2 + oracle::pick(rng, 10);
    const auto p = oracle::simplex(rng, n), q = oracle::simplex(rng, n);
    const double dp = oracle::uniform(rng), dq = oracle::uniform(rng);
    const double lv = oracle::uniform(rng), le = oracle::uniform(rng);
    const double v = vertex_dissimilarity(RelationFamily::Direction, {p, dp}, {q, dq}, lv);
    REQUIRE(std::abs(v - (lv * mse_oracle(p, q) + (1 - lv) * std::abs(dp - dq))) < 1e-12);
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
    REQUIRE(vertex_dissimilarity(RelationFamily::Distance, {p, {}}, {q, {}}, lv) ==
            vertex_dissimilarity(RelationFamily::Distance, {q, {}}, {p, {}}, lv));

    // Direction vectors whose length stays within the unit ball.
    const std::size_t rank = 2 + oracle::pick(rng, 2);
    std::vector<double> a(rank), b(rank);
    for (auto& x : a) x = (oracle::uniform(rng) - 0.5);
    for (auto& x : b) x = (oracle::uniform(rng) - 0.5);
    const auto da = make_direction(a), db = make_direction(b);
    double dot = 0.0;
    for (std::size_t k = 0; k < rank; ++k) dot += a[k] * b[k];
    const double cos_oracle = dot / (da.norm * db.norm);
    const double e = edge_dissimilarity(da, db, le);
    REQUIRE(std::abs(e - (le * std::abs(cos_oracle - 1) / 2 + (1 - le) * std::abs(da.norm - db.norm))) <
            1e-12);
    REQUIRE(e == doctest::Approx(edge_dissimilarity(db, da, le)).epsilon(1e-15));
  }
}

TEST_CASE("scene graph of a four-region scene") {
  // 1 1 0 2
  // 0 0 0 2
  // 1 0 3 3
  const LabelMap m(GridDims(3, 4), {1, 1, 0, 2, 0, 0, 0, 2, 1, 0, 3, 3});
  std::mt19937_64 rng(32);
  const auto t = oracle::random_tensor(rng, m.dims(), 4);
  const auto rs = extract_regions(m, 4);
  for (const auto family : {RelationFamily::Distance, RelationFamily::Direction}) {
    const auto g = build_scene_graph(rs, t, family);
    CHECK(g.num_vertices() == 4);
    CHECK(g.num_edges() == 12);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(g.vertex(i).attr.prob == region_mean_probability(rs.regions[i], t));
      CHECK(g.vertex(i).attr.diameter.has_value() == (family == RelationFamily::Direction));
      for (std::size_t j = 0; j < 4; ++j) {
        if (i == j) continue;
        if (family == RelationFamily::Distance) {
          const auto& d = std::get<DistancePair>(g.edge(i, j));
          const auto o = oracle::all_pairs(rs.regions[i].points, rs.regions[j].points);
          CHECK(d.d_min == doctest::Approx(o.lo / rs.scene_scale).epsilon(1e-12));
          CHECK(d.d_max == doctest::Approx(o.hi / rs.scene_scale).epsilon(1e-12));
        } else {
          const auto& v = std::get<DirectionVector>(g.edge(i, j));
          const auto& w = std::get<DirectionVector>(g.edge(j, i));
          CHECK(v.v[0] == -w.v[0]);
          CHECK(v.v[1] == -w.v[1]);
        }
      }
    }
  }
  const LabelMap single(GridDims(2, 2), {0, 1, 1, 1});
  const auto g1 = build_scene_graph(extract_regions(single, 2),
                                    oracle::random_tensor(rng, single.dims(), 2), RelationFamily::Distance);
  CHECK(g1.num_vertices() == 1);
  CHECK(g1.num_edges() == 0);
}

TEST_CASE("training on one annotation reproduces its relations") {
  const auto ann = strip_layout(4);
  std::vector<LabelMap> one{ann};
  const auto model = train_model_graph(one, RelationFamily::Distance, 4);
  CHECK(model.num_classes() == 4);
  CHECK(model.num_channels() == 5);
  CHECK(model.num_samples == 1);
  const auto rs = extract_regions(ann, 5);
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<double> onehot(5, 0.0);
    onehot[i + 1] = 1.0;
    CHECK(model.vertex(i).prob == onehot);
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      const auto& d = std::get<DistancePair>(model.edge(i, j));
      const auto o = oracle::all_pairs(rs.regions[i].points, rs.regions[j].points);
      CHECK(d.d_min == doctest::Approx(o.lo / ann.dims().diagonal()).epsilon(1e-12));
      CHECK(d.d_max == doctest::Approx(o.hi / ann.dims().diagonal()).epsilon(1e-12));
    }
  }
}

TEST_CASE("k identical annotations train the same model as one") {
  for (const auto family : {RelationFamily::Distance, RelationFamily::Direction}) {
    std::vector<LabelMap> one{strip_layout(5)};
    std::vector<LabelMap> many(4, strip_layout(5));
    const auto a = train_model_graph(one, family, 5);
    const auto b = train_model_graph(many, family, 5);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(a.vertex(i).prob == b.vertex(i).prob);
      if (family == RelationFamily::Direction) {
        CHECK(*a.vertex(i).diameter == doctest::Approx(*b.vertex(i).diameter).epsilon(1e-14));
      }
      for (std::size_t j = 0; j < 5; ++j) {
        if (i == j) continue;
        CHECK(edge_dissimilarity(a.edge(i, j), b.edge(i, j), 0.5) < 1e-14);
      }
    }
  }
}

TEST_CASE("opposite directions average to a zero vector") {
  // Class 2 sits to the right of class 1 in the first map and to the left in
  // the second, the same distance away.
  LabelMap left(GridDims(1, 5)), right(GridDims(1, 5));
  left[1] = 1;
  left[3] = 2;
  right[3] = 1;
  right[1] = 2;
  std::vector<LabelMap> ann{left, right};
  const auto model = train_model_graph(ann, RelationFamily::Direction, 2);
  const auto& v = std::get<DirectionVector>(model.edge(0, 1));
  CHECK(v.v == std::vector<double>{0.0, 0.0});
  CHECK(v.norm == 0.0);
}

TEST_CASE("model sizes for eight and fourteen classes") {
  auto eight = train_model_graph(std::vector<LabelMap>(3, strip_layout(8)), RelationFamily::Distance, 8);
  CHECK(eight.num_vertices() == 8);
  CHECK(eight.num_edges() == 56);
  auto fourteen = train_model_graph(std::vector<LabelMap>{strip_layout(14)}, RelationFamily::Direction, 14);
  CHECK(fourteen.num_vertices() == 14);
  CHECK(fourteen.num_edges() == 182);
  const auto j = model_to_json(fourteen);
  CHECK(j["vertex_attrs"].size() == 14);
  CHECK(j["edge_attrs"].size() == 182);
}

TEST_CASE("missing classes and bad labels are named") {
  LabelMap m = strip_layout(3);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 2) m[i] = 0;
  }
  std::vector<LabelMap> ann{strip_layout(3), m};
  try {
    train_model_graph(ann, RelationFamily::Distance, 3);
    FAIL("missing class accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("annotation 1 is missing class 2") != std::string::npos);
  }
}

TEST_CASE("model JSON round trip") {
  for (const auto family : {RelationFamily::Distance, RelationFamily::Direction}) {
    auto model = train_model_graph(std::vector<LabelMap>{strip_layout(4), strip_layout(4, 1)}, family, 4);
    const auto j = model_to_json(model);
    CHECK(j["version"] == 1);
    CHECK(j["num_classes"] == 4);
    CHECK(j["training"]["num_samples"] == 2);
    CHECK(j["edge_attrs"].size() == 12);
    const auto back = model_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.family() == family);
    CHECK(back.class_names == model.class_names);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(back.vertex(i).prob == model.vertex(i).prob);
      CHECK(back.vertex(i).diameter == model.vertex(i).diameter);
      for (std::size_t k = 0; k < 4; ++k) {
        if (i != k) CHECK(edge_dissimilarity(back.edge(i, k), model.edge(i, k), 0.5) == 0.0);
      }
    }
    CHECK(model_to_json(back) == j);
  }
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"version": 2})")), Error);
}
