#include "doctest.h"
#include "structmatch/error.hpp"
#include "structmatch/profile.hpp"
#include "structmatch/regions.hpp"
#include "structmatch/synth.hpp"

using namespace structmatch;

namespace {

SyntheticSceneSpec three_blobs() {
  SyntheticSceneSpec s;
  s.dims = GridDims(32, 32);
  s.num_classes = 3;
  s.seed = 7;
  s.blobs = {{1, {{2, 2, 0}, {6, 8, 1}}}, {2, {{12, 4, 0}, {5, 5, 1}}}, {3, {{20, 20, 0}, {8, 4, 1}}}};
  return s;
}

}  // namespace

TEST_CASE("clean scene: argmax equals the ground truth") {
  const auto scene = generate_scene(three_blobs());
  CHECK(argmax_labels(scene.tensor) == scene.ground_truth);
  CHECK(scene.tensor.at(scene.tensor.dims().index({3, 3, 0}), 1) == 0.8f);
  CHECK(scene.tensor.at(scene.tensor.dims().index({3, 3, 0}), 0) == static_cast<float>((1.0 - 0.8) / 3.0));
  CHECK(scene.tensor.at(0, 0) == 0.8f);
}

TEST_CASE("same seed gives byte-identical output") {
  auto spec = three_blobs();
  spec.artifacts = {{2, 2, std::nullopt}, {1, 3, std::nullopt}};
  const auto a = generate_scene(spec), b = generate_scene(spec);
  CHECK(encode_tensor(a.tensor) == encode_tensor(b.tensor));
  CHECK(encode_label_map(a.ground_truth) == encode_label_map(b.ground_truth));
  spec.seed = 8;
  CHECK(encode_tensor(generate_scene(spec).tensor) != encode_tensor(a.tensor));
  CHECK(encode_tensor(generate_scene(mirrored_layout(3)).tensor) ==
        encode_tensor(generate_scene(mirrored_layout(3)).tensor));
}

TEST_CASE("swap exchanges the two classes in the argmax") {
  auto spec = three_blobs();
  spec.swaps = {{1, 2}};
  const auto scene = generate_scene(spec);
  const auto am = argmax_labels(scene.tensor);
  for (std::size_t i = 0; i < am.size(); ++i) {
    const auto g = scene.ground_truth[i];
    const auto want = g == 1 ? 2u : g == 2 ? 1u : g;
    REQUIRE(am[i] == want);
  }
}

TEST_CASE("split yields two components and an artifact adds one region") {
  auto spec = three_blobs();
  spec.splits = {1};
  spec.artifacts = {{3, 2, Point{28, 2, 0}}};
  const auto scene = generate_scene(spec);
  const auto rs = extract_regions(argmax_labels(scene.tensor), 4);
  CHECK(rs.by_class[1].size() == 2);
  CHECK(rs.by_class[3].size() == 2);
  CHECK(scene.artifact_boxes.size() == 1);
  // Ground truth keeps the clean layout.
  CHECK(scene.ground_truth == generate_scene(three_blobs()).ground_truth);
}

TEST_CASE("invalid scenes are rejected") {
  auto overlap = three_blobs();
  overlap.blobs.push_back({2, {{3, 3, 0}, {2, 2, 1}}});
  CHECK_THROWS_AS(generate_scene(overlap), Error);
  auto outside = three_blobs();
  outside.blobs.push_back({2, {{30, 30, 0}, {5, 5, 1}}});
  CHECK_THROWS_AS(generate_scene(outside), Error);
  auto bad_split = three_blobs();
  bad_split.splits = {3};
  bad_split.split_gap = 7;
  CHECK_THROWS_AS(generate_scene(bad_split), Error);
}

TEST_CASE("scene description text") {
  const auto spec = scene_spec_from_key_values(parse_key_values(R"(
# two blobs and one of each corruption
dims = 32, 32
classes = 2
seed = 5
blob = 1, 2, 2, 6, 8
blob = 2, 12, 4, 5, 5
split = 1
swap = 1, 2
artifact = 2, 2, 28, 28
)"));
  CHECK(spec.dims == GridDims(32, 32));
  CHECK(spec.num_classes == 2);
  CHECK(spec.seed == 5);
  CHECK(spec.blobs.size() == 2);
  CHECK(spec.splits == std::vector<std::uint32_t>{1});
  CHECK(spec.swaps.size() == 1);
  CHECK(spec.artifacts[0].location == Point{28, 28, 0});
  const auto mirrored = scene_spec_from_key_values(parse_key_values("dims = 160,160\nseed = 4\nlayout = mirrored\n"));
  CHECK(mirrored.blobs.size() == 6);
  CHECK(encode_tensor(generate_scene(mirrored).tensor) == encode_tensor(generate_scene(mirrored_layout(4, 160)).tensor));
  CHECK_THROWS_AS(scene_spec_from_key_values(parse_key_values("colour = red")), Error);
  CHECK_THROWS_AS(scene_spec_from_key_values(parse_key_values("blob = 1,2")), Error);
  CHECK_THROWS_AS(scene_spec_from_key_values(parse_key_values("seed = x")), Error);
}

TEST_CASE("profile presets and overrides") {
  const auto d = profile_preset("distance");
  CHECK(d.family == RelationFamily::Distance);
  CHECK(d.threshold == 1.01);
  CHECK(d.weights.lambda == 0.5);
  CHECK(d.weights.lambda_v == 0.5);
  CHECK(d.weights.lambda_e == 0.5);
  const auto r = profile_preset("direction");
  CHECK(r.family == RelationFamily::Direction);
  CHECK(r.threshold == 1.0);
  CHECK_THROWS_AS(profile_preset("fancy"), Error);

  Profile p = d;
  apply_profile_overrides(p, parse_key_values("lambda = 0.25\nthreshold = \"2\"\nconnectivity = full\ntop_k = 3\n"));
  CHECK(p.weights.lambda == 0.25);
  CHECK(p.threshold == 2.0);
  CHECK(p.connectivity == Connectivity::Full);
  CHECK(p.top_k == 3u);
  CHECK_THROWS_AS(apply_profile_overrides(p, parse_key_values("lambda = 2")), Error);
  CHECK_THROWS_AS(apply_profile_overrides(p, parse_key_values("threshold = 0")), Error);
  CHECK_THROWS_AS(apply_profile_overrides(p, parse_key_values("candidate_budget = 0.5")), Error);
  CHECK_THROWS_AS(apply_profile_overrides(p, parse_key_values("mystery = 1")), Error);
  CHECK_THROWS_AS(parse_key_values("no equals sign"), Error);
}
