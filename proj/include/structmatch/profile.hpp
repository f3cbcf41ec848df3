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

#ifndef STRUCTMATCH_PROFILE_HPP_
#define STRUCTMATCH_PROFILE_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "structmatch/graph.hpp"
#include "structmatch/grid.hpp"
#include "structmatch/matching.hpp"

namespace structmatch {

struct Profile {
  RelationFamily family = RelationFamily::Distance;
  BlendWeights weights;
  double threshold = 1.01;
  Connectivity connectivity = Connectivity::Face;
  std::size_t min_region_size = 1;
  double candidate_budget = 1e7;
  std::optional<std::size_t> top_k;
  unsigned threads = 1;

  // Throws InvalidArgument when a weight leaves [0,1], T <= 0 or budget < 1.
  void validate() const;
};

// Presets: "distance" (min/max distances, T = 1.01) and "direction"
// (centroid directions plus region diameter, T = 1).
Profile profile_preset(std::string_view name);

// Flat `key = value` text, one entry per line, `#` starts a comment.
// Repeated keys are kept in order.
using KeyValues = std::vector<std::pair<std::string, std::string>>;
KeyValues parse_key_values(std::string_view text);
KeyValues read_key_values(const std::filesystem::path& path);

// Applies recognised keys on top of `profile`; unknown keys are an error.
void apply_profile_overrides(Profile& profile, const KeyValues& values);

}  // namespace structmatch

#endif  // STRUCTMATCH_PROFILE_HPP_
