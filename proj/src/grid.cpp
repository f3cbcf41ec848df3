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

#include "structmatch/grid.hpp"

#include <cstdlib>

namespace structmatch {

std::vector<Point> neighbour_offsets(std::size_t rank, Connectivity connectivity) {
  std::vector<Point> offsets;
  const int depth_span = rank == 3 ? 1 : 0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      for (int dd = -depth_span; dd <= depth_span; ++dd) {
        const int manhattan = std::abs(dr) + std::abs(dc) + std::abs(dd);
        if (manhattan == 0) continue;
        if (connectivity == Connectivity::Face && manhattan != 1) continue;
        offsets.push_back({dr, dc, dd});
      }
    }
  }
  return offsets;
}

}  // namespace structmatch
