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

#ifndef STRUCTMATCH_METRICS_HPP_
#define STRUCTMATCH_METRICS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "structmatch/tensor_io.hpp"

namespace structmatch {

// 2|A n B| / (|A| + |B|) over elements labeled `cls`; 1 when both are empty.
double dice(const LabelMap& pred, const LabelMap& gt, std::uint32_t cls);

struct HausdorffResult {
  double value = 0.0;      // grid units
  bool missing = false;    // exactly one side empty; value is the grid diagonal
};

// Symmetric Hausdorff distance between the class-`cls` point sets, computed
// exactly from squared Euclidean distance transforms.
HausdorffResult hausdorff(const LabelMap& pred, const LabelMap& gt, std::uint32_t cls);

struct ClassReport {
  std::uint32_t cls = 0;
  std::string name;
  double dice = 0.0;
  double hausdorff = 0.0;
  bool present_in_pred = false;
  bool present_in_gt = false;
  bool hausdorff_missing = false;
};

struct EvaluationReport {
  std::vector<ClassReport> per_class;
  double mean_dice = 0.0;
  double mean_hausdorff = 0.0;  // includes missing-region sentinels, see flags
};

EvaluationReport evaluate(const LabelMap& pred, const LabelMap& gt,
                          std::span<const std::uint32_t> classes,
                          std::span<const std::string> names = {});

nlohmann::json report_to_json(const EvaluationReport& report);

// Squared Euclidean distance from every element to the nearest element with
// mask != 0; elements are at distance 0 from themselves. Infinity when the
// mask is empty.
std::vector<double> squared_distance_transform(const GridDims& dims,
                                               const std::vector<std::uint8_t>& mask);

}  // namespace structmatch

#endif  // STRUCTMATCH_METRICS_HPP_
