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

// Probability tensors and label maps, stored as a strict subset of the NPY
// format: version 1.0, C order, little-endian `<f4` (tensors, class axis
// last) or `<u4` (label maps).

#ifndef STRUCTMATCH_TENSOR_IO_HPP_
#define STRUCTMATCH_TENSOR_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "structmatch/grid.hpp"

namespace structmatch {

inline constexpr double kSimplexTolerance = 1e-5;

// Dense per-element class-probability field. Channel 0 is background.
// Values are kept exactly as loaded; readers that need an exact simplex use
// normalized(), which divides by the element's sum in double precision.
class ProbabilityTensor {
 public:
  ProbabilityTensor() = default;

  // Validates the simplex constraint and throws Error(Format) on violation.
  ProbabilityTensor(GridDims dims, std::size_t num_classes, std::vector<float> values);

  const GridDims& dims() const { return dims_; }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t num_elements() const { return dims_.size(); }

  std::span<const float> element(std::size_t index) const {
    return {values_.data() + index * num_classes_, num_classes_};
  }
  float at(std::size_t index, std::size_t cls) const {
    return values_[index * num_classes_ + cls];
  }
  double normalized(std::size_t index, std::size_t cls) const;

  const std::vector<float>& values() const { return values_; }

 private:
  GridDims dims_;
  std::size_t num_classes_ = 0;
  std::vector<float> values_;
};

class LabelMap {
 public:
  LabelMap() = default;
  explicit LabelMap(GridDims dims) : dims_(dims), labels_(dims.size(), 0) {}
  LabelMap(GridDims dims, std::vector<std::uint32_t> labels);

  const GridDims& dims() const { return dims_; }
  std::size_t size() const { return labels_.size(); }

  std::uint32_t operator[](std::size_t index) const { return labels_[index]; }
  std::uint32_t& operator[](std::size_t index) { return labels_[index]; }
  std::uint32_t at(const Point& p) const { return labels_[dims_.index(p)]; }

  std::uint32_t max_label() const;
  const std::vector<std::uint32_t>& labels() const { return labels_; }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  GridDims dims_;
  std::vector<std::uint32_t> labels_;
};

ProbabilityTensor load_tensor(const std::filesystem::path& path);
void save_tensor(const ProbabilityTensor& tensor, const std::filesystem::path& path);

LabelMap load_label_map(const std::filesystem::path& path);
void save_label_map(const LabelMap& map, const std::filesystem::path& path);

// In-memory encode/decode, used by the file functions above.
std::string encode_tensor(const ProbabilityTensor& tensor);
ProbabilityTensor decode_tensor(const std::string& bytes);
std::string encode_label_map(const LabelMap& map);
LabelMap decode_label_map(const std::string& bytes);

}  // namespace structmatch

#endif  // STRUCTMATCH_TENSOR_IO_HPP_
