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

#include "structmatch/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "structmatch/error.hpp"

namespace structmatch {

namespace {

static_assert(std::endian::native == std::endian::little,
              "the NPY subset is little-endian and is memcpy'd directly");

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;
constexpr std::size_t kPreambleLen = 10;  // magic + version + u16 header length

[[noreturn]] void format_error(const std::string& msg) {
  throw Error(ErrorKind::Format, "tensor_io", msg);
}

struct NpyHeader {
  std::string descr;
  bool fortran_order = false;
  std::vector<std::size_t> shape;
  std::size_t data_offset = 0;
};

std::string make_header(const std::string& descr, const std::vector<std::size_t>& shape) {
  std::ostringstream dict;
  dict << "{'descr': '" << descr << "', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    dict << shape[i];
    if (shape.size() == 1 || i + 1 < shape.size()) dict << ",";
    if (i + 1 < shape.size()) dict << " ";
  }
  dict << "), }";
  std::string body = dict.str();
  // Pad with spaces so that data starts on a 64-byte boundary, newline last.
  const std::size_t unpadded = kPreambleLen + body.size() + 1;
  const std::size_t padded = (unpadded + 63) / 64 * 64;
  body.append(padded - unpadded, ' ');
  body.push_back('\n');

  std::string out(kMagic, kMagicLen);
  out.push_back('\x01');
  out.push_back('\x00');
  const auto len = static_cast<std::uint16_t>(body.size());
  out.push_back(static_cast<char>(len & 0xff));
  out.push_back(static_cast<char>(len >> 8));
  out += body;
  return out;
}

// Returns the text following `'key':` with leading spaces stripped.
std::string_view value_after(std::string_view dict, std::string_view key) {
  const std::string quoted = "'" + std::string(key) + "'";
  const auto pos = dict.find(quoted);
  if (pos == std::string_view::npos) format_error("header lacks key " + quoted);
  auto rest = dict.substr(pos + quoted.size());
  const auto colon = rest.find_first_not_of(' ');
  if (colon == std::string_view::npos || rest[colon] != ':') {
    format_error("malformed header near key " + quoted);
  }
  rest = rest.substr(colon + 1);
  const auto start = rest.find_first_not_of(' ');
  if (start == std::string_view::npos) format_error("malformed header near key " + quoted);
  return rest.substr(start);
}

NpyHeader parse_header(const std::string& bytes) {
  if (bytes.size() < kPreambleLen || bytes.compare(0, kMagicLen, kMagic, kMagicLen) != 0) {
    format_error("malformed header: missing NPY magic string");
  }
  if (bytes[6] != '\x01' || bytes[7] != '\x00') {
    format_error("unsupported NPY version " + std::to_string(static_cast<unsigned char>(bytes[6])) +
                 "." + std::to_string(static_cast<unsigned char>(bytes[7])) +
                 " (only 1.0 is accepted)");
  }
  const std::size_t header_len = static_cast<unsigned char>(bytes[8]) |
                                 (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
  if (bytes.size() < kPreambleLen + header_len) format_error("malformed header: truncated");
  const std::string_view dict(bytes.data() + kPreambleLen, header_len);
  if (dict.empty() || dict.back() != '\n') format_error("malformed header: missing newline");

  NpyHeader header;
  header.data_offset = kPreambleLen + header_len;

  auto descr = value_after(dict, "descr");
  if (descr.empty() || descr.front() != '\'') format_error("malformed header: descr");
  const auto descr_end = descr.find('\'', 1);
  if (descr_end == std::string_view::npos) format_error("malformed header: descr");
  header.descr = std::string(descr.substr(1, descr_end - 1));

  auto fortran = value_after(dict, "fortran_order");
  if (fortran.starts_with("False")) {
    header.fortran_order = false;
  } else if (fortran.starts_with("True")) {
    header.fortran_order = true;
  } else {
    format_error("malformed header: fortran_order");
  }

  auto shape = value_after(dict, "shape");
  if (shape.empty() || shape.front() != '(') format_error("malformed header: shape");
  const auto close = shape.find(')');
  if (close == std::string_view::npos) format_error("malformed header: shape");
  std::string_view items = shape.substr(1, close - 1);
  while (!items.empty()) {
    const auto first = items.find_first_not_of(" ,");
    if (first == std::string_view::npos) break;
    items = items.substr(first);
    std::size_t value = 0;
    std::size_t used = 0;
    while (used < items.size() && items[used] >= '0' && items[used] <= '9') {
      value = value * 10 + static_cast<std::size_t>(items[used] - '0');
      ++used;
    }
    if (used == 0) format_error("malformed header: non-integer shape entry");
    header.shape.push_back(value);
    items = items.substr(used);
  }
  return header;
}

void check_payload(const NpyHeader& header, const std::string& bytes, std::size_t count) {
  if (header.fortran_order) format_error("fortran_order arrays are not supported");
  if (bytes.size() - header.data_offset != count * 4) {
    format_error("payload size " + std::to_string(bytes.size() - header.data_offset) +
                 " does not match shape (" + std::to_string(count * 4) + " bytes expected)");
  }
}

GridDims dims_from(const std::vector<std::size_t>& extents) {
  for (const auto e : extents) {
    if (e == 0) format_error("grid extents must be >= 1");
  }
  if (extents.size() == 2) return {extents[0], extents[1]};
  if (extents.size() == 3) return {extents[0], extents[1], extents[2]};
  format_error("grid must be 2D or 3D, got " + std::to_string(extents.size()) + " axes");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "tensor_io", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "tensor_io", "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "tensor_io", "short write to " + path.string());
}

}  // namespace

ProbabilityTensor::ProbabilityTensor(GridDims dims, std::size_t num_classes,
                                     std::vector<float> values)
    : dims_(dims), num_classes_(num_classes), values_(std::move(values)) {
  if (num_classes_ < 2) format_error("a probability tensor needs at least 2 classes");
  if (dims_.size() == 0) format_error("grid extents must be >= 1");
  if (values_.size() != dims_.size() * num_classes_) {
    format_error("value count does not match dims x classes");
  }
  for (std::size_t p = 0; p < dims_.size(); ++p) {
    double sum = 0.0;
    for (std::size_t n = 0; n < num_classes_; ++n) {
      const float v = values_[p * num_classes_ + n];
      if (!(v >= 0.0f && v <= 1.0f)) {
        format_error("probability outside [0,1] at index " + std::to_string(p));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance) {
      format_error("unnormalized probability vector at index " + std::to_string(p) +
                   " (sum " + std::to_string(sum) + ")");
    }
  }
}

double ProbabilityTensor::normalized(std::size_t index, std::size_t cls) const {
  const auto e = element(index);
  double sum = 0.0;
  for (const float v : e) sum += v;
  return static_cast<double>(e[cls]) / sum;
}

LabelMap::LabelMap(GridDims dims, std::vector<std::uint32_t> labels)
    : dims_(dims), labels_(std::move(labels)) {
  if (labels_.size() != dims_.size()) {
    throw Error(ErrorKind::InvalidArgument, "tensor_io", "label count does not match dims");
  }
}

std::uint32_t LabelMap::max_label() const {
  return labels_.empty() ? 0 : *std::max_element(labels_.begin(), labels_.end());
}

std::string encode_tensor(const ProbabilityTensor& tensor) {
  auto shape = tensor.dims().shape();
  shape.push_back(tensor.num_classes());
  std::string out = make_header("<f4", shape);
  const auto& v = tensor.values();
  const std::size_t offset = out.size();
  out.resize(offset + v.size() * sizeof(float));
  std::memcpy(out.data() + offset, v.data(), v.size() * sizeof(float));
  return out;
}

ProbabilityTensor decode_tensor(const std::string& bytes) {
  const NpyHeader header = parse_header(bytes);
  if (header.descr != "<f4") {
    format_error("tensor dtype must be '<f4', got '" + header.descr + "'");
  }
  if (header.shape.size() != 3 && header.shape.size() != 4) {
    format_error("tensor must have 3 (I,J,N) or 4 (I,J,K,N) axes, got " +
                 std::to_string(header.shape.size()));
  }
  std::vector<std::size_t> extents(header.shape.begin(), header.shape.end() - 1);
  const std::size_t num_classes = header.shape.back();
  const GridDims dims = dims_from(extents);
  const std::size_t count = dims.size() * num_classes;
  check_payload(header, bytes, count);
  std::vector<float> values(count);
  std::memcpy(values.data(), bytes.data() + header.data_offset, count * sizeof(float));
  return ProbabilityTensor(dims, num_classes, std::move(values));
}

std::string encode_label_map(const LabelMap& map) {
  std::string out = make_header("<u4", map.dims().shape());
  const auto& v = map.labels();
  const std::size_t offset = out.size();
  out.resize(offset + v.size() * sizeof(std::uint32_t));
  std::memcpy(out.data() + offset, v.data(), v.size() * sizeof(std::uint32_t));
  return out;
}

LabelMap decode_label_map(const std::string& bytes) {
  const NpyHeader header = parse_header(bytes);
  if (header.descr != "<u4") {
    format_error("label map dtype must be '<u4' (non-negative integers), got '" + header.descr +
                 "'");
  }
  const GridDims dims = dims_from(header.shape);
  check_payload(header, bytes, dims.size());
  std::vector<std::uint32_t> labels(dims.size());
  std::memcpy(labels.data(), bytes.data() + header.data_offset,
              labels.size() * sizeof(std::uint32_t));
  return LabelMap(dims, std::move(labels));
}

ProbabilityTensor load_tensor(const std::filesystem::path& path) {
  return decode_tensor(read_file(path));
}

void save_tensor(const ProbabilityTensor& tensor, const std::filesystem::path& path) {
  write_file(path, encode_tensor(tensor));
}

LabelMap load_label_map(const std::filesystem::path& path) {
  return decode_label_map(read_file(path));
}

void save_label_map(const LabelMap& map, const std::filesystem::path& path) {
  write_file(path, encode_label_map(map));
}

}  // namespace structmatch
