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

#include "structmatch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "structmatch/error.hpp"

namespace structmatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dims(const LabelMap& pred, const LabelMap& gt) {
  if (pred.dims() != gt.dims()) {
    throw Error(ErrorKind::InvalidArgument, "metrics", "prediction and ground truth grids differ");
  }
}

// One pass of the lower-envelope-of-parabolas transform (Felzenszwalb and
// Huttenlocher) over a strided line of n samples.
void edt_line(double* f, std::size_t n, std::size_t stride, std::vector<double>& d,
              std::vector<std::size_t>& v, std::vector<double>& z) {
  d.resize(n);
  v.resize(n);
  z.resize(n + 1);
  std::size_t k = 0;
  std::size_t first = n;
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q * stride] != kInf) {
      first = q;
      break;
    }
  }
  if (first == n) return;  // no finite sample on this line
  v[0] = first;
  z[0] = -kInf;
  z[1] = kInf;
  for (std::size_t q = first + 1; q < n; ++q) {
    const double fq = f[q * stride];
    if (fq == kInf) continue;
    const double dq = static_cast<double>(q);
    while (true) {
      const double dv = static_cast<double>(v[k]);
      const double s = ((fq + dq * dq) - (f[v[k] * stride] + dv * dv)) / (2.0 * dq - 2.0 * dv);
      if (s <= z[k]) {
        if (k == 0) {
          v[0] = q;
          z[0] = -kInf;
          z[1] = kInf;
          break;
        }
        --k;
        continue;
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = kInf;
      break;
    }
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const double dq = static_cast<double>(q);
    while (z[k + 1] < dq) ++k;
    const double dv = dq - static_cast<double>(v[k]);
    d[q] = dv * dv + f[v[k] * stride];
  }
  for (std::size_t q = 0; q < n; ++q) f[q * stride] = d[q];
}

// Largest distance from a point of `from` to the set `to`, given the
// squared distance transform of `to`.
double directed(const std::vector<std::uint8_t>& from, const std::vector<double>& dt_to) {
  double worst = 0.0;
  for (std::size_t p = 0; p < from.size(); ++p) {
    if (from[p]) worst = std::max(worst, dt_to[p]);
  }
  return std::sqrt(worst);
}

}  // namespace

std::vector<double> squared_distance_transform(const GridDims& dims,
                                               const std::vector<std::uint8_t>& mask) {
  std::vector<double> f(mask.size());
  for (std::size_t p = 0; p < mask.size(); ++p) f[p] = mask[p] ? 0.0 : kInf;

  const std::size_t rows = dims.rows(), cols = dims.cols(), depth = dims.depth();
  std::vector<double> d;
  std::vector<std::size_t> v;
  std::vector<double> z;
  // depth axis (contiguous)
  if (depth > 1) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) edt_line(&f[(r * cols + c) * depth], depth, 1, d, v, z);
  }
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = 0; k < depth; ++k) edt_line(&f[r * cols * depth + k], cols, depth, d, v, z);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t k = 0; k < depth; ++k) edt_line(&f[c * depth + k], rows, cols * depth, d, v, z);
  return f;
}

double dice(const LabelMap& pred, const LabelMap& gt, std::uint32_t cls) {
  check_dims(pred, gt);
  std::size_t a = 0, b = 0, both = 0;
  for (std::size_t p = 0; p < pred.size(); ++p) {
    const bool in_a = pred[p] == cls;
    const bool in_b = gt[p] == cls;
    a += in_a;
    b += in_b;
    both += in_a && in_b;
  }
  if (a + b == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(a + b);
}

HausdorffResult hausdorff(const LabelMap& pred, const LabelMap& gt, std::uint32_t cls) {
  check_dims(pred, gt);
  std::vector<std::uint8_t> a(pred.size()), b(gt.size());
  bool any_a = false, any_b = false;
  for (std::size_t p = 0; p < pred.size(); ++p) {
    a[p] = pred[p] == cls;
    b[p] = gt[p] == cls;
    any_a = any_a || a[p];
    any_b = any_b || b[p];
  }
  if (!any_a && !any_b) return {0.0, false};
  if (any_a != any_b) return {pred.dims().diagonal(), true};
  const auto dt_a = squared_distance_transform(pred.dims(), a);
  const auto dt_b = squared_distance_transform(gt.dims(), b);
  return {std::max(directed(a, dt_b), directed(b, dt_a)), false};
}

EvaluationReport evaluate(const LabelMap& pred, const LabelMap& gt,
                          std::span<const std::uint32_t> classes,
                          std::span<const std::string> names) {
  check_dims(pred, gt);
  EvaluationReport report;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const std::uint32_t cls = classes[i];
    ClassReport r;
    r.cls = cls;
    r.name = i < names.size() ? names[i] : "class" + std::to_string(cls);
    r.present_in_pred = std::find(pred.labels().begin(), pred.labels().end(), cls) != pred.labels().end();
    r.present_in_gt = std::find(gt.labels().begin(), gt.labels().end(), cls) != gt.labels().end();
    r.dice = dice(pred, gt, cls);
    const auto hd = hausdorff(pred, gt, cls);
    r.hausdorff = hd.value;
    r.hausdorff_missing = hd.missing;
    report.mean_dice += r.dice;
    report.mean_hausdorff += r.hausdorff;
    report.per_class.push_back(std::move(r));
  }
  if (!classes.empty()) {
    report.mean_dice /= static_cast<double>(classes.size());
    report.mean_hausdorff /= static_cast<double>(classes.size());
  }
  return report;
}

nlohmann::json report_to_json(const EvaluationReport& report) {
  using nlohmann::json;
  json per_class = json::array();
  for (const auto& r : report.per_class) {
    json flags = json::array();
    if (!r.present_in_pred) flags.push_back("missing_in_pred");
    if (!r.present_in_gt) flags.push_back("missing_in_gt");
    if (r.hausdorff_missing) flags.push_back("hd_sentinel");
    per_class.push_back({{"class", r.cls},
                         {"name", r.name},
                         {"dice", r.dice},
                         {"hd", r.hausdorff},
                         {"flags", std::move(flags)}});
  }
  return {{"per_class", std::move(per_class)},
          {"mean_dice", report.mean_dice},
          {"mean_hd", report.mean_hausdorff}};
}

}  // namespace structmatch
