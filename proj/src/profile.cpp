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

#include "structmatch/profile.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "structmatch/error.hpp"

namespace structmatch {

namespace {

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorKind::InvalidArgument, "cli", msg);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return d;
  } catch (const std::exception&) {
    config_error("key '" + key + "' expects a number, got '" + value + "'");
  }
}

std::size_t to_size(const std::string& key, const std::string& value) {
  std::size_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    config_error("key '" + key + "' expects a non-negative integer, got '" + value + "'");
  }
  return out;
}

}  // namespace

void Profile::validate() const {
  auto in_unit = [](double w) { return w >= 0.0 && w <= 1.0; };
  if (!in_unit(weights.lambda) || !in_unit(weights.lambda_v) || !in_unit(weights.lambda_e)) {
    config_error("blend weights must lie in [0,1]");
  }
  if (!(threshold > 0.0)) config_error("threshold must be > 0");
  if (!(candidate_budget >= 1.0)) config_error("candidate budget must be >= 1");
  if (top_k && *top_k == 0) config_error("top_k must be >= 1");
  if (min_region_size == 0) config_error("min_region_size must be >= 1");
}

Profile profile_preset(std::string_view name) {
  Profile p;
  if (name == "distance") {
    p.family = RelationFamily::Distance;
    p.threshold = 1.01;
  } else if (name == "direction") {
    p.family = RelationFamily::Direction;
    p.threshold = 1.0;
  } else {
    config_error("unknown profile '" + std::string(name) + "' (expected distance or direction)");
  }
  return p;
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      config_error("line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) config_error("line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cli", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

void apply_profile_overrides(Profile& p, const KeyValues& values) {
  for (const auto& [key, value] : values) {
    if (key == "family") {
      p.family = relation_family_from_string(value);
    } else if (key == "lambda") {
      p.weights.lambda = to_double(key, value);
    } else if (key == "lambda_v") {
      p.weights.lambda_v = to_double(key, value);
    } else if (key == "lambda_e") {
      p.weights.lambda_e = to_double(key, value);
    } else if (key == "threshold") {
      p.threshold = to_double(key, value);
    } else if (key == "connectivity") {
      if (value == "face") {
        p.connectivity = Connectivity::Face;
      } else if (value == "full") {
        p.connectivity = Connectivity::Full;
      } else {
        config_error("connectivity must be face or full");
      }
    } else if (key == "min_region_size") {
      p.min_region_size = to_size(key, value);
    } else if (key == "candidate_budget") {
      p.candidate_budget = to_double(key, value);
    } else if (key == "top_k") {
      p.top_k = to_size(key, value);
    } else if (key == "threads") {
      p.threads = static_cast<unsigned>(to_size(key, value));
    } else if (key != "profile") {
      config_error("unknown profile key '" + key + "'");
    }
  }
  p.validate();
}

}  // namespace structmatch
