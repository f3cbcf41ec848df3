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

#ifndef STRUCTMATCH_ERROR_HPP_
#define STRUCTMATCH_ERROR_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace structmatch {

enum class ErrorKind {
  Io,                   // file could not be opened / read / written
  Format,               // malformed container or out-of-contract content
  InvalidArgument,      // precondition violated by the caller
  EmptyCandidateClass,  // a model class has no candidate region
  CandidateExplosion,   // one-to-one search space exceeds the budget
  InstanceTooLarge,     // brute-force oracle refused the instance
};

// Every error raised by the library carries the module it originated from,
// and the message is prefixed with it ("regions: ...").
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message),
        kind_(kind),
        module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

// Raised by initial matching when model class `model_class` (1-based label)
// has no region in its candidate bucket.
class EmptyCandidateClassError : public Error {
 public:
  explicit EmptyCandidateClassError(std::uint32_t model_class)
      : Error(ErrorKind::EmptyCandidateClass, "matching",
              "no candidate region for class " + std::to_string(model_class)),
        model_class_(model_class) {}

  std::uint32_t model_class() const noexcept { return model_class_; }

 private:
  std::uint32_t model_class_;
};

}  // namespace structmatch

#endif  // STRUCTMATCH_ERROR_HPP_
