//  Copyright 2026 The calmlab Authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

#ifndef INCLUDE_CALM_ERROR_HPP_
#define INCLUDE_CALM_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace calm {

struct SourceLoc {
  int line = 0;
  int column = 0;

  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(column);
  }
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Relation declared twice with different shapes, or a fact that does not fit
// its relation's schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A delta that both inserts and deletes the same fact.
class DeltaError : public Error {
 public:
  using Error::Error;
};

// Lattice operation applied to values of different variants.
class LatticeTypeError : public Error {
 public:
  using Error::Error;
};

// Errors that carry a source position. what() is "line:col: message".
class LocatedError : public Error {
 public:
  LocatedError(SourceLoc loc, const std::string& message)
      : Error(loc.str() + ": " + message), loc_(loc), message_(message) {}

  SourceLoc loc() const { return loc_; }
  const std::string& message() const { return message_; }

 private:
  SourceLoc loc_;
  std::string message_;
};

class ParseError : public LocatedError {
 public:
  using LocatedError::LocatedError;
};

class ValidationError : public LocatedError {
 public:
  using LocatedError::LocatedError;
};

class UnstratifiableError : public Error {
 public:
  explicit UnstratifiableError(std::vector<std::string> cycle)
      : Error(describe(cycle)), cycle_(std::move(cycle)) {}

  // Predicates along the offending cycle; the first element is repeated at
  // the end.
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  static std::string describe(const std::vector<std::string>& cycle) {
    std::string s = "program is not stratifiable: cycle through negation or aggregation: ";
    for (size_t i = 0; i < cycle.size(); ++i) {
      if (i > 0) s += " -> ";
      s += cycle[i];
    }
    return s;
  }

  std::vector<std::string> cycle_;
};

// Evaluation exceeded its iteration bound.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// A message or inbox fact that cannot be routed.
class RoutingError : public Error {
 public:
  using Error::Error;
};

class PartitioningError : public Error {
 public:
  using Error::Error;
};

// An explicit schedule decision that is not enabled in the current state.
class ScheduleError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace calm

#endif  // INCLUDE_CALM_ERROR_HPP_
