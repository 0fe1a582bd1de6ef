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

#ifndef INCLUDE_CALM_RELSPACE_FACT_HPP_
#define INCLUDE_CALM_RELSPACE_FACT_HPP_

#include <string>
#include <utility>
#include <vector>

#include "calm/relspace/value.hpp"

namespace calm {

// A ground tuple of a named relation. Immutable once constructed.
class Fact {
 public:
  Fact() = default;
  Fact(Symbol relation, std::vector<Value> args)
      : relation_(relation), args_(std::move(args)) {}
  Fact(std::string_view relation, std::vector<Value> args)
      : relation_(relation), args_(std::move(args)) {}

  Symbol relation() const { return relation_; }
  const std::vector<Value>& args() const { return args_; }
  const Value& arg(std::size_t i) const { return args_[i]; }
  std::size_t arity() const { return args_.size(); }

  std::size_t hash() const;

  // Fact text form: rel(a, b).
  std::string str() const;

  friend bool operator==(const Fact& a, const Fact& b) {
    return a.relation_ == b.relation_ && a.args_ == b.args_;
  }
  friend bool operator!=(const Fact& a, const Fact& b) { return !(a == b); }
  friend bool operator<(const Fact& a, const Fact& b) {
    if (a.relation_ != b.relation_) return a.relation_ < b.relation_;
    return a.args_ < b.args_;
  }

 private:
  Symbol relation_;
  std::vector<Value> args_;
};

}  // namespace calm

template <>
struct std::hash<calm::Fact> {
  std::size_t operator()(const calm::Fact& f) const noexcept { return f.hash(); }
};

#endif  // INCLUDE_CALM_RELSPACE_FACT_HPP_
