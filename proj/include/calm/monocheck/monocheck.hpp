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

#ifndef INCLUDE_CALM_MONOCHECK_MONOCHECK_HPP_
#define INCLUDE_CALM_MONOCHECK_MONOCHECK_HPP_

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "calm/lang/validator.hpp"

namespace calm::monocheck {

enum class Reason { Negation, Aggregation, MembershipQuery };

const char* reason_name(Reason r);

struct MonotonicityClass {
  std::set<Reason> reasons;

  bool monotone() const { return reasons.empty(); }
  // "monotone" or "non-monotone{negation,aggregation}".
  std::string str() const;

  friend bool operator==(const MonotonicityClass& a, const MonotonicityClass& b) {
    return a.reasons == b.reasons;
  }
};

// Syntactic: negated literals, head aggregates and reads of `all` are the
// non-monotone constructs. Reading `id` is not.
MonotonicityClass classify_rule(const lang::Rule& r);

enum class EdgeLabel { Positive, Negative, Aggregate };

const char* edge_label_name(EdgeLabel l);

// body relation -> head relation. Edges into channel heads are async: the
// derived facts are only visible after delivery, so they do not constrain
// stratification.
struct DependencyEdge {
  std::string from;
  std::string to;
  EdgeLabel label = EdgeLabel::Positive;
  bool async = false;

  friend bool operator<(const DependencyEdge& a, const DependencyEdge& b) {
    return std::tie(a.from, a.to, a.label, a.async) < std::tie(b.from, b.to, b.label, b.async);
  }
  friend bool operator==(const DependencyEdge& a, const DependencyEdge& b) {
    return !(a < b) && !(b < a);
  }
};

std::vector<DependencyEdge> dependency_graph(const lang::ValidatedProgram& p);

struct Stratification {
  // layers[k]: declared relations (reserved ones excluded) in stratum k, by name.
  std::vector<std::vector<std::string>> layers;
  // Stratum of every relation, reserved ones included.
  std::map<Symbol, int> level;
};

// Lowest stratum per relation such that negated and aggregated dependencies
// point strictly downward. UnstratifiableError carries the offending cycle.
Stratification stratify(const lang::ValidatedProgram& p);

struct RuleReport {
  std::size_t index = 0;
  std::string text;
  SourceLoc loc;
  MonotonicityClass cls;
};

struct CoordinationPoint {
  std::size_t rule = 0;
  SourceLoc loc;
  Reason reason = Reason::Negation;
  std::string construct;  // the literal or head term, printed
};

struct AnalysisReport {
  std::vector<RuleReport> rules;
  bool monotone = true;
  std::vector<DependencyEdge> edges;
  bool stratifiable = true;
  std::vector<std::vector<std::string>> strata;
  std::vector<std::string> unstratifiable_cycle;
  std::vector<CoordinationPoint> coordination_points;
  bool uses_all = false;
  bool uses_id = false;
};

AnalysisReport analyze_program(const lang::ValidatedProgram& p);

nlohmann::json report_to_json(const AnalysisReport& r);
std::string report_to_text(const AnalysisReport& r);

}  // namespace calm::monocheck

#endif  // INCLUDE_CALM_MONOCHECK_MONOCHECK_HPP_
