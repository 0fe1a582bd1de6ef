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

#ifndef INCLUDE_CALM_LANG_VALIDATOR_HPP_
#define INCLUDE_CALM_LANG_VALIDATOR_HPP_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "calm/lang/ast.hpp"

namespace calm::lang {

// Reserved relations present on every machine: id(addr) holds the machine's
// own address, all(addr) every member of the network.
inline constexpr const char* kIdRelation = "id";
inline constexpr const char* kAllRelation = "all";

struct RelationInfo {
  RelationSchema schema;
  RelationKind kind = RelationKind::Table;
  bool input = false;
  bool output = false;
  bool reserved = false;
  SourceLoc loc;

  Symbol name() const { return schema.name; }
  // Persisted relations accumulate across iterations; everything else is
  // cleared when an iteration ends.
  bool persisted() const { return kind == RelationKind::Table; }
  bool channel() const { return kind == RelationKind::Channel; }
};

// One argument position of a scan, resolved against the join's slot table.
struct ArgOp {
  enum Kind { Bind, Check, Const, Skip };
  Kind kind = Skip;
  int slot = -1;
  Value constant;
};

struct SlotTerm {
  enum Kind { Slot, Const };
  Kind kind = Const;
  int slot = -1;
  Value constant;
};

struct PlannedAtom {
  Symbol relation;
  std::vector<ArgOp> args;
  // Leading arguments known before the scan; used as an index prefix.
  std::size_t bound_prefix = 0;
  // Position of this literal in CompiledRule::positives.
  int positive_index = -1;
};

struct PlannedNegation {
  Symbol relation;
  std::vector<SlotTerm> args;  // wildcards become slot -1 with kind Slot
};

struct PlannedComparison {
  CmpOp op = CmpOp::Eq;
  SlotTerm lhs;
  SlotTerm rhs;
};

// Join order for one rule. Negations and comparisons are attached to the
// first step after which all their variables are bound (step -1 = before any
// scan, for ground checks).
struct JoinPlan {
  std::vector<PlannedAtom> steps;
  std::vector<std::vector<PlannedNegation>> negations_after;    // size steps+1
  std::vector<std::vector<PlannedComparison>> comparisons_after;  // size steps+1
};

struct HeadTerm {
  TermKind kind = TermKind::Constant;
  int slot = -1;
  Value constant;
  AggregateFn aggregate = AggregateFn::Count;
  LatticeKind lattice = LatticeKind::GSet;
  std::vector<SlotTerm> items;
  std::vector<SlotTerm> tomb;
  bool flag = false;
};

struct CompiledRule {
  std::size_t index = 0;  // position in the source program
  Rule source;
  Symbol head;
  std::vector<HeadTerm> head_args;
  std::vector<std::string> slot_names;

  std::vector<Atom> positives;
  std::vector<Atom> negatives;
  std::vector<Comparison> comparisons;

  // plans[0]: source order. plans[i + 1]: positives[i] scanned first (the
  // semi-naive delta literal).
  std::vector<JoinPlan> plans;

  bool has_aggregate = false;
  bool has_broadcast = false;
  bool channel_head = false;
  bool reads_all = false;
  bool reads_id = false;
};

class ValidatedProgram {
 public:
  const Program& program() const { return program_; }
  const std::map<Symbol, RelationInfo>& relations() const { return relations_; }
  const RelationInfo& relation(Symbol name) const;
  const RelationInfo* find(Symbol name) const;
  const std::vector<CompiledRule>& rules() const { return rules_; }

  // Every relation (reserved ones included) declared on an empty database.
  const Database& schemas() const { return schemas_; }
  // Only the input relations; fixtures are parsed against this.
  const Database& input_schemas() const { return input_schemas_; }

  std::vector<Symbol> input_relations() const;
  std::vector<Symbol> output_relations() const;

 private:
  friend ValidatedProgram validate_program(const Program& p);

  Program program_;
  std::map<Symbol, RelationInfo> relations_;
  std::vector<CompiledRule> rules_;
  Database schemas_;
  Database input_schemas_;
};

// Throws ValidationError at the offending node.
ValidatedProgram validate_program(const Program& p);

// parse_program followed by validate_program.
ValidatedProgram load_program(std::string_view text);

}  // namespace calm::lang

#endif  // INCLUDE_CALM_LANG_VALIDATOR_HPP_
