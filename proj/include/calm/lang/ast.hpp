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

#ifndef INCLUDE_CALM_LANG_AST_HPP_
#define INCLUDE_CALM_LANG_AST_HPP_

#include <string>
#include <variant>
#include <vector>

#include "calm/error.hpp"
#include "calm/relspace/database.hpp"

namespace calm::lang {

// table: persisted, facts accumulate across loop iterations.
// event: facts live for one iteration.
// channel: event relation whose first column addresses the receiving machine.
enum class RelationKind { Table, Event, Channel };

const char* relation_kind_name(RelationKind k);

struct RelationDecl {
  std::string name;
  std::vector<ColumnType> columns;
  RelationKind kind = RelationKind::Table;
  bool input = false;
  bool output = false;
  SourceLoc loc;
};

enum class TermKind {
  Variable,
  Wildcard,   // _
  Constant,
  Broadcast,  // @* in a channel head: every other member of the network
  Lattice,    // gset{..}, maxint(..), boolor(..), 2p{added:{..}, tomb:{..}}
  Aggregate,  // count<V>, min<V>, max<V>
};

enum class AggregateFn { Count, Min, Max };

const char* aggregate_name(AggregateFn f);

struct Term {
  TermKind kind = TermKind::Wildcard;
  std::string name;                 // Variable; aggregated variable
  Value constant;                   // Constant
  AggregateFn aggregate = AggregateFn::Count;
  LatticeKind lattice = LatticeKind::GSet;
  std::vector<Term> items;          // gset elements, maxint argument, 2p added
  std::vector<Term> tomb;           // 2p tombstoned
  bool flag = false;                // boolor
  SourceLoc loc;

  static Term variable(std::string name, SourceLoc loc = {});
  static Term constant_of(Value v, SourceLoc loc = {});
};

struct Atom {
  std::string relation;
  std::vector<Term> args;
  SourceLoc loc;
};

struct Literal {
  Atom atom;
  bool negated = false;
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* cmp_symbol(CmpOp op);

struct Comparison {
  CmpOp op = CmpOp::Eq;
  Term lhs;
  Term rhs;
  SourceLoc loc;
};

using BodyElement = std::variant<Literal, Comparison>;

struct Rule {
  Atom head;
  std::vector<BodyElement> body;
  SourceLoc loc;
};

struct Program {
  std::vector<RelationDecl> relations;
  std::vector<Rule> rules;
};

// Structural equality; source locations are ignored.
bool operator==(const Term& a, const Term& b);
bool operator==(const Atom& a, const Atom& b);
bool operator==(const Literal& a, const Literal& b);
bool operator==(const Comparison& a, const Comparison& b);
bool operator==(const Rule& a, const Rule& b);
bool operator==(const RelationDecl& a, const RelationDecl& b);
bool operator==(const Program& a, const Program& b);

// Collects variable names (not wildcards) appearing in a term, in order.
void collect_variables(const Term& t, std::vector<std::string>& out);

}  // namespace calm::lang

#endif  // INCLUDE_CALM_LANG_AST_HPP_
