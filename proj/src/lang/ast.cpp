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

#include "calm/lang/ast.hpp"

namespace calm::lang {

const char* relation_kind_name(RelationKind k) {
  switch (k) {
    case RelationKind::Table: return "table";
    case RelationKind::Event: return "event";
    case RelationKind::Channel: return "channel";
  }
  return "?";
}

const char* aggregate_name(AggregateFn f) {
  switch (f) {
    case AggregateFn::Count: return "count";
    case AggregateFn::Min: return "min";
    case AggregateFn::Max: return "max";
  }
  return "?";
}

const char* cmp_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

Term Term::variable(std::string name, SourceLoc loc) {
  Term t;
  t.kind = name == "_" ? TermKind::Wildcard : TermKind::Variable;
  if (t.kind == TermKind::Variable) t.name = std::move(name);
  t.loc = loc;
  return t;
}

Term Term::constant_of(Value v, SourceLoc loc) {
  Term t;
  t.kind = TermKind::Constant;
  t.constant = std::move(v);
  t.loc = loc;
  return t;
}

bool operator==(const Term& a, const Term& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case TermKind::Variable: return a.name == b.name;
    case TermKind::Wildcard:
    case TermKind::Broadcast: return true;
    case TermKind::Constant: return a.constant == b.constant;
    case TermKind::Aggregate: return a.aggregate == b.aggregate && a.name == b.name;
    case TermKind::Lattice:
      return a.lattice == b.lattice && a.items == b.items && a.tomb == b.tomb && a.flag == b.flag;
  }
  return false;
}

bool operator==(const Atom& a, const Atom& b) {
  return a.relation == b.relation && a.args == b.args;
}

bool operator==(const Literal& a, const Literal& b) {
  return a.negated == b.negated && a.atom == b.atom;
}

bool operator==(const Comparison& a, const Comparison& b) {
  return a.op == b.op && a.lhs == b.lhs && a.rhs == b.rhs;
}

bool operator==(const Rule& a, const Rule& b) { return a.head == b.head && a.body == b.body; }

bool operator==(const RelationDecl& a, const RelationDecl& b) {
  return a.name == b.name && a.columns == b.columns && a.kind == b.kind && a.input == b.input &&
         a.output == b.output;
}

bool operator==(const Program& a, const Program& b) {
  return a.relations == b.relations && a.rules == b.rules;
}

void collect_variables(const Term& t, std::vector<std::string>& out) {
  switch (t.kind) {
    case TermKind::Variable:
    case TermKind::Aggregate:
      out.push_back(t.name);
      break;
    case TermKind::Lattice:
      for (const auto& i : t.items) collect_variables(i, out);
      for (const auto& i : t.tomb) collect_variables(i, out);
      break;
    default:
      break;
  }
}

}  // namespace calm::lang
