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

#include "calm/relspace/database.hpp"

#include <algorithm>

#include "calm/error.hpp"

namespace calm {
namespace {

const std::set<Fact> kNoFacts;

LatticeKind lattice_kind_of(ColumnType t) {
  switch (t) {
    case ColumnType::GSet: return LatticeKind::GSet;
    case ColumnType::MaxInt: return LatticeKind::MaxInt;
    case ColumnType::BoolOr: return LatticeKind::BoolOr;
    default: return LatticeKind::TwoPSet;
  }
}

// Merge b's lattice columns into a (same key assumed).
Fact merge_facts(const RelationSchema& schema, const Fact& a, const Fact& b) {
  std::vector<Value> args = a.args();
  for (std::size_t i = 0; i < schema.columns.size(); ++i) {
    if (is_lattice_column(schema.columns[i])) {
      args[i] = lattices::merge(a.arg(i).as_lattice(), b.arg(i).as_lattice());
    }
  }
  return Fact(a.relation(), std::move(args));
}

bool fact_leq(const RelationSchema& schema, const Fact& a, const Fact& b) {
  for (std::size_t i = 0; i < schema.columns.size(); ++i) {
    if (is_lattice_column(schema.columns[i])) {
      if (!lattices::leq(a.arg(i).as_lattice(), b.arg(i).as_lattice())) return false;
    } else if (a.arg(i) != b.arg(i)) {
      return false;
    }
  }
  return true;
}

void check_compatible(const RelationSchema& a, const RelationSchema& b) {
  if (!(a == b)) {
    throw SchemaError("relation '" + a.name.name() + "' declared with incompatible schemas (arity " +
                      std::to_string(a.arity()) + " vs " + std::to_string(b.arity()) + ")");
  }
}

}  // namespace

const char* column_type_name(ColumnType t) {
  switch (t) {
    case ColumnType::Any: return "any";
    case ColumnType::Int: return "int";
    case ColumnType::Text: return "text";
    case ColumnType::Sym: return "sym";
    case ColumnType::Addr: return "addr";
    case ColumnType::GSet: return "gset";
    case ColumnType::MaxInt: return "maxint";
    case ColumnType::BoolOr: return "boolor";
    case ColumnType::TwoPSet: return "2p";
  }
  return "?";
}

bool is_lattice_column(ColumnType t) {
  return t == ColumnType::GSet || t == ColumnType::MaxInt || t == ColumnType::BoolOr ||
         t == ColumnType::TwoPSet;
}

bool column_accepts(ColumnType t, const Value& v) {
  switch (t) {
    case ColumnType::Any: return !v.is_lattice();
    case ColumnType::Int: return v.kind() == ValueKind::Int;
    case ColumnType::Text: return v.kind() == ValueKind::Text;
    case ColumnType::Sym: return v.kind() == ValueKind::Symbol;
    case ColumnType::Addr: return v.kind() == ValueKind::Address;
    default: return v.is_lattice() && v.as_lattice().kind() == lattice_kind_of(t);
  }
}

bool RelationSchema::has_lattice_columns() const {
  return std::any_of(columns.begin(), columns.end(), is_lattice_column);
}

std::vector<Value> RelationSchema::key_of(const Fact& f) const {
  std::vector<Value> key;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (!is_lattice_column(columns[i])) key.push_back(f.arg(i));
  }
  return key;
}

void Database::declare(const RelationSchema& schema) {
  auto it = relations_.find(schema.name);
  if (it != relations_.end()) {
    check_compatible(it->second.schema, schema);
    return;
  }
  relations_.emplace(schema.name, Relation{schema, {}});
}

const RelationSchema* Database::schema(Symbol name) const {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second.schema;
}

Database::Relation& Database::relation_for(const Fact& f) {
  auto it = relations_.find(f.relation());
  if (it == relations_.end()) {
    throw SchemaError("fact " + f.str() + " for undeclared relation '" + f.relation().name() + "'");
  }
  const auto& schema = it->second.schema;
  if (f.arity() != schema.arity()) {
    throw SchemaError("fact " + f.str() + " has arity " + std::to_string(f.arity()) + ", relation '" +
                      schema.name.name() + "' has arity " + std::to_string(schema.arity()));
  }
  for (std::size_t i = 0; i < f.arity(); ++i) {
    if (!column_accepts(schema.columns[i], f.arg(i))) {
      throw SchemaError("fact " + f.str() + ": column " + std::to_string(i + 1) + " expects " +
                        column_type_name(schema.columns[i]));
    }
  }
  return it->second;
}

bool Database::insert(const Fact& f, Fact* stored) {
  Relation& rel = relation_for(f);
  if (!rel.schema.has_lattice_columns()) {
    bool added = rel.facts.insert(f).second;
    if (stored != nullptr) *stored = f;
    return added;
  }
  const auto key = rel.schema.key_of(f);
  for (auto it = rel.facts.begin(); it != rel.facts.end(); ++it) {
    if (rel.schema.key_of(*it) != key) continue;
    Fact merged = merge_facts(rel.schema, *it, f);
    if (stored != nullptr) *stored = merged;
    if (merged == *it) return false;
    rel.facts.erase(it);
    rel.facts.insert(std::move(merged));
    return true;
  }
  rel.facts.insert(f);
  if (stored != nullptr) *stored = f;
  return true;
}

bool Database::erase(const Fact& f) {
  auto it = relations_.find(f.relation());
  if (it == relations_.end()) return false;
  return it->second.facts.erase(f) > 0;
}

bool Database::contains(const Fact& f) const {
  auto it = relations_.find(f.relation());
  return it != relations_.end() && it->second.facts.count(f) != 0;
}

const std::set<Fact>& Database::facts(Symbol relation) const {
  auto it = relations_.find(relation);
  return it == relations_.end() ? kNoFacts : it->second.facts;
}

std::vector<Fact> Database::all_facts() const {
  std::vector<Fact> out;
  for (const auto& [name, rel] : relations_) out.insert(out.end(), rel.facts.begin(), rel.facts.end());
  return out;
}

std::size_t Database::size() const {
  std::size_t n = 0;
  for (const auto& [name, rel] : relations_) n += rel.facts.size();
  return n;
}

bool operator==(const Database& a, const Database& b) {
  auto ia = a.relations_.begin();
  auto ib = b.relations_.begin();
  auto skip_empty = [](auto& it, const auto& end) {
    while (it != end && it->second.facts.empty()) ++it;
  };
  while (true) {
    skip_empty(ia, a.relations_.end());
    skip_empty(ib, b.relations_.end());
    if (ia == a.relations_.end() || ib == b.relations_.end()) {
      return ia == a.relations_.end() && ib == b.relations_.end();
    }
    if (ia->first != ib->first || ia->second.facts != ib->second.facts) return false;
    ++ia;
    ++ib;
  }
}

Database db_union(const Database& a, const Database& b) {
  Database out = a;
  for (const auto& [name, rel] : b.relations()) out.declare(rel.schema);
  for (const auto& [name, rel] : b.relations()) {
    for (const auto& f : rel.facts) out.insert(f);
  }
  return out;
}

bool db_leq(const Database& a, const Database& b) {
  for (const auto& [name, rel] : a.relations()) {
    const RelationSchema* other = b.schema(name);
    if (other != nullptr) check_compatible(rel.schema, *other);
    if (rel.facts.empty()) continue;
    if (other == nullptr) return false;
    const auto& bfacts = b.facts(name);
    if (!rel.schema.has_lattice_columns()) {
      if (!std::includes(bfacts.begin(), bfacts.end(), rel.facts.begin(), rel.facts.end())) {
        return false;
      }
      continue;
    }
    for (const auto& f : rel.facts) {
      bool covered = std::any_of(bfacts.begin(), bfacts.end(),
                                 [&](const Fact& g) { return fact_leq(rel.schema, f, g); });
      if (!covered) return false;
    }
  }
  return true;
}

Database apply_delta(const Database& db, const Delta& d) {
  for (const auto& f : d.inserts) {
    if (d.deletes.count(f) != 0) {
      throw DeltaError("ambiguous delta: " + f.str() + " is both inserted and deleted");
    }
  }
  Database out = db;
  for (const auto& f : d.deletes) out.erase(f);
  for (const auto& f : d.inserts) out.insert(f);
  return out;
}

}  // namespace calm
