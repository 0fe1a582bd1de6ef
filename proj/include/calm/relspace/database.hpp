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

#ifndef INCLUDE_CALM_RELSPACE_DATABASE_HPP_
#define INCLUDE_CALM_RELSPACE_DATABASE_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "calm/relspace/fact.hpp"

namespace calm {

enum class ColumnType { Any, Int, Text, Sym, Addr, GSet, MaxInt, BoolOr, TwoPSet };

const char* column_type_name(ColumnType t);
bool is_lattice_column(ColumnType t);
bool column_accepts(ColumnType t, const Value& v);

struct RelationSchema {
  Symbol name;
  std::vector<ColumnType> columns;

  std::size_t arity() const { return columns.size(); }
  bool has_lattice_columns() const;
  // Values of the non-lattice columns; facts with equal keys merge.
  std::vector<Value> key_of(const Fact& f) const;

  friend bool operator==(const RelationSchema& a, const RelationSchema& b) {
    return a.name == b.name && a.columns == b.columns;
  }
};

// Named relations of ground facts with set semantics. Relations with lattice
// columns hold at most one fact per key (the non-lattice columns); inserting a
// fact with an existing key stores the column-wise merge.
class Database {
 public:
  struct Relation {
    RelationSchema schema;
    std::set<Fact> facts;
  };

  // Idempotent for an identical schema; SchemaError if the name is already
  // declared with a different shape.
  void declare(const RelationSchema& schema);
  bool declared(Symbol name) const { return relations_.count(name) != 0; }
  const RelationSchema* schema(Symbol name) const;

  // Returns true if the database changed. When `stored` is non-null it
  // receives the fact as it now sits in the relation (post-merge).
  bool insert(const Fact& f, Fact* stored = nullptr);
  bool erase(const Fact& f);
  bool contains(const Fact& f) const;

  const std::set<Fact>& facts(Symbol relation) const;
  const std::map<Symbol, Relation>& relations() const { return relations_; }
  std::vector<Fact> all_facts() const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  // Copy holding only the relations accepted by `keep` (schemas included).
  template <typename Pred>
  Database filter(Pred keep) const {
    Database out;
    for (const auto& [name, rel] : relations_) {
      if (keep(rel.schema)) out.relations_.emplace(name, rel);
    }
    return out;
  }

  // Fact-level equality; declared-but-empty relations are ignored.
  friend bool operator==(const Database& a, const Database& b);
  friend bool operator!=(const Database& a, const Database& b) { return !(a == b); }

 private:
  Relation& relation_for(const Fact& f);

  std::map<Symbol, Relation> relations_;
};

struct Delta {
  std::set<Fact> inserts;
  std::set<Fact> deletes;
};

// Least upper bound under db_leq. SchemaError if a relation name is declared
// with different shapes in a and b.
Database db_union(const Database& a, const Database& b);

// True iff every fact of a is in b (for lattice relations: b holds a fact
// with the same key whose lattice columns are above a's).
bool db_leq(const Database& a, const Database& b);

// (db \ deletes) ∪ inserts. DeltaError if the batch is ambiguous.
Database apply_delta(const Database& db, const Delta& d);

}  // namespace calm

#endif  // INCLUDE_CALM_RELSPACE_DATABASE_HPP_
