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

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "calm/error.hpp"
#include "calm/relspace/database.hpp"
#include "calm/relspace/fact_text.hpp"
#include "calm/relspace/json.hpp"

namespace calm {
namespace {

RelationSchema schema(const char* name, std::vector<ColumnType> cols) {
  return RelationSchema{Symbol(name), std::move(cols)};
}

Database schemas() {
  Database db;
  db.declare(schema("e", {ColumnType::Sym, ColumnType::Sym}));
  db.declare(schema("cart", {ColumnType::Sym}));
  db.declare(schema("n", {ColumnType::Int}));
  db.declare(schema("tag", {ColumnType::Sym, ColumnType::GSet}));
  return db;
}

Fact sym_fact(const char* rel, std::vector<const char*> args) {
  std::vector<Value> v;
  for (const char* a : args) v.push_back(Value::sym(a));
  return Fact(rel, std::move(v));
}

Database random_db(std::mt19937_64& rng) {
  Database db = schemas();
  std::uniform_int_distribution<int> count(0, 8);
  std::uniform_int_distribution<int> node(0, 4);
  auto name = [&] { return Value::sym("T" + std::to_string(node(rng))); };
  for (int i = count(rng); i > 0; --i) db.insert(Fact("e", {name(), name()}));
  for (int i = count(rng); i > 0; --i) db.insert(Fact("cart", {name()}));
  for (int i = count(rng); i > 0; --i) db.insert(Fact("n", {Value(node(rng) - 2)}));
  for (int i = count(rng) / 2; i > 0; --i) {
    GSet g;
    g.items.insert(Symbol("I" + std::to_string(node(rng))));
    db.insert(Fact("tag", {name(), Value(LatticeValue(g))}));
  }
  return db;
}

Delta random_delta(const Database& db, std::mt19937_64& rng) {
  Delta d;
  std::uniform_int_distribution<int> node(0, 5);
  for (int i = 0; i < 3; ++i) {
    d.inserts.insert(Fact("e", {Value::sym("T" + std::to_string(node(rng))), Value::sym("T9")}));
  }
  for (const auto& f : db.all_facts()) {
    if (f.relation().name() != "tag" && node(rng) == 0 && d.inserts.count(f) == 0) d.deletes.insert(f);
  }
  return d;
}

TEST(DbUnion, EmptyIsIdentity) {
  Database empty;
  EXPECT_EQ(db_union(empty, empty), empty);
  EXPECT_TRUE(db_union(empty, empty).empty());
}

TEST(DbUnion, DisjointSets) {
  Database a = schemas();
  Database b = schemas();
  a.insert(sym_fact("cart", {"I1"}));
  b.insert(sym_fact("cart", {"I2"}));
  Database u = db_union(a, b);
  EXPECT_EQ(u.size(), 2u);
  EXPECT_TRUE(u.contains(sym_fact("cart", {"I1"})));
  EXPECT_TRUE(u.contains(sym_fact("cart", {"I2"})));
}

TEST(DbUnion, ArityMismatchIsSchemaError) {
  Database a;
  Database b;
  a.declare(schema("e", {ColumnType::Sym, ColumnType::Sym}));
  b.declare(schema("e", {ColumnType::Sym}));
  EXPECT_THROW(db_union(a, b), SchemaError);
  EXPECT_THROW(db_leq(a, b), SchemaError);
}

TEST(DbUnion, RandomIdempotentCommutativeAssociative) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    Database a = random_db(rng);
    Database b = random_db(rng);
    Database c = random_db(rng);
    EXPECT_EQ(db_union(a, a), a);
    EXPECT_EQ(db_union(a, b), db_union(b, a));
    EXPECT_EQ(db_union(db_union(a, b), c), db_union(a, db_union(b, c)));
  }
}

TEST(DbLeq, Basics) {
  Database empty;
  Database d = schemas();
  d.insert(sym_fact("e", {"T1", "T2"}));
  EXPECT_TRUE(db_leq(empty, d));
  EXPECT_TRUE(db_leq(d, d));
  Database big = d;
  big.insert(sym_fact("e", {"T2", "T1"}));
  EXPECT_FALSE(db_leq(big, d));
  EXPECT_TRUE(db_leq(d, big));
}

TEST(DbLeq, UnionIsLeastUpperBound) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    Database a = random_db(rng);
    Database b = random_db(rng);
    Database u = db_union(a, b);
    EXPECT_TRUE(db_leq(a, u));
    EXPECT_TRUE(db_leq(b, u));
    Database upper = db_union(u, random_db(rng));
    EXPECT_TRUE(db_leq(a, upper));
    EXPECT_TRUE(db_leq(b, upper));
    EXPECT_TRUE(db_leq(u, upper));
  }
}

TEST(LatticeColumns, InsertMergesOnKey) {
  Database db = schemas();
  GSet g1;
  g1.items.insert(Symbol("I1"));
  GSet g2;
  g2.items.insert(Symbol("I2"));
  db.insert(Fact("tag", {Value::sym("k"), Value(LatticeValue(g1))}));
  db.insert(Fact("tag", {Value::sym("k"), Value(LatticeValue(g2))}));
  ASSERT_EQ(db.facts(Symbol("tag")).size(), 1u);
  const auto& stored = db.facts(Symbol("tag")).begin()->arg(1).as_lattice().as<GSet>();
  EXPECT_EQ(stored.items.size(), 2u);
}

TEST(ApplyDelta, EmptyDeltaIsIdentity) {
  std::mt19937_64 rng(13);
  Database d = random_db(rng);
  EXPECT_EQ(apply_delta(d, Delta{}), d);
}

TEST(ApplyDelta, InsertOnlyGrowth) {
  Database d = schemas();
  d.declare(schema("added", {ColumnType::Sym}));
  d.declare(schema("removed", {ColumnType::Sym}));
  d.insert(sym_fact("added", {"I"}));
  Delta delta;
  delta.inserts.insert(sym_fact("removed", {"I"}));
  Database out = apply_delta(d, delta);
  EXPECT_TRUE(out.contains(sym_fact("added", {"I"})));
  EXPECT_TRUE(out.contains(sym_fact("removed", {"I"})));
  EXPECT_EQ(out.size(), 2u);
}

TEST(ApplyDelta, AmbiguousBatchIsDeltaError) {
  Database d = schemas();
  Delta delta;
  delta.inserts.insert(sym_fact("cart", {"I"}));
  delta.deletes.insert(sym_fact("cart", {"I"}));
  EXPECT_THROW(apply_delta(d, delta), DeltaError);
}

TEST(ApplyDelta, RandomIdempotent) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 50; ++i) {
    Database d = random_db(rng);
    Delta delta = random_delta(d, rng);
    Database once = apply_delta(d, delta);
    EXPECT_EQ(apply_delta(once, delta), once);
  }
}

TEST(Canonical, IndependentOfInsertionOrder) {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 50; ++i) {
    Database d = random_db(rng);
    std::vector<Fact> facts = d.all_facts();
    std::shuffle(facts.begin(), facts.end(), rng);
    Database rebuilt;
    auto names = std::vector<Symbol>{};
    for (const auto& [name, rel] : d.relations()) names.push_back(name);
    std::shuffle(names.begin(), names.end(), rng);
    for (Symbol n : names) rebuilt.declare(*d.schema(n));
    for (const auto& f : facts) rebuilt.insert(f);
    EXPECT_EQ(canonical(rebuilt), canonical(d));
  }
}

TEST(FactText, RoundTrip) {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 20; ++i) {
    Database d = random_db(rng);
    EXPECT_EQ(parse_facts(format_facts(d), schemas()), d);
  }
}

TEST(FactText, CommentsAndValueKinds) {
  Database s;
  s.declare(schema("m", {ColumnType::Int, ColumnType::Text, ColumnType::Sym, ColumnType::Addr}));
  Database d = parse_facts("# header\nm(-3, \"a b\", apple, @M2)\n", s);
  ASSERT_EQ(d.size(), 1u);
  const Fact f = d.all_facts().front();
  EXPECT_EQ(f.arg(0), Value(-3));
  EXPECT_EQ(f.arg(1), Value::text("a b"));
  EXPECT_EQ(f.arg(2), Value::sym("apple"));
  EXPECT_EQ(f.arg(3), Value::addr("M2"));
}

TEST(FactText, UnknownRelationIsLocated) {
  try {
    parse_facts("cart(I1)\nmystery(I2)\n", schemas());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.loc().line, 2);
  }
}

TEST(FactText, WrongColumnTypeRejected) {
  EXPECT_THROW(parse_facts("n(apple)\n", schemas()), ParseError);
}

}  // namespace
}  // namespace calm
