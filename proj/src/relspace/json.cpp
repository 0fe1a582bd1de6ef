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

#include "calm/relspace/json.hpp"

namespace calm {
namespace {

nlohmann::json scalar_to_json(const Scalar& s) {
  return value_to_json(Value(s));
}

nlohmann::json gset_to_json(const GSet& g) {
  auto arr = nlohmann::json::array();
  for (const auto& item : g.items) arr.push_back(scalar_to_json(item));
  return arr;
}

}  // namespace

nlohmann::json value_to_json(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Int: return v.as_int();
    case ValueKind::Text: return {{"text", v.as_text().value}};
    case ValueKind::Symbol: return v.as_symbol().name();
    case ValueKind::Address: return {{"addr", v.as_address().name()}};
    case ValueKind::Lattice: break;
  }
  const auto& l = v.as_lattice();
  switch (l.kind()) {
    case LatticeKind::GSet: return {{"gset", gset_to_json(l.as<GSet>())}};
    case LatticeKind::MaxInt: return {{"maxint", l.as<MaxInt>().value}};
    case LatticeKind::BoolOr: return {{"boolor", l.as<BoolOr>().value}};
    case LatticeKind::TwoPSet: {
      const auto& t = l.as<TwoPSet>();
      return {{"2p", {{"added", gset_to_json(t.added)}, {"tomb", gset_to_json(t.tombstoned)}}}};
    }
  }
  return nullptr;
}

nlohmann::json fact_to_json(const Fact& f) {
  auto args = nlohmann::json::array();
  for (const auto& a : f.args()) args.push_back(value_to_json(a));
  return args;
}

nlohmann::json database_to_json(const Database& db) {
  auto out = nlohmann::json::object();
  for (const auto& [name, rel] : db.relations()) {
    if (rel.facts.empty()) continue;
    auto facts = nlohmann::json::array();
    for (const auto& f : rel.facts) facts.push_back(fact_to_json(f));
    out[name.name()] = std::move(facts);
  }
  return out;
}

std::string canonical(const Database& db) { return database_to_json(db).dump(); }

}  // namespace calm
