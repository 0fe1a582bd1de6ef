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

#ifndef INCLUDE_CALM_RELSPACE_JSON_HPP_
#define INCLUDE_CALM_RELSPACE_JSON_HPP_

#include <string>

#include "calm/relspace/database.hpp"
#include <json.hpp>

namespace calm {

// Value encoding: integers as numbers, symbols as strings, text as
// {"text": ...}, addresses as {"addr": ...}, lattices as {"gset": [...]},
// {"maxint": n}, {"boolor": b}, {"2p": {"added": [...], "tomb": [...]}}.
nlohmann::json value_to_json(const Value& v);
nlohmann::json fact_to_json(const Fact& f);

// {"relname": [[args...], ...], ...}; relations sorted by name, facts in
// total order, empty relations omitted.
nlohmann::json database_to_json(const Database& db);

// Byte-stable serialization of database_to_json.
std::string canonical(const Database& db);

}  // namespace calm

#endif  // INCLUDE_CALM_RELSPACE_JSON_HPP_
