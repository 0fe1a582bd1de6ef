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

#ifndef INCLUDE_CALM_RELSPACE_FACT_TEXT_HPP_
#define INCLUDE_CALM_RELSPACE_FACT_TEXT_HPP_

#include <string>
#include <string_view>

#include "calm/relspace/database.hpp"

namespace calm {

// Fixture text: one `rel(v1, v2, ...)` per line, optional trailing '.', and
// '#' comments. Values: 42, "text", sym, 'Any Symbol', @M1, gset{a, b},
// maxint(5), boolor(true), 2p{added:{a}, tomb:{}}.
//
// `schemas` supplies the relations that may appear; the result carries those
// schemas plus the parsed facts. Throws ParseError (with line:col) on syntax
// errors, undeclared relations and schema violations.
Database parse_facts(std::string_view text, const Database& schemas);

// Single fact, same syntax.
Fact parse_fact(std::string_view text, const Database& schemas);

// Canonical fact text: facts in total order, one per line.
std::string format_facts(const Database& db);

}  // namespace calm

#endif  // INCLUDE_CALM_RELSPACE_FACT_TEXT_HPP_
