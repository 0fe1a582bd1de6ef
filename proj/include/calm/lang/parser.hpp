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

#ifndef INCLUDE_CALM_LANG_PARSER_HPP_
#define INCLUDE_CALM_LANG_PARSER_HPP_

#include <string>
#include <string_view>

#include "calm/lang/ast.hpp"

namespace calm::lang {

// Parses `.calm` source. Throws ParseError (line:col) on lexical or syntax
// errors and on duplicate relation declarations.
Program parse_program(std::string_view text);

// Source text that parses back to a structurally identical Program.
std::string print_program(const Program& p);
std::string print_rule(const Rule& r);
std::string print_term(const Term& t);
std::string print_atom(const Atom& a);

}  // namespace calm::lang

#endif  // INCLUDE_CALM_LANG_PARSER_HPP_
