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

#include "calm/relspace/value.hpp"

namespace calm {

Value::Value(const Scalar& s) {
  std::visit([this](const auto& v) { v_ = v; }, s);
}

std::optional<Scalar> Value::to_scalar() const {
  switch (kind()) {
    case ValueKind::Int: return Scalar{as_int()};
    case ValueKind::Text: return Scalar{as_text()};
    case ValueKind::Symbol: return Scalar{as_symbol()};
    case ValueKind::Address: return Scalar{as_address()};
    case ValueKind::Lattice: return std::nullopt;
  }
  return std::nullopt;
}

std::size_t Value::hash() const {
  if (is_lattice()) return as_lattice().hash() ^ 0x5bd1e995;
  return hash_scalar(*to_scalar());
}

std::string Value::literal() const {
  if (is_lattice()) return as_lattice().literal();
  return scalar_literal(*to_scalar());
}

const char* value_kind_name(ValueKind k) {
  switch (k) {
    case ValueKind::Int: return "int";
    case ValueKind::Text: return "text";
    case ValueKind::Symbol: return "sym";
    case ValueKind::Address: return "addr";
    case ValueKind::Lattice: return "lattice";
  }
  return "?";
}

}  // namespace calm
