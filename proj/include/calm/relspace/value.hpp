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

#ifndef INCLUDE_CALM_RELSPACE_VALUE_HPP_
#define INCLUDE_CALM_RELSPACE_VALUE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "calm/lattices/lattice.hpp"
#include "calm/relspace/scalar.hpp"

namespace calm {

enum class ValueKind { Int, Text, Symbol, Address, Lattice };

// A column value: one of the scalar kinds, or a lattice value (only in
// relations that declare lattice columns). Totally ordered by kind rank, then
// by the natural order within the kind.
class Value {
 public:
  using Variant = std::variant<std::int64_t, Text, Symbol, Address, LatticeValue>;

  Value() : v_(std::int64_t{0}) {}
  Value(std::int64_t i) : v_(i) {}                 // NOLINT
  Value(int i) : v_(std::int64_t{i}) {}            // NOLINT
  Value(Text t) : v_(std::move(t)) {}              // NOLINT
  Value(Symbol s) : v_(s) {}                       // NOLINT
  Value(Address a) : v_(a) {}                      // NOLINT
  Value(LatticeValue l) : v_(std::move(l)) {}      // NOLINT
  Value(const Scalar& s);                          // NOLINT

  static Value sym(std::string_view name) { return Value(Symbol(name)); }
  static Value text(std::string s) { return Value(Text{std::move(s)}); }
  static Value addr(std::string_view name) { return Value(Address(name)); }

  ValueKind kind() const { return static_cast<ValueKind>(v_.index()); }
  bool is_lattice() const { return kind() == ValueKind::Lattice; }

  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  const Text& as_text() const { return std::get<Text>(v_); }
  Symbol as_symbol() const { return std::get<Symbol>(v_); }
  Address as_address() const { return std::get<Address>(v_); }
  const LatticeValue& as_lattice() const { return std::get<LatticeValue>(v_); }

  // Empty for lattice values.
  std::optional<Scalar> to_scalar() const;

  const Variant& variant() const { return v_; }
  std::size_t hash() const;
  std::string literal() const;

  friend bool operator==(const Value& a, const Value& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Value& a, const Value& b) { return !(a.v_ == b.v_); }
  friend bool operator<(const Value& a, const Value& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Value& a, const Value& b) { return !(b.v_ < a.v_); }

 private:
  Variant v_;
};

const char* value_kind_name(ValueKind k);

}  // namespace calm

#endif  // INCLUDE_CALM_RELSPACE_VALUE_HPP_
