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

#ifndef INCLUDE_CALM_RELSPACE_SCALAR_HPP_
#define INCLUDE_CALM_RELSPACE_SCALAR_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <variant>

namespace calm {

// Interned identifier. Equality is pointer equality; ordering is by name so
// that iteration over symbol-keyed containers is canonical.
class Symbol {
 public:
  Symbol();
  explicit Symbol(std::string_view name);

  const std::string& name() const { return *name_; }
  std::size_t hash() const { return std::hash<const void*>()(name_); }

  friend bool operator==(Symbol a, Symbol b) { return a.name_ == b.name_; }
  friend bool operator!=(Symbol a, Symbol b) { return a.name_ != b.name_; }
  friend bool operator<(Symbol a, Symbol b) {
    return a.name_ != b.name_ && *a.name_ < *b.name_;
  }

 private:
  const std::string* name_;
};

// Opaque name of a network node.
class Address {
 public:
  Address() = default;
  explicit Address(std::string_view name) : id_(name) {}
  explicit Address(Symbol id) : id_(id) {}

  const std::string& name() const { return id_.name(); }
  Symbol id() const { return id_; }

  friend bool operator==(Address a, Address b) { return a.id_ == b.id_; }
  friend bool operator!=(Address a, Address b) { return a.id_ != b.id_; }
  friend bool operator<(Address a, Address b) { return a.id_ < b.id_; }

 private:
  Symbol id_;
};

struct Text {
  std::string value;

  friend bool operator==(const Text& a, const Text& b) { return a.value == b.value; }
  friend bool operator!=(const Text& a, const Text& b) { return a.value != b.value; }
  friend bool operator<(const Text& a, const Text& b) { return a.value < b.value; }
};

// Non-lattice column values. Variant index doubles as type rank:
// integer < text < symbol < address.
using Scalar = std::variant<std::int64_t, Text, Symbol, Address>;

std::size_t hash_scalar(const Scalar& s);

// Literal form used by the fact text format: 5, "text", sym, 'Sym with space', @M1.
std::string scalar_literal(const Scalar& s);

bool is_plain_identifier(std::string_view s);

}  // namespace calm

template <>
struct std::hash<calm::Symbol> {
  std::size_t operator()(calm::Symbol s) const noexcept { return s.hash(); }
};

#endif  // INCLUDE_CALM_RELSPACE_SCALAR_HPP_
