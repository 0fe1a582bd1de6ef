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

#ifndef INCLUDE_CALM_LATTICES_LATTICE_HPP_
#define INCLUDE_CALM_LATTICES_LATTICE_HPP_

#include <cstdint>
#include <set>
#include <string>
#include <variant>

#include "calm/relspace/scalar.hpp"

namespace calm {

// Grow-only set; join is union.
struct GSet {
  std::set<Scalar> items;

  friend bool operator==(const GSet& a, const GSet& b) { return a.items == b.items; }
  friend bool operator<(const GSet& a, const GSet& b) { return a.items < b.items; }
};

// Integer register; join is max.
struct MaxInt {
  std::int64_t value = 0;

  friend bool operator==(const MaxInt& a, const MaxInt& b) { return a.value == b.value; }
  friend bool operator<(const MaxInt& a, const MaxInt& b) { return a.value < b.value; }
};

// Boolean flag; join is or.
struct BoolOr {
  bool value = false;

  friend bool operator==(const BoolOr& a, const BoolOr& b) { return a.value == b.value; }
  friend bool operator<(const BoolOr& a, const BoolOr& b) { return a.value < b.value; }
};

// Two-phase (tombstone) set: a pair of grow-only sets. An element is visible
// while it is added and not tombstoned; once tombstoned it stays hidden.
struct TwoPSet {
  GSet added;
  GSet tombstoned;

  friend bool operator==(const TwoPSet& a, const TwoPSet& b) {
    return a.added == b.added && a.tombstoned == b.tombstoned;
  }
  friend bool operator<(const TwoPSet& a, const TwoPSet& b) {
    if (!(a.added == b.added)) return a.added < b.added;
    return a.tombstoned < b.tombstoned;
  }
};

enum class LatticeKind { GSet, MaxInt, BoolOr, TwoPSet };

const char* lattice_kind_name(LatticeKind k);

class LatticeValue {
 public:
  using Variant = std::variant<GSet, MaxInt, BoolOr, TwoPSet>;

  LatticeValue() : v_(GSet{}) {}
  LatticeValue(GSet s) : v_(std::move(s)) {}           // NOLINT
  LatticeValue(MaxInt m) : v_(m) {}                    // NOLINT
  LatticeValue(BoolOr b) : v_(b) {}                    // NOLINT
  LatticeValue(TwoPSet t) : v_(std::move(t)) {}        // NOLINT

  // Least element of the given variant.
  static LatticeValue bottom(LatticeKind kind);

  LatticeKind kind() const { return static_cast<LatticeKind>(v_.index()); }
  const Variant& variant() const { return v_; }

  template <typename T>
  const T& as() const { return std::get<T>(v_); }

  std::size_t hash() const;

  // Literal form: gset{a, b}, maxint(5), boolor(true), 2p{added:{..}, tomb:{..}}.
  std::string literal() const;

  // Structural total order used for canonical iteration; unrelated to leq.
  friend bool operator==(const LatticeValue& a, const LatticeValue& b) { return a.v_ == b.v_; }
  friend bool operator!=(const LatticeValue& a, const LatticeValue& b) { return !(a.v_ == b.v_); }
  friend bool operator<(const LatticeValue& a, const LatticeValue& b) { return a.v_ < b.v_; }

 private:
  Variant v_;
};

namespace lattices {

// Least upper bound. Throws LatticeTypeError on variant mismatch.
LatticeValue merge(const LatticeValue& a, const LatticeValue& b);

// Partial order of the variant. Throws LatticeTypeError on variant mismatch.
bool leq(const LatticeValue& a, const LatticeValue& b);

GSet twopset_visible(const TwoPSet& s);

GSet gset_union(const GSet& a, const GSet& b);
bool gset_subset(const GSet& a, const GSet& b);

}  // namespace lattices
}  // namespace calm

#endif  // INCLUDE_CALM_LATTICES_LATTICE_HPP_
