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

#include "calm/lattices/lattice.hpp"

#include <algorithm>

#include "calm/error.hpp"

namespace calm {
namespace {

std::string gset_literal(const GSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& item : s.items) {
    if (!first) out += ", ";
    first = false;
    out += scalar_literal(item);
  }
  return out + "}";
}

void require_same_kind(const LatticeValue& a, const LatticeValue& b, const char* op) {
  if (a.kind() != b.kind()) {
    throw LatticeTypeError(std::string("lattice ") + op + ": variant mismatch (" +
                           lattice_kind_name(a.kind()) + " vs " +
                           lattice_kind_name(b.kind()) + ")");
  }
}

}  // namespace

const char* lattice_kind_name(LatticeKind k) {
  switch (k) {
    case LatticeKind::GSet: return "gset";
    case LatticeKind::MaxInt: return "maxint";
    case LatticeKind::BoolOr: return "boolor";
    case LatticeKind::TwoPSet: return "2p";
  }
  return "?";
}

LatticeValue LatticeValue::bottom(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::GSet: return GSet{};
    case LatticeKind::MaxInt: return MaxInt{INT64_MIN};
    case LatticeKind::BoolOr: return BoolOr{false};
    case LatticeKind::TwoPSet: return TwoPSet{};
  }
  return GSet{};
}

std::size_t LatticeValue::hash() const {
  std::size_t h = v_.index() * 0x51ed270b27dULL;
  auto mix = [&h](std::size_t x) { h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GSet>) {
          for (const auto& s : v.items) mix(hash_scalar(s));
        } else if constexpr (std::is_same_v<T, TwoPSet>) {
          for (const auto& s : v.added.items) mix(hash_scalar(s));
          mix(0xabcdef);
          for (const auto& s : v.tombstoned.items) mix(hash_scalar(s));
        } else if constexpr (std::is_same_v<T, MaxInt>) {
          mix(std::hash<std::int64_t>()(v.value));
        } else {
          mix(v.value ? 1 : 2);
        }
      },
      v_);
  return h;
}

std::string LatticeValue::literal() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GSet>) {
          return "gset" + gset_literal(v);
        } else if constexpr (std::is_same_v<T, MaxInt>) {
          return "maxint(" + std::to_string(v.value) + ")";
        } else if constexpr (std::is_same_v<T, BoolOr>) {
          return std::string("boolor(") + (v.value ? "true" : "false") + ")";
        } else {
          return "2p{added:" + gset_literal(v.added) + ", tomb:" + gset_literal(v.tombstoned) + "}";
        }
      },
      v_);
}

namespace lattices {

GSet gset_union(const GSet& a, const GSet& b) {
  GSet out = a;
  out.items.insert(b.items.begin(), b.items.end());
  return out;
}

bool gset_subset(const GSet& a, const GSet& b) {
  return std::includes(b.items.begin(), b.items.end(), a.items.begin(), a.items.end());
}

LatticeValue merge(const LatticeValue& a, const LatticeValue& b) {
  require_same_kind(a, b, "merge");
  switch (a.kind()) {
    case LatticeKind::GSet:
      return gset_union(a.as<GSet>(), b.as<GSet>());
    case LatticeKind::MaxInt:
      return MaxInt{std::max(a.as<MaxInt>().value, b.as<MaxInt>().value)};
    case LatticeKind::BoolOr:
      return BoolOr{a.as<BoolOr>().value || b.as<BoolOr>().value};
    case LatticeKind::TwoPSet: {
      const auto& x = a.as<TwoPSet>();
      const auto& y = b.as<TwoPSet>();
      return TwoPSet{gset_union(x.added, y.added), gset_union(x.tombstoned, y.tombstoned)};
    }
  }
  return a;
}

bool leq(const LatticeValue& a, const LatticeValue& b) {
  require_same_kind(a, b, "leq");
  switch (a.kind()) {
    case LatticeKind::GSet:
      return gset_subset(a.as<GSet>(), b.as<GSet>());
    case LatticeKind::MaxInt:
      return a.as<MaxInt>().value <= b.as<MaxInt>().value;
    case LatticeKind::BoolOr:
      return !a.as<BoolOr>().value || b.as<BoolOr>().value;
    case LatticeKind::TwoPSet: {
      const auto& x = a.as<TwoPSet>();
      const auto& y = b.as<TwoPSet>();
      return gset_subset(x.added, y.added) && gset_subset(x.tombstoned, y.tombstoned);
    }
  }
  return false;
}

GSet twopset_visible(const TwoPSet& s) {
  GSet out;
  std::set_difference(s.added.items.begin(), s.added.items.end(), s.tombstoned.items.begin(),
                      s.tombstoned.items.end(), std::inserter(out.items, out.items.end()));
  return out;
}

}  // namespace lattices
}  // namespace calm
