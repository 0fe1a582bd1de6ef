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

#include "calm/relspace/scalar.hpp"

#include <mutex>
#include <unordered_set>

namespace calm {
namespace {

const std::string* intern(std::string_view name) {
  static std::mutex mu;
  static std::unordered_set<std::string> pool;
  std::lock_guard<std::mutex> lock(mu);
  return &*pool.emplace(name).first;
}

std::string escape(std::string_view s, char quote) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back(quote);
  for (char c : s) {
    if (c == quote || c == '\\') {
      out.push_back('\\');
      out.push_back(c);
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\t') {
      out += "\\t";
    } else {
      out.push_back(c);
    }
  }
  out.push_back(quote);
  return out;
}

}  // namespace

Symbol::Symbol() : name_(intern("")) {}

Symbol::Symbol(std::string_view name) : name_(intern(name)) {}

bool is_plain_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  if (!alpha(s[0])) return false;
  for (char c : s) {
    if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
  }
  return true;
}

std::size_t hash_scalar(const Scalar& s) {
  std::size_t h = s.index() * 0x9e3779b97f4a7c15ULL;
  std::visit(
      [&h](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          h ^= std::hash<std::int64_t>()(v);
        } else if constexpr (std::is_same_v<T, Text>) {
          h ^= std::hash<std::string>()(v.value);
        } else if constexpr (std::is_same_v<T, Symbol>) {
          h ^= v.hash();
        } else {
          h ^= v.id().hash() * 31;
        }
      },
      s);
  return h;
}

std::string scalar_literal(const Scalar& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, Text>) {
          return escape(v.value, '"');
        } else if constexpr (std::is_same_v<T, Symbol>) {
          if (is_plain_identifier(v.name())) return v.name();
          return escape(v.name(), '\'');
        } else {
          if (is_plain_identifier(v.name())) return "@" + v.name();
          return "@" + escape(v.name(), '\'');
        }
      },
      s);
}

}  // namespace calm
