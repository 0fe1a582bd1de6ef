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

#include "calm/relspace/fact_text.hpp"

#include <cctype>
#include <optional>

#include "calm/error.hpp"

namespace calm {
namespace {

class FactReader {
 public:
  explicit FactReader(std::string_view text) : text_(text) {}

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  Fact read_fact() {
    skip_space();
    std::size_t start = pos_;
    std::string name = identifier();
    if (name.empty()) fail("expected relation name");
    std::vector<Value> args;
    skip_space_inline();
    if (peek() == '(') {
      ++pos_;
      skip_space();
      if (peek() != ')') {
        while (true) {
          args.push_back(value());
          skip_space();
          if (peek() == ',') {
            ++pos_;
            continue;
          }
          break;
        }
      }
      expect(')');
    }
    skip_space_inline();
    if (peek() == '.') ++pos_;
    last_start_ = start;
    return Fact(Symbol(name), std::move(args));
  }

  SourceLoc last_start() const { return loc_at(last_start_); }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(loc(), message); }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  SourceLoc loc() const { return loc_at(pos_); }

  SourceLoc loc_at(std::size_t pos) const {
    SourceLoc l{1, 1};
    for (std::size_t i = 0; i < pos && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++l.line;
        l.column = 1;
      } else {
        ++l.column;
      }
    }
    return l;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  void skip_space_inline() {
    while (peek() == ' ' || peek() == '\t') ++pos_;
  }

  void expect(char c) {
    skip_space();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string identifier() {
    std::string out;
    if (!ident_start(peek())) return out;
    while (ident_char(peek())) out.push_back(text_[pos_++]);
    return out;
  }

  std::string quoted(char quote) {
    ++pos_;
    std::string out;
    while (true) {
      char c = peek();
      if (c == '\0' || c == '\n') fail("unterminated quoted literal");
      ++pos_;
      if (c == quote) break;
      if (c == '\\') {
        char e = peek();
        ++pos_;
        out.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  Scalar scalar() {
    skip_space();
    char c = peek();
    if (c == '"') return Text{quoted('"')};
    if (c == '\'') return Symbol(quoted('\''));
    if (c == '@') {
      ++pos_;
      if (peek() == '\'') return Address(quoted('\''));
      std::string name = identifier();
      if (name.empty()) fail("expected address name after '@'");
      return Address(name);
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return integer();
    std::string name = identifier();
    if (name.empty()) fail("expected a value");
    return Symbol(name);
  }

  std::int64_t integer() {
    std::size_t start = pos_;
    if (peek() == '-') ++pos_;
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected digits");
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    try {
      return std::stoll(std::string(text_.substr(start, pos_ - start)));
    } catch (const std::out_of_range&) {
      fail("integer out of range");
    }
  }

  GSet scalar_set() {
    expect('{');
    GSet out;
    skip_space();
    if (peek() != '}') {
      while (true) {
        out.items.insert(scalar());
        skip_space();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        break;
      }
    }
    expect('}');
    return out;
  }

  void keyword(std::string_view word) {
    skip_space();
    std::string got = identifier();
    if (got != word) fail("expected '" + std::string(word) + "'");
  }

  std::optional<LatticeValue> lattice() {
    auto lookahead_is = [this](std::string_view word, char next) {
      if (text_.substr(pos_, word.size()) != word) return false;
      std::size_t p = pos_ + word.size();
      while (p < text_.size() && (text_[p] == ' ' || text_[p] == '\t')) ++p;
      return p < text_.size() && text_[p] == next;
    };
    if (lookahead_is("gset", '{')) {
      pos_ += 4;
      return LatticeValue(scalar_set());
    }
    if (lookahead_is("maxint", '(')) {
      pos_ += 6;
      expect('(');
      skip_space();
      std::int64_t v = integer();
      expect(')');
      return LatticeValue(MaxInt{v});
    }
    if (lookahead_is("boolor", '(')) {
      pos_ += 6;
      expect('(');
      skip_space();
      std::string word = identifier();
      if (word != "true" && word != "false") fail("expected true or false");
      expect(')');
      return LatticeValue(BoolOr{word == "true"});
    }
    if (lookahead_is("2p", '{')) {
      pos_ += 2;
      expect('{');
      keyword("added");
      expect(':');
      GSet added = scalar_set();
      expect(',');
      keyword("tomb");
      expect(':');
      GSet tomb = scalar_set();
      expect('}');
      return LatticeValue(TwoPSet{std::move(added), std::move(tomb)});
    }
    return std::nullopt;
  }

  Value value() {
    skip_space();
    if (auto l = lattice()) return Value(std::move(*l));
    return Value(scalar());
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t last_start_ = 0;
};

}  // namespace

Database parse_facts(std::string_view text, const Database& schemas) {
  Database db = schemas.filter([](const RelationSchema&) { return true; });
  FactReader reader(text);
  while (!reader.at_end()) {
    Fact f = reader.read_fact();
    if (!db.declared(f.relation())) {
      throw ParseError(reader.last_start(), "relation '" + f.relation().name() +
                                                "' is not an input relation of this program");
    }
    try {
      db.insert(f);
    } catch (const SchemaError& e) {
      throw ParseError(reader.last_start(), e.what());
    }
  }
  return db;
}

Fact parse_fact(std::string_view text, const Database& schemas) {
  Database db = parse_facts(text, schemas);
  auto facts = db.all_facts();
  if (facts.size() != 1) throw ParseError(SourceLoc{1, 1}, "expected exactly one fact");
  return facts.front();
}

std::string format_facts(const Database& db) {
  std::string out;
  for (const auto& f : db.all_facts()) out += f.str() + "\n";
  return out;
}

}  // namespace calm
