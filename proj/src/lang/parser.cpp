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

#include "calm/lang/parser.hpp"

#include <cctype>
#include <set>
#include <unordered_map>

namespace calm::lang {
namespace {

enum class Tok {
  Ident,     // lowercase-led identifier
  Var,       // uppercase- or underscore-led identifier
  Int,
  String,    // "text"
  QSymbol,   // 'symbol'
  At,
  Star,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Dot,
  Colon,
  Derives,   // :-
  Bang,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Minus,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourceLoc loc;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {"table", "event",  "channel", "input", "output", "gset",
                                          "maxint", "boolor", "count",   "min",   "max"};
  return k;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip();
      SourceLoc loc{line_, col_};
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", loc});
        return out;
      }
      char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string word;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          word.push_back(advance());
        }
        bool var = std::isupper(static_cast<unsigned char>(word[0])) || word[0] == '_';
        out.push_back({var ? Tok::Var : Tok::Ident, word, loc});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string digits;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          digits.push_back(advance());
        }
        if (digits == "2" && pos_ < text_.size() && text_[pos_] == 'p') {
          advance();
          out.push_back({Tok::Ident, "2p", loc});
        } else {
          out.push_back({Tok::Int, digits, loc});
        }
        continue;
      }
      if (c == '"' || c == '\'') {
        out.push_back({c == '"' ? Tok::String : Tok::QSymbol, quoted(c, loc), loc});
        continue;
      }
      advance();
      auto next_is = [this](char n) {
        if (pos_ < text_.size() && text_[pos_] == n) {
          advance();
          return true;
        }
        return false;
      };
      switch (c) {
        case '@': out.push_back({Tok::At, "@", loc}); break;
        case '*': out.push_back({Tok::Star, "*", loc}); break;
        case '(': out.push_back({Tok::LParen, "(", loc}); break;
        case ')': out.push_back({Tok::RParen, ")", loc}); break;
        case '{': out.push_back({Tok::LBrace, "{", loc}); break;
        case '}': out.push_back({Tok::RBrace, "}", loc}); break;
        case ',': out.push_back({Tok::Comma, ",", loc}); break;
        case '.': out.push_back({Tok::Dot, ".", loc}); break;
        case '-': out.push_back({Tok::Minus, "-", loc}); break;
        case '=': out.push_back({Tok::Eq, "=", loc}); break;
        case ':':
          if (next_is('-')) {
            out.push_back({Tok::Derives, ":-", loc});
          } else {
            out.push_back({Tok::Colon, ":", loc});
          }
          break;
        case '!':
          if (next_is('=')) {
            out.push_back({Tok::Ne, "!=", loc});
          } else {
            out.push_back({Tok::Bang, "!", loc});
          }
          break;
        case '<':
          out.push_back(next_is('=') ? Token{Tok::Le, "<=", loc} : Token{Tok::Lt, "<", loc});
          break;
        case '>':
          out.push_back(next_is('=') ? Token{Tok::Ge, ">=", loc} : Token{Tok::Gt, ">", loc});
          break;
        default:
          throw ParseError(loc, std::string("unexpected character '") + c + "'");
      }
    }
  }

 private:
  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#' || (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/')) {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string quoted(char q, SourceLoc loc) {
    advance();
    std::string out;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') throw ParseError(loc, "unterminated literal");
      char c = advance();
      if (c == q) return out;
      if (c == '\\' && pos_ < text_.size()) {
        char e = advance();
        out.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
      } else {
        out.push_back(c);
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program run() {
    Program p;
    std::unordered_map<std::string, SourceLoc> declared;
    while (peek().kind != Tok::End) {
      if (starts_declaration()) {
        RelationDecl d = declaration();
        auto [it, fresh] = declared.emplace(d.name, d.loc);
        if (!fresh) {
          throw ParseError(d.loc, "duplicate declaration of relation '" + d.name +
                                      "' (first declared at " + it->second.str() + ")");
        }
        p.relations.push_back(std::move(d));
      } else {
        p.rules.push_back(rule());
      }
    }
    return p;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }

  Token take() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  bool accept(Tok k) {
    if (peek().kind == k) {
      take();
      return true;
    }
    return false;
  }

  Token expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    return take();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.loc, msg + ", found " + got);
  }

  static bool is_word(const Token& t, std::string_view w) {
    return t.kind == Tok::Ident && t.text == w;
  }

  bool starts_declaration() const {
    const Token& t = peek();
    if (t.kind != Tok::Ident) return false;
    if (t.text != "input" && t.text != "output" && t.text != "table" && t.text != "event" &&
        t.text != "channel") {
      return false;
    }
    // A declaration keyword is followed by another keyword or the relation name.
    return peek(1).kind == Tok::Ident;
  }

  RelationDecl declaration() {
    RelationDecl d;
    d.loc = peek().loc;
    bool kind_seen = false;
    while (true) {
      const Token& t = peek();
      if (is_word(t, "input") && !kind_seen) {
        if (d.input) fail("repeated 'input'");
        d.input = true;
        take();
      } else if (is_word(t, "output") && !kind_seen) {
        if (d.output) fail("repeated 'output'");
        d.output = true;
        take();
      } else if ((is_word(t, "table") || is_word(t, "event") || is_word(t, "channel")) &&
                 !kind_seen && peek(1).kind == Tok::Ident) {
        d.kind = t.text == "table"   ? RelationKind::Table
                 : t.text == "event" ? RelationKind::Event
                                     : RelationKind::Channel;
        kind_seen = true;
        take();
      } else {
        break;
      }
    }
    Token name = expect(Tok::Ident, "relation name");
    if (keywords().count(name.text) != 0) {
      throw ParseError(name.loc, "'" + name.text + "' is a keyword and cannot name a relation");
    }
    d.name = name.text;
    if (accept(Tok::LParen)) {
      if (!accept(Tok::RParen)) {
        do {
          d.columns.push_back(column_type());
        } while (accept(Tok::Comma));
        expect(Tok::RParen, "')'");
      }
    }
    expect(Tok::Dot, "'.' after declaration");
    return d;
  }

  ColumnType column_type() {
    Token t = take();
    if (t.kind == Tok::Ident) {
      static const std::unordered_map<std::string, ColumnType> types = {
          {"any", ColumnType::Any},       {"int", ColumnType::Int},
          {"text", ColumnType::Text},     {"sym", ColumnType::Sym},
          {"addr", ColumnType::Addr},     {"gset", ColumnType::GSet},
          {"maxint", ColumnType::MaxInt}, {"boolor", ColumnType::BoolOr},
          {"2p", ColumnType::TwoPSet}};
      auto it = types.find(t.text);
      if (it != types.end()) return it->second;
    }
    throw ParseError(t.loc, "unknown column type '" + t.text + "'");
  }

  Rule rule() {
    Rule r;
    r.loc = peek().loc;
    r.head = atom(/*head=*/true);
    if (accept(Tok::Derives)) {
      do {
        r.body.push_back(body_element());
      } while (accept(Tok::Comma));
    }
    expect(Tok::Dot, "'.' at end of rule");
    return r;
  }

  bool comparison_ahead(std::size_t ahead) const {
    switch (peek(ahead).kind) {
      case Tok::Eq:
      case Tok::Ne:
      case Tok::Lt:
      case Tok::Le:
      case Tok::Gt:
      case Tok::Ge:
        return true;
      default:
        return false;
    }
  }

  BodyElement body_element() {
    if (peek().kind == Tok::Bang) {
      SourceLoc loc = take().loc;
      Literal lit{atom(false), true};
      lit.atom.loc = loc;
      return lit;
    }
    if (peek().kind == Tok::Ident && keywords().count(peek().text) == 0 && !comparison_ahead(1)) {
      return Literal{atom(false), false};
    }
    Comparison c;
    c.loc = peek().loc;
    c.lhs = term(false);
    Token op = take();
    switch (op.kind) {
      case Tok::Eq: c.op = CmpOp::Eq; break;
      case Tok::Ne: c.op = CmpOp::Ne; break;
      case Tok::Lt: c.op = CmpOp::Lt; break;
      case Tok::Le: c.op = CmpOp::Le; break;
      case Tok::Gt: c.op = CmpOp::Gt; break;
      case Tok::Ge: c.op = CmpOp::Ge; break;
      default: throw ParseError(op.loc, "expected a literal or a comparison");
    }
    c.rhs = term(false);
    return c;
  }

  Atom atom(bool head) {
    Atom a;
    a.loc = peek().loc;
    Token name = expect(Tok::Ident, "relation name");
    if (keywords().count(name.text) != 0) {
      throw ParseError(name.loc, "'" + name.text + "' is a keyword and cannot name a relation");
    }
    a.relation = name.text;
    if (accept(Tok::LParen)) {
      if (!accept(Tok::RParen)) {
        do {
          a.args.push_back(term(head));
        } while (accept(Tok::Comma));
        expect(Tok::RParen, "')'");
      }
    }
    return a;
  }

  std::vector<Term> term_list(Tok close) {
    std::vector<Term> out;
    if (peek().kind == close) return out;
    do {
      out.push_back(term(true));
    } while (accept(Tok::Comma));
    return out;
  }

  Term term(bool head) {
    const Token& t = peek();
    SourceLoc loc = t.loc;
    switch (t.kind) {
      case Tok::Var:
        return Term::variable(take().text, loc);
      case Tok::Int:
        return Term::constant_of(Value(parse_int(take(), false)), loc);
      case Tok::Minus: {
        take();
        Token digits = expect(Tok::Int, "digits after '-'");
        return Term::constant_of(Value(parse_int(digits, true)), loc);
      }
      case Tok::String:
        return Term::constant_of(Value::text(take().text), loc);
      case Tok::QSymbol:
        return Term::constant_of(Value::sym(take().text), loc);
      case Tok::At: {
        take();
        if (accept(Tok::Star)) {
          Term b;
          b.kind = TermKind::Broadcast;
          b.loc = loc;
          return b;
        }
        // '@' before a variable only marks the address column.
        if (peek().kind == Tok::Var) return Term::variable(take().text, loc);
        if (peek().kind == Tok::Ident || peek().kind == Tok::QSymbol) {
          return Term::constant_of(Value::addr(take().text), loc);
        }
        fail("expected address after '@'");
      }
      case Tok::Ident:
        break;
      default:
        fail("expected a term");
    }
    const std::string word = t.text;
    const Tok next = peek(1).kind;
    if ((word == "count" || word == "min" || word == "max") && next == Tok::Lt) {
      take();
      take();
      Token v = expect(Tok::Var, "aggregated variable");
      expect(Tok::Gt, "'>'");
      Term a;
      a.kind = TermKind::Aggregate;
      a.aggregate = word == "count" ? AggregateFn::Count
                    : word == "min" ? AggregateFn::Min
                                    : AggregateFn::Max;
      a.name = v.text;
      a.loc = loc;
      return a;
    }
    if ((word == "gset" || word == "2p") && next == Tok::LBrace) {
      take();
      take();
      Term l;
      l.kind = TermKind::Lattice;
      l.loc = loc;
      if (word == "gset") {
        l.lattice = LatticeKind::GSet;
        l.items = term_list(Tok::RBrace);
      } else {
        l.lattice = LatticeKind::TwoPSet;
        expect_word("added");
        expect(Tok::Colon, "':'");
        expect(Tok::LBrace, "'{'");
        l.items = term_list(Tok::RBrace);
        expect(Tok::RBrace, "'}'");
        expect(Tok::Comma, "','");
        expect_word("tomb");
        expect(Tok::Colon, "':'");
        expect(Tok::LBrace, "'{'");
        l.tomb = term_list(Tok::RBrace);
        expect(Tok::RBrace, "'}'");
      }
      expect(Tok::RBrace, "'}'");
      return l;
    }
    if ((word == "maxint" || word == "boolor") && next == Tok::LParen) {
      take();
      take();
      Term l;
      l.kind = TermKind::Lattice;
      l.loc = loc;
      if (word == "maxint") {
        l.lattice = LatticeKind::MaxInt;
        l.items.push_back(term(head));
      } else {
        l.lattice = LatticeKind::BoolOr;
        Token b = expect(Tok::Ident, "true or false");
        if (b.text != "true" && b.text != "false") throw ParseError(b.loc, "expected true or false");
        l.flag = b.text == "true";
      }
      expect(Tok::RParen, "')'");
      return l;
    }
    take();
    return Term::constant_of(Value::sym(word), loc);
  }

  void expect_word(std::string_view w) {
    if (!is_word(peek(), w)) fail("expected '" + std::string(w) + "'");
    take();
  }

  static std::int64_t parse_int(const Token& t, bool negative) {
    try {
      return std::stoll((negative ? "-" : "") + t.text);
    } catch (const std::out_of_range&) {
      throw ParseError(t.loc, "integer out of range");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string print_columns(const std::vector<ColumnType>& cols) {
  std::string out = "(";
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i > 0) out += ", ";
    out += column_type_name(cols[i]);
  }
  return out + ")";
}

std::string print_name(const std::string& n) {
  bool bare = is_plain_identifier(n) && std::islower(static_cast<unsigned char>(n[0])) && keywords().count(n) == 0;
  if (bare) return n;
  std::string out = "'";
  for (char c : n) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "'";
}

std::string print_constant(const Value& v) {
  if (v.kind() == ValueKind::Symbol) return print_name(v.as_symbol().name());
  if (v.kind() == ValueKind::Address) return "@" + print_name(v.as_address().name());
  return v.literal();
}

std::string print_terms(const std::vector<Term>& ts) {
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i > 0) out += ", ";
    out += print_term(ts[i]);
  }
  return out;
}

}  // namespace

Program parse_program(std::string_view text) { return Parser(Lexer(text).run()).run(); }

std::string print_term(const Term& t) {
  switch (t.kind) {
    case TermKind::Variable: return t.name;
    case TermKind::Wildcard: return "_";
    case TermKind::Constant: return print_constant(t.constant);
    case TermKind::Broadcast: return "@*";
    case TermKind::Aggregate: return std::string(aggregate_name(t.aggregate)) + "<" + t.name + ">";
    case TermKind::Lattice:
      switch (t.lattice) {
        case LatticeKind::GSet: return "gset{" + print_terms(t.items) + "}";
        case LatticeKind::MaxInt: return "maxint(" + print_terms(t.items) + ")";
        case LatticeKind::BoolOr: return t.flag ? "boolor(true)" : "boolor(false)";
        case LatticeKind::TwoPSet:
          return "2p{added:{" + print_terms(t.items) + "}, tomb:{" + print_terms(t.tomb) + "}}";
      }
  }
  return "?";
}

std::string print_atom(const Atom& a) {
  if (a.args.empty()) return a.relation;
  return a.relation + "(" + print_terms(a.args) + ")";
}

std::string print_rule(const Rule& r) {
  std::string out = print_atom(r.head);
  if (!r.body.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (i > 0) out += ", ";
      if (const auto* lit = std::get_if<Literal>(&r.body[i])) {
        out += (lit->negated ? "!" : "") + print_atom(lit->atom);
      } else {
        const auto& c = std::get<Comparison>(r.body[i]);
        out += print_term(c.lhs) + " " + cmp_symbol(c.op) + " " + print_term(c.rhs);
      }
    }
  }
  return out + ".";
}

std::string print_program(const Program& p) {
  std::string out;
  for (const auto& d : p.relations) {
    if (d.input) out += "input ";
    if (d.output) out += "output ";
    out += std::string(relation_kind_name(d.kind)) + " " + d.name + print_columns(d.columns) + ".\n";
  }
  if (!p.relations.empty() && !p.rules.empty()) out += "\n";
  for (const auto& r : p.rules) out += print_rule(r) + "\n";
  return out;
}

}  // namespace calm::lang
