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

#include "calm/lang/validator.hpp"

#include <algorithm>
#include <set>

#include "calm/lang/parser.hpp"

namespace calm::lang {
namespace {

[[noreturn]] void fail(SourceLoc loc, const std::string& msg) { throw ValidationError(loc, msg); }

ColumnType lattice_column(LatticeKind k) {
  switch (k) {
    case LatticeKind::GSet: return ColumnType::GSet;
    case LatticeKind::MaxInt: return ColumnType::MaxInt;
    case LatticeKind::BoolOr: return ColumnType::BoolOr;
    case LatticeKind::TwoPSet: return ColumnType::TwoPSet;
  }
  return ColumnType::Any;
}

struct RuleChecker {
  const std::map<Symbol, RelationInfo>& rels;
  const Rule& rule;
  // Column types through which each positive-body variable is bound.
  std::map<std::string, std::set<ColumnType>> bound;

  const RelationInfo& lookup(const Atom& a) {
    auto it = rels.find(Symbol(a.relation));
    if (it == rels.end()) fail(a.loc, "undeclared relation '" + a.relation + "'");
    const RelationInfo& info = it->second;
    if (a.args.size() != info.schema.arity()) {
      fail(a.loc, "relation '" + a.relation + "' has arity " +
                      std::to_string(info.schema.arity()) + " but is used with " +
                      std::to_string(a.args.size()) + " arguments");
    }
    return info;
  }

  void check_constant(const Term& t, ColumnType col, const std::string& rel, std::size_t i) {
    if (is_lattice_column(col)) {
      fail(t.loc, "column " + std::to_string(i + 1) + " of '" + rel + "' is a " +
                      column_type_name(col) + " column and needs a lattice value");
    }
    if (!column_accepts(col, t.constant)) {
      fail(t.loc, "constant " + t.constant.literal() + " does not fit column " +
                      std::to_string(i + 1) + " of '" + rel + "' (" + column_type_name(col) + ")");
    }
  }

  void check_body_term(const Term& t) {
    switch (t.kind) {
      case TermKind::Aggregate: fail(t.loc, "aggregates may only appear in a rule head");
      case TermKind::Lattice: fail(t.loc, "lattice constructors may only appear in a rule head");
      case TermKind::Broadcast: fail(t.loc, "'@*' may only appear in a channel head");
      default: break;
    }
  }

  void require_bound(const Term& t, const char* where) {
    if (t.kind == TermKind::Variable && bound.count(t.name) == 0) {
      fail(t.loc, std::string("variable ") + t.name + " in " + where +
                      " is not bound by a positive body literal");
    }
  }

  void check_scalar_item(const Term& t) {
    if (t.kind == TermKind::Variable) {
      require_bound(t, "lattice constructor");
    } else if (t.kind == TermKind::Constant) {
      if (t.constant.is_lattice()) fail(t.loc, "lattice values cannot be nested");
    } else {
      fail(t.loc, "lattice elements must be variables or constants");
    }
  }

  void check_var_type(const Term& t, ColumnType col, const std::string& rel, std::size_t i) {
    if (col == ColumnType::Any) return;
    const auto& types = bound.at(t.name);
    if (types.count(ColumnType::Any) != 0 || types.count(col) != 0) return;
    fail(t.loc, "variable " + t.name + " is bound to " + column_type_name(*types.begin()) +
                    " values but column " + std::to_string(i + 1) + " of '" + rel + "' is " +
                    column_type_name(col));
  }

  void run() {
    for (const auto& el : rule.body) {
      if (const auto* lit = std::get_if<Literal>(&el)) {
        const RelationInfo& info = lookup(lit->atom);
        if (lit->negated && info.schema.has_lattice_columns()) {
          fail(lit->atom.loc, "relation '" + lit->atom.relation +
                                  "' has lattice columns and cannot be negated");
        }
        for (std::size_t i = 0; i < lit->atom.args.size(); ++i) {
          const Term& t = lit->atom.args[i];
          check_body_term(t);
          ColumnType col = info.schema.columns[i];
          if (t.kind == TermKind::Constant) {
            if (!(is_lattice_column(col) && t.constant.is_lattice())) {
              check_constant(t, col, lit->atom.relation, i);
            }
          }
          if (!lit->negated && t.kind == TermKind::Variable) bound[t.name].insert(col);
        }
      } else {
        const auto& c = std::get<Comparison>(el);
        for (const Term* t : {&c.lhs, &c.rhs}) {
          check_body_term(*t);
          if (t->kind == TermKind::Wildcard) fail(t->loc, "'_' cannot be compared");
        }
      }
    }
    for (const auto& el : rule.body) {
      if (const auto* lit = std::get_if<Literal>(&el)) {
        if (!lit->negated) continue;
        for (const Term& t : lit->atom.args) require_bound(t, "negated literal");
      } else {
        const auto& c = std::get<Comparison>(el);
        require_bound(c.lhs, "comparison");
        require_bound(c.rhs, "comparison");
      }
    }

    const RelationInfo& head = lookup(rule.head);
    if (head.reserved) fail(rule.head.loc, "reserved relation '" + rule.head.relation + "' cannot be derived");
    if (head.input) fail(rule.head.loc, "input relation '" + rule.head.relation + "' cannot be derived");
    for (std::size_t i = 0; i < rule.head.args.size(); ++i) {
      const Term& t = rule.head.args[i];
      ColumnType col = head.schema.columns[i];
      switch (t.kind) {
        case TermKind::Wildcard:
          fail(t.loc, "'_' cannot appear in a rule head");
        case TermKind::Variable:
          if (bound.count(t.name) == 0) {
            fail(t.loc, "head variable " + t.name + " does not appear in a positive body literal");
          }
          check_var_type(t, col, rule.head.relation, i);
          break;
        case TermKind::Constant:
          if (!(is_lattice_column(col) && t.constant.is_lattice())) {
            check_constant(t, col, rule.head.relation, i);
          }
          break;
        case TermKind::Broadcast:
          if (!head.channel() || i != 0) fail(t.loc, "'@*' is only allowed as the first argument of a channel head");
          break;
        case TermKind::Aggregate: {
          Term v = Term::variable(t.name, t.loc);
          require_bound(v, "aggregate");
          if (is_lattice_column(col)) fail(t.loc, "aggregate cannot fill a lattice column");
          if (t.aggregate == AggregateFn::Count && col != ColumnType::Any && col != ColumnType::Int) {
            fail(t.loc, "count produces an int but the column is " + std::string(column_type_name(col)));
          }
          break;
        }
        case TermKind::Lattice: {
          if (col != lattice_column(t.lattice)) {
            fail(t.loc, std::string(lattice_kind_name(t.lattice)) + " constructor in a " +
                            column_type_name(col) + " column");
          }
          for (const Term& item : t.items) check_scalar_item(item);
          for (const Term& item : t.tomb) check_scalar_item(item);
          if (t.lattice == LatticeKind::MaxInt) {
            if (t.items.size() != 1) fail(t.loc, "maxint takes exactly one argument");
            const Term& arg = t.items[0];
            if (arg.kind == TermKind::Constant && arg.constant.kind() != ValueKind::Int) {
              fail(arg.loc, "maxint needs an int");
            }
            if (arg.kind == TermKind::Variable) check_var_type(arg, ColumnType::Int, "maxint", 0);
          }
          break;
        }
      }
    }
  }
};

class Compiler {
 public:
  Compiler(const std::map<Symbol, RelationInfo>& rels, const Rule& r, std::size_t index)
      : rels_(rels) {
    out_.index = index;
    out_.source = r;
    out_.head = Symbol(r.head.relation);
    out_.channel_head = rels.at(out_.head).channel();
    for (const auto& el : r.body) {
      if (const auto* lit = std::get_if<Literal>(&el)) {
        (lit->negated ? out_.negatives : out_.positives).push_back(lit->atom);
        if (lit->atom.relation == kAllRelation) out_.reads_all = true;
        if (lit->atom.relation == kIdRelation) out_.reads_id = true;
      } else {
        out_.comparisons.push_back(std::get<Comparison>(el));
      }
    }
    for (const Atom& a : out_.positives) {
      for (const Term& t : a.args) {
        if (t.kind == TermKind::Variable) slot_of(t.name);
      }
    }
  }

  CompiledRule run() {
    for (const Term& t : out_.source.head.args) out_.head_args.push_back(head_term(t));
    std::vector<int> order(out_.positives.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    out_.plans.push_back(plan(order));
    for (std::size_t i = 0; i < out_.positives.size(); ++i) {
      std::vector<int> o = {static_cast<int>(i)};
      for (std::size_t j = 0; j < out_.positives.size(); ++j) {
        if (j != i) o.push_back(static_cast<int>(j));
      }
      out_.plans.push_back(plan(o));
    }
    return std::move(out_);
  }

 private:
  int slot_of(const std::string& name) {
    auto it = std::find(out_.slot_names.begin(), out_.slot_names.end(), name);
    if (it != out_.slot_names.end()) return static_cast<int>(it - out_.slot_names.begin());
    out_.slot_names.push_back(name);
    return static_cast<int>(out_.slot_names.size() - 1);
  }

  SlotTerm slot_term(const Term& t) {
    SlotTerm s;
    if (t.kind == TermKind::Variable) {
      s.kind = SlotTerm::Slot;
      s.slot = slot_of(t.name);
    } else if (t.kind == TermKind::Wildcard) {
      s.kind = SlotTerm::Slot;
      s.slot = -1;
    } else {
      s.kind = SlotTerm::Const;
      s.constant = t.constant;
    }
    return s;
  }

  HeadTerm head_term(const Term& t) {
    HeadTerm h;
    h.kind = t.kind;
    switch (t.kind) {
      case TermKind::Variable: h.slot = slot_of(t.name); break;
      case TermKind::Constant: h.constant = t.constant; break;
      case TermKind::Broadcast: out_.has_broadcast = true; break;
      case TermKind::Aggregate:
        h.aggregate = t.aggregate;
        h.slot = slot_of(t.name);
        out_.has_aggregate = true;
        break;
      case TermKind::Lattice:
        h.lattice = t.lattice;
        h.flag = t.flag;
        for (const Term& i : t.items) h.items.push_back(slot_term(i));
        for (const Term& i : t.tomb) h.tomb.push_back(slot_term(i));
        break;
      case TermKind::Wildcard: break;
    }
    return h;
  }

  static void vars_of(const Term& t, std::vector<std::string>& out) { collect_variables(t, out); }

  JoinPlan plan(const std::vector<int>& order) {
    JoinPlan p;
    std::set<std::string> bound;
    std::vector<bool> neg_done(out_.negatives.size(), false);
    std::vector<bool> cmp_done(out_.comparisons.size(), false);
    auto attach = [&]() {
      std::vector<PlannedNegation> negs;
      std::vector<PlannedComparison> cmps;
      for (std::size_t i = 0; i < out_.negatives.size(); ++i) {
        if (neg_done[i]) continue;
        std::vector<std::string> vs;
        for (const Term& t : out_.negatives[i].args) vars_of(t, vs);
        if (!std::all_of(vs.begin(), vs.end(), [&](const auto& v) { return bound.count(v) != 0; })) continue;
        neg_done[i] = true;
        PlannedNegation n;
        n.relation = Symbol(out_.negatives[i].relation);
        for (const Term& t : out_.negatives[i].args) n.args.push_back(slot_term(t));
        negs.push_back(std::move(n));
      }
      for (std::size_t i = 0; i < out_.comparisons.size(); ++i) {
        if (cmp_done[i]) continue;
        const Comparison& c = out_.comparisons[i];
        std::vector<std::string> vs;
        vars_of(c.lhs, vs);
        vars_of(c.rhs, vs);
        if (!std::all_of(vs.begin(), vs.end(), [&](const auto& v) { return bound.count(v) != 0; })) continue;
        cmp_done[i] = true;
        cmps.push_back(PlannedComparison{c.op, slot_term(c.lhs), slot_term(c.rhs)});
      }
      p.negations_after.push_back(std::move(negs));
      p.comparisons_after.push_back(std::move(cmps));
    };
    attach();
    for (int idx : order) {
      const Atom& a = out_.positives[static_cast<std::size_t>(idx)];
      PlannedAtom step;
      step.relation = Symbol(a.relation);
      step.positive_index = idx;
      bool prefix_open = true;
      for (const Term& t : a.args) {
        ArgOp op;
        if (t.kind == TermKind::Variable) {
          op.slot = slot_of(t.name);
          op.kind = bound.count(t.name) != 0 ? ArgOp::Check : ArgOp::Bind;
          if (op.kind == ArgOp::Bind) {
            prefix_open = false;
            bound.insert(t.name);
          }
        } else if (t.kind == TermKind::Constant) {
          op.kind = ArgOp::Const;
          op.constant = t.constant;
        } else {
          op.kind = ArgOp::Skip;
          prefix_open = false;
        }
        if (prefix_open) ++step.bound_prefix;
        step.args.push_back(std::move(op));
      }
      p.steps.push_back(std::move(step));
      attach();
    }
    return p;
  }

  const std::map<Symbol, RelationInfo>& rels_;
  CompiledRule out_;
};

}  // namespace

const RelationInfo& ValidatedProgram::relation(Symbol name) const {
  const RelationInfo* info = find(name);
  if (info == nullptr) throw Error("unknown relation '" + name.name() + "'");
  return *info;
}

const RelationInfo* ValidatedProgram::find(Symbol name) const {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

std::vector<Symbol> ValidatedProgram::input_relations() const {
  std::vector<Symbol> out;
  for (const auto& [name, info] : relations_) {
    if (info.input) out.push_back(name);
  }
  return out;
}

std::vector<Symbol> ValidatedProgram::output_relations() const {
  std::vector<Symbol> out;
  for (const auto& [name, info] : relations_) {
    if (info.output) out.push_back(name);
  }
  return out;
}

ValidatedProgram validate_program(const Program& p) {
  ValidatedProgram vp;
  vp.program_ = p;
  for (const char* reserved : {kIdRelation, kAllRelation}) {
    RelationInfo info;
    info.schema = RelationSchema{Symbol(reserved), {ColumnType::Addr}};
    info.reserved = true;
    vp.relations_.emplace(info.schema.name, info);
  }
  for (const RelationDecl& d : p.relations) {
    if (d.name == kIdRelation || d.name == kAllRelation) {
      fail(d.loc, "'" + d.name + "' is a reserved relation and cannot be declared");
    }
    if (d.kind == RelationKind::Channel && (d.columns.empty() || d.columns[0] != ColumnType::Addr)) {
      fail(d.loc, "channel '" + d.name + "' needs an addr first column");
    }
    if ((d.input || d.output) && d.kind != RelationKind::Table) {
      fail(d.loc, "input and output relations must be tables");
    }
    for (ColumnType c : d.columns) {
      if (is_lattice_column(c) && d.kind != RelationKind::Table) {
        fail(d.loc, "lattice columns are only allowed in tables ('" + d.name + "' is " +
                        relation_kind_name(d.kind) + ")");
      }
    }
    RelationInfo info;
    info.schema = RelationSchema{Symbol(d.name), d.columns};
    info.kind = d.kind;
    info.input = d.input;
    info.output = d.output;
    info.loc = d.loc;
    if (!vp.relations_.emplace(info.schema.name, info).second) {
      fail(d.loc, "duplicate declaration of relation '" + d.name + "'");
    }
  }
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    RuleChecker{vp.relations_, p.rules[i], {}}.run();
  }
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    vp.rules_.push_back(Compiler(vp.relations_, p.rules[i], i).run());
  }
  for (const auto& [name, info] : vp.relations_) {
    vp.schemas_.declare(info.schema);
    if (info.input) vp.input_schemas_.declare(info.schema);
  }
  return vp;
}

ValidatedProgram load_program(std::string_view text) { return validate_program(parse_program(text)); }

}  // namespace calm::lang
