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

#include <algorithm>

#include "calm/transducer/transducer.hpp"

namespace calm::transducer {

using lang::ArgOp;
using lang::CompiledRule;
using lang::JoinPlan;
using lang::SlotTerm;
using lang::TermKind;

std::shared_ptr<const ProgramPlan> make_plan(lang::ValidatedProgram p) {
  auto plan = std::make_shared<ProgramPlan>();
  plan->program = std::move(p);
  plan->strata = monocheck::stratify(plan->program);
  const auto& vp = plan->program;
  for (const auto& rule : vp.rules()) {
    if (rule.channel_head) {
      plan->channel_rules.push_back(&rule);
    } else {
      auto level = static_cast<std::size_t>(plan->strata.level.at(rule.head));
      if (plan->stratum_rules.size() <= level) plan->stratum_rules.resize(level + 1);
      plan->stratum_rules[level].push_back(&rule);
    }
    auto transient = [&](const std::string& rel) { return !vp.relation(Symbol(rel)).persisted(); };
    for (const auto& a : rule.negatives) {
      if (transient(a.relation)) plan->tick_sensitive = true;
    }
    if (rule.has_aggregate) {
      for (const auto& a : rule.positives) {
        if (transient(a.relation)) plan->tick_sensitive = true;
      }
    }
  }
  return plan;
}

namespace {

const Value& slot_value(const SlotTerm& t, const std::vector<Value>& slots) {
  return t.kind == SlotTerm::Const ? t.constant : slots[static_cast<std::size_t>(t.slot)];
}

bool compare(lang::CmpOp op, const Value& a, const Value& b) {
  switch (op) {
    case lang::CmpOp::Eq: return a == b;
    case lang::CmpOp::Ne: return a != b;
    case lang::CmpOp::Lt: return a < b;
    case lang::CmpOp::Le: return a <= b;
    case lang::CmpOp::Gt: return b < a;
    case lang::CmpOp::Ge: return b <= a;
  }
  return false;
}

Scalar scalar_item(const SlotTerm& t, const std::vector<Value>& slots) {
  auto s = slot_value(t, slots).to_scalar();
  if (!s) throw Error("lattice values cannot be elements of another lattice value");
  return *s;
}

// Runs one join plan and calls `emit` with the slot vector of every
// satisfying binding. When `delta` is set, the first step scans it instead of
// the full database.
class Joiner {
 public:
  Joiner(const Database& db, const Database* delta, const JoinPlan& plan, std::size_t nslots)
      : db_(db), delta_(delta), plan_(plan), slots_(nslots) {}

  template <typename Emit>
  void run(Emit&& emit) {
    if (!checks_pass(0)) return;
    descend(0, emit);
  }

 private:
  bool checks_pass(std::size_t after) {
    for (const auto& c : plan_.comparisons_after[after]) {
      if (!compare(c.op, slot_value(c.lhs, slots_), slot_value(c.rhs, slots_))) return false;
    }
    for (const auto& n : plan_.negations_after[after]) {
      if (negated_match(n)) return false;
    }
    return true;
  }

  bool negated_match(const lang::PlannedNegation& n) {
    std::vector<Value> prefix;
    bool exact = true;
    for (const auto& a : n.args) {
      if (a.kind == SlotTerm::Slot && a.slot < 0) {
        exact = false;
        break;
      }
      prefix.push_back(slot_value(a, slots_));
    }
    if (exact) return db_.contains(Fact(n.relation, std::move(prefix)));
    const auto& facts = db_.facts(n.relation);
    const std::size_t k = prefix.size();
    for (auto it = facts.lower_bound(Fact(n.relation, prefix)); it != facts.end(); ++it) {
      if (!std::equal(prefix.begin(), prefix.end(), it->args().begin())) break;
      bool ok = true;
      for (std::size_t i = k; i < n.args.size() && ok; ++i) {
        const auto& a = n.args[i];
        if (a.kind == SlotTerm::Slot && a.slot < 0) continue;
        ok = it->arg(i) == slot_value(a, slots_);
      }
      if (ok) return true;
    }
    return false;
  }

  template <typename Emit>
  void descend(std::size_t depth, Emit& emit) {
    if (depth == plan_.steps.size()) {
      emit(slots_);
      return;
    }
    const auto& step = plan_.steps[depth];
    const Database& source = (depth == 0 && delta_ != nullptr) ? *delta_ : db_;
    const auto& facts = source.facts(step.relation);
    std::vector<Value> prefix;
    prefix.reserve(step.bound_prefix);
    for (std::size_t i = 0; i < step.bound_prefix; ++i) {
      const ArgOp& op = step.args[i];
      prefix.push_back(op.kind == ArgOp::Const ? op.constant : slots_[static_cast<std::size_t>(op.slot)]);
    }
    auto it = prefix.empty() ? facts.begin() : facts.lower_bound(Fact(step.relation, prefix));
    for (; it != facts.end(); ++it) {
      const Fact& f = *it;
      if (!std::equal(prefix.begin(), prefix.end(), f.args().begin())) break;
      if (!bind(step, f)) continue;
      if (checks_pass(depth + 1)) descend(depth + 1, emit);
    }
  }

  bool bind(const lang::PlannedAtom& step, const Fact& f) {
    for (std::size_t i = step.bound_prefix; i < step.args.size(); ++i) {
      const ArgOp& op = step.args[i];
      switch (op.kind) {
        case ArgOp::Bind: slots_[static_cast<std::size_t>(op.slot)] = f.arg(i); break;
        case ArgOp::Check:
          if (slots_[static_cast<std::size_t>(op.slot)] != f.arg(i)) return false;
          break;
        case ArgOp::Const:
          if (op.constant != f.arg(i)) return false;
          break;
        case ArgOp::Skip: break;
      }
    }
    return true;
  }

  const Database& db_;
  const Database* delta_;
  const JoinPlan& plan_;
  std::vector<Value> slots_;
};

Value head_value(const lang::HeadTerm& h, const std::vector<Value>& slots) {
  switch (h.kind) {
    case TermKind::Variable: return slots[static_cast<std::size_t>(h.slot)];
    case TermKind::Constant: return h.constant;
    case TermKind::Lattice:
      switch (h.lattice) {
        case LatticeKind::GSet: {
          GSet g;
          for (const auto& i : h.items) g.items.insert(scalar_item(i, slots));
          return Value(LatticeValue(g));
        }
        case LatticeKind::MaxInt: {
          const Value& v = slot_value(h.items.at(0), slots);
          if (v.kind() != ValueKind::Int) throw Error("maxint applied to non-integer " + v.literal());
          return Value(LatticeValue(MaxInt{v.as_int()}));
        }
        case LatticeKind::BoolOr: return Value(LatticeValue(BoolOr{h.flag}));
        case LatticeKind::TwoPSet: {
          TwoPSet s;
          for (const auto& i : h.items) s.added.items.insert(scalar_item(i, slots));
          for (const auto& i : h.tomb) s.tombstoned.items.insert(scalar_item(i, slots));
          return Value(LatticeValue(s));
        }
      }
      break;
    default: break;
  }
  return Value();
}

class Engine {
 public:
  Engine(const ProgramPlan& plan, EvalOptions opts) : plan_(plan), opts_(opts) {}

  Evaluation run(const Database& input) {
    Evaluation out;
    out.db = input;
    for (const auto& [name, info] : plan_.program.relations()) out.db.declare(info.schema);
    for (const auto& bucket : plan_.stratum_rules) run_stratum(out.db, bucket);
    members_ = &out.db.facts(Symbol(lang::kAllRelation));
    const auto& ids = out.db.facts(Symbol(lang::kIdRelation));
    self_ = ids.empty() ? nullptr : &*ids.begin();
    Database outbox;
    for (const auto* r : plan_.channel_rules) outbox.declare(plan_.program.relation(r->head).schema);
    for (const auto* r : plan_.channel_rules) {
      for (const Fact& f : fire(*r, out.db, nullptr, 0)) outbox.insert(f);
    }
    for (const Fact& f : outbox.all_facts()) out.outbox.insert(f);
    return out;
  }

 private:
  // Head facts for one binding; a broadcast head yields one fact per other member.
  void make_heads(const CompiledRule& r, const std::vector<Value>& slots, std::vector<Fact>& out) {
    std::vector<Value> args;
    args.reserve(r.head_args.size());
    for (const auto& h : r.head_args) args.push_back(head_value(h, slots));
    if (!r.has_broadcast) {
      out.emplace_back(r.head, std::move(args));
      return;
    }
    for (const Fact& m : *members_) {
      if (self_ != nullptr && m.arg(0) == self_->arg(0)) continue;
      args[0] = m.arg(0);
      out.emplace_back(r.head, args);
    }
  }

  std::vector<Fact> fire(const CompiledRule& r, const Database& db, const Database* delta, std::size_t plan) {
    std::vector<Fact> out;
    if (r.has_aggregate) return aggregate(r, db);
    Joiner(db, delta, r.plans[plan], r.slot_names.size()).run([&](const std::vector<Value>& slots) {
      make_heads(r, slots, out);
    });
    return out;
  }

  std::vector<Fact> aggregate(const CompiledRule& r, const Database& db) {
    std::map<std::vector<Value>, std::vector<std::set<Value>>> groups;
    std::size_t naggs = 0;
    for (const auto& h : r.head_args) naggs += h.kind == TermKind::Aggregate ? 1 : 0;
    Joiner(db, nullptr, r.plans[0], r.slot_names.size()).run([&](const std::vector<Value>& slots) {
      std::vector<Value> key;
      std::vector<Value> aggregated;
      for (const auto& h : r.head_args) {
        if (h.kind == TermKind::Aggregate) {
          aggregated.push_back(slots[static_cast<std::size_t>(h.slot)]);
        } else if (h.kind != TermKind::Broadcast) {
          key.push_back(head_value(h, slots));
        }
      }
      auto& acc = groups[key];
      acc.resize(naggs);
      for (std::size_t i = 0; i < naggs; ++i) acc[i].insert(aggregated[i]);
    });
    std::vector<Fact> out;
    for (const auto& [key, acc] : groups) {
      std::vector<Value> args;
      std::size_t k = 0, a = 0;
      bool broadcast = false;
      for (const auto& h : r.head_args) {
        if (h.kind == TermKind::Aggregate) {
          const auto& vals = acc[a++];
          switch (h.aggregate) {
            case lang::AggregateFn::Count: args.emplace_back(static_cast<std::int64_t>(vals.size())); break;
            case lang::AggregateFn::Min: args.push_back(*vals.begin()); break;
            case lang::AggregateFn::Max: args.push_back(*vals.rbegin()); break;
          }
        } else if (h.kind == TermKind::Broadcast) {
          broadcast = true;
          args.emplace_back();
        } else {
          args.push_back(key[k++]);
        }
      }
      if (!broadcast) {
        out.emplace_back(r.head, std::move(args));
        continue;
      }
      for (const Fact& m : *members_) {
        if (self_ != nullptr && m.arg(0) == self_->arg(0)) continue;
        args[0] = m.arg(0);
        out.emplace_back(r.head, args);
      }
    }
    return out;
  }

  void run_stratum(Database& db, const std::vector<const CompiledRule*>& rules) {
    std::set<Symbol> heads;
    for (const auto* r : rules) heads.insert(r->head);
    auto fresh = [&]() {
      Database d;
      for (Symbol h : heads) d.declare(*db.schema(h));
      return d;
    };
    Database delta = fresh();
    auto add_all = [&](const std::vector<Fact>& facts) {
      for (const Fact& f : facts) {
        Fact stored;
        if (db.insert(f, &stored)) delta.insert(stored);
      }
    };
    // Aggregates only read lower strata, so one pass suffices; their heads
    // are in place before the recursive rules run.
    for (const auto* r : rules) {
      if (r->has_aggregate) add_all(fire(*r, db, nullptr, 0));
    }
    for (const auto* r : rules) {
      if (!r->has_aggregate) add_all(fire(*r, db, nullptr, 0));
    }
    std::size_t rounds = 0;
    while (!delta.empty()) {
      if (++rounds > opts_.max_iterations) {
        throw DivergenceError("evaluation did not reach a fixpoint within " +
                              std::to_string(opts_.max_iterations) + " iterations");
      }
      Database current = std::move(delta);
      delta = fresh();
      std::vector<Fact> derived;
      for (const auto* r : rules) {
        if (r->has_aggregate) continue;
        for (std::size_t i = 0; i < r->positives.size(); ++i) {
          Symbol rel(r->positives[i].relation);
          if (heads.count(rel) == 0 || current.facts(rel).empty()) continue;
          auto facts = fire(*r, db, &current, i + 1);
          derived.insert(derived.end(), facts.begin(), facts.end());
        }
      }
      add_all(derived);
    }
  }

  const ProgramPlan& plan_;
  EvalOptions opts_;
  const std::set<Fact>* members_ = nullptr;
  const Fact* self_ = nullptr;
};

}  // namespace

Evaluation evaluate_full(const Database& db, const ProgramPlan& plan, EvalOptions opts) {
  return Engine(plan, opts).run(db);
}

Database evaluate(const Database& db, const ProgramPlan& plan, EvalOptions opts) {
  return evaluate_full(db, plan, opts).db;
}

Database evaluate(const Database& db, const lang::ValidatedProgram& p, EvalOptions opts) {
  return evaluate(db, *make_plan(p), opts);
}

}  // namespace calm::transducer
