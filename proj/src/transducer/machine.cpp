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

#include "calm/relspace/json.hpp"
#include "calm/transducer/transducer.hpp"

namespace calm::transducer {

MachineState make_machine(std::shared_ptr<const ProgramPlan> plan, Address self,
                          const std::vector<Address>& members, const Database& local_input) {
  MachineState s;
  s.address = self;
  const auto& vp = plan->program;
  s.persisted = vp.schemas().filter([&](const RelationSchema& r) { return vp.relation(r.name).persisted(); });
  for (const Fact& f : local_input.all_facts()) {
    const auto* info = vp.find(f.relation());
    if (info == nullptr || !info->input) {
      throw RoutingError("fact " + f.str() + " is not an input fact of the program");
    }
    s.persisted.insert(f);
  }
  s.persisted.insert(Fact(lang::kIdRelation, {Value(self)}));
  for (Address m : members) s.persisted.insert(Fact(lang::kAllRelation, {Value(m)}));
  s.plan = std::move(plan);
  return s;
}

StepResult step(const MachineState& s, const std::set<Fact>& inbox, EvalOptions opts) {
  const ProgramPlan& plan = *s.plan;
  const auto& vp = plan.program;
  Database db = s.persisted;
  for (const auto& [name, info] : vp.relations()) db.declare(info.schema);
  for (const Fact& f : inbox) {
    const auto* info = vp.find(f.relation());
    if (info == nullptr) {
      throw RoutingError("inbox fact " + f.str() + " names an undeclared relation");
    }
    if (!info->channel() && !info->input) {
      throw RoutingError("inbox fact " + f.str() + " is neither a channel nor an input fact");
    }
    if (info->channel() && !(f.arity() > 0 && f.arg(0) == Value(s.address))) {
      throw RoutingError("inbox fact " + f.str() + " is not addressed to " + s.address.name());
    }
    try {
      db.insert(f);
    } catch (const SchemaError& e) {
      throw RoutingError(std::string("inbox fact rejected: ") + e.what());
    }
  }

  Evaluation ev = evaluate_full(db, plan, opts);

  StepResult r;
  r.new_state.address = s.address;
  r.new_state.plan = s.plan;
  r.new_state.iteration = s.iteration + 1;
  r.new_state.sent = s.sent;
  r.new_state.persisted =
      ev.db.filter([&](const RelationSchema& rel) { return vp.relation(rel.name).persisted(); });

  for (const auto& [name, info] : vp.relations()) {
    if (!info.output) continue;
    for (const Fact& f : r.new_state.persisted.facts(name)) {
      if (!s.persisted.contains(f)) r.output_delta.insert(f);
    }
  }

  const auto& members = s.persisted.facts(Symbol(lang::kAllRelation));
  for (const Fact& f : ev.outbox) {
    if (!r.new_state.sent.insert(f).second) continue;
    if (members.count(Fact(lang::kAllRelation, {f.arg(0)})) == 0) {
      throw RoutingError("fact " + f.str() + " is addressed to " + f.arg(0).literal() +
                         ", which is not a member of the network");
    }
    r.outbound[f.arg(0).as_address()].insert(f);
  }
  return r;
}

Database outputs_of(const Database& db, const lang::ValidatedProgram& p) {
  return db.filter([&](const RelationSchema& r) {
    const auto* info = p.find(r.name);
    return info != nullptr && info->output;
  });
}

nlohmann::json state_to_json(const MachineState& s) {
  nlohmann::json sent = nlohmann::json::array();
  for (const Fact& f : s.sent) sent.push_back(f.str());
  return {{"address", s.address.name()},
          {"iteration", s.iteration},
          {"persisted", database_to_json(s.persisted)},
          {"sent", sent}};
}

}  // namespace calm::transducer
