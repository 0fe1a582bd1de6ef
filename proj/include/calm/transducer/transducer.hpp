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

#ifndef INCLUDE_CALM_TRANSDUCER_TRANSDUCER_HPP_
#define INCLUDE_CALM_TRANSDUCER_TRANSDUCER_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include <json.hpp>

#include "calm/lang/validator.hpp"
#include "calm/monocheck/monocheck.hpp"

namespace calm::transducer {

// Everything evaluation needs about a program, computed once and shared by
// every machine running it.
struct ProgramPlan {
  ProgramPlan() = default;
  ProgramPlan(const ProgramPlan&) = delete;
  ProgramPlan& operator=(const ProgramPlan&) = delete;

  lang::ValidatedProgram program;
  monocheck::Stratification strata;
  // Rules deriving into non-channel relations, grouped by head stratum.
  std::vector<std::vector<const lang::CompiledRule*>> stratum_rules;
  // Rules whose head is a channel; evaluated last, into the outbox.
  std::vector<const lang::CompiledRule*> channel_rules;
  // True when some rule negates or aggregates an event-class relation. Only
  // then can a step with an empty inbox change a machine that already ran.
  bool tick_sensitive = false;
};

// Throws UnstratifiableError for programs that cannot be evaluated.
std::shared_ptr<const ProgramPlan> make_plan(lang::ValidatedProgram p);

struct EvalOptions {
  // Semi-naive rounds allowed per stratum before DivergenceError.
  std::size_t max_iterations = 10000;
};

struct Evaluation {
  Database db;             // input facts plus everything derived
  std::set<Fact> outbox;   // channel facts derived this iteration, broadcasts expanded
};

Evaluation evaluate_full(const Database& db, const ProgramPlan& plan, EvalOptions opts = {});

// Stratum-by-stratum least fixpoint. Channel-head derivations are not part of
// the result.
Database evaluate(const Database& db, const ProgramPlan& plan, EvalOptions opts = {});
Database evaluate(const Database& db, const lang::ValidatedProgram& p, EvalOptions opts = {});

struct MachineState {
  Address address;
  std::shared_ptr<const ProgramPlan> plan;
  // Persisted-class relations only, reserved id/all included.
  Database persisted;
  // Channel facts already sent; identical facts are never sent twice.
  std::set<Fact> sent;
  std::uint64_t iteration = 0;
};

struct StepResult {
  MachineState new_state;
  std::map<Address, std::set<Fact>> outbound;
  std::set<Fact> output_delta;
};

// A machine holding `local_input` and the reserved facts id(self) and
// all(m) for every member.
MachineState make_machine(std::shared_ptr<const ProgramPlan> plan, Address self,
                          const std::vector<Address>& members, const Database& local_input);

// One Ingest -> Query -> Send iteration. RoutingError for inbox facts that
// are not channel or input facts addressed to this machine, and for sends to
// addresses outside `all`.
StepResult step(const MachineState& s, const std::set<Fact>& inbox, EvalOptions opts = {});

// Output-marked relations of a database.
Database outputs_of(const Database& db, const lang::ValidatedProgram& p);

nlohmann::json state_to_json(const MachineState& s);

}  // namespace calm::transducer

#endif  // INCLUDE_CALM_TRANSDUCER_TRANSDUCER_HPP_
