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

#ifndef INCLUDE_CALM_NETSIM_NETSIM_HPP_
#define INCLUDE_CALM_NETSIM_NETSIM_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "calm/transducer/transducer.hpp"

namespace calm::netsim {

using transducer::ProgramPlan;

// M1 .. Mm.
std::vector<Address> machine_names(std::size_t m);

struct Partitioning {
  std::vector<Address> machines;
  std::map<Fact, Address> assignment;

  std::size_t size() const { return machines.size(); }
  // The facts assigned to `m`, with the schemas of `input`.
  Database local(const Database& input, Address m) const;
  std::string str() const;
};

// Every fact on machine `holder` (0-based) of m machines.
Partitioning colocate(const Database& input, std::size_t m, std::size_t holder = 0);
// Stable across runs and platforms: FNV-1a over the fact text.
Partitioning hash_partition(const Database& input, std::size_t m);
// owner[i] is the machine index of the i-th fact of input.all_facts().
Partitioning from_owners(const Database& input, std::size_t m, const std::vector<std::size_t>& owner);
// PartitioningError unless every input fact is assigned to exactly one
// known machine and nothing else is assigned.
void check_partitioning(const Database& input, const Partitioning& p);

struct Message {
  Address from;
  Address to;
  Fact fact;
  bool duplicate = false;  // re-delivery injected by the duplication toggle

  friend bool operator<(const Message& a, const Message& b) {
    return std::tie(a.to, a.from, a.fact, a.duplicate) < std::tie(b.to, b.from, b.fact, b.duplicate);
  }
  friend bool operator==(const Message& a, const Message& b) {
    return a.to == b.to && a.from == b.from && a.fact == b.fact && a.duplicate == b.duplicate;
  }
};

struct Decision {
  enum Kind { Start, Deliver, Tick };
  Kind kind = Start;
  Address machine;
  std::vector<Message> batch;  // Deliver only

  friend bool operator==(const Decision& a, const Decision& b) {
    return a.kind == b.kind && a.machine == b.machine && a.batch == b.batch;
  }
};

struct Schedule {
  // Random choices drawn from this seed; ignored when `decisions` is non-empty.
  std::uint64_t seed = 0;
  // Followed verbatim, then completed by a deterministic round-robin.
  std::vector<Decision> decisions;
  // Every N-th delivered message is delivered again later (0 = off).
  std::size_t duplicate_every = 0;

  static Schedule seeded(std::uint64_t seed) { return Schedule{seed, {}, 0}; }
  static Schedule explicit_list(std::vector<Decision> d) { return Schedule{0, std::move(d), 0}; }
};

struct TraceEntry {
  Address from;
  Address to;
  Fact fact;
  std::uint64_t iteration = 0;  // receiver's iteration that ingested the fact
};

struct NetworkState {
  std::shared_ptr<const ProgramPlan> plan;
  std::vector<Address> addresses;
  std::map<Address, transducer::MachineState> machines;
  std::set<Address> started;
  std::multiset<Message> pending;
  std::vector<TraceEntry> trace;
  Database output;  // union of every machine's output relations so far

  std::size_t steps = 0;
  std::size_t deliveries = 0;
  std::size_t inter_machine_deliveries = 0;
  // Inter-machine deliveries up to the last step that changed `output`.
  std::size_t messages_before_output = 0;
};

NetworkState init_network(std::shared_ptr<const ProgramPlan> plan, const Database& input,
                          const Partitioning& part);

// Would a step with an empty inbox change machine m? Always false for
// programs that are not tick-sensitive.
bool needs_tick(const NetworkState& n, Address m);
bool quiescent(const NetworkState& n);

// Applies one decision. ScheduleError when it is not enabled in `n`.
void apply_decision(NetworkState& n, const Decision& d, std::size_t duplicate_every = 0);

struct RunOutcome {
  std::map<Address, Database> machine_outputs;
  Database output;
  std::vector<TraceEntry> trace;
  bool quiesced = false;
  std::size_t steps_used = 0;
  std::vector<Decision> decisions;
  std::size_t inter_machine_messages = 0;
  std::size_t messages_before_output = 0;
};

RunOutcome run_schedule(NetworkState n, const Schedule& s, std::size_t step_budget);

struct ExploreOptions {
  std::size_t bound = 1000000;  // scheduler states
};

struct ExploredOutcome {
  Database output;
  std::string canonical;
  RunOutcome witness;  // a shortest schedule reaching this outcome, replayed
};

struct Exploration {
  std::vector<ExploredOutcome> outcomes;  // distinct quiescent outputs, by canonical text
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t terminal_states = 0;
  bool complete = true;
  // Minimum over complete runs of the inter-machine deliveries made before
  // the output last changed. Empty when no terminal state was found.
  std::optional<std::size_t> min_messages_before_output;
};

// Breadth-first over every delivery choice (machine x nonempty inbox subset,
// first steps, ticks), deduplicating scheduler states.
Exploration enumerate_schedules(const NetworkState& n, ExploreOptions opts = {});

nlohmann::json message_to_json(const Message& m);
nlohmann::json decision_to_json(const Decision& d);
Decision decision_from_json(const nlohmann::json& j, const lang::ValidatedProgram& p);
nlohmann::json trace_entry_to_json(const TraceEntry& t);
// One JSON object per line.
std::string trace_to_jsonl(const std::vector<TraceEntry>& trace);
nlohmann::json outcome_to_json(const RunOutcome& r);
std::string canonical(const RunOutcome& r);

}  // namespace calm::netsim

#endif  // INCLUDE_CALM_NETSIM_NETSIM_HPP_
