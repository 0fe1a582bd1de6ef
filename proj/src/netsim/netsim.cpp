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

#include "calm/netsim/netsim.hpp"

#include <random>
#include <sstream>

#include "calm/relspace/fact_text.hpp"
#include "calm/relspace/json.hpp"

namespace calm::netsim {

std::vector<Address> machine_names(std::size_t m) {
  std::vector<Address> out;
  for (std::size_t i = 1; i <= m; ++i) out.emplace_back("M" + std::to_string(i));
  return out;
}

Database Partitioning::local(const Database& input, Address m) const {
  Database out = input.filter([](const RelationSchema&) { return true; });
  for (const auto& [name, rel] : input.relations()) {
    for (const Fact& f : rel.facts) {
      auto it = assignment.find(f);
      if (it == assignment.end() || it->second != m) out.erase(f);
    }
  }
  return out;
}

std::string Partitioning::str() const {
  std::ostringstream out;
  bool first_machine = true;
  for (Address m : machines) {
    if (!first_machine) out << " | ";
    first_machine = false;
    out << m.name() << ":";
    for (const auto& [f, a] : assignment) {
      if (a == m) out << " " << f.str();
    }
  }
  return out.str();
}

Partitioning colocate(const Database& input, std::size_t m, std::size_t holder) {
  if (m == 0 || holder >= m) throw PartitioningError("colocation needs a holder among at least one machine");
  std::vector<std::size_t> owner(input.size(), holder);
  return from_owners(input, m, owner);
}

Partitioning hash_partition(const Database& input, std::size_t m) {
  if (m == 0) throw PartitioningError("a network needs at least one machine");
  std::vector<std::size_t> owner;
  for (const Fact& f : input.all_facts()) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : f.str()) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    owner.push_back(static_cast<std::size_t>(h % m));
  }
  return from_owners(input, m, owner);
}

Partitioning from_owners(const Database& input, std::size_t m, const std::vector<std::size_t>& owner) {
  if (m == 0) throw PartitioningError("a network needs at least one machine");
  auto facts = input.all_facts();
  if (owner.size() != facts.size()) throw PartitioningError("owner list does not match the input size");
  Partitioning p;
  p.machines = machine_names(m);
  for (std::size_t i = 0; i < facts.size(); ++i) {
    if (owner[i] >= m) throw PartitioningError("owner index out of range");
    p.assignment.emplace(facts[i], p.machines[owner[i]]);
  }
  return p;
}

void check_partitioning(const Database& input, const Partitioning& p) {
  if (p.machines.empty()) throw PartitioningError("a network needs at least one machine");
  std::set<Address> known(p.machines.begin(), p.machines.end());
  if (known.size() != p.machines.size()) throw PartitioningError("machine listed twice");
  for (const auto& [f, m] : p.assignment) {
    if (!input.contains(f)) throw PartitioningError("assigned fact " + f.str() + " is not part of the input");
    if (known.count(m) == 0) throw PartitioningError("fact " + f.str() + " assigned to unknown machine " + m.name());
  }
  for (const Fact& f : input.all_facts()) {
    if (p.assignment.count(f) == 0) throw PartitioningError("input fact " + f.str() + " is not assigned");
  }
}

NetworkState init_network(std::shared_ptr<const ProgramPlan> plan, const Database& input,
                          const Partitioning& part) {
  check_partitioning(input, part);
  NetworkState n;
  n.plan = plan;
  n.addresses = part.machines;
  const auto& vp = plan->program;
  n.output = vp.schemas().filter([&](const RelationSchema& r) { return vp.relation(r.name).output; });
  for (Address a : n.addresses) {
    auto m = transducer::make_machine(plan, a, n.addresses, part.local(input, a));
    for (const Fact& f : transducer::outputs_of(m.persisted, vp).all_facts()) n.output.insert(f);
    n.machines.emplace(a, std::move(m));
  }
  return n;
}

bool needs_tick(const NetworkState& n, Address m) {
  if (!n.plan->tick_sensitive || n.started.count(m) == 0) return false;
  const auto& s = n.machines.at(m);
  auto r = transducer::step(s, {});
  return !r.outbound.empty() || r.new_state.sent != s.sent || r.new_state.persisted != s.persisted;
}

bool quiescent(const NetworkState& n) {
  if (n.started.size() != n.addresses.size() || !n.pending.empty()) return false;
  for (Address a : n.addresses) {
    if (needs_tick(n, a)) return false;
  }
  return true;
}

void apply_decision(NetworkState& n, const Decision& d, std::size_t duplicate_every) {
  auto mit = n.machines.find(d.machine);
  if (mit == n.machines.end()) throw ScheduleError("unknown machine " + d.machine.name());
  bool started = n.started.count(d.machine) != 0;
  switch (d.kind) {
    case Decision::Start:
      if (started) throw ScheduleError("machine " + d.machine.name() + " has already started");
      if (!d.batch.empty()) throw ScheduleError("a start decision delivers no messages");
      break;
    case Decision::Tick:
      if (!started) throw ScheduleError("machine " + d.machine.name() + " has not started");
      if (!d.batch.empty()) throw ScheduleError("a tick decision delivers no messages");
      break;
    case Decision::Deliver:
      if (d.batch.empty()) throw ScheduleError("a delivery needs at least one message");
      break;
  }
  std::set<Fact> inbox;
  for (const Message& m : d.batch) {
    if (m.to != d.machine) throw ScheduleError("message " + m.fact.str() + " is not addressed to " + d.machine.name());
    auto it = n.pending.find(m);
    if (it == n.pending.end()) throw ScheduleError("message " + m.fact.str() + " from " + m.from.name() + " is not pending");
    n.pending.erase(it);
    inbox.insert(m.fact);
  }

  auto r = transducer::step(mit->second, inbox);
  mit->second = std::move(r.new_state);
  n.started.insert(d.machine);
  ++n.steps;
  for (const Message& m : d.batch) {
    ++n.deliveries;
    if (m.from != m.to) ++n.inter_machine_deliveries;
    n.trace.push_back({m.from, m.to, m.fact, mit->second.iteration});
    if (duplicate_every != 0 && !m.duplicate && n.deliveries % duplicate_every == 0) {
      Message dup = m;
      dup.duplicate = true;
      n.pending.insert(dup);
    }
  }
  for (const auto& [to, facts] : r.outbound) {
    for (const Fact& f : facts) n.pending.insert(Message{d.machine, to, f, false});
  }
  bool changed = false;
  for (const Fact& f : r.output_delta) changed = n.output.insert(f) || changed;
  if (changed) n.messages_before_output = n.inter_machine_deliveries;
}

namespace {

// needs_tick costs a full step, so results are cached per machine until the
// machine steps again.
class TickCache {
 public:
  explicit TickCache(const NetworkState& n) : n_(n) {}

  bool needs(Address m) {
    auto it = cache_.find(m);
    if (it != cache_.end()) return it->second;
    bool v = needs_tick(n_, m);
    cache_.emplace(m, v);
    return v;
  }
  void invalidate(Address m) { cache_.erase(m); }

  bool quiescent() {
    if (n_.started.size() != n_.addresses.size() || !n_.pending.empty()) return false;
    for (Address a : n_.addresses) {
      if (needs(a)) return false;
    }
    return true;
  }

 private:
  const NetworkState& n_;
  std::map<Address, bool> cache_;
};

std::vector<Message> pending_for(const NetworkState& n, Address m) {
  std::vector<Message> out;
  for (const Message& msg : n.pending) {
    if (msg.to == m) out.push_back(msg);
  }
  return out;
}

}  // namespace

RunOutcome run_schedule(NetworkState n, const Schedule& s, std::size_t step_budget) {
  RunOutcome out;
  TickCache ticks(n);
  auto apply = [&](const Decision& d) {
    apply_decision(n, d, s.duplicate_every);
    ticks.invalidate(d.machine);
    out.decisions.push_back(d);
  };
  std::size_t cursor = 0;
  for (const Decision& d : s.decisions) {
    if (n.steps >= step_budget) break;
    apply(d);
    for (std::size_t i = 0; i < n.addresses.size(); ++i) {
      if (n.addresses[i] == d.machine) cursor = (i + 1) % n.addresses.size();
    }
  }
  std::mt19937_64 rng(s.seed);
  const bool fair_completion = !s.decisions.empty();
  while (n.steps < step_budget && !ticks.quiescent()) {
    if (fair_completion) {
      for (std::size_t k = 0; k < n.addresses.size(); ++k) {
        std::size_t i = (cursor + k) % n.addresses.size();
        Address a = n.addresses[i];
        Decision d;
        d.machine = a;
        auto msgs = pending_for(n, a);
        if (!msgs.empty()) {
          d.kind = Decision::Deliver;
          d.batch = std::move(msgs);
        } else if (n.started.count(a) == 0) {
          d.kind = Decision::Start;
        } else if (ticks.needs(a)) {
          d.kind = Decision::Tick;
        } else {
          continue;
        }
        apply(d);
        cursor = (i + 1) % n.addresses.size();
        break;
      }
      continue;
    }
    std::vector<Decision> options;
    for (Address a : n.addresses) {
      bool started = n.started.count(a) != 0;
      if (!started) options.push_back(Decision{Decision::Start, a, {}});
      if (!pending_for(n, a).empty()) options.push_back(Decision{Decision::Deliver, a, {}});
      if (started && ticks.needs(a)) options.push_back(Decision{Decision::Tick, a, {}});
    }
    Decision d = options[static_cast<std::size_t>(rng() % options.size())];
    if (d.kind == Decision::Deliver) {
      auto msgs = pending_for(n, d.machine);
      for (const Message& m : msgs) {
        if ((rng() & 1U) != 0) d.batch.push_back(m);
      }
      if (d.batch.empty()) d.batch.push_back(msgs[static_cast<std::size_t>(rng() % msgs.size())]);
    }
    apply(d);
  }
  out.quiesced = ticks.quiescent();
  const auto& vp = n.plan->program;
  for (const auto& [a, m] : n.machines) out.machine_outputs.emplace(a, transducer::outputs_of(m.persisted, vp));
  out.output = n.output;
  out.trace = std::move(n.trace);
  out.steps_used = n.steps;
  out.inter_machine_messages = n.inter_machine_deliveries;
  out.messages_before_output = n.messages_before_output;
  return out;
}

nlohmann::json message_to_json(const Message& m) {
  nlohmann::json j = {{"from", m.from.name()}, {"to", m.to.name()}, {"fact", m.fact.str()}};
  if (m.duplicate) j["duplicate"] = true;
  return j;
}

nlohmann::json decision_to_json(const Decision& d) {
  static const char* kinds[] = {"start", "deliver", "tick"};
  nlohmann::json j = {{"kind", kinds[d.kind]}, {"machine", d.machine.name()}};
  if (d.kind == Decision::Deliver) {
    j["messages"] = nlohmann::json::array();
    for (const Message& m : d.batch) j["messages"].push_back(message_to_json(m));
  }
  return j;
}

Decision decision_from_json(const nlohmann::json& j, const lang::ValidatedProgram& p) {
  try {
    Decision d;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "start") {
      d.kind = Decision::Start;
    } else if (kind == "deliver") {
      d.kind = Decision::Deliver;
    } else if (kind == "tick") {
      d.kind = Decision::Tick;
    } else {
      throw ScheduleError("unknown decision kind '" + kind + "'");
    }
    d.machine = Address(j.at("machine").get<std::string>());
    if (d.kind == Decision::Deliver) {
      for (const auto& m : j.at("messages")) {
        Message msg;
        msg.from = Address(m.at("from").get<std::string>());
        msg.to = d.machine;
        msg.fact = parse_fact(m.at("fact").get<std::string>(), p.schemas());
        msg.duplicate = m.value("duplicate", false);
        d.batch.push_back(std::move(msg));
      }
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ScheduleError(std::string("malformed decision: ") + e.what());
  }
}

nlohmann::json trace_entry_to_json(const TraceEntry& t) {
  return {{"from", t.from.name()}, {"to", t.to.name()}, {"fact", t.fact.str()}, {"iteration", t.iteration}};
}

std::string trace_to_jsonl(const std::vector<TraceEntry>& trace) {
  std::string out;
  for (const auto& t : trace) out += trace_entry_to_json(t).dump() + "\n";
  return out;
}

nlohmann::json outcome_to_json(const RunOutcome& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["quiesced"] = r.quiesced;
  j["steps_used"] = r.steps_used;
  j["inter_machine_messages"] = r.inter_machine_messages;
  j["messages_before_output"] = r.messages_before_output;
  j["output"] = database_to_json(r.output);
  j["machine_outputs"] = nlohmann::json::object();
  for (const auto& [a, db] : r.machine_outputs) j["machine_outputs"][a.name()] = database_to_json(db);
  j["trace"] = nlohmann::json::array();
  for (const auto& t : r.trace) j["trace"].push_back(trace_entry_to_json(t));
  j["decisions"] = nlohmann::json::array();
  for (const auto& d : r.decisions) j["decisions"].push_back(decision_to_json(d));
  return j;
}

std::string canonical(const RunOutcome& r) { return outcome_to_json(r).dump(); }

}  // namespace calm::netsim
