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

#include "calm/verdicts/verdicts.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "calm/relspace/json.hpp"

namespace calm::verdicts {

const char* mode_name(Mode m) { return m == Mode::Exhaustive ? "exhaustive" : "sampled"; }

Mode parse_mode(const std::string& s) {
  if (s == "exhaustive") return Mode::Exhaustive;
  if (s == "sampled") return Mode::Sampled;
  throw ConfigError("unknown mode '" + s + "' (expected exhaustive or sampled)");
}

const char* outcome_name(ConfluenceOutcome o) {
  switch (o) {
    case ConfluenceOutcome::Confluent: return "confluent-on-instance";
    case ConfluenceOutcome::Divergent: return "divergent";
    case ConfluenceOutcome::Inconclusive: return "inconclusive";
  }
  return "?";
}

const char* coordination_name(CoordinationOutcome o) {
  switch (o) {
    case CoordinationOutcome::Free: return "coordination-free-on-instance";
    case CoordinationOutcome::Required: return "coordination-required-on-instance";
    case CoordinationOutcome::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t OutputDiff::size() const {
  std::size_t n = 0;
  for (const auto& [name, d] : relations) n += d.only_a.size() + d.only_b.size();
  return n;
}

std::vector<Fact> OutputDiff::facts() const {
  std::set<Fact> all;
  for (const auto& [name, d] : relations) {
    all.insert(d.only_a.begin(), d.only_a.end());
    all.insert(d.only_b.begin(), d.only_b.end());
  }
  return {all.begin(), all.end()};
}

OutputDiff compare_outputs(const Database& a, const Database& b) {
  for (const auto& [name, rel] : a.relations()) {
    const auto* other = b.schema(name);
    if (other != nullptr && !(*other == rel.schema)) {
      throw SchemaError("relation '" + name.name() + "' has different schemas in the compared outputs");
    }
  }
  OutputDiff d;
  std::set<Symbol> names;
  for (const auto& [name, rel] : a.relations()) names.insert(name);
  for (const auto& [name, rel] : b.relations()) names.insert(name);
  for (Symbol name : names) {
    const auto& fa = a.facts(name);
    const auto& fb = b.facts(name);
    RelationDiff r;
    std::set_difference(fa.begin(), fa.end(), fb.begin(), fb.end(), std::back_inserter(r.only_a));
    std::set_difference(fb.begin(), fb.end(), fa.begin(), fa.end(), std::back_inserter(r.only_b));
    if (!r.only_a.empty() || !r.only_b.empty()) d.relations.emplace(name.name(), std::move(r));
  }
  return d;
}

OutputDiff compare_outputs(const RunOutcome& a, const RunOutcome& b) { return compare_outputs(a.output, b.output); }

namespace {

struct Candidate {
  std::string canonical;
  Witness witness;
};

// The two outcomes whose outputs differ least; ties go to the
// lexicographically smallest pair of canonical texts.
std::vector<Witness> pick_pair(const std::vector<Candidate>& c) {
  std::size_t best_i = 0, best_j = 1, best = SIZE_MAX;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      std::size_t d = compare_outputs(c[i].witness.run, c[j].witness.run).size();
      if (d < best) {
        best = d;
        best_i = i;
        best_j = j;
      }
    }
  }
  return {c[best_i].witness, c[best_j].witness};
}

}  // namespace

ConfluenceVerdict check_confluence(std::shared_ptr<const ProgramPlan> plan, const Database& input,
                                   const Partitioning& part, const CheckOptions& opts) {
  ConfluenceVerdict v;
  v.mode = opts.mode;
  auto net = netsim::init_network(plan, input, part);
  std::vector<Candidate> candidates;  // sorted by canonical text
  if (opts.mode == Mode::Exhaustive) {
    auto ex = netsim::enumerate_schedules(net, {opts.bound});
    v.states = ex.states;
    v.complete = ex.complete;
    v.runs_examined = ex.terminal_states;
    for (auto& o : ex.outcomes) {
      Witness w{Schedule::explicit_list(o.witness.decisions), std::move(o.witness)};
      candidates.push_back({o.canonical, std::move(w)});
    }
  } else {
    std::map<std::string, Witness> seen;
    for (std::size_t i = 0; i < opts.samples; ++i) {
      Schedule s = Schedule::seeded(derive_seed(opts.seed, i));
      RunOutcome r = netsim::run_schedule(net, s, opts.step_budget);
      if (!r.quiesced) continue;
      ++v.runs_examined;
      std::string text = canonical(r.output);
      seen.emplace(std::move(text), Witness{s, std::move(r)});
    }
    for (auto& [text, w] : seen) candidates.push_back({text, std::move(w)});
  }
  v.distinct_outcomes = candidates.size();
  for (const auto& c : candidates) v.outcomes.push_back(c.canonical);
  if (candidates.size() >= 2) {
    v.outcome = ConfluenceOutcome::Divergent;
    v.witnesses = pick_pair(candidates);
  } else if (candidates.size() == 1 && v.complete) {
    v.outcome = ConfluenceOutcome::Confluent;
  } else {
    v.outcome = ConfluenceOutcome::Inconclusive;
  }
  return v;
}

bool machine_symmetric(const lang::ValidatedProgram& p, const Database& input) {
  auto has_address = [](const Value& v) { return v.kind() == ValueKind::Address; };
  for (const Fact& f : input.all_facts()) {
    if (std::any_of(f.args().begin(), f.args().end(), has_address)) return false;
  }
  std::vector<const lang::Term*> stack;
  for (const auto& r : p.program().rules) {
    for (const auto& t : r.head.args) stack.push_back(&t);
    for (const auto& el : r.body) {
      if (const auto* lit = std::get_if<lang::Literal>(&el)) {
        for (const auto& t : lit->atom.args) stack.push_back(&t);
      } else {
        const auto& c = std::get<lang::Comparison>(el);
        stack.push_back(&c.lhs);
        stack.push_back(&c.rhs);
      }
    }
  }
  while (!stack.empty()) {
    const lang::Term* t = stack.back();
    stack.pop_back();
    if (t->kind == lang::TermKind::Constant && has_address(t->constant)) return false;
    for (const auto& i : t->items) stack.push_back(&i);
    for (const auto& i : t->tomb) stack.push_back(&i);
  }
  for (const auto& [name, info] : p.relations()) {
    if (!info.output) continue;
    for (ColumnType c : info.schema.columns) {
      if (c == ColumnType::Addr || c == ColumnType::Any) return false;
    }
  }
  return true;
}

std::vector<Partitioning> enumerate_partitionings(const Database& input, std::size_t m, bool symmetric,
                                                  std::size_t cap, std::uint64_t seed) {
  if (m == 0) throw PartitioningError("a network needs at least one machine");
  const std::size_t n = input.size();
  std::vector<Partitioning> out;
  std::vector<std::size_t> owner(n, 0);
  bool over = false;
  // Odometer over owner vectors; with symmetry only restricted-growth
  // vectors (each fact uses at most one machine beyond those already used).
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
    if (over) return;
    if (i == n) {
      if (out.size() >= cap) {
        over = true;
        return;
      }
      out.push_back(netsim::from_owners(input, m, owner));
      return;
    }
    std::size_t limit = symmetric ? std::min(m, used + 1) : m;
    for (std::size_t k = 0; k < limit; ++k) {
      owner[i] = k;
      rec(i + 1, std::max(used, k + 1));
    }
  };
  rec(0, 0);
  if (!over) return out;

  out.clear();
  std::mt19937_64 rng(seed);
  std::set<std::vector<std::size_t>> seen;
  std::size_t attempts = 0;
  while (out.size() < cap && attempts < cap * 20) {
    ++attempts;
    for (auto& o : owner) o = static_cast<std::size_t>(rng() % m);
    if (symmetric) {
      // Canonical relabelling: machines numbered by first use.
      std::map<std::size_t, std::size_t> relabel;
      for (auto& o : owner) {
        auto it = relabel.emplace(o, relabel.size()).first;
        o = it->second;
      }
    }
    if (seen.insert(owner).second) out.push_back(netsim::from_owners(input, m, owner));
  }
  return out;
}

CoordinationReport detect_coordination(std::shared_ptr<const ProgramPlan> plan, const Database& input,
                                       std::size_t machines, const CoordinationOptions& opts) {
  if (machines < 1) throw PartitioningError("a network needs at least one machine");
  CoordinationReport r;
  r.machines = machines;
  auto explore = [&](PartitionSummary s) {
    auto net = netsim::init_network(plan, input, s.partitioning);
    if (opts.mode == Mode::Exhaustive) {
      auto ex = netsim::enumerate_schedules(net, {opts.bound});
      s.complete = ex.complete;
      s.min_messages = ex.min_messages_before_output;
      s.distinct_outcomes = ex.outcomes.size();
    } else {
      std::set<std::string> outs;
      for (std::size_t i = 0; i < opts.samples; ++i) {
        auto run = netsim::run_schedule(net, Schedule::seeded(derive_seed(opts.seed, i)), opts.step_budget);
        if (!run.quiesced) continue;
        outs.insert(canonical(run.output));
        if (!s.min_messages || run.messages_before_output < *s.min_messages) s.min_messages = run.messages_before_output;
      }
      s.distinct_outcomes = outs.size();
      s.complete = !outs.empty();
    }
    r.partitionings.push_back(std::move(s));
  };
  for (std::size_t holder = 0; holder < machines; ++holder) {
    PartitionSummary s;
    s.label = "colocated@M" + std::to_string(holder + 1);
    s.colocated = true;
    s.partitioning = netsim::colocate(input, machines, holder);
    explore(std::move(s));
  }
  if (machines > 1) {
    PartitionSummary h;
    h.label = "hash";
    h.partitioning = netsim::hash_partition(input, machines);
    explore(std::move(h));
    std::mt19937_64 rng(opts.seed);
    for (std::size_t k = 0; k < opts.extra_partitionings; ++k) {
      std::vector<std::size_t> owner(input.size());
      for (auto& o : owner) o = static_cast<std::size_t>(rng() % machines);
      PartitionSummary s;
      s.label = "random#" + std::to_string(k + 1);
      s.partitioning = netsim::from_owners(input, machines, owner);
      explore(std::move(s));
    }
  }
  for (const auto& s : r.partitionings) {
    if (!s.colocated || !s.complete || !s.min_messages) continue;
    if (!r.colocated_min_messages || *s.min_messages < *r.colocated_min_messages) {
      r.colocated_min_messages = s.min_messages;
    }
  }
  if (!r.colocated_min_messages) {
    r.outcome = CoordinationOutcome::Inconclusive;
  } else {
    r.outcome = *r.colocated_min_messages == 0 ? CoordinationOutcome::Free : CoordinationOutcome::Required;
  }
  return r;
}

nlohmann::json diff_to_json(const OutputDiff& d) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, rd] : d.relations) {
    nlohmann::json a = nlohmann::json::array(), b = nlohmann::json::array();
    for (const Fact& f : rd.only_a) a.push_back(fact_to_json(f));
    for (const Fact& f : rd.only_b) b.push_back(fact_to_json(f));
    j[name] = {{"only_first", a}, {"only_second", b}};
  }
  return j;
}

namespace {

nlohmann::json schedule_to_json(const Schedule& s) {
  if (s.decisions.empty()) return {{"seed", s.seed}};
  nlohmann::json d = nlohmann::json::array();
  for (const auto& x : s.decisions) d.push_back(netsim::decision_to_json(x));
  return {{"decisions", d}};
}

}  // namespace

nlohmann::json verdict_to_json(const ConfluenceVerdict& v) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "confluence";
  j["mode"] = mode_name(v.mode);
  j["verdict"] = outcome_name(v.outcome);
  j["distinct_outcomes"] = v.distinct_outcomes;
  j["runs_examined"] = v.runs_examined;
  if (v.mode == Mode::Exhaustive) {
    j["states"] = v.states;
    j["complete"] = v.complete;
  }
  j["outcomes"] = nlohmann::json::array();
  for (const auto& o : v.outcomes) j["outcomes"].push_back(nlohmann::json::parse(o));
  j["witnesses"] = nlohmann::json::array();
  for (const auto& w : v.witnesses) {
    j["witnesses"].push_back({{"schedule", schedule_to_json(w.schedule)},
                              {"output", database_to_json(w.run.output)},
                              {"steps", w.run.steps_used}});
  }
  if (v.witnesses.size() == 2) j["witness_diff"] = diff_to_json(compare_outputs(v.witnesses[0].run, v.witnesses[1].run));
  return j;
}

nlohmann::json coordination_to_json(const CoordinationReport& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "coordination";
  j["machines"] = r.machines;
  j["verdict"] = coordination_name(r.outcome);
  j["colocated_min_messages"] = r.colocated_min_messages ? nlohmann::json(*r.colocated_min_messages) : nlohmann::json();
  j["partitionings"] = nlohmann::json::array();
  for (const auto& s : r.partitionings) {
    nlohmann::json assign = nlohmann::json::object();
    for (Address m : s.partitioning.machines) assign[m.name()] = nlohmann::json::array();
    for (const auto& [f, m] : s.partitioning.assignment) assign[m.name()].push_back(f.str());
    j["partitionings"].push_back({{"label", s.label},
                                  {"colocated", s.colocated},
                                  {"complete", s.complete},
                                  {"min_messages", s.min_messages ? nlohmann::json(*s.min_messages) : nlohmann::json()},
                                  {"distinct_outcomes", s.distinct_outcomes},
                                  {"assignment", assign}});
  }
  return j;
}

}  // namespace calm::verdicts
