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

#ifndef INCLUDE_CALM_VERDICTS_VERDICTS_HPP_
#define INCLUDE_CALM_VERDICTS_VERDICTS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "calm/netsim/netsim.hpp"

namespace calm::verdicts {

using netsim::Partitioning;
using netsim::ProgramPlan;
using netsim::RunOutcome;
using netsim::Schedule;

enum class Mode { Exhaustive, Sampled };

const char* mode_name(Mode m);
Mode parse_mode(const std::string& s);  // ConfigError on anything else

struct CheckOptions {
  Mode mode = Mode::Exhaustive;
  std::size_t samples = 64;          // sampled mode: seeded runs
  std::uint64_t seed = 0;            // sampled mode: base seed
  std::size_t step_budget = 10000;   // per sampled run
  std::size_t bound = 1000000;       // exhaustive mode: scheduler states
};

enum class ConfluenceOutcome { Confluent, Divergent, Inconclusive };

const char* outcome_name(ConfluenceOutcome o);

struct Witness {
  Schedule schedule;  // replays `run`
  RunOutcome run;
};

struct ConfluenceVerdict {
  Mode mode = Mode::Exhaustive;
  ConfluenceOutcome outcome = ConfluenceOutcome::Inconclusive;
  std::size_t distinct_outcomes = 0;
  std::vector<Witness> witnesses;  // exactly two when divergent
  std::size_t runs_examined = 0;   // terminal states (exhaustive) or quiesced runs (sampled)
  std::size_t states = 0;          // exhaustive only
  bool complete = true;            // exhaustive: enumeration stayed within bound
  std::vector<std::string> outcomes;  // canonical text of every distinct output
};

ConfluenceVerdict check_confluence(std::shared_ptr<const ProgramPlan> plan, const Database& input,
                                   const Partitioning& part, const CheckOptions& opts = {});

struct RelationDiff {
  std::vector<Fact> only_a;
  std::vector<Fact> only_b;
};

struct OutputDiff {
  std::map<std::string, RelationDiff> relations;  // only relations that differ

  bool empty() const { return relations.empty(); }
  std::size_t size() const;
  std::vector<Fact> facts() const;  // the whole symmetric difference, sorted
};

// Per-relation symmetric difference. SchemaError if a relation is declared
// with different shapes on the two sides.
OutputDiff compare_outputs(const Database& a, const Database& b);
OutputDiff compare_outputs(const RunOutcome& a, const RunOutcome& b);

struct PartitionSummary {
  std::string label;
  Partitioning partitioning;
  bool colocated = false;
  bool complete = true;
  std::optional<std::size_t> min_messages;
  std::size_t distinct_outcomes = 0;
};

enum class CoordinationOutcome { Free, Required, Inconclusive };

const char* coordination_name(CoordinationOutcome o);

struct CoordinationOptions {
  Mode mode = Mode::Exhaustive;
  std::size_t samples = 64;
  std::uint64_t seed = 0;
  std::size_t step_budget = 10000;
  std::size_t bound = 1000000;
  // Partitionings explored besides the colocated ones and the hash split.
  std::size_t extra_partitionings = 2;
};

struct CoordinationReport {
  std::size_t machines = 0;
  std::vector<PartitionSummary> partitionings;
  std::optional<std::size_t> colocated_min_messages;
  CoordinationOutcome outcome = CoordinationOutcome::Inconclusive;
};

CoordinationReport detect_coordination(std::shared_ptr<const ProgramPlan> plan, const Database& input,
                                       std::size_t machines, const CoordinationOptions& opts = {});

// True when relabelling machines cannot change any output: no address
// constants in program or input and no output column that can hold one.
bool machine_symmetric(const lang::ValidatedProgram& p, const Database& input);

// Every assignment of input facts to m machines; modulo relabelling when
// `symmetric`. Past `cap` assignments, `cap` distinct seeded samples instead.
std::vector<Partitioning> enumerate_partitionings(const Database& input, std::size_t m, bool symmetric,
                                                  std::size_t cap = 2000, std::uint64_t seed = 0);

// splitmix64; derives independent seeds from one base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

nlohmann::json diff_to_json(const OutputDiff& d);
nlohmann::json verdict_to_json(const ConfluenceVerdict& v);
nlohmann::json coordination_to_json(const CoordinationReport& r);

}  // namespace calm::verdicts

#endif  // INCLUDE_CALM_VERDICTS_VERDICTS_HPP_
