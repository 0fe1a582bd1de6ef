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

#ifndef INCLUDE_CALM_CLI_CLI_HPP_
#define INCLUDE_CALM_CLI_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "calm/verdicts/verdicts.hpp"

namespace calm::cli {

// A run configuration file. Relative paths are resolved against the
// directory holding the file.
struct RunConfig {
  std::filesystem::path program;
  std::filesystem::path fixture;  // empty: no input facts
  std::size_t machines = 1;
  // "colocate", "hash", or {"M1": ["fact", ...], ...}.
  nlohmann::json partitioning = "colocate";
  std::optional<std::uint64_t> seed;
  std::size_t budget = 10000;
  std::size_t duplicate_every = 0;
  verdicts::Mode mode = verdicts::Mode::Exhaustive;
  std::size_t samples = 64;
  std::size_t bound = 1000000;
  // Optional explicit schedule prefix for `run`.
  nlohmann::json schedule = nlohmann::json::array();
};

RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base);
RunConfig load_config(const std::filesystem::path& file);

std::string read_file(const std::filesystem::path& file);

struct Instance {
  std::shared_ptr<const transducer::ProgramPlan> plan;
  Database input;
  netsim::Partitioning partitioning;
};

// Loads program and fixture and builds the partitioning. Parse and
// validation errors carry the file name in their message.
Instance load_instance(const RunConfig& cfg);

netsim::Partitioning make_partitioning(const nlohmann::json& spec, const Database& input, std::size_t machines,
                                       const lang::ValidatedProgram& p);

// Command-line overrides; unset fields keep the config's values.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> machines;
  std::optional<std::size_t> budget;
  std::optional<verdicts::Mode> mode;
};

// CALMLAB_SEED, if set and numeric.
std::optional<std::uint64_t> env_seed();

struct FixtureExpectation {
  std::string config;  // run configuration, relative to the corpus directory
  std::string confluence;
  std::optional<std::string> coordination;
};

struct CorpusEntry {
  std::string name;
  std::string program;
  std::string summary;
  std::string expected_static;  // "monotone" | "non-monotone"
  std::vector<FixtureExpectation> fixtures;
};

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& dir);

// Verb implementations; each returns the process exit code.
int cmd_analyze(const std::filesystem::path& program, bool json, std::ostream& out, std::ostream& err);
int cmd_run(const std::filesystem::path& config, const Overrides& o, bool json,
            const std::optional<std::filesystem::path>& trace, std::ostream& out, std::ostream& err);
int cmd_check(const std::filesystem::path& config, const Overrides& o, bool json, std::ostream& out,
              std::ostream& err);
int cmd_coordination(const std::filesystem::path& config, const Overrides& o, bool json, std::ostream& out,
                     std::ostream& err);
int cmd_corpus_list(const std::filesystem::path& dir, bool json, std::ostream& out, std::ostream& err);

}  // namespace calm::cli

#endif  // INCLUDE_CALM_CLI_CLI_HPP_
