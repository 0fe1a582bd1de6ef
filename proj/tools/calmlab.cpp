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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "calm/cli/cli.hpp"

namespace {

struct Common {
  bool json = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> machines;
  std::optional<std::size_t> budget;
  std::string mode;

  calm::cli::Overrides overrides() const {
    calm::cli::Overrides o;
    o.seed = seed;
    o.machines = machines;
    o.budget = budget;
    if (!mode.empty()) o.mode = calm::verdicts::parse_mode(mode);
    return o;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_flag("--json", c.json, "Print a JSON report");
  cmd->add_option("--seed", c.seed, "Seed for randomized schedules (default: CALMLAB_SEED, then 0)");
  cmd->add_option("--machines", c.machines, "Number of machines")->check(CLI::PositiveNumber);
  cmd->add_option("--budget", c.budget, "Step budget per run");
  cmd->add_option("--mode", c.mode, "exhaustive or sampled")->check(CLI::IsMember({"exhaustive", "sampled"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"calmlab: run, classify and check rule-language transducer networks"};
  app.require_subcommand(1);

  std::string program;
  bool analyze_json = false;
  auto* analyze = app.add_subcommand("analyze", "Classify a program as monotone or not");
  analyze->add_option("program", program, "Program file (.calm)")->required();
  analyze->add_flag("--json", analyze_json, "Print a JSON report");

  std::string config;
  Common run_opts, check_opts, coord_opts;
  std::optional<std::string> trace;
  auto* run = app.add_subcommand("run", "Run one schedule of a configured network");
  run->add_option("config", config, "Run configuration (.json)")->required();
  run->add_option("--trace", trace, "Write the message trace as JSON lines");
  add_common(run, run_opts);

  auto* check = app.add_subcommand("check", "Check confluence across delivery schedules");
  check->add_option("config", config, "Run configuration (.json)")->required();
  add_common(check, check_opts);

  auto* coord = app.add_subcommand("coordination", "Measure coordination across partitionings");
  coord->add_option("config", config, "Run configuration (.json)")->required();
  add_common(coord, coord_opts);

  std::string corpus_dir = CALM_CORPUS_DIR;
  bool corpus_json = false;
  auto* corpus = app.add_subcommand("corpus", "Bundled example programs");
  corpus->require_subcommand(1);
  auto* list = corpus->add_subcommand("list", "List corpus entries and their expected verdicts");
  list->add_option("--dir", corpus_dir, "Corpus directory");
  list->add_flag("--json", corpus_json, "Print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze) return calm::cli::cmd_analyze(program, analyze_json, std::cout, std::cerr);
    if (*run) {
      std::optional<std::filesystem::path> trace_path;
      if (trace) trace_path = *trace;
      return calm::cli::cmd_run(config, run_opts.overrides(), run_opts.json, trace_path, std::cout, std::cerr);
    }
    if (*check) return calm::cli::cmd_check(config, check_opts.overrides(), check_opts.json, std::cout, std::cerr);
    if (*coord) {
      return calm::cli::cmd_coordination(config, coord_opts.overrides(), coord_opts.json, std::cout, std::cerr);
    }
    if (*list) return calm::cli::cmd_corpus_list(corpus_dir, corpus_json, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "calmlab: error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
