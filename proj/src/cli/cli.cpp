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

#include "calm/cli/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <ostream>
#include <sstream>

#include "calm/lang/parser.hpp"
#include "calm/relspace/fact_text.hpp"
#include "calm/relspace/json.hpp"

namespace calm::cli {

namespace fs = std::filesystem;

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + file.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

namespace {

template <typename T>
T get_field(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

lang::ValidatedProgram load_program_file(const fs::path& file) {
  std::string text = read_file(file);
  try {
    return lang::load_program(text);
  } catch (const LocatedError& e) {
    throw Error(file.string() + ":" + e.what());
  }
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j, const fs::path& base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {"program", "fixture", "machines", "partitioning", "seed",
                                              "budget",  "duplicate_every", "mode", "samples", "bound",
                                              "schedule", "description"};
  for (const auto& [key, value] : j.items()) {
    if (known.count(key) == 0) throw ConfigError("unknown config field '" + key + "'");
  }
  RunConfig c;
  if (!j.contains("program")) throw ConfigError("config needs a 'program' path");
  c.program = base / get_field<std::string>(j, "program", "");
  std::string fixture = get_field<std::string>(j, "fixture", "");
  if (!fixture.empty()) c.fixture = base / fixture;
  c.machines = get_field<std::size_t>(j, "machines", 1);
  if (c.machines == 0) throw ConfigError("'machines' must be at least 1");
  if (j.contains("partitioning")) c.partitioning = j.at("partitioning");
  if (j.contains("seed")) c.seed = get_field<std::uint64_t>(j, "seed", 0);
  c.budget = get_field<std::size_t>(j, "budget", c.budget);
  c.duplicate_every = get_field<std::size_t>(j, "duplicate_every", 0);
  c.mode = verdicts::parse_mode(get_field<std::string>(j, "mode", "exhaustive"));
  c.samples = get_field<std::size_t>(j, "samples", c.samples);
  c.bound = get_field<std::size_t>(j, "bound", c.bound);
  if (j.contains("schedule")) {
    c.schedule = j.at("schedule");
    if (!c.schedule.is_array()) throw ConfigError("'schedule' must be an array of decisions");
  }
  return c;
}

RunConfig load_config(const fs::path& file) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(file));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(file.string() + ": invalid JSON: " + e.what());
  }
  return parse_config(j, file.parent_path());
}

netsim::Partitioning make_partitioning(const nlohmann::json& spec, const Database& input, std::size_t machines,
                                       const lang::ValidatedProgram& p) {
  if (spec.is_string()) {
    const std::string s = spec.get<std::string>();
    if (s == "colocate") return netsim::colocate(input, machines);
    if (s == "hash") return netsim::hash_partition(input, machines);
    throw ConfigError("unknown partitioning '" + s + "' (expected colocate, hash or a machine map)");
  }
  if (!spec.is_object()) throw ConfigError("partitioning must be a string or an object");
  netsim::Partitioning part;
  part.machines = netsim::machine_names(machines);
  std::set<Address> known(part.machines.begin(), part.machines.end());
  for (const auto& [machine, facts] : spec.items()) {
    Address a(machine);
    if (known.count(a) == 0) {
      throw ConfigError("partitioning names machine " + machine + " but the network has " +
                        std::to_string(machines) + " machines");
    }
    if (!facts.is_array()) throw ConfigError("facts for machine " + machine + " must be a list");
    for (const auto& text : facts) {
      Fact f = parse_fact(text.get<std::string>(), p.input_schemas());
      if (!part.assignment.emplace(f, a).second) throw PartitioningError("fact " + f.str() + " assigned twice");
    }
  }
  netsim::check_partitioning(input, part);
  return part;
}

Instance load_instance(const RunConfig& cfg) {
  Instance inst;
  inst.plan = transducer::make_plan(load_program_file(cfg.program));
  const auto& vp = inst.plan->program;
  inst.input = vp.input_schemas();
  if (!cfg.fixture.empty()) {
    try {
      inst.input = parse_facts(read_file(cfg.fixture), vp.input_schemas());
    } catch (const LocatedError& e) {
      throw Error(cfg.fixture.string() + ":" + e.what());
    }
  }
  inst.partitioning = make_partitioning(cfg.partitioning, inst.input, cfg.machines, vp);
  return inst;
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("CALMLAB_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  char* end = nullptr;
  unsigned long long x = std::strtoull(v, &end, 10);
  if (end == nullptr || *end != '\0') return std::nullopt;
  return static_cast<std::uint64_t>(x);
}

std::vector<CorpusEntry> load_corpus(const fs::path& dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(dir / "manifest.json"));
    std::vector<CorpusEntry> out;
    for (const auto& e : j.at("entries")) {
      CorpusEntry c;
      c.name = e.at("name").get<std::string>();
      c.program = e.at("program").get<std::string>();
      c.summary = e.value("summary", "");
      c.expected_static = e.at("expected_static").get<std::string>();
      for (const auto& f : e.at("fixtures")) {
        FixtureExpectation x;
        x.config = f.at("config").get<std::string>();
        x.confluence = f.at("confluence").get<std::string>();
        if (f.contains("coordination")) x.coordination = f.at("coordination").get<std::string>();
        c.fixtures.push_back(std::move(x));
      }
      out.push_back(std::move(c));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError((dir / "manifest.json").string() + ": " + e.what());
  }
}

namespace {

RunConfig apply(RunConfig c, const Overrides& o) {
  if (o.seed) c.seed = o.seed;
  if (!c.seed) c.seed = env_seed();
  if (o.machines) {
    if (*o.machines == 0) throw ConfigError("--machines must be at least 1");
    c.machines = *o.machines;
  }
  if (o.budget) c.budget = *o.budget;
  if (o.mode) c.mode = *o.mode;
  return c;
}

void print_json(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << "\n"; }

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "calmlab: error: " << e.what() << "\n";
    return 2;
  }
}

std::string facts_block(const Database& db) {
  std::string s = format_facts(db);
  return s.empty() ? "  (none)\n" : s;
}

}  // namespace

int cmd_analyze(const fs::path& program, bool json, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    auto vp = load_program_file(program);
    auto report = monocheck::analyze_program(vp);
    if (json) {
      print_json(out, monocheck::report_to_json(report));
    } else {
      out << monocheck::report_to_text(report);
    }
    return report.monotone ? 0 : 1;
  });
}

int cmd_run(const fs::path& config, const Overrides& o, bool json, const std::optional<fs::path>& trace,
            std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    RunConfig cfg = apply(load_config(config), o);
    Instance inst = load_instance(cfg);
    netsim::Schedule s = netsim::Schedule::seeded(cfg.seed.value_or(0));
    s.duplicate_every = cfg.duplicate_every;
    for (const auto& d : cfg.schedule) s.decisions.push_back(netsim::decision_from_json(d, inst.plan->program));
    auto net = netsim::init_network(inst.plan, inst.input, inst.partitioning);
    auto run = netsim::run_schedule(std::move(net), s, cfg.budget);
    if (trace) {
      std::ofstream t(*trace, std::ios::binary);
      if (!t) throw ConfigError("cannot write trace to " + trace->string());
      t << netsim::trace_to_jsonl(run.trace);
    }
    if (json) {
      nlohmann::json j = netsim::outcome_to_json(run);
      j["seed"] = s.seed;
      print_json(out, j);
    } else {
      out << "quiesced: " << (run.quiesced ? "yes" : "no") << "\n";
      out << "steps: " << run.steps_used << "\n";
      out << "inter-machine messages: " << run.inter_machine_messages << "\n";
      out << "output:\n" << facts_block(run.output);
    }
    if (!run.quiesced) err << "calmlab: run did not quiesce within " << cfg.budget << " steps\n";
    return run.quiesced ? 0 : 2;
  });
}

int cmd_check(const fs::path& config, const Overrides& o, bool json, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    RunConfig cfg = apply(load_config(config), o);
    Instance inst = load_instance(cfg);
    verdicts::CheckOptions opts;
    opts.mode = cfg.mode;
    opts.samples = cfg.samples;
    opts.seed = cfg.seed.value_or(0);
    opts.step_budget = cfg.budget;
    opts.bound = cfg.bound;
    auto v = verdicts::check_confluence(inst.plan, inst.input, inst.partitioning, opts);
    if (json) {
      print_json(out, verdicts::verdict_to_json(v));
    } else {
      out << "verdict: " << verdicts::outcome_name(v.outcome) << " (" << verdicts::mode_name(v.mode) << ")\n";
      out << "distinct outcomes: " << v.distinct_outcomes << "\n";
      out << "runs examined: " << v.runs_examined << "\n";
      if (v.mode == verdicts::Mode::Exhaustive) {
        out << "states: " << v.states << (v.complete ? "" : " (bound reached, partial)") << "\n";
      }
      for (std::size_t i = 0; i < v.witnesses.size(); ++i) {
        out << "witness " << i + 1 << " (" << v.witnesses[i].run.steps_used << " steps):\n"
            << facts_block(v.witnesses[i].run.output);
      }
      if (v.witnesses.size() == 2) {
        auto d = verdicts::compare_outputs(v.witnesses[0].run, v.witnesses[1].run);
        out << "difference:\n";
        for (const auto& [rel, rd] : d.relations) {
          for (const Fact& f : rd.only_a) out << "  only in witness 1: " << f.str() << "\n";
          for (const Fact& f : rd.only_b) out << "  only in witness 2: " << f.str() << "\n";
        }
      }
    }
    switch (v.outcome) {
      case verdicts::ConfluenceOutcome::Confluent: return 0;
      case verdicts::ConfluenceOutcome::Divergent: return 1;
      case verdicts::ConfluenceOutcome::Inconclusive: return 2;
    }
    return 2;
  });
}

int cmd_coordination(const fs::path& config, const Overrides& o, bool json, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    RunConfig cfg = apply(load_config(config), o);
    Instance inst = load_instance(cfg);
    verdicts::CoordinationOptions opts;
    opts.mode = cfg.mode;
    opts.samples = cfg.samples;
    opts.seed = cfg.seed.value_or(0);
    opts.step_budget = cfg.budget;
    opts.bound = cfg.bound;
    auto r = verdicts::detect_coordination(inst.plan, inst.input, cfg.machines, opts);
    if (json) {
      print_json(out, verdicts::coordination_to_json(r));
    } else {
      out << "verdict: " << verdicts::coordination_name(r.outcome) << "\n";
      out << "colocated minimum messages: "
          << (r.colocated_min_messages ? std::to_string(*r.colocated_min_messages) : "unknown") << "\n";
      for (const auto& s : r.partitionings) {
        out << "  " << s.label << ": "
            << (s.min_messages ? std::to_string(*s.min_messages) : "unknown") << " messages"
            << (s.complete ? "" : " (partial)") << ", " << s.distinct_outcomes << " outcome(s)\n";
      }
    }
    switch (r.outcome) {
      case verdicts::CoordinationOutcome::Free: return 0;
      case verdicts::CoordinationOutcome::Required: return 1;
      case verdicts::CoordinationOutcome::Inconclusive: return 2;
    }
    return 2;
  });
}

int cmd_corpus_list(const fs::path& dir, bool json, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    auto entries = load_corpus(dir);
    if (json) {
      nlohmann::json j;
      j["schema_version"] = 1;
      j["entries"] = nlohmann::json::array();
      for (const auto& e : entries) {
        nlohmann::json fx = nlohmann::json::array();
        for (const auto& f : e.fixtures) {
          nlohmann::json x = {{"config", f.config}, {"confluence", f.confluence}};
          if (f.coordination) x["coordination"] = *f.coordination;
          fx.push_back(x);
        }
        j["entries"].push_back({{"name", e.name},
                                {"program", e.program},
                                {"summary", e.summary},
                                {"expected_static", e.expected_static},
                                {"fixtures", fx}});
      }
      print_json(out, j);
    } else {
      for (const auto& e : entries) {
        out << e.name << "  [" << e.expected_static << "]  " << e.program << "\n";
        if (!e.summary.empty()) out << "    " << e.summary << "\n";
        for (const auto& f : e.fixtures) {
          out << "    " << f.config << ": " << f.confluence;
          if (f.coordination) out << ", " << *f.coordination;
          out << "\n";
        }
      }
    }
    return 0;
  });
}

}  // namespace calm::cli
