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

// End-to-end acceptance run over the bundled corpus. Prints one PASS/FAIL
// line per criterion and exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "calm/cli/cli.hpp"
#include "calm/lattices/lattice.hpp"
#include "calm/monocheck/monocheck.hpp"
#include "calm/netsim/netsim.hpp"
#include "calm/relspace/fact_text.hpp"
#include "calm/relspace/json.hpp"
#include "calm/verdicts/verdicts.hpp"

namespace fs = std::filesystem;

namespace calm::acceptance {
namespace {

using netsim::Partitioning;
using transducer::ProgramPlan;
using PlanPtr = std::shared_ptr<const ProgramPlan>;

const fs::path kCorpus = CALM_CORPUS_DIR;
const fs::path kGolden = CALM_GOLDEN_DIR;

// Collects failure details for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) failures_.push_back(what);
  }
  bool ok() const { return failures_.empty() && checks_ > 0; }
  std::size_t checks() const { return checks_; }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::size_t checks_ = 0;
  std::vector<std::string> failures_;
};

struct Fixture {
  std::string name;   // fixture file stem
  Database input;
};

struct Program {
  std::string name;
  PlanPtr plan;
  bool monotone = false;
  std::vector<Fixture> fixtures;
  std::vector<cli::RunConfig> configs;
};

std::vector<Program> load_matrix() {
  std::vector<Program> out;
  for (const auto& entry : cli::load_corpus(kCorpus)) {
    Program p;
    p.name = entry.name;
    p.plan = transducer::make_plan(lang::load_program(cli::read_file(kCorpus / entry.program)));
    p.monotone = monocheck::analyze_program(p.plan->program).monotone;
    std::set<std::string> seen;
    for (const auto& f : entry.fixtures) {
      cli::RunConfig cfg = cli::load_config(kCorpus / f.config);
      p.configs.push_back(cfg);
      std::string stem = cfg.fixture.stem().string();
      if (cfg.fixture.empty() || !seen.insert(stem).second) continue;
      p.fixtures.push_back({stem, parse_facts(cli::read_file(cfg.fixture), p.plan->program.input_schemas())});
    }
    out.push_back(std::move(p));
  }
  return out;
}

const Program& find(const std::vector<Program>& m, const std::string& name) {
  for (const auto& p : m) {
    if (p.name == name) return p;
  }
  throw std::runtime_error("corpus entry missing: " + name);
}

const Fixture& fixture(const Program& p, const std::string& name) {
  for (const auto& f : p.fixtures) {
    if (f.name == name) return f;
  }
  throw std::runtime_error("fixture missing: " + p.name + "/" + name);
}

cli::Instance instance(const std::string& config) {
  return cli::load_instance(cli::load_config(kCorpus / config));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Criterion 1 also feeds criterion 8: every divergence seen anywhere in the
// matrix is recorded against its program.
std::map<std::string, std::vector<std::string>> g_divergences;

void record(const Program& p, const verdicts::ConfluenceVerdict& v, const std::string& where) {
  if (v.outcome == verdicts::ConfluenceOutcome::Divergent) g_divergences[p.name].push_back(where);
}

std::string criterion1(const std::vector<Program>& matrix, Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  std::size_t instances = 0;
  std::size_t programs = 0;
  for (const auto& p : matrix) {
    if (!p.monotone) continue;
    ++programs;
    for (const auto& f : p.fixtures) {
      if (f.input.size() > 12) continue;
      bool symmetric = verdicts::machine_symmetric(p.plan->program, f.input);
      for (std::size_t m = 1; m <= 3; ++m) {
        for (const auto& part : verdicts::enumerate_partitionings(f.input, m, symmetric)) {
          auto v = verdicts::check_confluence(p.plan, f.input, part);
          ++instances;
          std::string where = p.name + "/" + f.name + " " + part.str();
          record(p, v, where);
          c.expect(v.outcome == verdicts::ConfluenceOutcome::Confluent && v.distinct_outcomes == 1,
                   where + ": " + verdicts::outcome_name(v.outcome) + ", " + std::to_string(v.distinct_outcomes) +
                       " outcomes");
        }
      }
    }
  }
  double secs = seconds_since(t0);
  c.expect(programs == 4, "expected 4 monotone corpus programs, found " + std::to_string(programs));
  c.expect(secs < 60.0, "took " + std::to_string(secs) + " s");
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu programs, %zu instances, %.2f s", programs, instances, secs);
  return buf;
}

std::string criterion2(const std::vector<Program>& matrix, Check& c) {
  auto gc = instance("gc.json");
  auto v = verdicts::check_confluence(gc.plan, gc.input, gc.partitioning);
  record(find(matrix, "gc"), v, "gc/gc-object-graph " + gc.partitioning.str());
  c.expect(v.outcome == verdicts::ConfluenceOutcome::Divergent, "gc object graph not divergent");
  std::string diff_text;
  if (v.witnesses.size() == 2) {
    auto d = verdicts::compare_outputs(v.witnesses[0].run, v.witnesses[1].run);
    c.expect(d.facts() == std::vector<Fact>{Fact("garbage", {Value::sym("O4")})}, "gc witness diff is not {garbage(O4)}");
    diff_text = verdicts::diff_to_json(d).dump(2) + "\n";
    c.expect(diff_text == cli::read_file(kGolden / "gc_witness_diff.json"), "gc witness diff differs from golden");
  } else {
    c.expect(false, "gc verdict has " + std::to_string(v.witnesses.size()) + " witnesses");
  }
  auto cart = instance("cart-naive.json");
  auto cv = verdicts::check_confluence(cart.plan, cart.input, cart.partitioning);
  record(find(matrix, "cart-naive"), cv, "cart-naive/cart-concurrent " + cart.partitioning.str());
  c.expect(cv.distinct_outcomes >= 2, "cart-naive has " + std::to_string(cv.distinct_outcomes) + " outcomes");
  return "gc outcomes " + std::to_string(v.distinct_outcomes) + ", cart-naive outcomes " +
         std::to_string(cv.distinct_outcomes);
}

// Unordered pairs {X, Y} read off deadlock(X, Y) facts.
std::set<std::set<std::string>> cycle_sets(const Database& out) {
  std::set<std::set<std::string>> sets;
  for (const auto& f : out.facts(Symbol("deadlock"))) {
    sets.insert({f.arg(0).as_symbol().name(), f.arg(1).as_symbol().name()});
  }
  return sets;
}

std::string criterion3(const std::vector<Program>& matrix, Check& c) {
  const std::set<std::set<std::string>> expected = {{"T1", "T2"}, {"T1", "T3"}};
  auto dl = instance("deadlock.json");
  std::size_t schedules_outcomes = 0;
  for (const Partitioning& part : {dl.partitioning, netsim::colocate(dl.input, 1), netsim::hash_partition(dl.input, 2)}) {
    auto e = netsim::enumerate_schedules(netsim::init_network(dl.plan, dl.input, part));
    c.expect(e.complete, "deadlock exploration incomplete for " + part.str());
    c.expect(e.terminal_states > 0, "deadlock exploration found no terminal state");
    for (const auto& o : e.outcomes) {
      ++schedules_outcomes;
      c.expect(cycle_sets(o.output) == expected, "deadlock outcome " + o.canonical + " under " + part.str());
    }
  }
  const Program& gc = find(matrix, "gc");
  const Database& graph = fixture(gc, "gc-object-graph").input;
  Database expected_garbage = gc.plan->program.schemas().filter(
      [](const RelationSchema& s) { return s.name == Symbol("garbage"); });
  expected_garbage.insert(Fact("garbage", {Value::sym("O5")}));
  expected_garbage.insert(Fact("garbage", {Value::sym("O6")}));
  auto e = netsim::enumerate_schedules(netsim::init_network(gc.plan, graph, netsim::colocate(graph, 1)));
  c.expect(e.complete && e.outcomes.size() == 1, "gc colocated exploration not a single outcome");
  for (const auto& o : e.outcomes) {
    c.expect(o.output == expected_garbage, "gc colocated output " + o.canonical);
  }
  return std::to_string(schedules_outcomes) + " deadlock outcome sets checked";
}

std::string criterion4(const std::vector<Program>& matrix, Check& c) {
  auto dl = instance("deadlock.json");
  auto r = verdicts::detect_coordination(dl.plan, dl.input, dl.partitioning.size());
  c.expect(r.outcome == verdicts::CoordinationOutcome::Free, "deadlock not coordination-free");
  c.expect(r.colocated_min_messages == std::optional<std::size_t>(0), "deadlock colocated minimum not 0");
  std::string detail = "deadlock min 0";
  const Program& gcc = find(matrix, "gc-coordinated");
  std::set<std::string> covered;
  for (const auto& cfg : gcc.configs) {
    cli::Instance inst = cli::load_instance(cfg);
    covered.insert(cfg.fixture.stem().string());
    auto k = verdicts::detect_coordination(inst.plan, inst.input, cfg.machines);
    std::string where = "gc-coordinated/" + cfg.fixture.stem().string() + " M=" + std::to_string(cfg.machines);
    c.expect(k.outcome == verdicts::CoordinationOutcome::Required, where + ": " + verdicts::coordination_name(k.outcome));
    c.expect(k.colocated_min_messages.value_or(0) >= 1, where + ": colocated minimum is 0 or unknown");
    detail += ", " + cfg.fixture.stem().string() + " min " +
              (k.colocated_min_messages ? std::to_string(*k.colocated_min_messages) : "?");
  }
  c.expect(covered.size() == gcc.fixtures.size(), "gc-coordinated fixture without a config");
  c.expect(covered.size() >= 2, "gc-coordinated has fewer than 2 fixtures");
  return detail;
}

Database single_machine_output(const PlanPtr& plan, const Database& input) {
  auto n = netsim::init_network(plan, input, netsim::colocate(input, 1));
  auto r = netsim::run_schedule(std::move(n), netsim::Schedule::seeded(0), 100000);
  if (!r.quiesced) throw std::runtime_error("single-machine run did not quiesce");
  return r.output;
}

Database subset(const Database& schemas, const std::vector<Fact>& facts) {
  Database d = schemas;
  for (const auto& f : facts) d.insert(f);
  return d;
}

std::string criterion5(const std::vector<Program>& matrix, Check& c) {
  std::mt19937_64 rng(20240605);
  std::size_t pairs = 0;
  std::size_t gc_violations = 0;
  bool o4_leaves = false;
  for (const auto& p : matrix) {
    if (!p.monotone && p.name != "gc") continue;
    const Database schemas = p.plan->program.input_schemas();
    for (int i = 0; i < 20; ++i) {
      const Fixture& f = p.fixtures[rng() % p.fixtures.size()];
      std::vector<Fact> facts = f.input.all_facts();
      std::shuffle(facts.begin(), facts.end(), rng);
      // T: a random nonempty prefix; S: T minus 1..3 of its facts.
      std::size_t t_size = 1 + rng() % facts.size();
      std::size_t removed = 1 + rng() % std::min<std::size_t>(3, t_size);
      std::vector<Fact> t(facts.begin(), facts.begin() + t_size);
      std::vector<Fact> s(t.begin(), t.end() - removed);
      Database out_s = single_machine_output(p.plan, subset(schemas, s));
      Database out_t = single_machine_output(p.plan, subset(schemas, t));
      bool leq = db_leq(out_s, out_t);
      ++pairs;
      if (p.monotone) {
        c.expect(leq, p.name + "/" + f.name + ": output(S) not contained in output(T)");
      } else if (!leq) {
        ++gc_violations;
      }
    }
  }
  // The specific retraction: adding the reference to O4 removes it from garbage.
  const Program& gc = find(matrix, "gc");
  const Database& graph = fixture(gc, "gc-object-graph").input;
  Fact o4_ref = parse_fact("ref(O3, O4)", gc.plan->program.input_schemas());
  std::vector<Fact> without;
  for (const auto& f : graph.all_facts()) {
    if (f != o4_ref) without.push_back(f);
  }
  Database before = single_machine_output(gc.plan, subset(gc.plan->program.input_schemas(), without));
  Database after = single_machine_output(gc.plan, graph);
  Fact o4("garbage", {Value::sym("O4")});
  o4_leaves = before.contains(o4) && !after.contains(o4);
  c.expect(gc_violations >= 1, "no gc pair violated containment");
  c.expect(o4_leaves, "garbage(O4) did not leave when ref(O3, O4) was added");
  return std::to_string(pairs) + " pairs, gc violations " + std::to_string(gc_violations) + "/20";
}

GSet random_gset(std::mt19937_64& rng) {
  GSet g;
  for (int i = static_cast<int>(rng() % 6); i > 0; --i) {
    if (rng() % 3 == 0) {
      g.items.insert(static_cast<std::int64_t>(rng() % 8));
    } else {
      g.items.insert(Symbol("I" + std::to_string(rng() % 8)));
    }
  }
  return g;
}

LatticeValue random_lattice(LatticeKind k, std::mt19937_64& rng) {
  switch (k) {
    case LatticeKind::GSet: return random_gset(rng);
    case LatticeKind::MaxInt: return MaxInt{static_cast<std::int64_t>(rng() % 101) - 50};
    case LatticeKind::BoolOr: return BoolOr{(rng() & 1) != 0};
    case LatticeKind::TwoPSet: return TwoPSet{random_gset(rng), random_gset(rng)};
  }
  return {};
}

std::string criterion6(Check& c) {
  using lattices::leq;
  using lattices::merge;
  std::mt19937_64 rng(6);
  const LatticeKind kinds[] = {LatticeKind::GSet, LatticeKind::MaxInt, LatticeKind::BoolOr, LatticeKind::TwoPSet};
  std::size_t cases = 0;
  std::size_t perms = 0;
  for (LatticeKind k : kinds) {
    const std::string name = lattice_kind_name(k);
    for (int i = 0; i < 250; ++i, ++cases) {
      LatticeValue a = random_lattice(k, rng);
      LatticeValue b = random_lattice(k, rng);
      LatticeValue x = random_lattice(k, rng);
      c.expect(merge(merge(a, b), x) == merge(a, merge(b, x)), name + " associativity");
      c.expect(merge(a, b) == merge(b, a), name + " commutativity");
      c.expect(merge(a, a) == a, name + " idempotence");
      c.expect(leq(a, merge(a, b)) && leq(b, merge(a, b)), name + " inflation");
    }
    for (int i = 0; i < 120; ++i, ++perms) {
      std::vector<LatticeValue> updates;
      for (int j = 1 + static_cast<int>(rng() % 8); j > 0; --j) updates.push_back(random_lattice(k, rng));
      std::vector<LatticeValue> other = updates;
      std::shuffle(other.begin(), other.end(), rng);
      LatticeValue r1 = LatticeValue::bottom(k);
      LatticeValue r2 = LatticeValue::bottom(k);
      for (const auto& u : updates) r1 = merge(r1, u);
      for (const auto& u : other) r2 = merge(r2, u);
      c.expect(r1 == r2, name + " replica convergence");
    }
  }
  return std::to_string(cases) + " law cases, " + std::to_string(perms) + " permutation pairs";
}

std::string criterion7(const std::vector<Program>& matrix, Check& c) {
  std::size_t runs = 0;
  for (const auto& p : matrix) {
    for (const auto& cfg : p.configs) {
      for (std::uint64_t seed : {0ULL, 1ULL, 7ULL, 4242ULL}) {
        std::string first;
        for (int rep = 0; rep < 3; ++rep) {
          cli::Instance inst = cli::load_instance(cfg);
          auto n = netsim::init_network(inst.plan, inst.input, inst.partitioning);
          std::string text = netsim::canonical(netsim::run_schedule(std::move(n), netsim::Schedule::seeded(seed), 10000));
          if (rep == 0) {
            first = text;
          } else {
            c.expect(text == first, p.name + " " + cfg.fixture.stem().string() + " seed " + std::to_string(seed));
          }
          ++runs;
        }
      }
    }
  }
  return std::to_string(runs) + " runs";
}

std::string criterion8(const std::vector<Program>& matrix, Check& c) {
  verdicts::CheckOptions opts;
  opts.bound = 200000;
  std::size_t instances = 0;
  for (const auto& p : matrix) {
    // Monotone programs were covered over every partitioning by criterion 1.
    if (p.monotone) continue;
    for (const auto& cfg : p.configs) {
      cli::Instance inst = cli::load_instance(cfg);
      std::vector<Partitioning> parts = {inst.partitioning, netsim::colocate(inst.input, 1)};
      for (std::size_t m = 2; m <= 3; ++m) parts.push_back(netsim::hash_partition(inst.input, m));
      for (const auto& part : parts) {
        auto v = verdicts::check_confluence(inst.plan, inst.input, part, opts);
        record(p, v, p.name + "/" + cfg.fixture.stem().string() + " " + part.str());
        ++instances;
      }
    }
  }
  std::size_t divergent_programs = 0;
  for (const auto& p : matrix) {
    auto it = g_divergences.find(p.name);
    if (it == g_divergences.end()) continue;
    ++divergent_programs;
    c.expect(!p.monotone, p.name + " is labelled monotone but diverges at " + it->second.front());
  }
  c.expect(divergent_programs >= 2, "fewer than 2 corpus programs showed a divergence");
  return std::to_string(instances) + " extra instances, " + std::to_string(divergent_programs) +
         " programs with divergence witnesses";
}

int run() {
  std::vector<Program> matrix = load_matrix();
  struct Criterion {
    int id;
    const char* title;
    std::function<std::string(Check&)> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "monotone programs confluent on every partitioning", [&](Check& c) { return criterion1(matrix, c); }},
      {2, "non-monotone divergence witnesses", [&](Check& c) { return criterion2(matrix, c); }},
      {3, "reference outputs", [&](Check& c) { return criterion3(matrix, c); }},
      {4, "coordination detection", [&](Check& c) { return criterion4(matrix, c); }},
      {5, "dynamic monotonicity", [&](Check& c) { return criterion5(matrix, c); }},
      {6, "lattice laws", [&](Check& c) { return criterion6(c); }},
      {7, "replay determinism", [&](Check& c) { return criterion7(matrix, c); }},
      {8, "analyzer conservativeness", [&](Check& c) { return criterion8(matrix, c); }},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    std::string detail;
    try {
      detail = cr.body(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::cout << (c.ok() ? "PASS" : "FAIL") << " criterion " << cr.id << ": " << cr.title << " (" << detail << ")\n";
    std::size_t shown = 0;
    for (const auto& f : c.failures()) {
      if (++shown > 10) break;
      std::cout << "    " << f << "\n";
    }
    if (!c.ok()) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace calm::acceptance

int main() {
  try {
    return calm::acceptance::run();
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return 2;
  }
}
