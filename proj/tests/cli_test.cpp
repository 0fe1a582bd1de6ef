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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "calm/cli/cli.hpp"
#include "calm/error.hpp"
#include "calm/verdicts/verdicts.hpp"
#include "test_util.hpp"

namespace calm::cli {
namespace {

namespace fs = std::filesystem;

fs::path corpus(const char* f) { return testing::corpus_dir() / f; }

struct Captured {
  int code = 0;
  std::string out;
  std::string err;
};

template <typename F>
Captured capture(F f) {
  std::ostringstream out;
  std::ostringstream err;
  Captured c;
  c.code = f(out, err);
  c.out = out.str();
  c.err = err.str();
  return c;
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("calmlab-test-" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path file(const std::string& name, const std::string& content) const {
    std::ofstream(path_ / name) << content;
    return path_ / name;
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

TEST(Analyze, ExitCodes) {
  auto dl = capture([](auto& o, auto& e) { return cmd_analyze(corpus("deadlock.calm"), false, o, e); });
  EXPECT_EQ(dl.code, 0);
  EXPECT_NE(dl.out.find("verdict: monotone"), std::string::npos);
  auto gc = capture([](auto& o, auto& e) { return cmd_analyze(corpus("gc.calm"), false, o, e); });
  EXPECT_EQ(gc.code, 1);
  EXPECT_NE(gc.out.find("non-monotone{negation}"), std::string::npos);
  auto missing = capture([](auto& o, auto& e) { return cmd_analyze("missing.calm", false, o, e); });
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("calmlab: error:"), std::string::npos);
}

TEST(Analyze, ParseErrorNamesFile) {
  TempDir tmp;
  fs::path bad = tmp.file("bad.calm", "table a(sym).\na(X) :- .\n");
  auto r = capture([&](auto& o, auto& e) { return cmd_analyze(bad, false, o, e); });
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.calm:2:"), std::string::npos) << r.err;
}

TEST(Run, DeadlockSeedSevenListsBothCycles) {
  auto r = capture([](auto& o, auto& e) { return cmd_run(corpus("deadlock.json"), {}, true, std::nullopt, o, e); });
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_TRUE(j.at("quiesced").get<bool>());
  auto cycles = j.at("output").at("deadlock");
  EXPECT_EQ(cycles.size(), 4u);
  auto again = capture([](auto& o, auto& e) { return cmd_run(corpus("deadlock.json"), {}, true, std::nullopt, o, e); });
  EXPECT_EQ(again.out, r.out);
  testing::expect_golden("run_deadlock_seed7.json", r.out);
}

TEST(Run, BudgetOneIsFlagged) {
  Overrides o;
  o.budget = 1;
  auto r = capture([&](auto& out, auto& err) { return cmd_run(corpus("deadlock.json"), o, true, std::nullopt, out, err); });
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(nlohmann::json::parse(r.out).at("quiesced").get<bool>());
}

TEST(Run, WritesTrace) {
  TempDir tmp;
  fs::path trace = tmp.path() / "trace.jsonl";
  auto r = capture([&](auto& o, auto& e) { return cmd_run(corpus("deadlock.json"), {}, true, trace, o, e); });
  ASSERT_EQ(r.code, 0);
  std::ifstream in(trace);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("fact"));
    ++lines;
  }
  EXPECT_EQ(lines, nlohmann::json::parse(r.out).at("inter_machine_messages").get<std::size_t>());
}

TEST(Run, SeedPrecedence) {
  TempDir tmp;
  fs::path cfg = tmp.file("cfg.json", R"({"program": ")" + corpus("gc.calm").string() + R"(", "fixture": ")" +
                                          corpus("fixtures/gc-object-graph.facts").string() +
                                          R"(", "machines": 3, "partitioning": "hash"})");
  auto run_seed = [&](std::optional<std::uint64_t> flag) {
    Overrides o;
    o.seed = flag;
    auto r = capture([&](auto& out, auto& err) { return cmd_run(cfg, o, true, std::nullopt, out, err); });
    return nlohmann::json::parse(r.out).at("seed").get<std::uint64_t>();
  };
  ::unsetenv("CALMLAB_SEED");
  EXPECT_EQ(run_seed(std::nullopt), 0u);
  ::setenv("CALMLAB_SEED", "31", 1);
  EXPECT_EQ(run_seed(std::nullopt), 31u);
  EXPECT_EQ(run_seed(5), 5u);
  ::unsetenv("CALMLAB_SEED");
}

TEST(Check, ExitCodesAndGolden) {
  auto manifest = capture([](auto& o, auto& e) { return cmd_check(corpus("cart-manifest.json"), {}, false, o, e); });
  EXPECT_EQ(manifest.code, 0);
  EXPECT_NE(manifest.out.find("confluent-on-instance"), std::string::npos);

  auto naive = capture([](auto& o, auto& e) { return cmd_check(corpus("cart-naive.json"), {}, true, o, e); });
  EXPECT_EQ(naive.code, 1);
  auto j = nlohmann::json::parse(naive.out);
  EXPECT_EQ(j.at("verdict"), "divergent");
  EXPECT_EQ(j.at("witnesses").size(), 2u);
  testing::expect_golden("check_cart_naive.json", naive.out);

  auto gc = capture([](auto& o, auto& e) { return cmd_check(corpus("gc.json"), {}, true, o, e); });
  EXPECT_EQ(gc.code, 1);
  testing::expect_golden("check_gc.json", gc.out);

  Overrides tiny;
  tiny.mode = verdicts::Mode::Exhaustive;
  auto inconclusive = capture([&](auto& o, auto& e) {
    TempDir tmp;
    fs::path cfg = tmp.file("b.json", R"({"program": ")" + corpus("deadlock.calm").string() + R"(", "fixture": ")" +
                                          corpus("fixtures/deadlock-two-cycles.facts").string() +
                                          R"(", "machines": 3, "partitioning": "hash", "bound": 3})");
    return cmd_check(cfg, tiny, false, o, e);
  });
  EXPECT_EQ(inconclusive.code, 2);
}

TEST(Coordination, ExitCodesAndGolden) {
  auto dl = capture([](auto& o, auto& e) { return cmd_coordination(corpus("deadlock.json"), {}, true, o, e); });
  EXPECT_EQ(dl.code, 0);
  EXPECT_EQ(nlohmann::json::parse(dl.out).at("verdict"), "coordination-free-on-instance");
  testing::expect_golden("coordination_deadlock.json", dl.out);
  auto gc = capture([](auto& o, auto& e) { return cmd_coordination(corpus("gc-coordinated-small.json"), {}, false, o, e); });
  EXPECT_EQ(gc.code, 1);
  EXPECT_NE(gc.out.find("coordination-required-on-instance"), std::string::npos);
}

TEST(Reports, AnalyzeGolden) {
  auto gc = capture([](auto& o, auto& e) { return cmd_analyze(corpus("gc.calm"), true, o, e); });
  testing::expect_golden("analyze_gc.json", gc.out);
  auto dl = capture([](auto& o, auto& e) { return cmd_analyze(corpus("deadlock.calm"), true, o, e); });
  testing::expect_golden("analyze_deadlock.json", dl.out);
}

TEST(Config, Errors) {
  TempDir tmp;
  EXPECT_THROW(load_config(tmp.file("a.json", R"({"program": "x.calm", "colour": 1})")), ConfigError);
  EXPECT_THROW(load_config(tmp.file("b.json", R"({"fixture": "x.facts"})")), ConfigError);
  EXPECT_THROW(load_config(tmp.file("c.json", R"({"program": "x.calm", "machines": "two"})")), ConfigError);
  EXPECT_THROW(load_config(tmp.file("d.json", "not json")), ConfigError);
  RunConfig c = load_config(tmp.file("e.json", R"({"program": "x.calm", "mode": "sampled"})"));
  EXPECT_EQ(c.program, tmp.path() / "x.calm");
  EXPECT_EQ(c.mode, verdicts::Mode::Sampled);
  auto r = capture([&](auto& o, auto& e) { return cmd_check(tmp.path() / "a.json", {}, false, o, e); });
  EXPECT_EQ(r.code, 2);
}

TEST(Config, ExplicitPartitioningMustCoverInput) {
  TempDir tmp;
  fs::path cfg = tmp.file("p.json", R"({"program": ")" + corpus("cart-naive.calm").string() + R"(", "fixture": ")" +
                                        corpus("fixtures/cart-concurrent.facts").string() +
                                        R"x(", "machines": 2, "partitioning": {"M1": ["add_req(apple)"]}})x");
  auto r = capture([&](auto& o, auto& e) { return cmd_check(cfg, {}, false, o, e); });
  EXPECT_EQ(r.code, 2);
}

TEST(Corpus, ManifestLists) {
  auto entries = load_corpus(testing::corpus_dir());
  EXPECT_EQ(entries.size(), 8u);
  auto r = capture([](auto& o, auto& e) { return cmd_corpus_list(testing::corpus_dir(), true, o, e); });
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out).at("entries").size(), 8u);
}

// Every expectation recorded in the corpus manifest is checked here.
TEST(Corpus, ExpectedVerdictsHold) {
  for (const auto& entry : load_corpus(testing::corpus_dir())) {
    auto a = capture([&](auto& o, auto& e) { return cmd_analyze(corpus(entry.program.c_str()), true, o, e); });
    EXPECT_EQ(nlohmann::json::parse(a.out).at("verdict"), entry.expected_static) << entry.name;
    for (const auto& f : entry.fixtures) {
      auto c = capture([&](auto& o, auto& e) { return cmd_check(corpus(f.config.c_str()), {}, true, o, e); });
      EXPECT_EQ(nlohmann::json::parse(c.out).at("verdict"), f.confluence) << f.config;
      if (f.coordination) {
        auto k = capture([&](auto& o, auto& e) { return cmd_coordination(corpus(f.config.c_str()), {}, true, o, e); });
        EXPECT_EQ(nlohmann::json::parse(k.out).at("verdict"), *f.coordination) << f.config;
      }
    }
  }
}

}  // namespace
}  // namespace calm::cli
