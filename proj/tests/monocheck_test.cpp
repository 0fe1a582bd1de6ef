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

#include <algorithm>
#include <random>
#include <regex>
#include <string>

#include <gtest/gtest.h>

#include "calm/error.hpp"
#include "calm/lang/parser.hpp"
#include "calm/monocheck/monocheck.hpp"
#include "test_util.hpp"

namespace calm::monocheck {
namespace {

lang::Rule rule_of(const std::string& decls, const std::string& rule) {
  return lang::parse_program(decls + rule).rules.at(0);
}

lang::ValidatedProgram corpus(const char* name) {
  return lang::load_program(cli::read_file(testing::corpus_dir() / (std::string(name) + ".calm")));
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify_rule(rule_of("input table edge(sym, sym).\ntable path(sym, sym).\n",
                                  "path(X,Y) :- edge(X,Y).")).str(),
            "monotone");
  EXPECT_EQ(classify_rule(rule_of("input table object(sym).\ntable reach(sym).\ntable garbage(sym).\n",
                                  "garbage(X) :- object(X), !reach(X).")).str(),
            "non-monotone{negation}");
  EXPECT_EQ(classify_rule(rule_of("input table member(sym).\ntable n(int).\n", "n(count<X>) :- member(X).")).str(),
            "non-monotone{aggregation}");
  EXPECT_EQ(classify_rule(rule_of("table m(addr).\n", "m(X) :- all(X).")).str(), "non-monotone{membership-query}");
  EXPECT_TRUE(classify_rule(rule_of("table m(addr).\n", "m(X) :- id(X).")).monotone());
}

// Oracle for the aggregation verdict: a larger input retracts an earlier count.
TEST(Classify, CountViolatesContainment) {
  auto plan = testing::plan_of("input table member(sym).\noutput table n(int).\nn(count<X>) :- member(X).");
  Database small = plan->program.input_schemas();
  small.insert(Fact("member", {Value::sym("a")}));
  Database big = small;
  big.insert(Fact("member", {Value::sym("b")}));
  Database out_small = transducer::outputs_of(transducer::evaluate(small, *plan), plan->program);
  Database out_big = transducer::outputs_of(transducer::evaluate(big, *plan), plan->program);
  EXPECT_TRUE(db_leq(small, big));
  EXPECT_FALSE(db_leq(out_small, out_big));
}

TEST(Analyze, DeadlockIsMonotone) {
  AnalysisReport r = analyze_program(corpus("deadlock"));
  EXPECT_TRUE(r.monotone);
  EXPECT_TRUE(r.coordination_points.empty());
  EXPECT_TRUE(r.stratifiable);
}

TEST(Analyze, GcHasOneNegationPoint) {
  AnalysisReport r = analyze_program(corpus("gc"));
  EXPECT_FALSE(r.monotone);
  ASSERT_EQ(r.coordination_points.size(), 1u);
  EXPECT_EQ(r.coordination_points[0].reason, Reason::Negation);
  EXPECT_EQ(r.coordination_points[0].construct, "!reach(X)");
}

TEST(Analyze, CheckoutIsNonMonotone) {
  AnalysisReport r = analyze_program(corpus("cart-manifest"));
  EXPECT_FALSE(r.monotone);
  bool negation = std::any_of(r.coordination_points.begin(), r.coordination_points.end(),
                              [](const CoordinationPoint& c) { return c.reason == Reason::Negation; });
  EXPECT_TRUE(negation);
}

TEST(Analyze, CorpusMonotoneSet) {
  for (const char* name : {"deadlock", "transitive-closure", "cart-two-set", "tombstone-demo"}) {
    EXPECT_TRUE(analyze_program(corpus(name)).monotone) << name;
  }
  for (const char* name : {"gc", "gc-coordinated", "cart-naive", "cart-manifest"}) {
    EXPECT_FALSE(analyze_program(corpus(name)).monotone) << name;
  }
}

TEST(Stratify, PositiveProgramIsOneStratum) {
  auto vp = lang::load_program(
      "input table edge(sym, sym).\noutput table path(sym, sym).\n"
      "path(X,Y) :- edge(X,Y).\npath(X,Z) :- path(X,Y), edge(Y,Z).");
  EXPECT_EQ(stratify(vp).layers.size(), 1u);
}

TEST(Stratify, GcTwoStrata) {
  Stratification s = stratify(corpus("gc"));
  ASSERT_EQ(s.layers.size(), 2u);
  auto has = [&](int k, const char* rel) {
    return std::find(s.layers[k].begin(), s.layers[k].end(), rel) != s.layers[k].end();
  };
  EXPECT_TRUE(has(0, "edge"));
  EXPECT_TRUE(has(0, "reach"));
  EXPECT_FALSE(has(0, "garbage"));
  EXPECT_EQ(s.layers[1], std::vector<std::string>{"garbage"});
}

TEST(Stratify, NegativeSelfLoop) {
  auto vp = lang::load_program("input table q(sym).\ntable p(sym).\np(X) :- q(X), !p(X).");
  try {
    stratify(vp);
    FAIL() << "expected UnstratifiableError";
  } catch (const UnstratifiableError& e) {
    EXPECT_EQ(e.cycle(), (std::vector<std::string>{"p", "p"}));
  }
  EXPECT_FALSE(analyze_program(vp).stratifiable);
}

TEST(Stratify, ChannelEdgesDoNotConstrain) {
  // Negation through a channel is delivered later, so it is not a cycle.
  auto vp = lang::load_program(
      "input table q(sym).\nchannel c(addr, sym).\ntable p(sym).\n"
      "c(@*, X) :- q(X), !p(X).\np(X) :- c(_, X).");
  EXPECT_NO_THROW(stratify(vp));
  auto edges = dependency_graph(vp);
  bool async = std::any_of(edges.begin(), edges.end(), [](const DependencyEdge& e) { return e.async; });
  EXPECT_TRUE(async);
}

TEST(Analyze, StableUnderReorderingAndRenaming) {
  std::string decls = cli::read_file(testing::corpus_dir() / "gc.calm");
  lang::Program p = lang::parse_program(decls);
  AnalysisReport base = analyze_program(lang::validate_program(p));
  std::mt19937_64 rng(31);
  for (int i = 0; i < 10; ++i) {
    lang::Program q = p;
    std::shuffle(q.rules.begin(), q.rules.end(), rng);
    std::string text = lang::print_program(q);
    text = std::regex_replace(text, std::regex("\\b([A-Z][A-Za-z0-9_]*)\\b"), "Var$1");
    AnalysisReport r = analyze_program(lang::load_program(text));
    EXPECT_EQ(r.monotone, base.monotone);
    EXPECT_EQ(r.strata, base.strata);
    EXPECT_EQ(r.coordination_points.size(), base.coordination_points.size());
  }
}

TEST(Report, JsonCarriesSchemaVersion) {
  auto j = report_to_json(analyze_program(corpus("gc")));
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_EQ(j.at("verdict"), "non-monotone");
  EXPECT_EQ(j.at("coordination_points").size(), 1u);
}

}  // namespace
}  // namespace calm::monocheck
