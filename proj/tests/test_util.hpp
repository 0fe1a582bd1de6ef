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

#ifndef TESTS_TEST_UTIL_HPP_
#define TESTS_TEST_UTIL_HPP_

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include <gtest/gtest.h>

#include "calm/cli/cli.hpp"
#include "calm/lang/validator.hpp"
#include "calm/relspace/fact_text.hpp"
#include "calm/transducer/transducer.hpp"

namespace calm::testing {

inline std::filesystem::path corpus_dir() { return CALM_CORPUS_DIR; }

inline std::filesystem::path golden_dir() { return CALM_GOLDEN_DIR; }

inline std::shared_ptr<const transducer::ProgramPlan> plan_of(const std::string& text) {
  return transducer::make_plan(lang::load_program(text));
}

inline std::shared_ptr<const transducer::ProgramPlan> corpus_plan(const std::string& name) {
  return plan_of(cli::read_file(corpus_dir() / (name + ".calm")));
}

inline Database corpus_fixture(const transducer::ProgramPlan& plan, const std::string& name) {
  return parse_facts(cli::read_file(corpus_dir() / "fixtures" / (name + ".facts")),
                     plan.program.input_schemas());
}

inline Fact fact(const transducer::ProgramPlan& plan, const std::string& text) {
  return parse_fact(text, plan.program.schemas());
}

// Compares against a frozen report. CALM_UPDATE_GOLDEN=1 rewrites it.
inline void expect_golden(const std::string& name, const std::string& actual) {
  std::filesystem::path file = golden_dir() / name;
  const char* update = std::getenv("CALM_UPDATE_GOLDEN");
  if (update != nullptr && std::string(update) == "1") {
    std::ofstream(file, std::ios::binary) << actual;
    return;
  }
  ASSERT_TRUE(std::filesystem::exists(file)) << file;
  EXPECT_EQ(actual, cli::read_file(file)) << "golden mismatch: " << name;
}

}  // namespace calm::testing

#endif  // TESTS_TEST_UTIL_HPP_
