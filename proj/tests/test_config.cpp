// Copyright 2026 The qpft Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include "qpft/config.hpp"

namespace qpft::config {
namespace {

TEST(Toml, ScalarsArraysAndTables) {
  const Document d = parse(R"(
# comment
name = "x"   # trailing comment
count = 3
ratio = 2.5e-3
flag = true
list = [1, 2,
        3]
[block.sub]
value = -1.0
inline = { a = 1, b = "two" }
)");
  EXPECT_EQ(d.root["name"], "x");
  EXPECT_EQ(d.root["count"], 3);
  EXPECT_TRUE(d.root["count"].is_number_integer());
  EXPECT_DOUBLE_EQ(d.root["ratio"].get<double>(), 2.5e-3);
  EXPECT_EQ(d.root["flag"], true);
  EXPECT_EQ(d.root["list"].size(), 3u);
  EXPECT_DOUBLE_EQ(d.root["block"]["sub"]["value"].get<double>(), -1.0);
  EXPECT_EQ(d.root["block"]["sub"]["inline"]["b"], "two");
  EXPECT_EQ(d.line_of("block.sub.value"), 10);
}

TEST(Toml, Errors) {
  EXPECT_THROW(parse("a = 1\na = 2\n"), ParseError);
  EXPECT_THROW(parse("a = \n"), ParseError);
  EXPECT_THROW(parse("a = [1, 2\n"), ParseError);
  EXPECT_THROW(parse("a = \"open\n"), ParseError);
  try {
    parse("x = 1\ny = 2\nz == 3\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Config, ReferenceCnot) {
  ExperimentConfig c = from_text(R"(
seeds = [1, 2, 3]
output = "out/cnot"
[system]
omega = [20.0, 24.0]
J = 0.8
[gate]
name = "CNOT"
[optimize]
T = 10.0
[optimizer]
max_steps = 5000
gradient_mode = "continuum"
)");
  c.finalize();
  EXPECT_EQ(c.system.qubits, 2);
  EXPECT_EQ(c.system.build().dimension(), 4);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(c.optimizer.max_steps, 5000);
  EXPECT_EQ(c.optimizer.gradient_mode, GradientMode::Continuum);
  EXPECT_EQ(c.pft.dmorph.max_steps, 5000);
  EXPECT_DOUBLE_EQ(c.optimize.final_time, 10.0);
}

TEST(Config, CouplingMatrixAndBlocks) {
  ExperimentConfig c = from_text(R"(
objective = "phase_independent"
format = "json"
[system]
omega = [20, 24, 30]
couplings = [[0, 0.8, 1.0], [0.8, 0, 1.2], [1.0, 1.2, 0]]
[gate]
name = "QFT"
phase_index = 2
[pft]
mode = "front"
T0 = 5
resample = "truncate"
[noise]
sigma2 = [1e-5, 5e-6]
beta = [[1, 0.2, 0], [0.2, 1, 0], [0, 0, 1]]
[phases]
runs = 7
)");
  c.finalize();
  EXPECT_EQ(c.objective, ObjectiveKind::PhaseIndependent);
  EXPECT_EQ(c.format, Format::Json);
  EXPECT_DOUBLE_EQ(c.system.build().mean_coupling(), 1.0);
  EXPECT_EQ(c.pft.stop_value, kFrontStopValue);
  EXPECT_EQ(c.pft.resample, ResampleMode::Truncate);
  EXPECT_EQ(c.noise.sigma2.size(), 2u);
  EXPECT_DOUBLE_EQ((*c.noise.beta)(0, 1), 0.2);
  EXPECT_EQ(c.phases.runs, 7);
}

TEST(Config, UnknownKeysAreRejectedWithTheirLine) {
  try {
    from_text("seeds = [1]\n[optimizer]\nrtol = 1e-3\nmax_stepz = 10\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(std::string(e.what()).find("optimizer.max_stepz"), std::string::npos);
  }
  EXPECT_THROW(from_text("[bogus]\na = 1\n"), ParseError);
}

TEST(Config, TypeErrorsCarryTheLine) {
  try {
    from_text("\n[optimizer]\nmax_steps = \"many\"\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(from_text("format = \"xml\"\n"), ParseError);
  EXPECT_THROW(from_text("[system]\nJ = 0.8\ncouplings = [[0, 1], [1, 0]]\n"), ParseError);
}

TEST(Config, SemanticChecksInFinalize) {
  ExperimentConfig c = from_text("[gate]\nname = \"CNOT\"\n[system]\nqubits = 3\n");
  EXPECT_THROW(c.finalize(), Error);  // CNOT needs two qubits
  ExperimentConfig d = from_text("grid_safety = 1.5\n");
  EXPECT_THROW(d.finalize(), Error);
  ExperimentConfig e = from_text("[pft]\ndt_fraction = 0.2\n");
  EXPECT_THROW(e.finalize(), Error);
}

}  // namespace
}  // namespace qpft::config
