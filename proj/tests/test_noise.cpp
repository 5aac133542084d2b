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

#include "qpft/dmorph.hpp"
#include "qpft/noise.hpp"

namespace qpft {
namespace {

TEST(Noise, HessianBlockIsAnEighthTimesDelta) {
  for (int n = 1; n <= 4; ++n) {
    const Model m(SpinSystem::uniform(n, 0.8));
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        EXPECT_NEAR(hessian_diag_block(m, k, j), k == j ? 0.125 : 0.0, 1e-14);
  }
  EXPECT_THROW(hessian_diag_block(SpinSystem::uniform(2, 0.8), 0, 2), Error);
}

TEST(Noise, PredictedErrorExamples) {
  const SpinSystem s = SpinSystem::uniform(2, 0.8);
  EXPECT_EQ(predicted_error(s, 10.0, NoiseSpec::independent(2, 1e-4)), 1.25e-4);
  EXPECT_EQ(predicted_error(s, 10.0, NoiseSpec::independent(2, 0.0)), 0.0);
  EXPECT_EQ(predicted_error(s, 20.0, NoiseSpec::independent(2, 1e-4)),
            2.0 * predicted_error(s, 10.0, NoiseSpec::independent(2, 1e-4)));
  for (int n = 1; n <= 4; ++n)
    EXPECT_EQ(predicted_error(SpinSystem::uniform(n, 0.5), 7.0, NoiseSpec::independent(n, 3e-5)),
              predicted_error_independent(n, 7.0, 3e-5));
  EXPECT_THROW(predicted_error(s, 0.0, NoiseSpec::independent(2, 1e-4)), Error);
}

TEST(Noise, CorrelationsDoNotChangeThePrediction) {
  // Off-diagonal traces vanish, so beta only enters through its unit diagonal.
  const SpinSystem s = SpinSystem::uniform(2, 0.8);
  NoiseSpec corr = NoiseSpec::independent(2, 1e-4);
  corr.beta(0, 1) = corr.beta(1, 0) = 0.6;
  EXPECT_NEAR(predicted_error(s, 10.0, corr), 1.25e-4, 1e-18);
}

TEST(Noise, SpecValidation) {
  NoiseSpec s = NoiseSpec::independent(2, 1e-4);
  s.beta(0, 1) = 0.5;
  EXPECT_THROW(s.validate(2), Error);  // asymmetric
  s.beta(1, 0) = 0.5;
  EXPECT_NO_THROW(s.validate(2));
  s.beta(0, 0) = 0.9;
  EXPECT_THROW(s.validate(2), Error);
  EXPECT_THROW(NoiseSpec::independent(2, -1.0).validate(2), Error);
  EXPECT_THROW(NoiseSpec::independent(3, 1.0).validate(2), Error);
}

struct Optimum {
  SpinSystem system = SpinSystem::uniform(2, 0.8);
  std::shared_ptr<const Model> model = std::make_shared<const Model>(system);
  TargetGate gate = make_gate(parse_gate("CNOT"), 2);
  ControlFieldSet fields = dmorph_run(model, gate, init_fields(system, make_grid(10, system), 1),
                                      ObjectiveKind::PhaseDependent, DmorphSettings{})
                               .fields;
};

const Optimum& optimum() {
  static const Optimum o;
  return o;
}

TEST(MonteCarlo, ZeroNoiseGivesTheBaseline) {
  const auto& o = optimum();
  const auto r = monte_carlo_error(o.model, o.gate, o.fields, NoiseSpec::independent(2, 0.0), 5, 1);
  EXPECT_LE(r.mean, 1e-8);
  EXPECT_EQ(r.standard_error, 0.0);
}

TEST(MonteCarlo, DeterministicPerSeed) {
  const auto& o = optimum();
  const NoiseSpec n = NoiseSpec::independent(2, 1e-5);
  const auto a = monte_carlo_error(o.model, o.gate, o.fields, n, 20, 7);
  const auto b = monte_carlo_error(o.model, o.gate, o.fields, n, 20, 7);
  const auto c = monte_carlo_error(o.model, o.gate, o.fields, n, 20, 8);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_NE(a.mean, c.mean);
}

TEST(MonteCarlo, MeanIsQuadraticInAmplitude) {
  // The same seed draws identical normals, so scaling sigma2 scales the
  // leading-order error almost exactly.
  const auto& o = optimum();
  const auto a = monte_carlo_error(o.model, o.gate, o.fields, NoiseSpec::independent(2, 1e-6), 50, 3);
  const auto b = monte_carlo_error(o.model, o.gate, o.fields, NoiseSpec::independent(2, 2e-6), 50, 3);
  EXPECT_NEAR(b.mean / a.mean, 2.0, 0.01);
}

TEST(MonteCarlo, RoughAgreementWithPrediction) {
  const auto& o = optimum();
  const NoiseSpec n = NoiseSpec::independent(2, 1e-5);
  const auto r = monte_carlo_error(o.model, o.gate, o.fields, n, 200, 11, 4);
  EXPECT_NEAR(r.mean, predicted_error(*o.model, 10.0, n), 0.25 * 1.25e-5);
}

TEST(MonteCarlo, RejectsIndefiniteCorrelation) {
  const auto& o = optimum();
  NoiseSpec n = NoiseSpec::independent(2, 1e-5);
  n.beta(0, 1) = n.beta(1, 0) = 1.0;  // singular
  EXPECT_THROW(monte_carlo_error(o.model, o.gate, o.fields, n, 2, 1), Error);
  EXPECT_THROW(monte_carlo_error(o.model, o.gate, o.fields, NoiseSpec::independent(2, 1e-5), 0, 1),
               Error);
}

}  // namespace
}  // namespace qpft
