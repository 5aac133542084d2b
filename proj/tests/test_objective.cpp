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

#include <algorithm>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qpft/objective.hpp"

namespace qpft {
namespace {

TargetGate raw(const CMatrix& m) { return {m, "test", 0}; }

TEST(Distance, Extremes) {
  const TargetGate w = make_gate(parse_gate("CNOT"), 2);
  EXPECT_EQ(distance(w.matrix, w), 0.0);
  EXPECT_NEAR(distance(-w.matrix, w), 16.0, 1e-14);
  EXPECT_NEAR(distance(kI * w.matrix, w), 8.0, 1e-14);
  EXPECT_NEAR(normalized_distance(w.matrix, w), 0.0, 1e-16);
  EXPECT_NEAR(normalized_distance(-w.matrix, w), 1.0, 1e-15);
  EXPECT_NEAR(fidelity(w.matrix, w), 1.0, 1e-15);
  EXPECT_NEAR(fidelity(-w.matrix, w), 0.0, 1e-15);
}

TEST(Distance, PhaseIndependentExamples) {
  const TargetGate w = make_gate(parse_gate("QFT"), 2);
  EXPECT_NEAR(phase_independent_distance(std::polar(1.0, 1.234) * w.matrix, w), 0.0, 1e-14);
  const TargetGate id = make_gate(parse_gate("I"), 2);
  const CMatrix flip = 2.0 * spin_operator(2, 0, SpinAxis::X);
  EXPECT_NEAR(phase_independent_distance(flip, id), 1.0, 1e-15);
}

TEST(Distance, DimensionMismatch) {
  const TargetGate w = make_gate(parse_gate("CNOT"), 2);
  EXPECT_THROW(distance(CMatrix::Identity(2, 2), w), Error);
  EXPECT_THROW(phase_independent_distance(CMatrix::Identity(8, 8), w), Error);
}

TEST(Distance, CriticalValues) {
  // Diagonal U with entries +-1 against the identity: Re Tr = N - 2r.
  const int dim = 4;
  const TargetGate id = raw(CMatrix::Identity(dim, dim));
  for (int r = 0; r <= dim; ++r) {
    CMatrix u = CMatrix::Identity(dim, dim);
    for (int i = 0; i < r; ++i) u(i, i) = -1.0;
    EXPECT_NEAR(distance(u, id), 4.0 * r, 1e-14);
  }
}

TEST(Distance, RandomInvariants) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const CMatrix u = oracle::random_unitary(4, seed);
    const TargetGate w = raw(oracle::random_unitary(4, seed + 1000));
    const double d = normalized_distance(u, w);
    const double g = phase_independent_distance(u, w);
    EXPECT_GE(g, -1e-15);
    // G is the phase-minimized D~ rescaled by 2: G = 2 min_phi D~(e^{i phi} W).
    EXPECT_LE(g, 2.0 * d + 1e-15);
    double best = 1.0;
    for (int s = 0; s < 3600; ++s)
      best = std::min(best, normalized_distance(u, raw(std::polar(1.0, 2.0 * kPi * s / 3600) *
                                                       w.matrix)));
    EXPECT_NEAR(g, 2.0 * best, 1e-5);
    EXPECT_LE(d, 1.0 + 1e-15);
    EXPECT_NEAR(fidelity(u, w) + d, 1.0, 1e-15);
    const cplx p = std::polar(1.0, 0.1 * seed);
    EXPECT_NEAR(distance(p * u, raw(p * w.matrix)), distance(u, w), 1e-12);
    EXPECT_NEAR(phase_independent_distance(p * u, w), g, 1e-14);
  }
}

// ---------------------------------------------------------------------------
// Gradients

struct Instance {
  std::shared_ptr<const Model> model;
  ControlFieldSet fields;
  TargetGate gate;
};

Instance random_instance(int n, std::uint64_t seed, int steps) {
  const SpinSystem s = SpinSystem::uniform(n, 0.8);
  auto model = std::make_shared<const Model>(s);
  const TimeGrid grid(steps * 0.05, steps);
  return {model, oracle::random_fields(n, grid, seed, 4.0), random_su_gate(n, seed + 17)};
}

double max_relative_error(const RMatrix& a, const RMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

TEST(Gradient, ExactDiscreteMatchesFiniteDifferences) {
  for (int n : {1, 2}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const Instance in = random_instance(n, seed, 40 + 30 * static_cast<int>(seed));
      const PropagationCache c(in.model, in.fields);
      for (auto kind : {ObjectiveKind::PhaseDependent, ObjectiveKind::PhaseIndependent}) {
        const RMatrix g = gradient(c, in.gate, kind, GradientMode::ExactDiscrete).values;
        const RMatrix fd = oracle::finite_difference_gradient(in.model, in.fields, in.gate, kind, 1e-6);
        EXPECT_LE(max_relative_error(g, fd), 1e-6)
            << "n = " << n << ", seed = " << seed << ", kind = " << to_string(kind);
      }
    }
  }
}

TEST(Gradient, UnnormalizedDistanceScale) {
  const Instance in = random_instance(2, 9, 50);
  const PropagationCache c(in.model, in.fields);
  const RMatrix gd = distance_gradient(c, in.gate, GradientMode::ExactDiscrete).values;
  const RMatrix gn = gradient(c, in.gate, ObjectiveKind::PhaseDependent, GradientMode::ExactDiscrete).values;
  EXPECT_LE((gd - 16.0 * gn).norm(), 1e-12 * gd.norm());
}

TEST(Gradient, ContinuumApproachesExactAsStepShrinks) {
  // The continuum formula is the dt -> 0 limit of the exact discrete one; the
  // node sampling makes the gap first order in dt.
  double previous = 1.0;
  for (int steps : {50, 100, 200, 400, 800}) {
    const SpinSystem s = SpinSystem::uniform(2, 0.8);
    auto model = std::make_shared<const Model>(s);
    const ControlFieldSet f = init_fields(s, TimeGrid(2.0, steps), 3);
    const PropagationCache c(model, f);
    const TargetGate w = make_gate(parse_gate("CNOT"), 2);
    const RMatrix a = gradient(c, w, ObjectiveKind::PhaseDependent, GradientMode::Continuum).values;
    const RMatrix b = gradient(c, w, ObjectiveKind::PhaseDependent, GradientMode::ExactDiscrete).values;
    const double err = max_relative_error(a, b);
    EXPECT_LT(err, 0.6 * previous);
    previous = err;
  }
  EXPECT_LT(previous, 0.035);
}

TEST(Gradient, VanishesAtTheOptimum) {
  // With zero fields U_T = exp(-i H0 T); use it as the target.
  const SpinSystem s = SpinSystem::uniform(2, 0.8);
  auto model = std::make_shared<const Model>(s);
  const ControlFieldSet f = ControlFieldSet::zeros(2, make_grid(3.0, s));
  const PropagationCache c(model, f);
  const TargetGate w = raw(c.final_propagator());
  for (auto mode : {GradientMode::Continuum, GradientMode::ExactDiscrete}) {
    EXPECT_LE(gradient(c, w, ObjectiveKind::PhaseDependent, mode).values.cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LE(gradient(c, raw(std::polar(1.0, 0.4) * w.matrix), ObjectiveKind::PhaseIndependent, mode)
                  .values.cwiseAbs()
                  .maxCoeff(),
              1e-13);
  }
}

TEST(Gradient, PhaseSingularityIsReported) {
  const SpinSystem s = SpinSystem::uniform(1, 0.0);
  auto model = std::make_shared<const Model>(s);
  const PropagationCache c(model, ControlFieldSet::zeros(1, TimeGrid(kPi / 20.0, 4)));
  // Free precession by pi/20 gives diag(e^{-i pi/2}, e^{i pi/2}) = -i sigma_z,
  // which has zero overlap with the identity.
  const TargetGate id = raw(CMatrix::Identity(2, 2));
  EXPECT_NEAR(std::abs(overlap(c.final_propagator(), id.matrix)), 0.0, 1e-14);
  EXPECT_THROW(gradient(c, id, ObjectiveKind::PhaseIndependent), PhaseSingularityError);
  EXPECT_NO_THROW(gradient(c, id, ObjectiveKind::PhaseDependent));
}

TEST(Gradient, ShapeMatchesFields) {
  const Instance in = random_instance(2, 5, 33);
  const PropagationCache c(in.model, in.fields);
  const GradientField g = gradient(c, in.gate, ObjectiveKind::PhaseDependent);
  EXPECT_EQ(g.values.rows(), 2);
  EXPECT_EQ(g.values.cols(), 33);
  EXPECT_TRUE(g.values.allFinite());
}

}  // namespace
}  // namespace qpft
