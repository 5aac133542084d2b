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

#include <sstream>

#include "oracles.hpp"
#include "qpft/dynamics.hpp"
#include "qpft/io.hpp"

namespace qpft {
namespace {

TEST(Grid, NyquistMesh) {
  const SpinSystem s = SpinSystem::uniform(2, 0.8);
  const TimeGrid g = make_grid(10.0, s);
  EXPECT_LE(g.dt(), 0.0589);
  EXPECT_TRUE(g.satisfies_nyquist(24.0));
  EXPECT_EQ(g.node(g.steps()), 10.0);
  EXPECT_EQ(g.knob_time(g.steps() - 1), 10.0);
  EXPECT_EQ(g.steps(), static_cast<int>(std::ceil(10.0 / (0.9 * kPi / 48.0))));
}

TEST(Grid, ShortIntervalStillHasSeveralSteps) {
  const TimeGrid g = make_grid(0.157, SpinSystem::uniform(1, 0.0));
  EXPECT_EQ(g.steps(), 3);
}

TEST(Grid, NodesHitTheEndpointExactly) {
  for (double t : {0.1, 1.0 / 3.0, 4.12, 9.999999, 123.456}) {
    const TimeGrid g = make_grid(t, SpinSystem::uniform(2, 0.8));
    EXPECT_EQ(g.node(g.steps()), t);
    EXPECT_EQ(g.node(0), 0.0);
  }
}

TEST(Grid, Errors) {
  EXPECT_THROW(make_grid(0.0, SpinSystem::uniform(1, 0)), Error);
  EXPECT_THROW(make_grid(-1.0, SpinSystem::uniform(1, 0)), Error);
  EXPECT_THROW(make_grid(1.0, SpinSystem::uniform(1, 0), 1.0), Error);
  EXPECT_THROW(TimeGrid(1.0, 0), Error);
}

TEST(Fields, InitialFieldsHaveUnitFluence) {
  for (int n = 1; n <= 3; ++n) {
    const SpinSystem s = SpinSystem::uniform(n, 0.8);
    const ControlFieldSet f = init_fields(s, make_grid(7.3, s), 11);
    for (int k = 0; k < n; ++k) EXPECT_NEAR(fluence(f, k), 1.0, 1e-9);
    EXPECT_NEAR(total_fluence(f), n, 1e-9);
  }
}

TEST(Fields, EnvelopeEdgeRatio) {
  EXPECT_NEAR(init_envelope(0.0, 5.0), std::exp(-2.0 * kPi), 1e-18);
  EXPECT_NEAR(init_envelope(0.0, 5.0), 1.867e-3, 1e-6);
  EXPECT_DOUBLE_EQ(init_envelope(2.5, 5.0), 1.0);
}

TEST(Fields, InitialFieldsAreDeterministic) {
  const SpinSystem s = SpinSystem::uniform(2, 0.8);
  const TimeGrid g = make_grid(10, s);
  EXPECT_EQ(init_fields(s, g, 5).values, init_fields(s, g, 5).values);
  EXPECT_NE(init_fields(s, g, 5).values, init_fields(s, g, 6).values);
  // The two fields use independent draws.
  const ControlFieldSet f = init_fields(s, g, 5);
  EXPECT_GT((f.values.row(0) - f.values.row(1)).norm(), 0.1);
}

TEST(Fields, FluenceExamples) {
  const TimeGrid g(3.0, 30);
  EXPECT_EQ(fluence(ControlFieldSet::zeros(1, g), 0), 0.0);
  const ControlFieldSet c(g, RMatrix::Constant(1, 30, 2.0));
  EXPECT_NEAR(fluence(c, 0), 12.0, 1e-12);
  EXPECT_THROW(fluence(c, 1), Error);
}

TEST(Fields, ShapeAndFinitenessAreChecked) {
  EXPECT_THROW(ControlFieldSet(TimeGrid(1.0, 4), RMatrix::Zero(1, 5)), Error);
  RMatrix bad = RMatrix::Zero(1, 4);
  bad(0, 2) = std::nan("");
  EXPECT_THROW(ControlFieldSet(TimeGrid(1.0, 4), bad), Error);
}

// ---------------------------------------------------------------------------
// Resampling

TEST(Resample, IdentityWhenGridUnchanged) {
  const SpinSystem s = SpinSystem::uniform(2, 0.8);
  const ControlFieldSet f = init_fields(s, make_grid(5, s), 3);
  EXPECT_EQ(resample_fields(f, f.grid).values, f.values);
  EXPECT_EQ(resample_fields(f, f.grid, ResampleMode::Truncate).values, f.values);
}

TEST(Resample, ConstantStaysConstant) {
  const ControlFieldSet f(TimeGrid(4.0, 40), RMatrix::Constant(2, 40, 0.37));
  const ControlFieldSet g = resample_fields(f, TimeGrid(3.1, 33));
  EXPECT_LE((g.values.array() - 0.37).abs().maxCoeff(), 1e-15);
}

TEST(Resample, CompressedRampKeepsItsShape) {
  const int m = 40;
  RMatrix ramp(1, m);
  for (int j = 0; j < m; ++j) ramp(0, j) = (j + 1.0) / m;  // value = t / T at knob times
  const ControlFieldSet f(TimeGrid(2.0, m), ramp);
  const ControlFieldSet g = resample_fields(f, TimeGrid(1.0, 20));
  for (int j = 0; j < 20; ++j) EXPECT_NEAR(g.values(0, j), (j + 1.0) / 20, 1e-14);
  EXPECT_NEAR(g.values(0, 19), 1.0, 1e-15);  // endpoint preserved
}

TEST(Resample, TruncationDropsTheTail) {
  const int m = 40;
  RMatrix ramp(1, m);
  for (int j = 0; j < m; ++j) ramp(0, j) = (j + 1.0) / m;
  const ControlFieldSet g = resample_fields(ControlFieldSet(TimeGrid(2.0, m), ramp),
                                            TimeGrid(1.0, 20), ResampleMode::Truncate);
  for (int j = 0; j < 20; ++j) EXPECT_NEAR(g.values(0, j), (j + 1.0) / 40, 1e-14);
}

TEST(Resample, RejectsLongerTime) {
  const ControlFieldSet f(TimeGrid(2.0, 10), RMatrix::Zero(1, 10));
  EXPECT_THROW(resample_fields(f, TimeGrid(2.5, 10)), Error);
}

TEST(Resample, RefinementPreservesThePropagator) {
  const SpinSystem s = SpinSystem::uniform(2, 0.8);
  const ControlFieldSet f = init_fields(s, make_grid(3, s), 9);
  const CMatrix u1 = propagate(s, f).final_propagator();
  const CMatrix u3 = propagate(s, refine_fields(f, 3)).final_propagator();
  EXPECT_LE((u1 - u3).norm(), 1e-12);
}

// ---------------------------------------------------------------------------
// Propagation

TEST(Propagate, FreePrecessionOfOneQubit) {
  const SpinSystem s = SpinSystem::uniform(1, 0.0);
  const double t = 1.7;
  const CMatrix u = propagate(s, ControlFieldSet::zeros(1, make_grid(t, s))).final_propagator();
  EXPECT_NEAR(std::abs(u(0, 0) - std::polar(1.0, -10.0 * t)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(u(1, 1) - std::polar(1.0, 10.0 * t)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(u(0, 1)), 0.0, 1e-15);
}

TEST(Propagate, ZeroFieldMatchesTaylorExponential) {
  for (int n = 1; n <= 3; ++n) {
    const SpinSystem s = SpinSystem::uniform(n, 0.8);
    const double t = 10.0;
    const CMatrix u = propagate(s, ControlFieldSet::zeros(n, make_grid(t, s))).final_propagator();
    const CMatrix ref = oracle::expm(-kI * t * build_drift_hamiltonian(s));
    EXPECT_LE((u - ref).norm(), 1e-10) << "n = " << n;
  }
}

TEST(Propagate, RandomFieldsMatchTaylorPropagation) {
  const SpinSystem s = SpinSystem::uniform(2, 0.8);
  const ControlFieldSet f = oracle::random_fields(2, make_grid(2.0, s), 4, 3.0);
  EXPECT_LE((propagate(s, f).final_propagator() - oracle::propagate_taylor(s, f)).norm(), 1e-11);
}

TEST(Propagate, UnitarityAndComposition) {
  const SpinSystem s = SpinSystem::uniform(3, 0.8);
  const ControlFieldSet f = init_fields(s, make_grid(6.0, s), 21);
  const PropagationCache c = propagate(s, f);
  EXPECT_EQ(c.forward(0), CMatrix::Identity(8, 8));
  EXPECT_EQ(c.final_propagator(), c.forward(f.steps()));
  for (int j = 1; j <= f.steps(); ++j) {
    EXPECT_LE(unitarity_residual(c.forward(j)), 1e-10);
    EXPECT_LE((c.forward(j) - c.step_propagator(j - 1) * c.forward(j - 1)).norm(), 1e-12);
  }
}

TEST(Propagate, UnitarityOverLongMeshes) {
  const SpinSystem s = SpinSystem::uniform(2, 0.8);
  const ControlFieldSet f = init_fields(s, TimeGrid(200.0, 20000), 1);
  EXPECT_LE(unitarity_residual(propagate(s, f).final_propagator()), 1e-10);
}

TEST(Propagate, GridRefinementConverges) {
  // Band-limited fields sampled on a mesh and on one with half the step
  // size: the propagators agree closely.
  const SpinSystem s = SpinSystem::uniform(2, 0.8);
  const double t = 5.0;
  auto sample = [&](int m) {
    const TimeGrid g(t, m);
    RMatrix v(2, m);
    for (int j = 0; j < m; ++j) {
      const double tm = g.node(j) + 0.5 * g.dt();  // midpoint sampling
      v(0, j) = 0.3 * std::sin(2.0 * tm) * init_envelope(tm, t);
      v(1, j) = 0.2 * std::cos(1.3 * tm) * init_envelope(tm, t);
    }
    return propagate(s, ControlFieldSet(g, v)).final_propagator();
  };
  EXPECT_LE((sample(4000) - sample(8000)).norm(), 1e-6);
}

TEST(Propagate, ConjugatedControls) {
  const SpinSystem s = SpinSystem::uniform(2, 0.8);
  const PropagationCache c = propagate(s, init_fields(s, make_grid(1.0, s), 2));
  const CMatrix hc = build_control_operators(s)[1];
  const int j = 7;
  const CMatrix expected = c.forward(j + 1).adjoint() * hc * c.forward(j + 1);
  EXPECT_LE((c.conjugated_control(1, j) - expected).norm(), 1e-13);
  EXPECT_LE(hermiticity_residual(c.conjugated_control(1, j)), 1e-13);
}

TEST(Propagate, DimensionMismatch) {
  const SpinSystem s = SpinSystem::uniform(2, 0.8);
  EXPECT_THROW(propagate(s, ControlFieldSet::zeros(3, TimeGrid(1.0, 10))), Error);
}

// ---------------------------------------------------------------------------
// Serialization

TEST(FieldIo, CsvRoundTripIsBitExact) {
  const SpinSystem s = SpinSystem::uniform(2, 0.8);
  const ControlFieldSet f = init_fields(s, make_grid(4.123, s), 77);
  std::stringstream ss;
  io::write_fields_csv(ss, f);
  const ControlFieldSet g = io::read_fields_csv(ss);
  EXPECT_EQ(g.values, f.values);
  EXPECT_EQ(g.grid, f.grid);
  std::string header;
  std::stringstream again;
  io::write_fields_csv(again, f);
  std::getline(again, header);
  EXPECT_EQ(header, "t,eps_1,eps_2");
}

TEST(FieldIo, JsonRoundTripIsBitExact) {
  const SpinSystem s = SpinSystem::uniform(3, 0.8);
  const ControlFieldSet f = init_fields(s, make_grid(2.5, s), 8);
  const auto j = io::fields_to_json(f, 8);
  const ControlFieldSet g = io::fields_from_json(io::json::parse(j.dump()));
  EXPECT_EQ(g.values, f.values);
  EXPECT_EQ(g.grid, f.grid);
  EXPECT_EQ(j.at("seed").get<int>(), 8);
}

TEST(FieldIo, DecimalFormatRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.718281828459045, 1e-300, 6.02214076e23}) {
    EXPECT_EQ(io::parse_double(io::format_double(x)), x);
  }
  EXPECT_THROW(io::parse_double("1.0x"), Error);
}

}  // namespace
}  // namespace qpft
