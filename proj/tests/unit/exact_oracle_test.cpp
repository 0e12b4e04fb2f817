// Copyright 2026 The medsim Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "generators.hpp"
#include "medsim/exact_oracle.hpp"

namespace medsim {
namespace {

OracleInstance line(std::uint32_t n, double capacity, double energy) {
  GraphSpec spec;
  for (std::uint32_t i = 0; i < n; ++i) spec.nodes.push_back({NodeId(i), {}});
  for (std::uint32_t i = 0; i + 1 < n; ++i) {
    spec.arcs.push_back({NodeId(i), NodeId(i + 1), {100.0, 1.0, 1000.0}});
    spec.arcs.push_back({NodeId(i + 1), NodeId(i), {100.0, 1.0, 1000.0}});
  }
  if (n > 2) spec.scs = {NodeId(2)};
  OracleInstance inst;
  inst.graph = build_graph(spec);
  inst.request = {0, NodeId(0), NodeId(n - 1), capacity, energy, 0.0};
  inst.scs_wait_s[NodeId(2)] = 100.0;
  return inst;
}

TEST(Oracle, DirectPathIsPlainShortestTime) {
  const OracleInstance inst = line(6, 10.0, 10.0);
  const OracleSolution sol = solve_exact(inst);
  ASSERT_TRUE(sol.feasible());
  EXPECT_EQ(sol.objective, 500.0);
  EXPECT_TRUE(sol.best->stops.empty());
}

TEST(Oracle, LineInstanceHandSolution) {
  const OracleInstance inst = line(6, 4.0, 2.5);
  const OracleSolution sol = solve_exact(inst);
  ASSERT_TRUE(sol.feasible());
  EXPECT_NEAR(sol.objective, 500.0 + 100.0 + 3.5 * 3600.0 / 19.2, 1e-9);
  ASSERT_EQ(sol.best->stops.size(), 1u);
  EXPECT_EQ(sol.best->walk[sol.best->stops[0].walk_index], NodeId(2));
  EXPECT_NEAR(evaluate_objective(inst, *sol.best), sol.objective, 1e-9);
}

TEST(Oracle, ZeroEnergyWithoutChargerIsInfeasible) {
  const OracleInstance inst = line(6, 4.0, 0.0);
  const OracleSolution sol = solve_exact(inst);
  EXPECT_FALSE(sol.feasible());
  EXPECT_EQ(sol.objective, kInfinity);
}

TEST(Oracle, RefusesLargeGraphs) {
  // 14 base nodes plus one station dummy.
  EXPECT_THROW(solve_exact(line(14, 10.0, 10.0)), OracleBoundError);
  EXPECT_NO_THROW(solve_exact(line(13, 20.0, 20.0)));
}

TEST(Oracle, ValidatesWaits) {
  OracleInstance inst = line(6, 4.0, 2.5);
  inst.scs_wait_s[NodeId(2)] = -1.0;
  EXPECT_THROW(inst.validate(), std::invalid_argument);
}

TEST(Verify, OwnBestIsOk) {
  const OracleInstance inst = line(6, 4.0, 2.5);
  EXPECT_TRUE(verify(inst, *solve_exact(inst).best));
}

TEST(Verify, CatchesBrokenFlow) {
  const OracleInstance inst = line(6, 4.0, 2.5);
  RouteAssignment a = *solve_exact(inst).best;
  a.walk.back() = NodeId(4);
  EXPECT_EQ(verify(inst, a).constraint, 2);
}

TEST(Verify, CatchesNegativeEnergyMidRoute) {
  const OracleInstance inst = line(6, 4.0, 2.5);
  RouteAssignment a;
  a.source = NodeId(0);
  a.dest = NodeId(5);
  a.capacity_kwh = 4.0;
  a.initial_energy_kwh = 2.5;
  for (std::uint32_t i = 0; i < 6; ++i) {
    a.walk.push_back(NodeId(i));
    a.energy_trace.push_back(2.5 - i);
    a.time_trace.push_back(100.0 * i);
    if (i > 0) a.x_arcs.push_back({NodeId(i - 1), NodeId(i)});
  }
  const Verdict v = verify(inst, a);
  EXPECT_FALSE(v);
  EXPECT_EQ(v.constraint, 5);
}

TEST(Verify, CatchesAttachedArcNotTraversed) {
  const OracleInstance inst = line(6, 4.0, 2.5);
  RouteAssignment a = *solve_exact(inst).best;
  a.y_arcs.push_back({NodeId(4), NodeId(3)});
  EXPECT_EQ(verify(inst, a).constraint, 3);
}

TEST(Verify, CatchesPartialStationCharge) {
  const OracleInstance inst = line(6, 4.0, 2.5);
  RouteAssignment a = *solve_exact(inst).best;
  ChargeStop& stop = a.stops.at(0);
  stop.energy_out_kwh -= 0.1;
  for (std::size_t k = stop.walk_index + 1; k < a.energy_trace.size(); ++k) {
    a.energy_trace[k] -= 0.1;
  }
  EXPECT_EQ(verify(inst, a).constraint, 7);
}

TEST(OracleProperty, BestVerifiesOnRandomInstances) {
  int feasible = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const OracleInstance inst = testing::random_instance(seed);
    const OracleSolution sol = solve_exact(inst);
    if (!sol.feasible()) continue;
    ++feasible;
    const Verdict v = verify(inst, *sol.best);
    EXPECT_TRUE(v) << "seed " << seed << ": (" << v.constraint << ") " << v.detail;
    EXPECT_NEAR(evaluate_objective(inst, *sol.best), sol.objective, 1e-6) << "seed " << seed;
  }
  EXPECT_GT(feasible, 100);
}

TEST(OracleProperty, Deterministic) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const OracleInstance inst = testing::random_instance(seed);
    const OracleSolution a = solve_exact(inst);
    const OracleSolution b = solve_exact(inst);
    EXPECT_EQ(a.explored, b.explored);
    EXPECT_EQ(a.objective, b.objective);
    if (a.feasible()) EXPECT_EQ(a.best->walk, b.best->walk);
  }
}

}  // namespace
}  // namespace medsim
