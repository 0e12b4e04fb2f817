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

#include <sstream>

#include "medsim/io.hpp"
#include "medsim/sweep.hpp"

namespace medsim {
namespace {

TEST(Io, GraphRoundTrip) {
  GridOptions grid;
  grid.rows = grid.cols = 3;
  grid.scs = {NodeId(4)};
  grid.med_cycle = grid_ring(3, 0, 0, 1, 1);
  GraphSpec spec = make_grid(grid);
  resolve_arc_energy(spec, VehicleParams{});
  const GraphSpec back = graph_from_json(graph_to_json(spec));
  ASSERT_EQ(back.arcs.size(), spec.arcs.size());
  for (std::size_t k = 0; k < spec.arcs.size(); ++k) {
    EXPECT_EQ(back.arcs[k].from, spec.arcs[k].from);
    EXPECT_EQ(back.arcs[k].to, spec.arcs[k].to);
    EXPECT_NEAR(back.arcs[k].attr.drive_time_s, spec.arcs[k].attr.drive_time_s, 1e-9);
    EXPECT_NEAR(back.arcs[k].attr.energy_kwh, spec.arcs[k].attr.energy_kwh, 1e-12);
  }
  EXPECT_EQ(back.scs, spec.scs);
  EXPECT_EQ(back.med_cycle, spec.med_cycle);
  EXPECT_EQ(back.entries, spec.entries);
  EXPECT_NO_THROW(build_graph(back));
}

TEST(Io, GraphArcsFromSpeed) {
  const Json j = Json::parse(R"({
    "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 100, "y": 0}],
    "arcs": [{"i": 0, "j": 1, "length_m": 100, "speed_mps": 10}]
  })");
  const GraphSpec spec = graph_from_json(j);
  ASSERT_EQ(spec.arcs.size(), 1u);
  EXPECT_EQ(spec.arcs[0].attr.drive_time_s, 10.0);
  EXPECT_FALSE(spec.arcs[0].has_energy);
}

TEST(Io, ScenarioDefaultsAndOverrides) {
  const Json j = Json::parse(R"({
    "mode": "SCS", "level": "L3", "ev_count": 20, "seed": 9,
    "initial_energy_kwh": [2, 5],
    "radio": {"pth_dbm": -85, "block_prob": 0.0},
    "sweep": {"ev_counts": [10, 20], "levels": ["L1"], "seeds": [1, 2]}
  })");
  const ScenarioFile f = scenario_from_json(j);
  EXPECT_EQ(f.scenario.mode, Mode::Scs);
  EXPECT_EQ(f.scenario.level, Level::L3);
  EXPECT_EQ(f.scenario.ev_count, 20);
  EXPECT_EQ(f.scenario.seed, 9u);
  EXPECT_EQ(f.scenario.energy_min_kwh, 2.0);
  EXPECT_EQ(f.scenario.comms.radio.sensitivity_dbm, -85.0);
  EXPECT_EQ(f.scenario.graph.nodes.size(), 100u);
  ASSERT_TRUE(f.sweep);
  EXPECT_EQ(f.sweep->ev_counts, (std::vector<int>{10, 20}));
  EXPECT_EQ(f.sweep->modes.size(), 2u);
}

TEST(Io, ScenarioRejectsUnknownKeys) {
  EXPECT_THROW(scenario_from_json(Json::parse(R"({"evcount": 3})")), ScenarioError);
  EXPECT_THROW(scenario_from_json(Json::parse(R"({"radio": {"power": 3}})")), ScenarioError);
  EXPECT_THROW(scenario_from_json(Json::parse(R"({"mode": "MED"})")), ScenarioError);
}

TEST(Io, ScenarioInlineGrid) {
  const Json j = Json::parse(R"({
    "graph": {"grid": {"rows": 4, "cols": 5, "scs": [7], "med_cycle": [0, 1, 6, 5]}}
  })");
  const ScenarioFile f = scenario_from_json(j);
  EXPECT_EQ(f.scenario.graph.nodes.size(), 20u);
  ASSERT_EQ(f.scenario.scs.size(), 1u);
  EXPECT_EQ(f.scenario.scs[0].node, NodeId(7));
  ASSERT_EQ(f.scenario.meds.size(), 1u);
  EXPECT_NO_THROW(f.scenario.validate());
}

TEST(Io, OracleInstance) {
  const Json j = Json::parse(R"({
    "graph": {
      "nodes": [{"id": 0}, {"id": 1}, {"id": 2}],
      "arcs": [{"i": 0, "j": 1, "length_m": 1000, "drive_time_s": 100, "energy_kwh": 1},
               {"i": 1, "j": 2, "length_m": 1000, "drive_time_s": 100, "energy_kwh": 1}],
      "scs": [1]
    },
    "request": {"source": 0, "dest": 2, "energy_kwh": 1.5, "capacity_kwh": 4},
    "scs_wait_s": [{"node": 1, "wait_s": 60}]
  })");
  const OracleInstance inst = oracle_instance_from_json(j);
  EXPECT_EQ(inst.scs_wait_s.at(NodeId(1)), 60.0);
  const OracleSolution sol = solve_exact(inst);
  ASSERT_TRUE(sol.feasible());
  EXPECT_NEAR(sol.objective, 200.0 + 60.0 + 3.5 * 3600.0 / 19.2, 1e-9);
  const Json out = solution_to_json(sol);
  EXPECT_TRUE(out.at("feasible").get<bool>());
  EXPECT_EQ(out.at("route").at("walk").size(), 3u);
}

TEST(Io, OracleInstanceRejectsNegativeWait) {
  const Json j = Json::parse(R"({
    "graph": {"nodes": [{"id": 0}, {"id": 1}],
              "arcs": [{"i": 0, "j": 1, "length_m": 10, "drive_time_s": 1, "energy_kwh": 1}]},
    "request": {"source": 0, "dest": 1, "energy_kwh": 1},
    "scs_wait_s": [{"node": 0, "wait_s": -5}]
  })");
  EXPECT_THROW(oracle_instance_from_json(j), ScenarioError);
}

TEST(Sweep, SingleCellGivesOneRow) {
  Scenario base = default_scenario();
  SweepSpec spec;
  spec.ev_counts = {10};
  spec.levels = {Level::L1};
  spec.modes = {Mode::ScsMed};
  const auto rows = run_sweep(base, spec);
  ASSERT_EQ(rows.size(), 1u);
  std::ostringstream out;
  write_sweep_csv(out, rows);
  const std::string csv = out.str();
  EXPECT_EQ(csv.rfind(std::string(kSweepCsvHeader) + "\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(Sweep, ThreadCountDoesNotChangeOutput) {
  Scenario base = default_scenario();
  SweepSpec spec;
  spec.ev_counts = {0, 20, 40};
  spec.seeds = {1, 2};
  std::ostringstream one, four;
  write_sweep_csv(one, run_sweep(base, spec, 1));
  write_sweep_csv(four, run_sweep(base, spec, 4));
  EXPECT_EQ(one.str(), four.str());
}

TEST(Sweep, PairedModesFavourMed) {
  Scenario base = default_scenario();
  SweepSpec spec;
  spec.ev_counts = {30, 60};
  const auto rows = run_sweep(base, spec, 4);
  const std::size_t half = rows.size() / 2;
  ASSERT_EQ(half * 2, rows.size());
  for (std::size_t i = 0; i < half; ++i) {
    ASSERT_EQ(rows[i].mode, Mode::Scs);
    ASSERT_EQ(rows[i + half].mode, Mode::ScsMed);
    EXPECT_LE(rows[i + half].metrics.mean_travel_time_s, rows[i].metrics.mean_travel_time_s);
  }
}

TEST(Sweep, ValidatesSpec) {
  SweepSpec spec;
  spec.seeds.clear();
  EXPECT_THROW(spec.validate(), ScenarioError);
  spec = {};
  spec.ev_counts = {-1};
  EXPECT_THROW(spec.validate(), ScenarioError);
}

}  // namespace
}  // namespace medsim
