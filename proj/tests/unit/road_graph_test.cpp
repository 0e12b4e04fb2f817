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

#include <random>

#include "generators.hpp"
#include "medsim/road_graph.hpp"

namespace medsim {
namespace {

GraphSpec triangle() {
  GraphSpec spec;
  for (std::uint32_t i = 0; i < 3; ++i) spec.nodes.push_back({NodeId(i), {}});
  spec.arcs = {{NodeId(0), NodeId(1), {30.0, 1.0, 300.0}},
               {NodeId(1), NodeId(2), {40.0, 1.5, 400.0}},
               {NodeId(2), NodeId(0), {50.0, 2.0, 500.0}}};
  return spec;
}

TEST(RoadGraph, NoChargersNoDummies) {
  GraphSpec spec = triangle();
  spec.visit_limit = 1;
  const RoadGraph g = build_graph(spec);
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.base_node_count(), 3u);
  EXPECT_TRUE(g.scs_dummies().empty());
  EXPECT_TRUE(g.med_dummies().empty());
}

TEST(RoadGraph, StationDummiesCloneArcs) {
  GraphSpec spec = triangle();
  spec.scs = {NodeId(1)};
  spec.visit_limit = 3;
  const RoadGraph g = build_graph(spec);
  ASSERT_EQ(g.scs_dummies().size(), 2u);
  for (NodeId d : g.scs_dummies()) {
    EXPECT_TRUE(g.is_dummy(d));
    EXPECT_EQ(g.base_of(d), NodeId(1));
    EXPECT_EQ(g.drive_time(d, NodeId(2)), 40.0);
    EXPECT_EQ(g.energy_cost(d, NodeId(2)), 1.5);
    EXPECT_EQ(g.drive_time(NodeId(0), d), 30.0);
    EXPECT_EQ(g.out_arcs(d).size(), g.out_arcs(NodeId(1)).size());
  }
}

TEST(RoadGraph, MedCycleOrderAndTime) {
  GraphSpec spec;
  for (std::uint32_t i = 0; i < 4; ++i) spec.nodes.push_back({NodeId(i), {}});
  const double t[] = {100.0, 200.0, 300.0, 400.0};
  for (std::uint32_t i = 0; i < 4; ++i) {
    spec.arcs.push_back({NodeId(i), NodeId((i + 1) % 4), {t[i], 0.1, 1000.0}});
  }
  spec.med_cycle = {NodeId(0), NodeId(1), NodeId(2), NodeId(3)};
  const RoadGraph g = build_graph(spec);
  EXPECT_EQ(g.med_points(), spec.med_cycle);
  EXPECT_DOUBLE_EQ(g.med_cycle_time(), 1000.0);
}

TEST(RoadGraph, DriveTimeLookup) {
  const RoadGraph g = build_graph(triangle());
  EXPECT_EQ(g.drive_time(NodeId(0), NodeId(1)), 30.0);
  EXPECT_EQ(g.drive_time(NodeId(1), NodeId(0)), kInfinity);
  EXPECT_EQ(g.energy_cost(NodeId(1), NodeId(0)), kInfinity);
  EXPECT_THROW(g.drive_time(NodeId(1), NodeId(1)), GraphError);
}

TEST(RoadGraph, RejectsDanglingArc) {
  GraphSpec spec = triangle();
  spec.arcs.push_back({NodeId(0), NodeId(7), {1.0, 0.0, 1.0}});
  EXPECT_THROW(build_graph(spec), GraphError);
}

TEST(RoadGraph, RejectsOpenMedCycle) {
  GraphSpec spec = triangle();
  spec.med_cycle = {NodeId(0), NodeId(2)};  // 0 -> 2 does not exist
  EXPECT_THROW(build_graph(spec), GraphError);
}

TEST(RoadGraph, RejectsBadArcs) {
  GraphSpec spec = triangle();
  spec.arcs[0].attr.drive_time_s = 0.0;
  EXPECT_THROW(build_graph(spec), GraphError);
  spec = triangle();
  spec.arcs.push_back({NodeId(2), NodeId(2), {1.0, 0.0, 1.0}});
  EXPECT_THROW(build_graph(spec), GraphError);
  spec = triangle();
  spec.visit_limit = 0;
  EXPECT_THROW(build_graph(spec), GraphError);
}

TEST(RoadGraph, SmallGridCounts) {
  GridOptions opt;
  opt.rows = 2;
  opt.cols = 2;
  const GraphSpec spec = make_grid(opt);
  EXPECT_EQ(spec.nodes.size(), 4u);
  EXPECT_EQ(spec.arcs.size(), 8u);
}

TEST(RoadGraph, DefaultGridBuilds) {
  GridOptions opt;
  opt.scs = {grid_node(10, 5, 5)};
  opt.med_cycle = grid_ring(10, 2, 2, 7, 7);
  const RoadGraph g = build_graph(make_grid(opt));
  EXPECT_EQ(g.base_node_count(), 100u);
  EXPECT_EQ(g.med_points().size(), 20u);
  EXPECT_EQ(g.entry_points().size(), 36u);
}

TEST(RoadGraph, GridRingIsClosed) {
  const GraphSpec spec = make_grid({});
  const auto ring = grid_ring(10, 1, 3, 4, 8);
  EXPECT_TRUE(is_closed_cycle(spec, ring));
  EXPECT_EQ(ring.size(), 2u * (3 + 5));
}

TEST(RoadGraphProperty, DummiesMatchBaseEverywhere) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const OracleInstance inst = testing::random_instance(seed, {14, 2});
    const RoadGraph& g = inst.graph;
    for (std::uint32_t d = static_cast<std::uint32_t>(g.base_node_count()); d < g.node_count();
         ++d) {
      const NodeId dummy(d);
      const NodeId base = g.base_of(dummy);
      for (std::uint32_t j = 0; j < g.node_count(); ++j) {
        const NodeId other(j);
        if (other == dummy || other == base) continue;
        ASSERT_EQ(g.drive_time(dummy, other), g.drive_time(base, other));
        ASSERT_EQ(g.energy_cost(dummy, other), g.energy_cost(base, other));
      }
    }
    EXPECT_GT(g.med_points().empty() ? 1.0 : g.med_cycle_time(), 0.0);
  }
}

TEST(RoadGraphProperty, QueriesArePure) {
  const OracleInstance inst = testing::random_instance(3);
  const RoadGraph& g = inst.graph;
  for (std::uint32_t i = 0; i < g.node_count(); ++i) {
    for (std::uint32_t j = 0; j < g.node_count(); ++j) {
      if (i == j) continue;
      const double a = g.drive_time(NodeId(i), NodeId(j));
      EXPECT_EQ(a, g.drive_time(NodeId(i), NodeId(j)));
    }
  }
}

}  // namespace
}  // namespace medsim
