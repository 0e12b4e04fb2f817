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

#include "medsim/comms.hpp"

namespace medsim {
namespace {

RadioParams radio(double pth) {
  RadioParams rp;
  rp.sensitivity_dbm = pth;
  return rp;
}

TEST(Comms, RangeEndpointsAreExact) {
  EXPECT_EQ(transmission_range(radio(-69.0)), 130.0);
  EXPECT_EQ(transmission_range(radio(-85.0)), 300.0);
}

TEST(Comms, RangeStrictlyInsideBetweenEndpoints) {
  const double r = transmission_range(radio(-77.0));
  EXPECT_GT(r, 130.0);
  EXPECT_LT(r, 300.0);
}

TEST(Comms, RangeMonotoneInSensitivity) {
  double previous = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double r = transmission_range(radio(-69.0 - 16.0 * i / 100.0));
    EXPECT_GE(r, previous);
    previous = r;
  }
}

TEST(Comms, RangeRejectsOutOfCalibration) {
  EXPECT_THROW(transmission_range(radio(-60.0)), std::invalid_argument);
  EXPECT_THROW(transmission_range(radio(-90.0)), std::invalid_argument);
  RadioParams bad;
  bad.frequency_ghz = 0.0;
  EXPECT_THROW(transmission_range(bad), std::invalid_argument);
}

TEST(Comms, ReachableThresholds) {
  std::mt19937_64 rng(3);
  const RadioParams rp = radio(-85.0);
  EXPECT_TRUE(reachable({0, 0}, {0, 0}, rp, 0.0, rng));
  EXPECT_TRUE(reachable({0, 0}, {300, 0}, rp, 0.0, rng));
  for (int i = 0; i < 100; ++i) {
    EXPECT_FALSE(reachable({0, 0}, {300.5, 0}, rp, 0.0, rng));
    EXPECT_FALSE(reachable({0, 0}, {1, 0}, rp, 1.0, rng));
  }
}

TEST(Comms, BlockedDrawIsSeeded) {
  std::mt19937_64 a(11), b(11);
  const RadioParams rp = radio(-77.0);
  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    const bool ra = reachable({0, 0}, {10, 0}, rp, 0.3, a);
    EXPECT_EQ(ra, reachable({0, 0}, {10, 0}, rp, 0.3, b));
    hits += ra;
  }
  EXPECT_NEAR(hits / 2000.0, 0.7, 0.05);
}

TEST(Comms, RelayForwardsVerbatim) {
  CamBeacon b;
  b.vid = 7;
  b.location = NodeId(4);
  b.location_offset_s = 12.5;
  b.scheduled_trip = {NodeId(4), NodeId(5), NodeId(9)};
  b.charging_capability_kwh = 40.0;
  b.energy_kwh = 150.0;
  b.waiting_time_s = 33.0;
  b.sent_s = 100.0;
  EXPECT_EQ(relay(relay(b)), b);
}

TEST(Comms, BeaconTime) {
  EXPECT_EQ(beacon_time(12.7, 1.0), 12.0);
  EXPECT_EQ(beacon_time(12.0, 1.0), 12.0);
  EXPECT_EQ(beacon_time(14.9, 5.0), 10.0);
}

GraphSpec line(double length) {
  GraphSpec spec;
  for (std::uint32_t i = 0; i < 3; ++i) {
    spec.nodes.push_back({NodeId(i), {i * length, 0.0}});
  }
  spec.arcs = {{NodeId(0), NodeId(1), {100.0, 0.1, length}},
               {NodeId(1), NodeId(2), {100.0, 0.1, length}}};
  return spec;
}

TEST(Comms, RoadsWithRelaysConnect) {
  const RoadGraph g = build_graph(line(10000.0));
  CommsParams p;
  const CommsModel model(g, p);
  EXPECT_TRUE(model.connected(NodeId(0), NodeId(2)));
  EXPECT_EQ(model.component_count(), 1u);
}

TEST(Comms, SparseRelaysSplitComponents) {
  GraphSpec spec = line(10000.0);
  spec.nodes.push_back({NodeId(3), {50.0, 50.0}});
  const RoadGraph g = build_graph(spec);
  CommsParams p;
  p.relay_spacing_m = 1000.0;
  const CommsModel model(g, p);
  EXPECT_FALSE(model.connected(NodeId(0), NodeId(1)));
  // Node 3 has no road but sits within radio range of node 0.
  EXPECT_TRUE(model.connected(NodeId(0), NodeId(3)));
  EXPECT_EQ(model.component_count(), 3u);
}

TEST(Comms, ParamsValidate) {
  CommsParams p;
  p.block_prob = 1.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.block_prob = 0.0;
  p.beacon_period_s = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace medsim
