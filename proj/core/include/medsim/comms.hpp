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

#ifndef MEDSIM_COMMS_HPP
#define MEDSIM_COMMS_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "medsim/road_graph.hpp"

namespace medsim {

struct RadioParams {
  double tx_power_dbm = 18.0;
  double frequency_ghz = 5.9;
  double sensitivity_dbm = -77.0;
  double sinr_threshold_db = 10.0;

  void validate() const;
};

/// Range in meters for the receiver sensitivity in `rp`. Calibrated so that
/// -69 dBm gives 130 m and -85 dBm gives 300 m, log-distance in between.
/// Throws std::invalid_argument outside [-85, -69] dBm.
double transmission_range(const RadioParams& rp);

/// In range and not dropped by a Bernoulli(blocked) draw from `rng`.
bool reachable(Point ev_pos, Point target_pos, const RadioParams& rp, double blocked,
               std::mt19937_64& rng);

/// Cooperative awareness message. Stations and MEDs fill the charging fields;
/// EVs leave them at zero.
struct CamBeacon {
  std::uint32_t vid = 0;
  NodeId location;
  double location_offset_s = 0.0;
  std::vector<NodeId> scheduled_trip;
  double charging_capability_kwh = 0.0;
  double energy_kwh = 0.0;
  double waiting_time_s = 0.0;
  double sent_s = 0.0;

  bool operator==(const CamBeacon&) const = default;
};

/// Relays forward a beacon unchanged.
inline CamBeacon relay(const CamBeacon& beacon) { return beacon; }

struct CommsParams {
  RadioParams radio;
  double block_prob = 0.05;
  double beacon_period_s = 1.0;
  /// Spacing of the vehicles along a road that relay beacons hop by hop.
  double relay_spacing_m = 100.0;

  void validate() const;
};

/// Start of the beacon period containing `t`.
double beacon_time(double t, double period_s);

/// Radio connectivity of a road network. Two nodes are linked when they are
/// within range of each other, or joined by a road whose relay spacing fits
/// inside the range. Beacons flood instantly within a connected component.
class CommsModel {
 public:
  CommsModel(const RoadGraph& g, const CommsParams& params);

  double range_m() const { return range_m_; }
  const CommsParams& params() const { return params_; }
  bool connected(NodeId a, NodeId b) const;
  std::size_t component_count() const { return components_; }

 private:
  CommsParams params_;
  double range_m_ = 0.0;
  std::vector<std::uint32_t> component_;
  std::size_t components_ = 0;
};

}  // namespace medsim

#endif  // MEDSIM_COMMS_HPP
