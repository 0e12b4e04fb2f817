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

#ifndef MEDSIM_ROUTER_HPP
#define MEDSIM_ROUTER_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "medsim/charging.hpp"
#include "medsim/road_graph.hpp"
#include "medsim/shortest_paths.hpp"

namespace medsim {

struct EvRequest {
  EvId ev = 0;
  NodeId source;
  NodeId dest;
  double capacity_kwh = 24.0;
  double energy_kwh = 0.0;
  double start_s = 0.0;

  /// Throws std::invalid_argument on energy outside [0, capacity] or
  /// source == dest.
  void validate() const;
};

struct ArcRef {
  NodeId from;
  NodeId to;

  auto operator<=>(const ArcRef&) const = default;
};

/// One charging action along a route.
struct ChargeStop {
  ChargerKind kind = ChargerKind::Scs;
  std::size_t charger = 0;     // station or MED index
  std::size_t walk_index = 0;  // station node, or m_b, in RouteAssignment::walk
  std::size_t span = 0;        // MED: attached arcs walk[walk_index .. walk_index + span]
  std::size_t cycle_index = 0; // MED: cycle position of m_b
  std::int64_t first_segment = 0;
  std::int64_t cycle_number = 0;
  double arrival_s = 0.0;
  double wait_s = 0.0;
  /// SCS: time on the charger. MED: time driven while attached.
  double charge_s = 0.0;
  double energy_in_kwh = 0.0;   // on arrival at walk_index
  double energy_out_kwh = 0.0;  // leaving the station, or at detach
};

/// Realized route of one EV.
struct RouteAssignment {
  EvId ev = 0;
  NodeId source;
  NodeId dest;
  double start_s = 0.0;
  double capacity_kwh = 0.0;
  double initial_energy_kwh = 0.0;

  std::vector<NodeId> walk;           // base node ids, source to dest
  std::vector<ArcRef> x_arcs;         // traversed arcs in order
  std::vector<ArcRef> y_arcs;         // MED-attached arcs in order
  std::vector<ChargeStop> stops;      // z (SCS) and q (MED) in order
  std::vector<double> energy_trace;   // arrival energy at each walk node
  std::vector<double> time_trace;     // arrival time at each walk node

  double drive_s = 0.0;   // includes attached driving
  double wait_s = 0.0;    // SCS queueing and MED waits
  double charge_s = 0.0;  // SCS charging only
  double total_s = 0.0;   // drive + wait + SCS charging
};

/// Prefix energy check. `arc_energy[k]` is consumed on arc k and
/// `induced[k]` (if given) is credited on the same arc. True iff the running
/// energy never drops below zero at any node.
bool route_feasible(std::span<const double> arc_energy, double eps_kwh,
                    std::span<const double> induced = {});
bool route_feasible(const RoadGraph& g, std::span<const NodeId> path, double eps_kwh);

struct PlanOptions {
  int leg_limit = 4;
  bool allow_med = true;
  /// Chargers the EV can talk to. Empty means all of them.
  std::vector<bool> station_mask;
  std::vector<bool> med_mask;
};

enum class RouteStatus { Ok, Stranded, NoPath, LegLimit, VisitLimit, BookingFailed };

const char* to_string(RouteStatus status);

/// Where an EV stands between legs.
struct LegState {
  NodeId at;
  double energy_kwh = 0.0;
  double time_s = 0.0;
  std::vector<int> visits;       // per base node, including `at`
  std::optional<NodeId> exclude; // charger point just used
};

/// A scored charging candidate.
struct EnergyPoint {
  ChargerKind kind = ChargerKind::Scs;
  std::size_t charger = 0;
  std::size_t cycle_index = 0;
  NodeId node;                // station node or m_b
  NodeId exit;                // station node or m_j
  std::vector<NodeId> path;   // at -> node
  std::size_t span = 0;
  MedSlot slot;
  double drive_s = 0.0;       // at -> node
  double arrival_s = 0.0;
  double wait_s = 0.0;
  double charge_s = 0.0;
  double energy_in_kwh = 0.0;
  double energy_out_kwh = 0.0;
  double score_s = 0.0;       // drive + wait + charge + exit -> dest
  std::vector<double> induced;
};

struct RouteResult {
  RouteStatus status = RouteStatus::Ok;
  RouteAssignment route;  // partial when status != Ok
  std::string detail;
  int reselections = 0;

  bool ok() const { return status == RouteStatus::Ok; }
};

/// Shortest-path router with energy gating and best-energy-point recursion.
class Router {
 public:
  explicit Router(const ShortestPaths& paths) : paths_(&paths) {}

  const RoadGraph& graph() const { return paths_->graph(); }

  /// Best charger reachable from `state` on its current energy, or
  /// std::nullopt when none is.
  std::optional<EnergyPoint> find_best_energy_point(const EvRequest& request,
                                                    const LegState& state,
                                                    const ChargingView& view,
                                                    const PlanOptions& options) const;

  /// Direct route when it is feasible, otherwise legs through the best energy
  /// points until the rest of the trip is. Makes no bookings.
  RouteResult find_shortest_path(const EvRequest& request, const ChargingView& view,
                                 const PlanOptions& options = {}) const;

 private:
  std::optional<EnergyPoint> score_station(const EvRequest& request, const LegState& state,
                                           const ChargingView& view, std::size_t s) const;
  std::optional<EnergyPoint> score_med(const EvRequest& request, const LegState& state,
                                       const ChargingView& view, std::size_t m,
                                       std::size_t k) const;
  bool visits_fit(const LegState& state, std::span<const NodeId> path) const;

  const ShortestPaths* paths_;
};

/// The booking implied by `stop` of `route`.
Booking booking_for(const RouteAssignment& route, const ChargeStop& stop,
                    const Infrastructure& infra, double created_s);

/// Plans against the ledgers as of `as_of`, then books every stop. If a
/// booking is rejected the accepted ones are cancelled and selection runs once
/// more against the current ledgers.
RouteResult route_and_book(const Router& router, const EvRequest& request,
                           Infrastructure& infra, double as_of, const PlanOptions& options,
                           double now_s);

/// Checks energy bounds, y within x, full charge after each SCS, flow
/// conservation and the time accounting. Returns a description of the first
/// problem found.
std::optional<std::string> check_route(const RoadGraph& g, const RouteAssignment& route);

}  // namespace medsim

#endif  // MEDSIM_ROUTER_HPP
