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

#ifndef MEDSIM_CHARGING_HPP
#define MEDSIM_CHARGING_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "medsim/energy_model.hpp"
#include "medsim/road_graph.hpp"
#include "medsim/shortest_paths.hpp"

namespace medsim {

inline constexpr double kDefaultScsRateKw = 19.2;
inline constexpr double kDefaultMedBatteryKwh = 200.0;

/// Seconds to charge from `eps_kwh` to full capacity `q_kwh` at `rate_kw`.
double scs_charge_time(double eps_kwh, double q_kwh, double rate_kw);

/// Time an EV waits at a station whose queue drains `queue_end_s` from now
/// when it arrives `drive_s` from now. Never negative.
double scs_waiting_time(double queue_end_s, double drive_s);

enum class ChargerKind { Scs, Med };

struct Booking {
  EvId ev = 0;
  ChargerKind kind = ChargerKind::Scs;
  NodeId start_node;  // station node, or m_b for a MED
  NodeId end_node;    // m_j (MED only)
  std::int64_t cycle_number = 0;
  std::int64_t first_segment = 0;          // absolute segment index (MED only)
  std::vector<double> segment_energy_kwh;  // energy dispensed per booked segment (MED only)
  double start_s = 0.0;
  double end_s = 0.0;
  double created_s = 0.0;  // when the booking entered the ledger
};

struct BookResult {
  bool accepted = false;
  /// On reject: the earliest start that would have been accepted.
  double alternative_start_s = 0.0;
  std::size_t id = 0;
};

/// Static charging station: one charger, FIFO by booking time.
class ScsState {
 public:
  ScsState(NodeId node, double rate_kw);

  NodeId node() const { return node_; }
  double rate_kw() const { return rate_kw_; }

  /// End of the last booking visible at `as_of` (0 when the queue is empty).
  double booked_until(double as_of = kInfinity) const;

  /// Accepts iff the booking starts no earlier than the end of the last
  /// accepted booking.
  BookResult book(const Booking& booking);
  void cancel(std::size_t id);

  /// Active bookings in booking order.
  std::vector<Booking> queue() const;

 private:
  NodeId node_;
  double rate_kw_;
  std::vector<Booking> bookings_;
  std::vector<bool> active_;
};

/// Geometry of a MED cycle with per-segment consumption and induction.
class MedRoute {
 public:
  MedRoute(const RoadGraph& g, std::vector<NodeId> cycle, InductionParams ip);

  std::size_t size() const { return points_.size(); }
  NodeId point(std::size_t k) const { return points_[k % points_.size()]; }
  const std::vector<NodeId>& points() const { return points_; }
  double segment_time(std::size_t k) const { return seg_time_[k % points_.size()]; }
  /// EV consumption c_ij on segment k.
  double segment_energy(std::size_t k) const { return seg_energy_[k % points_.size()]; }
  /// Energy induced into an EV attached over segment k.
  double segment_induced(std::size_t k) const { return seg_induced_[k % points_.size()]; }
  /// Drive time from point 0 to point k (k < size()).
  double cumulative(std::size_t k) const { return cumulative_[k]; }
  double cycle_time() const { return cycle_time_; }
  const InductionParams& induction() const { return induction_; }
  /// Cycle indices whose point is `node`.
  std::vector<std::size_t> indices_of(NodeId node) const;

 private:
  std::vector<NodeId> points_;
  std::vector<double> seg_time_;
  std::vector<double> seg_energy_;
  std::vector<double> seg_induced_;
  std::vector<double> cumulative_;
  double cycle_time_ = 0.0;
  InductionParams induction_;
};

struct MedSlot {
  double wait_s = 0.0;
  std::int64_t first_segment = 0;
  std::int64_t cycle_number = 0;
};

struct MedPosition {
  std::size_t index = 0;   // last cycle point passed
  double offset_s = 0.0;   // seconds since passing it
  std::int64_t cycle_number = 0;
};

/// A bus running its cycle forever from `start_offset_s`, with a ledger of
/// per-segment bookings. The dissemination battery refills at point 0
/// before every pass.
class MedState {
 public:
  MedState(MedRoute route, double battery_kwh = kDefaultMedBatteryKwh, double start_offset_s = 0.0);

  const MedRoute& route() const { return route_; }
  double battery_kwh() const { return battery_kwh_; }
  double start_offset_s() const { return offset_; }

  /// Absolute time the MED starts segment `global_segment`.
  double time_at(std::int64_t global_segment) const;
  MedPosition position_at(double t) const;

  bool segment_free(std::int64_t global_segment, double as_of = kInfinity) const;
  /// Battery left for pass `cycle_number` after bookings visible at `as_of`.
  double battery_remaining(std::int64_t cycle_number, double as_of = kInfinity) const;

  /// Earliest pass at which the MED reaches cycle point `cycle_index` no
  /// earlier than `arrival_s` with the following `induced.size()` segments
  /// unbooked and within the per-pass battery. std::nullopt when the span can
  /// never fit a pass battery.
  std::optional<MedSlot> earliest_slot(std::size_t cycle_index, double arrival_s,
                                       std::span<const double> induced,
                                       double as_of = kInfinity) const;

  /// Accepts iff no booked segment overlaps and every touched pass keeps a
  /// non-negative battery.
  BookResult book(const Booking& booking);
  void cancel(std::size_t id);

  std::vector<Booking> bookings() const;

 private:
  MedRoute route_;
  double battery_kwh_;
  double offset_;
  std::vector<Booking> bookings_;
  std::vector<bool> active_;
  std::map<std::int64_t, std::size_t> occupancy_;  // segment -> booking id
};

/// Wait at cycle point `cycle_index` for an EV arriving `ev_drive_s` after
/// `now_s`. The MED may be several cycles away; there is no upper bound.
MedSlot med_waiting_time(const MedState& med, std::size_t cycle_index, double now_s,
                         double ev_drive_s, std::span<const double> induced,
                         double as_of = kInfinity);

struct MeetingPoint {
  NodeId node;
  std::size_t cycle_index = 0;
  double ev_arrival_s = 0.0;
};

/// MED point with the least EV drive time from `ev_pos`; ties go to the
/// smaller node id. Throws NoMeetingPointError when none is reachable.
MeetingPoint med_meeting_point(const MedRoute& route, NodeId ev_pos, const ShortestPaths& paths);

/// Number of segments to follow from `start_index` until the summed net gain
/// (induction minus consumption) reaches `deficit_kwh`. Throws
/// std::invalid_argument for deficit <= 0 and DeficitTooLargeError when
/// `max_passes` full cycles or a pass battery of `battery_kwh` are not enough.
std::size_t required_attach_span(double deficit_kwh, const MedRoute& route,
                                 std::size_t start_index, int max_passes,
                                 double battery_kwh = kDefaultMedBatteryKwh);

struct Infrastructure {
  std::vector<ScsState> stations;
  std::vector<MedState> meds;
};

/// What an EV knows about chargers when it plans. Implemented by the live
/// ledgers (seen through the latest beacon) and by frozen wait tables.
class ChargingView {
 public:
  virtual ~ChargingView() = default;

  virtual std::size_t station_count() const = 0;
  virtual NodeId station_node(std::size_t station) const = 0;
  virtual double station_rate_kw(std::size_t station) const = 0;
  virtual double scs_wait(std::size_t station, double arrival_s) const = 0;

  virtual std::size_t med_count() const = 0;
  virtual const MedRoute& med_route(std::size_t med) const = 0;
  virtual double med_battery_kwh(std::size_t med) const = 0;
  virtual std::optional<MedSlot> med_slot(std::size_t med, std::size_t cycle_index,
                                          double arrival_s,
                                          std::span<const double> induced) const = 0;
};

/// Ledger state as of a beacon time.
class LedgerView final : public ChargingView {
 public:
  LedgerView(const Infrastructure& infra, double as_of) : infra_(&infra), as_of_(as_of) {}

  std::size_t station_count() const override { return infra_->stations.size(); }
  NodeId station_node(std::size_t s) const override { return infra_->stations[s].node(); }
  double station_rate_kw(std::size_t s) const override { return infra_->stations[s].rate_kw(); }
  double scs_wait(std::size_t s, double arrival_s) const override;

  std::size_t med_count() const override { return infra_->meds.size(); }
  const MedRoute& med_route(std::size_t m) const override { return infra_->meds[m].route(); }
  double med_battery_kwh(std::size_t m) const override { return infra_->meds[m].battery_kwh(); }
  std::optional<MedSlot> med_slot(std::size_t m, std::size_t cycle_index, double arrival_s,
                                  std::span<const double> induced) const override;

 private:
  const Infrastructure* infra_;
  double as_of_;
};

/// Fixed waits per charger node, no queue dynamics.
class FrozenWaits final : public ChargingView {
 public:
  struct Station {
    NodeId node;
    double rate_kw = kDefaultScsRateKw;
    double wait_s = 0.0;
  };
  struct Med {
    MedRoute route;
    std::map<NodeId, double> wait_s;  // per MED point; missing means 0
    double battery_kwh = kInfinity;
  };

  FrozenWaits(std::vector<Station> stations, std::vector<Med> meds)
      : stations_(std::move(stations)), meds_(std::move(meds)) {}

  std::size_t station_count() const override { return stations_.size(); }
  NodeId station_node(std::size_t s) const override { return stations_[s].node; }
  double station_rate_kw(std::size_t s) const override { return stations_[s].rate_kw; }
  double scs_wait(std::size_t s, double) const override { return stations_[s].wait_s; }

  std::size_t med_count() const override { return meds_.size(); }
  const MedRoute& med_route(std::size_t m) const override { return meds_[m].route; }
  double med_battery_kwh(std::size_t m) const override { return meds_[m].battery_kwh; }
  std::optional<MedSlot> med_slot(std::size_t m, std::size_t cycle_index, double arrival_s,
                                  std::span<const double> induced) const override;

 private:
  std::vector<Station> stations_;
  std::vector<Med> meds_;
};

}  // namespace medsim

#endif  // MEDSIM_CHARGING_HPP
