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

#include "medsim/charging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace medsim {

namespace {

constexpr double kTimeTol = 1e-9;
constexpr double kEnergyTol = 1e-9;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Energy of a span starting at cycle index k, split by pass offset.
std::map<std::int64_t, double> pass_portions(std::size_t u, std::size_t k,
                                             std::span<const double> energy) {
  std::map<std::int64_t, double> portions;
  for (std::size_t i = 0; i < energy.size(); ++i) {
    portions[static_cast<std::int64_t>((k + i) / u)] += energy[i];
  }
  return portions;
}

}  // namespace

double scs_charge_time(double eps_kwh, double q_kwh, double rate_kw) {
  if (!(rate_kw > 0.0)) throw std::invalid_argument("charging rate must be positive");
  if (eps_kwh < 0.0 || eps_kwh > q_kwh + kEnergyTol) {
    throw std::invalid_argument(fmt::format("energy {} outside [0, {}]", eps_kwh, q_kwh));
  }
  return std::max(0.0, q_kwh - eps_kwh) / rate_kw * 3600.0;
}

double scs_waiting_time(double queue_end_s, double drive_s) {
  return std::max(0.0, queue_end_s - drive_s);
}

// ---------------------------------------------------------------------------

ScsState::ScsState(NodeId node, double rate_kw) : node_(node), rate_kw_(rate_kw) {
  if (!(rate_kw > 0.0)) throw std::invalid_argument("station rate must be positive");
}

double ScsState::booked_until(double as_of) const {
  double until = 0.0;
  for (std::size_t i = 0; i < bookings_.size(); ++i) {
    if (active_[i] && bookings_[i].created_s <= as_of) until = std::max(until, bookings_[i].end_s);
  }
  return until;
}

BookResult ScsState::book(const Booking& booking) {
  if (booking.kind != ChargerKind::Scs || booking.start_node != node_) {
    throw std::invalid_argument("booking does not target this station");
  }
  if (!(booking.end_s >= booking.start_s)) throw std::invalid_argument("booking ends before it starts");
  const double until = booked_until();
  if (booking.start_s < until - kTimeTol) return {false, until, 0};
  bookings_.push_back(booking);
  active_.push_back(true);
  return {true, booking.start_s, bookings_.size() - 1};
}

void ScsState::cancel(std::size_t id) { active_.at(id) = false; }

std::vector<Booking> ScsState::queue() const {
  std::vector<Booking> out;
  for (std::size_t i = 0; i < bookings_.size(); ++i) {
    if (active_[i]) out.push_back(bookings_[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

MedRoute::MedRoute(const RoadGraph& g, std::vector<NodeId> cycle, InductionParams ip)
    : points_(std::move(cycle)), induction_(ip) {
  if (points_.size() < 2) throw GraphError("a MED cycle needs at least two points");
  double t = 0.0;
  for (std::size_t k = 0; k < points_.size(); ++k) {
    const NodeId a = points_[k];
    const NodeId b = points_[(k + 1) % points_.size()];
    const ArcAttr* arc = g.arc(a, b);
    if (!arc) {
      throw GraphError(fmt::format("MED cycle is open between {} and {}", a.value, b.value));
    }
    cumulative_.push_back(t);
    seg_time_.push_back(arc->drive_time_s);
    seg_energy_.push_back(arc->energy_kwh);
    seg_induced_.push_back(induced_energy(arc->drive_time_s, ip));
    t += arc->drive_time_s;
  }
  cycle_time_ = t;
}

std::vector<std::size_t> MedRoute::indices_of(NodeId node) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < points_.size(); ++k) {
    if (points_[k] == node) out.push_back(k);
  }
  return out;
}

// ---------------------------------------------------------------------------

MedState::MedState(MedRoute route, double battery_kwh, double start_offset_s)
    : route_(std::move(route)), battery_kwh_(battery_kwh), offset_(start_offset_s) {
  if (!(battery_kwh >= 0.0)) throw std::invalid_argument("MED battery must be non-negative");
}

double MedState::time_at(std::int64_t global_segment) const {
  const auto u = static_cast<std::int64_t>(route_.size());
  const std::int64_t pass = floor_div(global_segment, u);
  const auto k = static_cast<std::size_t>(global_segment - pass * u);
  return offset_ + static_cast<double>(pass) * route_.cycle_time() + route_.cumulative(k);
}

MedPosition MedState::position_at(double t) const {
  const double rel = t - offset_;
  const double cycle = route_.cycle_time();
  const auto pass = static_cast<std::int64_t>(std::floor(rel / cycle));
  const double within = rel - static_cast<double>(pass) * cycle;
  std::size_t k = 0;
  while (k + 1 < route_.size() && route_.cumulative(k + 1) <= within) ++k;
  return {k, within - route_.cumulative(k), pass};
}

bool MedState::segment_free(std::int64_t global_segment, double as_of) const {
  auto it = occupancy_.find(global_segment);
  return it == occupancy_.end() || bookings_[it->second].created_s > as_of;
}

double MedState::battery_remaining(std::int64_t cycle_number, double as_of) const {
  const auto u = static_cast<std::int64_t>(route_.size());
  double used = 0.0;
  for (std::size_t i = 0; i < bookings_.size(); ++i) {
    const Booking& b = bookings_[i];
    if (!active_[i] || b.created_s > as_of) continue;
    for (std::size_t s = 0; s < b.segment_energy_kwh.size(); ++s) {
      const std::int64_t g = b.first_segment + static_cast<std::int64_t>(s);
      if (floor_div(g, u) == cycle_number) used += b.segment_energy_kwh[s];
    }
  }
  return battery_kwh_ - used;
}

std::optional<MedSlot> MedState::earliest_slot(std::size_t cycle_index, double arrival_s,
                                               std::span<const double> induced,
                                               double as_of) const {
  if (induced.empty()) throw std::invalid_argument("a MED span covers at least one segment");
  const std::size_t u = route_.size();
  const std::size_t k = cycle_index % u;
  const auto portions = pass_portions(u, k, induced);
  for (const auto& [rel, energy] : portions) {
    if (energy > battery_kwh_ + kEnergyTol) return std::nullopt;
  }

  const double cycle = route_.cycle_time();
  const double rel = arrival_s - offset_ - route_.cumulative(k);
  auto pass = static_cast<std::int64_t>(std::max(0.0, std::ceil(rel / cycle - 1e-12)));
  const auto su = static_cast<std::int64_t>(u);
  const auto sk = static_cast<std::int64_t>(k);
  while (time_at(pass * su + sk) < arrival_s - kTimeTol) ++pass;
  while (pass > 0 && time_at((pass - 1) * su + sk) >= arrival_s - kTimeTol) --pass;

  const std::int64_t last_booked = occupancy_.empty() ? 0 : occupancy_.rbegin()->first;
  const std::int64_t limit = std::max(pass, floor_div(last_booked, su)) + 3;
  for (; pass <= limit; ++pass) {
    const std::int64_t first = pass * su + sk;
    bool ok = true;
    for (std::size_t i = 0; i < induced.size() && ok; ++i) {
      ok = segment_free(first + static_cast<std::int64_t>(i), as_of);
    }
    for (auto it = portions.begin(); ok && it != portions.end(); ++it) {
      ok = battery_remaining(pass + it->first, as_of) >= it->second - kEnergyTol;
    }
    if (ok) return MedSlot{std::max(0.0, time_at(first) - arrival_s), first, pass};
  }
  throw std::logic_error("MED slot search did not terminate");
}

BookResult MedState::book(const Booking& booking) {
  if (booking.kind != ChargerKind::Med || booking.segment_energy_kwh.empty()) {
    throw std::invalid_argument("malformed MED booking");
  }
  const auto n = static_cast<std::int64_t>(booking.segment_energy_kwh.size());
  if (!nearly_equal(booking.start_s, time_at(booking.first_segment)) ||
      !nearly_equal(booking.end_s, time_at(booking.first_segment + n))) {
    throw std::invalid_argument("MED booking times do not match the cycle schedule");
  }
  const auto su = static_cast<std::int64_t>(route_.size());
  const std::int64_t pass = floor_div(booking.first_segment, su);
  const auto k = static_cast<std::size_t>(booking.first_segment - pass * su);

  bool ok = true;
  for (std::int64_t i = 0; i < n && ok; ++i) ok = segment_free(booking.first_segment + i);
  if (ok) {
    for (const auto& [rel, energy] : pass_portions(route_.size(), k, booking.segment_energy_kwh)) {
      if (battery_remaining(pass + rel) < energy - kEnergyTol) ok = false;
    }
  }
  if (!ok) {
    auto slot = earliest_slot(k, booking.start_s, booking.segment_energy_kwh);
    return {false, slot ? time_at(slot->first_segment) : kInfinity, 0};
  }
  const std::size_t id = bookings_.size();
  bookings_.push_back(booking);
  active_.push_back(true);
  for (std::int64_t i = 0; i < n; ++i) occupancy_[booking.first_segment + i] = id;
  return {true, booking.start_s, id};
}

void MedState::cancel(std::size_t id) {
  if (!active_.at(id)) return;
  active_[id] = false;
  const Booking& b = bookings_[id];
  for (std::size_t i = 0; i < b.segment_energy_kwh.size(); ++i) {
    occupancy_.erase(b.first_segment + static_cast<std::int64_t>(i));
  }
}

std::vector<Booking> MedState::bookings() const {
  std::vector<Booking> out;
  for (std::size_t i = 0; i < bookings_.size(); ++i) {
    if (active_[i]) out.push_back(bookings_[i]);
  }
  return out;
}

MedSlot med_waiting_time(const MedState& med, std::size_t cycle_index, double now_s,
                         double ev_drive_s, std::span<const double> induced, double as_of) {
  auto slot = med.earliest_slot(cycle_index, now_s + ev_drive_s, induced, as_of);
  if (!slot) throw DeficitTooLargeError("span exceeds the MED battery of a single pass");
  return *slot;
}

MeetingPoint med_meeting_point(const MedRoute& route, NodeId ev_pos, const ShortestPaths& paths) {
  std::optional<MeetingPoint> best;
  for (std::size_t k = 0; k < route.size(); ++k) {
    const NodeId p = route.point(k);
    if (!paths.reachable(ev_pos, p)) continue;
    const double t = paths.time(ev_pos, p);
    if (!best || (t < best->ev_arrival_s && !nearly_equal(t, best->ev_arrival_s)) ||
        (nearly_equal(t, best->ev_arrival_s) && p < best->node)) {
      best = MeetingPoint{p, k, t};
    }
  }
  if (!best) throw NoMeetingPointError(fmt::format("no MED point reachable from {}", ev_pos.value));
  return *best;
}

std::size_t required_attach_span(double deficit_kwh, const MedRoute& route,
                                 std::size_t start_index, int max_passes, double battery_kwh) {
  if (!(deficit_kwh > 0.0)) throw std::invalid_argument("attach deficit must be positive");
  const std::size_t u = route.size();
  const std::size_t limit = u * static_cast<std::size_t>(std::max(1, max_passes));
  double gain = 0.0;
  double pass_used = 0.0;
  for (std::size_t i = 0; i < limit; ++i) {
    const std::size_t seg = start_index + i;
    if (i > 0 && seg % u == 0) pass_used = 0.0;
    pass_used += route.segment_induced(seg);
    if (pass_used > battery_kwh + kEnergyTol) {
      throw DeficitTooLargeError("MED battery exhausted before the deficit is covered");
    }
    gain += route.segment_induced(seg) - route.segment_energy(seg);
    if (gain >= deficit_kwh - kEnergyTol) return i + 1;
  }
  throw DeficitTooLargeError(
      fmt::format("deficit {:.3f} kWh not covered within {} passes", deficit_kwh, max_passes));
}

// ---------------------------------------------------------------------------

double LedgerView::scs_wait(std::size_t s, double arrival_s) const {
  return std::max(0.0, infra_->stations[s].booked_until(as_of_) - arrival_s);
}

std::optional<MedSlot> LedgerView::med_slot(std::size_t m, std::size_t cycle_index,
                                            double arrival_s,
                                            std::span<const double> induced) const {
  return infra_->meds[m].earliest_slot(cycle_index, arrival_s, induced, as_of_);
}

std::optional<MedSlot> FrozenWaits::med_slot(std::size_t m, std::size_t cycle_index, double,
                                             std::span<const double> induced) const {
  const Med& med = meds_[m];
  for (const auto& [rel, energy] : pass_portions(med.route.size(), cycle_index, induced)) {
    if (energy > med.battery_kwh + kEnergyTol) return std::nullopt;
  }
  auto it = med.wait_s.find(med.route.point(cycle_index));
  const double wait = it == med.wait_s.end() ? 0.0 : it->second;
  return MedSlot{wait, static_cast<std::int64_t>(cycle_index % med.route.size()), 0};
}

}  // namespace medsim
