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

#include "medsim/router.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

namespace medsim {

namespace {

constexpr double kEnergyTol = 1e-9;

bool better(const EnergyPoint& a, const EnergyPoint& b) {
  if (!nearly_equal(a.score_s, b.score_s)) return a.score_s < b.score_s;
  if (a.kind != b.kind) return a.kind == ChargerKind::Scs;
  if (a.node != b.node) return a.node < b.node;
  if (a.charger != b.charger) return a.charger < b.charger;
  return a.cycle_index < b.cycle_index;
}

bool allowed(const std::vector<bool>& mask, std::size_t i) { return mask.empty() || mask.at(i); }

void push_node(RouteAssignment& a, LegState& st, NodeId to, double energy, double dt,
               bool attached) {
  const ArcRef arc{a.walk.back(), to};
  a.x_arcs.push_back(arc);
  if (attached) a.y_arcs.push_back(arc);
  a.walk.push_back(to);
  st.time_s += dt;
  st.energy_kwh = energy;
  st.at = to;
  ++st.visits[to.value];
  a.energy_trace.push_back(energy);
  a.time_trace.push_back(st.time_s);
}

void append_path(const RoadGraph& g, RouteAssignment& a, LegState& st,
                 std::span<const NodeId> path) {
  for (std::size_t k = 1; k < path.size(); ++k) {
    const ArcAttr* arc = g.arc(path[k - 1], path[k]);
    push_node(a, st, path[k], st.energy_kwh - arc->energy_kwh, arc->drive_time_s, false);
  }
}

}  // namespace

void EvRequest::validate() const {
  if (!(capacity_kwh > 0.0)) throw std::invalid_argument("battery capacity must be positive");
  if (energy_kwh < 0.0 || energy_kwh > capacity_kwh) {
    throw std::invalid_argument(
        fmt::format("initial energy {} outside [0, {}]", energy_kwh, capacity_kwh));
  }
  if (source == dest) throw std::invalid_argument("source and destination coincide");
}

bool route_feasible(std::span<const double> arc_energy, double eps_kwh,
                    std::span<const double> induced) {
  if (!induced.empty() && induced.size() != arc_energy.size()) {
    throw std::invalid_argument("induced energy must be given per arc");
  }
  double e = eps_kwh;
  if (e < -kEnergyTol) return false;
  for (std::size_t k = 0; k < arc_energy.size(); ++k) {
    e -= arc_energy[k];
    if (!induced.empty()) e += induced[k];
    if (e < -kEnergyTol) return false;
  }
  return true;
}

bool route_feasible(const RoadGraph& g, std::span<const NodeId> path, double eps_kwh) {
  double e = eps_kwh;
  if (e < -kEnergyTol) return false;
  for (std::size_t k = 1; k < path.size(); ++k) {
    e -= g.energy_cost(path[k - 1], path[k]);
    if (e < -kEnergyTol) return false;
  }
  return true;
}

const char* to_string(RouteStatus status) {
  switch (status) {
    case RouteStatus::Ok: return "ok";
    case RouteStatus::Stranded: return "stranded";
    case RouteStatus::NoPath: return "no_path";
    case RouteStatus::LegLimit: return "leg_limit";
    case RouteStatus::VisitLimit: return "visit_limit";
    case RouteStatus::BookingFailed: return "booking_failed";
  }
  return "unknown";
}

bool Router::visits_fit(const LegState& state, std::span<const NodeId> path) const {
  const int limit = graph().visit_limit();
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (state.visits[path[k].value] + 1 > limit) return false;
  }
  return true;
}

std::optional<EnergyPoint> Router::score_station(const EvRequest& request, const LegState& st,
                                                 const ChargingView& view,
                                                 std::size_t s) const {
  const RoadGraph& g = graph();
  const NodeId node = view.station_node(s);
  if (st.exclude == node) return std::nullopt;
  const auto& path = paths_->path(st.at, node);
  if (path.empty() || !route_feasible(g, path, st.energy_kwh) || !visits_fit(st, path)) {
    return std::nullopt;
  }
  if (node != request.dest && !paths_->reachable(node, request.dest)) return std::nullopt;

  EnergyPoint p;
  p.kind = ChargerKind::Scs;
  p.charger = s;
  p.node = p.exit = node;
  p.path = path;
  p.drive_s = paths_->time(st.at, node);
  p.arrival_s = st.time_s + p.drive_s;
  p.energy_in_kwh = std::clamp(st.energy_kwh - paths_->energy(st.at, node), 0.0,
                               request.capacity_kwh);
  p.wait_s = view.scs_wait(s, p.arrival_s);
  p.charge_s = scs_charge_time(p.energy_in_kwh, request.capacity_kwh, view.station_rate_kw(s));
  p.energy_out_kwh = request.capacity_kwh;
  const double rest = node == request.dest ? 0.0 : paths_->time(node, request.dest);
  p.score_s = p.drive_s + p.wait_s + p.charge_s + rest;
  return p;
}

std::optional<EnergyPoint> Router::score_med(const EvRequest& request, const LegState& st,
                                             const ChargingView& view, std::size_t m,
                                             std::size_t k) const {
  const RoadGraph& g = graph();
  const MedRoute& route = view.med_route(m);
  const NodeId meet = route.point(k);
  if (st.exclude == meet) return std::nullopt;
  const auto& path = paths_->path(st.at, meet);
  if (path.empty() || !route_feasible(g, path, st.energy_kwh) || !visits_fit(st, path)) {
    return std::nullopt;
  }

  std::vector<int> visits = st.visits;
  for (std::size_t i = 1; i < path.size(); ++i) ++visits[path[i].value];
  const double q = request.capacity_kwh;
  const double drive = paths_->time(st.at, meet);
  const double arrival_energy = std::max(0.0, st.energy_kwh - paths_->energy(st.at, meet));

  // Follow the MED one segment at a time until the rest of the trip is
  // feasible from the detach point. Otherwise fall back to the shortest span
  // that fills the battery (or the best energy seen) and recurse from there.
  const std::size_t max_span = route.size() * static_cast<std::size_t>(g.visit_limit());
  std::size_t chosen = 0;
  std::size_t full = 0;
  std::size_t best_seen = 0;
  double best_energy = -kInfinity;
  double e = arrival_energy;
  std::vector<double> trace;
  for (std::size_t n = 1; n <= max_span; ++n) {
    const std::size_t seg = k + n - 1;
    const NodeId to = route.point(seg + 1);
    if (++visits[to.value] > g.visit_limit()) break;
    e = std::min(q, e - route.segment_energy(seg) + route.segment_induced(seg));
    if (e < -kEnergyTol) break;
    trace.push_back(e);
    if (to == request.dest) {
      chosen = n;
      break;
    }
    const auto& rest = paths_->path(to, request.dest);
    if (!rest.empty() && route_feasible(g, rest, e)) {
      bool fits = true;
      for (std::size_t i = 1; i < rest.size() && fits; ++i) {
        fits = visits[rest[i].value] + 1 <= g.visit_limit();
      }
      if (fits) {
        chosen = n;
        break;
      }
    }
    if (full == 0 && e >= q - kEnergyTol) full = n;
    if (e > best_energy + kEnergyTol) {
      best_energy = e;
      best_seen = n;
    }
  }
  if (chosen == 0) chosen = full != 0 ? full : best_seen;
  if (chosen == 0) return std::nullopt;

  EnergyPoint p;
  p.kind = ChargerKind::Med;
  p.charger = m;
  p.cycle_index = k;
  p.node = meet;
  p.exit = route.point(k + chosen);
  p.path = path;
  p.span = chosen;
  for (std::size_t i = 0; i < chosen; ++i) {
    p.induced.push_back(route.segment_induced(k + i));
    p.charge_s += route.segment_time(k + i);
  }
  if (p.exit != request.dest && !paths_->reachable(p.exit, request.dest)) return std::nullopt;
  p.drive_s = drive;
  p.arrival_s = st.time_s + drive;
  p.energy_in_kwh = arrival_energy;
  p.energy_out_kwh = trace[chosen - 1];
  auto slot = view.med_slot(m, k, p.arrival_s, p.induced);
  if (!slot) return std::nullopt;
  p.slot = *slot;
  p.wait_s = slot->wait_s;
  const double rest = p.exit == request.dest ? 0.0 : paths_->time(p.exit, request.dest);
  p.score_s = p.drive_s + p.wait_s + p.charge_s + rest;
  return p;
}

std::optional<EnergyPoint> Router::find_best_energy_point(const EvRequest& request,
                                                          const LegState& state,
                                                          const ChargingView& view,
                                                          const PlanOptions& options) const {
  std::optional<EnergyPoint> best;
  auto offer = [&](std::optional<EnergyPoint> p) {
    if (p && (!best || better(*p, *best))) best = std::move(p);
  };
  for (std::size_t s = 0; s < view.station_count(); ++s) {
    if (allowed(options.station_mask, s)) offer(score_station(request, state, view, s));
  }
  if (options.allow_med) {
    for (std::size_t m = 0; m < view.med_count(); ++m) {
      if (!allowed(options.med_mask, m)) continue;
      for (std::size_t k = 0; k < view.med_route(m).size(); ++k) {
        offer(score_med(request, state, view, m, k));
      }
    }
  }
  return best;
}

RouteResult Router::find_shortest_path(const EvRequest& request, const ChargingView& view,
                                       const PlanOptions& options) const {
  request.validate();
  const RoadGraph& g = graph();
  if (!g.contains(request.source) || !g.contains(request.dest) ||
      g.is_dummy(request.source) || g.is_dummy(request.dest)) {
    throw std::invalid_argument("request endpoints must be base nodes");
  }

  RouteResult result;
  RouteAssignment& a = result.route;
  a.ev = request.ev;
  a.source = request.source;
  a.dest = request.dest;
  a.start_s = request.start_s;
  a.capacity_kwh = request.capacity_kwh;
  a.initial_energy_kwh = request.energy_kwh;
  a.walk = {request.source};
  a.energy_trace = {request.energy_kwh};
  a.time_trace = {request.start_s};

  LegState st{request.source, request.energy_kwh, request.start_s,
              std::vector<int>(g.base_node_count(), 0), std::nullopt};
  st.visits[request.source.value] = 1;

  auto finish = [&](RouteStatus status, std::string detail) {
    result.status = status;
    result.detail = std::move(detail);
    a.drive_s = 0.0;
    for (const ArcRef& arc : a.x_arcs) a.drive_s += g.drive_time(arc.from, arc.to);
    a.wait_s = 0.0;
    a.charge_s = 0.0;
    for (const ChargeStop& stop : a.stops) {
      a.wait_s += stop.wait_s;
      if (stop.kind == ChargerKind::Scs) a.charge_s += stop.charge_s;
    }
    a.total_s = st.time_s - request.start_s;
    return result;
  };

  for (int legs = 0;; ++legs) {
    if (st.at == request.dest) return finish(RouteStatus::Ok, {});
    const auto& direct = paths_->path(st.at, request.dest);
    if (direct.empty()) {
      return finish(RouteStatus::NoPath,
                    fmt::format("node {} unreachable from {}", request.dest.value, st.at.value));
    }
    if (route_feasible(g, direct, st.energy_kwh)) {
      if (!visits_fit(st, direct)) {
        return finish(RouteStatus::VisitLimit, "final leg exceeds the visit limit");
      }
      append_path(g, a, st, direct);
      return finish(RouteStatus::Ok, {});
    }
    if (legs >= options.leg_limit) {
      return finish(RouteStatus::LegLimit, fmt::format("{} charging stops used", legs));
    }
    auto point = find_best_energy_point(request, st, view, options);
    if (!point) return finish(RouteStatus::Stranded, "no feasible energy point");

    append_path(g, a, st, point->path);
    ChargeStop stop;
    stop.kind = point->kind;
    stop.charger = point->charger;
    stop.walk_index = a.walk.size() - 1;
    stop.cycle_index = point->cycle_index;
    stop.arrival_s = st.time_s;
    stop.wait_s = point->wait_s;
    stop.charge_s = point->charge_s;
    stop.energy_in_kwh = st.energy_kwh;

    if (point->kind == ChargerKind::Scs) {
      st.time_s += point->wait_s + point->charge_s;
      st.energy_kwh = request.capacity_kwh;
    } else {
      stop.span = point->span;
      stop.first_segment = point->slot.first_segment;
      stop.cycle_number = point->slot.cycle_number;
      st.time_s += point->wait_s;
      const MedRoute& route = view.med_route(point->charger);
      for (std::size_t i = 0; i < point->span; ++i) {
        const std::size_t seg = point->cycle_index + i;
        const double e = std::min(request.capacity_kwh, st.energy_kwh -
                                                            route.segment_energy(seg) +
                                                            route.segment_induced(seg));
        push_node(a, st, route.point(seg + 1), e, route.segment_time(seg), true);
      }
    }
    stop.energy_out_kwh = st.energy_kwh;
    a.stops.push_back(stop);
    st.exclude = st.at;
  }
}

Booking booking_for(const RouteAssignment& route, const ChargeStop& stop,
                    const Infrastructure& infra, double created_s) {
  Booking b;
  b.ev = route.ev;
  b.kind = stop.kind;
  b.start_node = route.walk.at(stop.walk_index);
  b.end_node = route.walk.at(stop.walk_index + stop.span);
  b.created_s = created_s;
  if (stop.kind == ChargerKind::Scs) {
    b.start_s = stop.arrival_s + stop.wait_s;
    b.end_s = b.start_s + stop.charge_s;
    return b;
  }
  const MedState& med = infra.meds.at(stop.charger);
  b.cycle_number = stop.cycle_number;
  b.first_segment = stop.first_segment;
  b.start_s = med.time_at(stop.first_segment);
  b.end_s = med.time_at(stop.first_segment + static_cast<std::int64_t>(stop.span));
  for (std::size_t i = 0; i < stop.span; ++i) {
    b.segment_energy_kwh.push_back(med.route().segment_induced(stop.cycle_index + i));
  }
  return b;
}

RouteResult route_and_book(const Router& router, const EvRequest& request,
                           Infrastructure& infra, double as_of, const PlanOptions& options,
                           double now_s) {
  auto commit = [&](const RouteResult& r) {
    std::vector<std::pair<const ChargeStop*, std::size_t>> accepted;
    for (const ChargeStop& stop : r.route.stops) {
      const Booking b = booking_for(r.route, stop, infra, now_s);
      const BookResult res = stop.kind == ChargerKind::Scs
                                 ? infra.stations.at(stop.charger).book(b)
                                 : infra.meds.at(stop.charger).book(b);
      if (!res.accepted) {
        for (const auto& [s, id] : accepted) {
          if (s->kind == ChargerKind::Scs) {
            infra.stations[s->charger].cancel(id);
          } else {
            infra.meds[s->charger].cancel(id);
          }
        }
        return false;
      }
      accepted.emplace_back(&stop, res.id);
    }
    return true;
  };

  RouteResult first = router.find_shortest_path(request, LedgerView(infra, as_of), options);
  if (!first.ok() || commit(first)) return first;

  RouteResult again = router.find_shortest_path(request, LedgerView(infra, kInfinity), options);
  again.reselections = 1;
  if (again.ok() && !commit(again)) {
    again.status = RouteStatus::BookingFailed;
    again.detail = "booking rejected after re-selection";
  }
  return again;
}

std::optional<std::string> check_route(const RoadGraph& g, const RouteAssignment& a) {
  constexpr double tol = 1e-6;
  const std::size_t n = a.walk.size();
  if (n == 0 || a.walk.front() != a.source || a.walk.back() != a.dest) {
    return "walk does not run from source to destination";
  }
  if (a.x_arcs.size() + 1 != n || a.energy_trace.size() != n || a.time_trace.size() != n) {
    return "walk, arcs and traces disagree in length";
  }

  std::map<NodeId, int> balance;
  std::map<ArcRef, int> x_count;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const ArcRef& arc = a.x_arcs[k];
    if (arc.from != a.walk[k] || arc.to != a.walk[k + 1]) return fmt::format("arc {} off the walk", k);
    if (!g.arc(arc.from, arc.to)) {
      return fmt::format("arc {}->{} not in the graph", arc.from.value, arc.to.value);
    }
    ++balance[arc.from];
    --balance[arc.to];
    ++x_count[arc];
  }
  for (const auto& [node, b] : balance) {
    const int expected = (node == a.source ? 1 : 0) - (node == a.dest ? 1 : 0);
    if (b != expected) return fmt::format("flow not conserved at node {}", node.value);
  }

  std::vector<ArcRef> attached;
  for (const ChargeStop& stop : a.stops) {
    for (std::size_t i = 0; i < stop.span; ++i) attached.push_back(a.x_arcs.at(stop.walk_index + i));
  }
  if (attached != a.y_arcs) return "y arcs do not match the MED spans";
  for (const ArcRef& arc : a.y_arcs) {
    if (--x_count[arc] < 0) return "y arc not traversed";
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (a.energy_trace[k] < -tol || a.energy_trace[k] > a.capacity_kwh + tol) {
      return fmt::format("energy {} at walk position {} outside [0, Q]", a.energy_trace[k], k);
    }
  }
  for (const ChargeStop& stop : a.stops) {
    if (stop.kind == ChargerKind::Scs && std::abs(stop.energy_out_kwh - a.capacity_kwh) > tol) {
      return "EV leaves a station without a full battery";
    }
    if (stop.energy_out_kwh < -tol || stop.energy_out_kwh > a.capacity_kwh + tol) {
      return "energy after charging outside [0, Q]";
    }
  }
  if (!nearly_equal(a.total_s, a.drive_s + a.wait_s + a.charge_s) ||
      !nearly_equal(a.time_trace.back() - a.start_s, a.total_s)) {
    return "travel time does not add up";
  }
  return std::nullopt;
}

}  // namespace medsim
