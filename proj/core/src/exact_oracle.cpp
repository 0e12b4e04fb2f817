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

#include "medsim/exact_oracle.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace medsim {

namespace {

constexpr double kTol = 1e-6;
constexpr double kEnergyTol = 1e-9;

double lookup(const std::map<NodeId, double>& waits, NodeId n) {
  auto it = waits.find(n);
  return it == waits.end() ? 0.0 : it->second;
}

// Drive time from every base node to `dest`, O(n^2) without a heap.
std::vector<double> time_to(const RoadGraph& g, NodeId dest) {
  const std::size_t n = g.base_node_count();
  std::vector<std::vector<std::pair<std::uint32_t, double>>> in(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (const auto& arc : g.out_arcs(NodeId(i))) {
      if (!g.is_dummy(arc.to)) in[arc.to.value].emplace_back(i, arc.attr.drive_time_s);
    }
  }
  std::vector<double> dist(n, kInfinity);
  std::vector<bool> done(n, false);
  dist[dest.value] = 0.0;
  for (std::size_t round = 0; round < n; ++round) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!done[v] && dist[v] < kInfinity && (u == n || dist[v] < dist[u])) u = v;
    }
    if (u == n) break;
    done[u] = true;
    for (const auto& [from, w] : in[u]) dist[from] = std::min(dist[from], dist[u] + w);
  }
  return dist;
}

class Search {
 public:
  explicit Search(const OracleInstance& inst)
      : inst_(inst), g_(inst.graph), req_(inst.request), lb_(time_to(g_, req_.dest)),
        visits_(g_.base_node_count(), 0) {
    meds_ = med_routes(inst);
    cur_.ev = req_.ev;
    cur_.source = req_.source;
    cur_.dest = req_.dest;
    cur_.start_s = req_.start_s;
    cur_.capacity_kwh = req_.capacity_kwh;
    cur_.initial_energy_kwh = req_.energy_kwh;
  }

  OracleSolution run() {
    cur_.walk = {req_.source};
    cur_.energy_trace = {req_.energy_kwh};
    cur_.time_trace = {req_.start_s};
    visits_[req_.source.value] = 1;
    if (req_.energy_kwh >= -kEnergyTol) expand(req_.source, req_.energy_kwh, 0.0, -1, false);
    sol_.objective = sol_.best ? sol_.best->total_s : kInfinity;
    return std::move(sol_);
  }

 private:
  // `attached` is the cycle index of v while riding a MED, or -1.
  void expand(NodeId v, double eps, double cost, long attached, bool acted) {
    ++sol_.explored;
    if (cost + lb_[v.value] >= best_) return;
    if (v == req_.dest) {
      record(cost);
      return;
    }
    const double q = req_.capacity_kwh;

    if (attached >= 0) {
      ride(v, eps, cost, static_cast<std::size_t>(attached));
      moves(v, eps, cost);  // detach here
      return;
    }
    if (!acted && g_.is_scs(v)) {
      const double e_in = std::clamp(eps, 0.0, q);
      const double wait = lookup(inst_.scs_wait_s, v);
      const double charge = scs_charge_time(e_in, q, inst_.scs_rate_kw);
      ChargeStop stop;
      stop.kind = ChargerKind::Scs;
      stop.charger = station_index(v);
      stop.walk_index = cur_.walk.size() - 1;
      stop.arrival_s = req_.start_s + cost;
      stop.wait_s = wait;
      stop.charge_s = charge;
      stop.energy_in_kwh = eps;
      stop.energy_out_kwh = q;
      cur_.stops.push_back(stop);
      moves(v, q, cost + wait + charge);
      cur_.stops.pop_back();
    }
    if (!acted && !meds_.empty()) {
      const MedRoute& route = meds_.front();
      for (std::size_t k : route.indices_of(v)) {
        const double wait = lookup(inst_.med_wait_s, v);
        ChargeStop stop;
        stop.kind = ChargerKind::Med;
        stop.walk_index = cur_.walk.size() - 1;
        stop.cycle_index = k;
        stop.first_segment = static_cast<std::int64_t>(k);
        stop.arrival_s = req_.start_s + cost;
        stop.wait_s = wait;
        stop.energy_in_kwh = eps;
        cur_.stops.push_back(stop);
        ride(v, eps, cost + wait, k);
        cur_.stops.pop_back();
      }
    }
    moves(v, eps, cost);
  }

  // Follow the MED from cycle index k to k + 1.
  void ride(NodeId v, double eps, double cost, std::size_t k) {
    const MedRoute& route = meds_.front();
    const NodeId to = route.point(k + 1);
    if (route.point(k) != v || visits_[to.value] >= g_.visit_limit()) return;
    const double e = std::min(req_.capacity_kwh,
                              eps - route.segment_energy(k) + route.segment_induced(k));
    if (e < -kEnergyTol) return;
    ChargeStop& stop = cur_.stops.back();
    ++stop.span;
    stop.charge_s += route.segment_time(k);
    const double saved_out = stop.energy_out_kwh;
    stop.energy_out_kwh = e;
    push(to, e, cost + route.segment_time(k), true);
    expand(to, e, cost + route.segment_time(k), static_cast<long>((k + 1) % route.size()), true);
    pop(true);
    cur_.stops.back().energy_out_kwh = saved_out;
    cur_.stops.back().charge_s -= route.segment_time(k);
    --cur_.stops.back().span;
  }

  void moves(NodeId v, double eps, double cost) {
    for (const auto& arc : g_.out_arcs(v)) {
      if (g_.is_dummy(arc.to) || visits_[arc.to.value] >= g_.visit_limit()) continue;
      const double e = eps - arc.attr.energy_kwh;
      if (e < -kEnergyTol) continue;
      const double c = cost + arc.attr.drive_time_s;
      if (c + lb_[arc.to.value] >= best_) continue;
      push(arc.to, e, c, false);
      expand(arc.to, e, c, -1, false);
      pop(false);
    }
  }

  void push(NodeId to, double e, double cost, bool attached) {
    const ArcRef arc{cur_.walk.back(), to};
    cur_.x_arcs.push_back(arc);
    if (attached) cur_.y_arcs.push_back(arc);
    cur_.walk.push_back(to);
    cur_.energy_trace.push_back(e);
    cur_.time_trace.push_back(req_.start_s + cost);
    ++visits_[to.value];
  }

  void pop(bool attached) {
    --visits_[cur_.walk.back().value];
    cur_.walk.pop_back();
    cur_.energy_trace.pop_back();
    cur_.time_trace.pop_back();
    cur_.x_arcs.pop_back();
    if (attached) cur_.y_arcs.pop_back();
  }

  void record(double cost) {
    if (!(cost < best_)) return;
    best_ = cost;
    RouteAssignment a = cur_;
    a.drive_s = a.wait_s = a.charge_s = 0.0;
    for (const ArcRef& arc : a.x_arcs) a.drive_s += g_.drive_time(arc.from, arc.to);
    for (const ChargeStop& s : a.stops) {
      a.wait_s += s.wait_s;
      if (s.kind == ChargerKind::Scs) a.charge_s += s.charge_s;
    }
    a.total_s = cost;
    sol_.best = std::move(a);
  }

  std::size_t station_index(NodeId v) const {
    const auto& scs = g_.scs_nodes();
    return static_cast<std::size_t>(std::find(scs.begin(), scs.end(), v) - scs.begin());
  }

  const OracleInstance& inst_;
  const RoadGraph& g_;
  const EvRequest& req_;
  std::vector<double> lb_;
  std::vector<int> visits_;
  std::vector<MedRoute> meds_;
  RouteAssignment cur_;
  OracleSolution sol_;
  double best_ = kInfinity;
};

Verdict violated(int id, std::string detail) { return {false, id, std::move(detail)}; }

}  // namespace

void OracleInstance::validate() const {
  request.validate();
  for (const auto* waits : {&scs_wait_s, &med_wait_s}) {
    for (const auto& [node, w] : *waits) {
      if (!(w >= 0.0)) throw std::invalid_argument(fmt::format("negative wait at node {}", node.value));
    }
  }
  if (!(scs_rate_kw > 0.0)) throw std::invalid_argument("station rate must be positive");
  induction.validate();
}

FrozenWaits frozen_view(const OracleInstance& inst) {
  std::vector<FrozenWaits::Station> stations;
  for (NodeId s : inst.graph.scs_nodes()) {
    stations.push_back({s, inst.scs_rate_kw, lookup(inst.scs_wait_s, s)});
  }
  std::vector<FrozenWaits::Med> meds;
  for (MedRoute& route : med_routes(inst)) {
    meds.push_back({std::move(route), inst.med_wait_s, kInfinity});
  }
  return FrozenWaits(std::move(stations), std::move(meds));
}

std::vector<MedRoute> med_routes(const OracleInstance& inst) {
  std::vector<MedRoute> out;
  if (!inst.graph.med_points().empty()) {
    out.emplace_back(inst.graph, inst.graph.med_points(), inst.induction);
  }
  return out;
}

OracleSolution solve_exact(const OracleInstance& inst) {
  if (inst.graph.node_count() > OracleInstance::kNodeLimit) {
    throw OracleBoundError(fmt::format("instance has {} nodes including dummies, limit is {}",
                                       inst.graph.node_count(), OracleInstance::kNodeLimit));
  }
  inst.validate();
  return Search(inst).run();
}

Verdict verify(const OracleInstance& inst, const RouteAssignment& a) {
  const auto meds = med_routes(inst);
  return verify(inst.graph, inst.request, meds, a);
}

Verdict verify(const RoadGraph& g, const EvRequest& req, std::span<const MedRoute> meds,
               const RouteAssignment& a) {
  const std::size_t n = a.walk.size();
  const double q = req.capacity_kwh;

  // 2: endpoints and flow conservation over x.
  if (n == 0 || a.walk.front() != req.source || a.walk.back() != req.dest) {
    return violated(2, "walk does not join source and destination");
  }
  if (a.x_arcs.size() + 1 != n) return violated(2, "arc count does not match the walk");
  std::map<NodeId, int> balance;
  std::map<ArcRef, int> x_count;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const ArcRef& arc = a.x_arcs[k];
    if (arc.from != a.walk[k] || arc.to != a.walk[k + 1]) {
      return violated(2, fmt::format("arc {} does not continue the walk", k));
    }
    ++balance[arc.from];
    --balance[arc.to];
    ++x_count[arc];
  }
  for (const auto& [node, b] : balance) {
    const int expected = (node == req.source ? 1 : 0) - (node == req.dest ? 1 : 0);
    if (b != expected) return violated(2, fmt::format("flow not conserved at {}", node.value));
  }

  // 3: y within x.
  {
    auto remaining = x_count;
    for (const ArcRef& arc : a.y_arcs) {
      if (--remaining[arc] < 0) {
        return violated(3, fmt::format("arc {}->{} attached but not traversed", arc.from.value,
                                       arc.to.value));
      }
    }
  }

  // Stop indices must make sense before the energy checks can read them.
  for (const ChargeStop& s : a.stops) {
    if (s.walk_index >= n || s.walk_index + s.span >= n) {
      return violated(s.kind == ChargerKind::Scs ? 10 : 11, "stop outside the walk");
    }
    if (s.kind == ChargerKind::Med && s.charger >= meds.size()) {
      return violated(11, "stop names an unknown MED");
    }
  }

  // 4: energy propagation.
  if (a.energy_trace.size() != n) return violated(4, "energy trace length differs from walk");
  if (std::abs(a.energy_trace[0] - req.energy_kwh) > kTol) {
    return violated(4, "trace does not start at the initial energy");
  }
  std::vector<const ChargeStop*> scs_at(n, nullptr);
  std::vector<const ChargeStop*> med_on(n, nullptr);  // per arc
  std::vector<std::size_t> med_seg(n, 0);
  for (const ChargeStop& s : a.stops) {
    if (s.kind == ChargerKind::Scs) {
      scs_at[s.walk_index] = &s;
      continue;
    }
    for (std::size_t i = 0; i < s.span; ++i) {
      if (med_on[s.walk_index + i]) return violated(4, "overlapping MED spans");
      med_on[s.walk_index + i] = &s;
      med_seg[s.walk_index + i] = s.cycle_index + i;
    }
  }
  std::vector<ArcRef> attached;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const ChargeStop* scs = scs_at[k];
    if (scs && std::abs(scs->energy_in_kwh - a.energy_trace[k]) > kTol) {
      return violated(4, "station arrival energy differs from the trace");
    }
    const double dep = scs ? scs->energy_out_kwh : a.energy_trace[k];
    const double c = g.energy_cost(a.walk[k], a.walk[k + 1]);
    double expected = dep - c;
    if (const ChargeStop* med = med_on[k]) {
      const MedRoute& route = meds[med->charger];
      if (route.point(med_seg[k]) != a.walk[k] || route.point(med_seg[k] + 1) != a.walk[k + 1]) {
        return violated(4, fmt::format("induction credited off the MED cycle on arc {}", k));
      }
      expected = std::min(q, expected + route.segment_induced(med_seg[k]));
      attached.push_back(a.x_arcs[k]);
    }
    if (!(std::abs(a.energy_trace[k + 1] - expected) <= kTol)) {
      return violated(4, fmt::format("energy at walk position {} is {}, expected {}", k + 1,
                                     a.energy_trace[k + 1], expected));
    }
  }
  if (attached != a.y_arcs) return violated(4, "attached arcs do not match the MED spans");
  for (const ChargeStop& s : a.stops) {
    if (s.kind == ChargerKind::Med &&
        std::abs(s.energy_out_kwh - a.energy_trace[s.walk_index + s.span]) > kTol) {
      return violated(4, "detach energy differs from the trace");
    }
  }

  // 5 and 6: bounds.
  for (std::size_t k = 0; k < n; ++k) {
    if (a.energy_trace[k] < -kTol) {
      return violated(5, fmt::format("energy {} at walk position {}", a.energy_trace[k], k));
    }
  }
  for (const ChargeStop& s : a.stops) {
    if (s.energy_out_kwh < -kTol) return violated(5, "negative energy after a charger");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (a.energy_trace[k] > q + kTol) {
      return violated(6, fmt::format("energy {} above capacity {}", a.energy_trace[k], q));
    }
  }
  for (const ChargeStop& s : a.stops) {
    if (s.energy_out_kwh > q + kTol) return violated(6, "charged above capacity");
  }

  // 7: full battery after a station.
  for (const ChargeStop& s : a.stops) {
    if (s.kind == ChargerKind::Scs && std::abs(s.energy_out_kwh - q) > kTol) {
      return violated(7, fmt::format("left station at node {} with {} kWh",
                                     a.walk[s.walk_index].value, s.energy_out_kwh));
    }
  }

  // 8: a charger is only used once reached.
  for (const ChargeStop& s : a.stops) {
    if (a.energy_trace[s.walk_index] < -kTol) return violated(8, "charger reached on a deficit");
  }

  // 9: arcs and visits.
  std::map<NodeId, int> visits;
  for (NodeId v : a.walk) {
    if (!g.contains(v) || g.is_dummy(v)) return violated(9, "walk leaves the base graph");
    if (++visits[v] > g.visit_limit()) {
      return violated(9, fmt::format("node {} visited more than {} times", v.value, g.visit_limit()));
    }
  }
  for (const ArcRef& arc : a.x_arcs) {
    if (!g.arc(arc.from, arc.to)) {
      return violated(9, fmt::format("arc {}->{} not in the graph", arc.from.value, arc.to.value));
    }
  }

  // 10 and 11: charging only where a charger is.
  for (const ChargeStop& s : a.stops) {
    if (s.kind == ChargerKind::Scs && !g.is_scs(a.walk[s.walk_index])) {
      return violated(10, fmt::format("no station at node {}", a.walk[s.walk_index].value));
    }
  }
  for (const ChargeStop& s : a.stops) {
    if (s.kind != ChargerKind::Med) continue;
    if (s.span == 0 || meds[s.charger].point(s.cycle_index) != a.walk[s.walk_index]) {
      return violated(11, fmt::format("no MED point at node {}", a.walk[s.walk_index].value));
    }
  }
  return {};
}

double evaluate_objective(const OracleInstance& inst, const RouteAssignment& a) {
  double total = 0.0;
  for (const ArcRef& arc : a.x_arcs) total += inst.graph.drive_time(arc.from, arc.to);
  for (const ChargeStop& s : a.stops) {
    const NodeId node = a.walk.at(s.walk_index);
    if (s.kind == ChargerKind::Scs) {
      const double e_in = std::clamp(s.energy_in_kwh, 0.0, inst.request.capacity_kwh);
      total += lookup(inst.scs_wait_s, node) +
               scs_charge_time(e_in, inst.request.capacity_kwh, inst.scs_rate_kw);
    } else {
      total += lookup(inst.med_wait_s, node);
    }
  }
  return total;
}

}  // namespace medsim
