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

#include "medsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <set>

#include <fmt/format.h>

#include "medsim/exact_oracle.hpp"

namespace medsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

enum Decision : std::uint64_t {
  kArrival = 1,
  kEnergy = 2,
  kPlace = 3,
  kBlocked = 4,
  kDesignate = 5,
};

enum class EventKind { ChargeEnd, MedDetach, TripEnd, ChargeStart, MedAttach, Arrival };

struct Event {
  double time_s;
  EventKind kind;
  std::size_t ev;
  std::size_t stop;

  bool operator>(const Event& o) const {
    if (time_s != o.time_s) return time_s > o.time_s;
    if (kind != o.kind) return kind > o.kind;
    if (ev != o.ev) return ev > o.ev;
    return stop > o.stop;
  }
};

}  // namespace

const char* to_string(Mode mode) { return mode == Mode::Scs ? "SCS" : "SCS_MED"; }

const char* to_string(Level level) {
  switch (level) {
    case Level::None: return "none";
    case Level::L1: return "L1";
    case Level::L2: return "L2";
    case Level::L3: return "L3";
  }
  return "none";
}

Mode parse_mode(const std::string& text) {
  if (text == "SCS") return Mode::Scs;
  if (text == "SCS_MED") return Mode::ScsMed;
  throw ScenarioError(fmt::format("unknown mode '{}' (expected SCS or SCS_MED)", text));
}

Level parse_level(const std::string& text) {
  if (text == "none") return Level::None;
  if (text == "L1") return Level::L1;
  if (text == "L2") return Level::L2;
  if (text == "L3") return Level::L3;
  throw ScenarioError(fmt::format("unknown level '{}' (expected L1, L2, L3 or none)", text));
}

double level_target(Level level) {
  switch (level) {
    case Level::L1: return 0.20;
    case Level::L2: return 0.60;
    case Level::L3: return 0.95;
    case Level::None: break;
  }
  return 0.0;
}

void Scenario::validate() const {
  auto fail = [](const std::string& what) { throw ScenarioError(what); };
  try {
    vehicle.validate();
    induction.validate();
    comms.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (ev_count < 0) fail("ev_count must be non-negative");
  if (energy_min_kwh < 0.0 || energy_min_kwh > energy_max_kwh ||
      energy_max_kwh > vehicle.battery_capacity_kwh) {
    fail(fmt::format("initial energy range [{}, {}] must lie inside [0, capacity]",
                     energy_min_kwh, energy_max_kwh));
  }
  if (arrival_window_s < 0.0) fail("arrival_window_s must be non-negative");
  if (stranded_penalty_s < 0.0) fail("stranded_penalty_s must be non-negative");
  if (visit_limit < 1) fail("visit_limit must be at least 1");
  if (leg_limit < 0) fail("leg_limit must be non-negative");
  const auto n = graph.nodes.size();
  for (const StationConfig& s : scs) {
    if (s.node.value >= n) fail(fmt::format("station node {} not in the graph", s.node.value));
    if (!(s.rate_kw > 0.0)) fail("station rate must be positive");
  }
  for (const MedConfig& m : meds) {
    for (NodeId p : m.cycle) {
      if (p.value >= n) fail(fmt::format("MED point {} not in the graph", p.value));
    }
    if (m.cycle.size() < 2 || !is_closed_cycle(graph, m.cycle)) fail("MED cycle is not closed");
    if (m.p_ind_kw < 0.0 || m.battery_kwh < 0.0) fail("MED power and battery must be non-negative");
  }
}

Scenario default_scenario() {
  Scenario s;
  GridOptions grid;
  grid.scs = {grid_node(grid.cols, 5, 5)};
  grid.med_cycle = grid_ring(grid.cols, 2, 2, 7, 7);
  s.graph = make_grid(grid);
  s.scs = {{grid.scs.front(), kDefaultScsRateKw}};
  s.meds = {{grid.med_cycle, s.induction.power_kw, kDefaultMedBatteryKwh, 0.0}};
  return s;
}

std::mt19937_64 ev_stream(std::uint64_t seed, std::uint64_t ev, std::uint64_t decision) {
  std::uint64_t x = splitmix64(seed);
  x = splitmix64(x ^ ev);
  x = splitmix64(x ^ decision);
  return std::mt19937_64(x);
}

bool classify_anxious(const EvRequest& request, const ShortestPaths& paths) {
  return request.energy_kwh < paths.energy(request.source, request.dest);
}

PopulationSampler::PopulationSampler(Level level, const RoadGraph& g, const ShortestPaths& paths,
                                     std::uint64_t seed, SamplerParams params)
    : level_(level), graph_(&g), paths_(&paths), seed_(seed), params_(params) {}

PopulationSampler calibrate_level(Level level, const RoadGraph& g, const ShortestPaths& paths,
                                  std::uint64_t seed, SamplerParams params) {
  if (g.base_node_count() < 2) throw CalibrationError("need at least two nodes to draw trips");
  if (g.entry_points().empty()) throw CalibrationError("graph has no entry points");
  return PopulationSampler(level, g, paths, seed, params);
}

std::vector<EvSpec> PopulationSampler::sample(int count) const {
  const RoadGraph& g = *graph_;
  const auto& entries = g.entry_points();
  const auto n = static_cast<std::uint32_t>(g.base_node_count());
  const double target = level_target(level_);

  std::vector<bool> designated(static_cast<std::size_t>(count), false);
  if (level_ != Level::None) {
    const auto anxious = static_cast<std::size_t>(std::lround(target * count));
    std::vector<std::size_t> order(designated.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto rng = ev_stream(seed_, static_cast<std::uint64_t>(count), kDesignate);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < anxious; ++i) designated[order[i]] = true;
  }

  std::vector<EvSpec> out;
  std::vector<NodeId> pool;
  for (int i = 0; i < count; ++i) {
    EvSpec ev;
    ev.ev = static_cast<EvId>(i);
    auto arrival_rng = ev_stream(seed_, ev.ev, kArrival);
    ev.arrival_s = std::uniform_real_distribution<double>(0.0, params_.arrival_window_s)(arrival_rng);
    auto energy_rng = ev_stream(seed_, ev.ev, kEnergy);
    ev.energy_kwh = std::uniform_real_distribution<double>(params_.energy_min_kwh,
                                                           params_.energy_max_kwh)(energy_rng);
    auto place = ev_stream(seed_, ev.ev, kPlace);
    const bool want_anxious = designated[static_cast<std::size_t>(i)];
    bool placed = false;
    for (int attempt = 0; attempt < 32 && !placed; ++attempt) {
      const NodeId source =
          entries[std::uniform_int_distribution<std::size_t>(0, entries.size() - 1)(place)];
      pool.clear();
      for (std::uint32_t d = 0; d < n; ++d) {
        const NodeId dest(d);
        if (dest == source || !paths_->reachable(source, dest)) continue;
        const bool anxious = ev.energy_kwh < paths_->energy(source, dest);
        if (level_ == Level::None || anxious == want_anxious) pool.push_back(dest);
      }
      if (pool.empty()) continue;
      ev.source = source;
      ev.dest = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(place)];
      placed = true;
    }
    if (!placed) {
      throw CalibrationError(fmt::format("no {} trip found for EV {} with {:.3f} kWh",
                                         want_anxious ? "anxious" : "calm", i, ev.energy_kwh));
    }
    EvRequest req{ev.ev, ev.source, ev.dest, params_.capacity_kwh, ev.energy_kwh, ev.arrival_s};
    ev.anxious = classify_anxious(req, *paths_);
    out.push_back(ev);
  }

  if (level_ != Level::None && count > 0) {
    const auto realized = std::count_if(out.begin(), out.end(), [](const EvSpec& e) { return e.anxious; });
    const double slack = std::max(0.05 * count, 0.5) + 1e-9;
    if (std::abs(static_cast<double>(realized) - target * count) > slack) {
      throw CalibrationError(fmt::format("anxious share {:.3f} misses target {:.2f}",
                                         static_cast<double>(realized) / count, target));
    }
  }
  return out;
}

RunMetrics aggregate(const std::vector<EvOutcome>& evs) {
  RunMetrics m;
  m.ev_count = static_cast<int>(evs.size());
  double travel = 0.0;
  double wait = 0.0;
  int charged = 0;
  for (const EvOutcome& e : evs) {
    travel += e.travel_time_s;
    m.wait_series.push_back(e.wait_s);
    if (e.stranded) ++m.stranded;
    if (!e.charger) continue;
    ++charged;
    wait += e.wait_s;
    if (*e.charger == ChargerKind::Med) {
      ++m.med_users;
    } else {
      ++m.scs_users;
    }
  }
  if (!evs.empty()) {
    m.mean_travel_time_s = travel / static_cast<double>(evs.size());
    m.med_share = static_cast<double>(m.med_users) / static_cast<double>(evs.size());
  }
  if (charged > 0) m.mean_wait_s = wait / charged;
  return m;
}

RunResult run(const Scenario& scenario, const RunOptions& options) {
  scenario.validate();
  GraphSpec spec = scenario.graph;
  spec.scs.clear();
  for (const StationConfig& s : scenario.scs) spec.scs.push_back(s.node);
  spec.med_cycle = scenario.meds.empty() ? std::vector<NodeId>{} : scenario.meds.front().cycle;
  spec.visit_limit = scenario.visit_limit;
  resolve_arc_energy(spec, scenario.vehicle);
  const RoadGraph g = build_graph(std::move(spec));
  const ShortestPaths paths(g);
  const Router router(paths);
  const CommsModel comms(g, scenario.comms);

  Infrastructure infra;
  for (const StationConfig& s : scenario.scs) infra.stations.emplace_back(s.node, s.rate_kw);
  std::vector<MedRoute> med_routes;
  for (const MedConfig& m : scenario.meds) {
    MedRoute route(g, m.cycle, InductionParams{scenario.induction.coeff, m.p_ind_kw});
    med_routes.push_back(route);
    infra.meds.emplace_back(std::move(route), m.battery_kwh, m.start_offset_s);
  }

  const double q = scenario.vehicle.battery_capacity_kwh;
  const auto sampler = calibrate_level(
      scenario.level, g, paths, scenario.seed,
      {scenario.energy_min_kwh, scenario.energy_max_kwh, scenario.arrival_window_s, q});
  const std::vector<EvSpec> population = sampler.sample(scenario.ev_count);

  RunResult result;
  result.evs.resize(population.size());
  std::vector<RouteAssignment> routes(population.size());

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  for (std::size_t i = 0; i < population.size(); ++i) {
    events.push({population[i].arrival_s, EventKind::Arrival, i, 0});
  }

  // A session may start where the previous one ends, up to rounding.
  constexpr double kReplayTol = 1e-6;
  std::vector<double> busy_until(infra.stations.size(), -kInfinity);
  std::set<std::pair<std::size_t, std::int64_t>> med_segments;
  auto note_violation = [&](std::string what) {
    if (result.first_violation.empty()) result.first_violation = std::move(what);
  };

  while (!events.empty()) {
    const Event ev = events.top();
    events.pop();
    const EvSpec& spec_ev = population[ev.ev];
    const RouteAssignment& route = routes[ev.ev];
    switch (ev.kind) {
      case EventKind::Arrival: {
        EvOutcome& out = result.evs[ev.ev];
        out.ev = spec_ev.ev;
        out.arrival_s = spec_ev.arrival_s;
        out.source = spec_ev.source;
        out.dest = spec_ev.dest;
        out.initial_energy_kwh = spec_ev.energy_kwh;
        out.anxious = spec_ev.anxious;

        PlanOptions plan;
        plan.leg_limit = scenario.leg_limit;
        plan.allow_med = scenario.mode == Mode::ScsMed;
        auto blocked_rng = ev_stream(scenario.seed, spec_ev.ev, kBlocked);
        out.comms_blocked =
            std::bernoulli_distribution(scenario.comms.block_prob)(blocked_rng);
        for (const ScsState& s : infra.stations) {
          plan.station_mask.push_back(!out.comms_blocked &&
                                      comms.connected(spec_ev.source, s.node()));
        }
        for (const MedState& m : infra.meds) {
          const NodeId at = m.route().point(m.position_at(spec_ev.arrival_s).index);
          plan.med_mask.push_back(!out.comms_blocked && comms.connected(spec_ev.source, at));
        }

        const EvRequest req{spec_ev.ev, spec_ev.source, spec_ev.dest, q, spec_ev.energy_kwh,
                            spec_ev.arrival_s};
        const double as_of = beacon_time(spec_ev.arrival_s, scenario.comms.beacon_period_s);
        RouteResult r = route_and_book(router, req, infra, as_of, plan, spec_ev.arrival_s);
        out.status = r.status;
        if (!r.ok()) {
          out.stranded = true;
          out.travel_time_s = scenario.stranded_penalty_s;
          break;
        }
        routes[ev.ev] = std::move(r.route);
        const RouteAssignment& a = routes[ev.ev];
        out.travel_time_s = a.total_s;
        out.wait_s = a.wait_s;
        for (const ChargeStop& s : a.stops) out.charge_s += s.charge_s;
        if (!a.stops.empty()) out.charger = a.stops.front().kind;

        if (options.verify_routes) {
          if (auto problem = check_route(g, a)) {
            ++result.route_violations;
            note_violation(fmt::format("EV {}: {}", out.ev, *problem));
          }
          const Verdict v = verify(g, req, med_routes, a);
          if (!v) {
            ++result.route_violations;
            note_violation(fmt::format("EV {}: constraint {} ({})", out.ev, v.constraint, v.detail));
          }
        }
        for (std::size_t k = 0; k < a.stops.size(); ++k) {
          const ChargeStop& s = a.stops[k];
          const double start = s.arrival_s + s.wait_s;
          if (s.kind == ChargerKind::Scs) {
            events.push({start, EventKind::ChargeStart, ev.ev, k});
            events.push({start + s.charge_s, EventKind::ChargeEnd, ev.ev, k});
          } else {
            events.push({start, EventKind::MedAttach, ev.ev, k});
            events.push({start + s.charge_s, EventKind::MedDetach, ev.ev, k});
          }
        }
        events.push({a.start_s + a.total_s, EventKind::TripEnd, ev.ev, 0});
        break;
      }
      case EventKind::ChargeStart: {
        const ChargeStop& stop = route.stops[ev.stop];
        if (ev.time_s < busy_until[stop.charger] - kReplayTol) {
          ++result.occupancy_violations;
          note_violation(fmt::format("station {} shared at t={}", stop.charger, ev.time_s));
        }
        busy_until[stop.charger] = std::max(busy_until[stop.charger], ev.time_s + stop.charge_s);
        break;
      }
      case EventKind::MedAttach: {
        const ChargeStop& s = route.stops[ev.stop];
        for (std::size_t i = 0; i < s.span; ++i) {
          const auto seg = s.first_segment + static_cast<std::int64_t>(i);
          if (!med_segments.emplace(s.charger, seg).second) {
            ++result.occupancy_violations;
            note_violation(fmt::format("MED {} segment {} shared", s.charger, seg));
          }
        }
        break;
      }
      case EventKind::ChargeEnd:
      case EventKind::MedDetach:
      case EventKind::TripEnd:
        break;
    }
  }

  result.metrics = aggregate(result.evs);
  if (options.keep_routes) result.routes = std::move(routes);
  return result;
}

void write_ev_csv(std::ostream& out, const RunResult& result) {
  out << kEvCsvHeader << '\n';
  for (const EvOutcome& e : result.evs) {
    const char* charger = !e.charger ? "none" : *e.charger == ChargerKind::Med ? "MED" : "SCS";
    out << fmt::format("{},{:.6f},{},{},{:.6f},{},{},{:.6f},{:.6f},{:.6f},{},{}\n", e.ev,
                       e.arrival_s, e.source.value, e.dest.value, e.initial_energy_kwh,
                       e.anxious ? 1 : 0, charger, e.travel_time_s, e.wait_s, e.charge_s,
                       e.stranded ? 1 : 0, to_string(e.status));
  }
}

}  // namespace medsim
