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

#include "medsim/io.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include <fmt/format.h>

namespace medsim {

namespace {

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                std::string_view where) {
  if (!j.is_object()) throw ScenarioError(fmt::format("{} must be an object", where));
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ScenarioError(fmt::format("unknown key '{}' in {}", key, where));
    }
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

NodeId node_of(const Json& j) { return NodeId(j.get<std::uint32_t>()); }

std::vector<NodeId> nodes_of(const Json& j) {
  std::vector<NodeId> out;
  for (const Json& v : j) out.push_back(node_of(v));
  return out;
}

Json ids(const std::vector<NodeId>& nodes) {
  Json out = Json::array();
  for (NodeId n : nodes) out.push_back(n.value);
  return out;
}

void read_vehicle(const Json& j, VehicleParams& vp, InductionParams& ip) {
  check_keys(j, {"mass_kg", "mu", "drag_c", "area_m2", "air_density", "efficiency",
                 "capacity_kwh", "c_ind", "p_ind_kw"},
             "vehicle");
  read(j, "mass_kg", vp.mass_kg);
  read(j, "mu", vp.rolling_coeff);
  read(j, "drag_c", vp.drag_coeff);
  read(j, "area_m2", vp.frontal_area_m2);
  read(j, "air_density", vp.air_density);
  read(j, "efficiency", vp.efficiency);
  read(j, "capacity_kwh", vp.battery_capacity_kwh);
  read(j, "c_ind", ip.coeff);
  read(j, "p_ind_kw", ip.power_kw);
}

GraphSpec graph_value(const Json& j, const std::filesystem::path& base_dir) {
  if (j.is_string()) {
    const std::filesystem::path p = j.get<std::string>();
    return graph_from_json(read_json(p.is_absolute() ? p : base_dir / p));
  }
  if (j.is_object() && j.contains("grid")) {
    check_keys(j, {"grid"}, "graph");
    const Json& grid = j.at("grid");
    check_keys(grid, {"rows", "cols", "arc_length_m", "speed_mps", "scs", "med_cycle"}, "grid");
    GridOptions opt;
    read(grid, "rows", opt.rows);
    read(grid, "cols", opt.cols);
    read(grid, "arc_length_m", opt.arc_length_m);
    read(grid, "speed_mps", opt.speed_mps);
    if (grid.contains("scs")) opt.scs = nodes_of(grid.at("scs"));
    if (grid.contains("med_cycle")) opt.med_cycle = nodes_of(grid.at("med_cycle"));
    return make_grid(opt);
  }
  return graph_from_json(j);
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ScenarioError(fmt::format("{}: {}", what, e.what()));
  }
}

std::map<NodeId, double> waits_of(const Json& j) {
  std::map<NodeId, double> out;
  for (const Json& w : j) {
    check_keys(w, {"node", "wait_s"}, "wait entry");
    out[node_of(w.at("node"))] = w.at("wait_s").get<double>();
  }
  return out;
}

}  // namespace

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(fmt::format("cannot open {}", path.string()));
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ScenarioError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

GraphSpec graph_from_json(const Json& j) {
  return guarded("graph", [&] {
    check_keys(j, {"nodes", "arcs", "scs", "med_cycle", "entries", "visit_limit"}, "graph");
    GraphSpec spec;
    for (const Json& n : j.at("nodes")) {
      check_keys(n, {"id", "x", "y"}, "node");
      spec.nodes.push_back({node_of(n.at("id")), {n.value("x", 0.0), n.value("y", 0.0)}});
    }
    for (const Json& a : j.at("arcs")) {
      check_keys(a, {"i", "j", "length_m", "speed_mps", "drive_time_s", "energy_kwh"}, "arc");
      ArcInput arc;
      arc.from = node_of(a.at("i"));
      arc.to = node_of(a.at("j"));
      arc.attr.length_m = a.at("length_m").get<double>();
      if (a.contains("drive_time_s")) {
        arc.attr.drive_time_s = a.at("drive_time_s").get<double>();
      } else {
        const double speed = a.at("speed_mps").get<double>();
        if (!(speed > 0.0)) throw GraphError("arc speed must be positive");
        arc.attr.drive_time_s = arc.attr.length_m / speed;
      }
      arc.has_energy = a.contains("energy_kwh");
      if (arc.has_energy) arc.attr.energy_kwh = a.at("energy_kwh").get<double>();
      spec.arcs.push_back(arc);
    }
    if (j.contains("scs")) spec.scs = nodes_of(j.at("scs"));
    if (j.contains("med_cycle")) spec.med_cycle = nodes_of(j.at("med_cycle"));
    if (j.contains("entries")) spec.entries = nodes_of(j.at("entries"));
    read(j, "visit_limit", spec.visit_limit);
    return spec;
  });
}

Json graph_to_json(const GraphSpec& spec) {
  Json nodes = Json::array();
  for (const NodeInput& n : spec.nodes) {
    nodes.push_back({{"id", n.id.value}, {"x", n.position.x_m}, {"y", n.position.y_m}});
  }
  Json arcs = Json::array();
  for (const ArcInput& a : spec.arcs) {
    Json arc = {{"i", a.from.value},
                {"j", a.to.value},
                {"length_m", a.attr.length_m},
                {"speed_mps", a.attr.speed_mps()}};
    if (a.has_energy) arc["energy_kwh"] = a.attr.energy_kwh;
    arcs.push_back(std::move(arc));
  }
  Json out = {{"nodes", std::move(nodes)}, {"arcs", std::move(arcs)}, {"scs", ids(spec.scs)},
              {"med_cycle", ids(spec.med_cycle)}, {"visit_limit", spec.visit_limit}};
  if (!spec.entries.empty()) out["entries"] = ids(spec.entries);
  return out;
}

ScenarioFile scenario_from_json(const Json& j, const std::filesystem::path& base_dir) {
  return guarded("scenario", [&] {
    check_keys(j, {"graph", "mode", "ev_count", "level", "seed", "initial_energy_kwh",
                   "arrival_window_s", "stranded_penalty_s", "visit_limit", "leg_limit",
                   "vehicle", "infrastructure", "radio", "sweep"},
               "scenario");
    ScenarioFile file;
    Scenario& s = file.scenario;
    s = default_scenario();
    if (j.contains("graph")) {
      s.graph = graph_value(j.at("graph"), base_dir);
      s.scs.clear();
      for (NodeId n : s.graph.scs) s.scs.push_back({n, kDefaultScsRateKw});
      s.meds.clear();
      if (!s.graph.med_cycle.empty()) {
        s.meds.push_back({s.graph.med_cycle, s.induction.power_kw, kDefaultMedBatteryKwh, 0.0});
      }
    }
    if (j.contains("mode")) s.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("level")) s.level = parse_level(j.at("level").get<std::string>());
    read(j, "ev_count", s.ev_count);
    read(j, "seed", s.seed);
    if (j.contains("initial_energy_kwh")) {
      const Json& e = j.at("initial_energy_kwh");
      if (!e.is_array() || e.size() != 2) {
        throw ScenarioError("initial_energy_kwh must be [min, max]");
      }
      s.energy_min_kwh = e[0].get<double>();
      s.energy_max_kwh = e[1].get<double>();
    }
    read(j, "arrival_window_s", s.arrival_window_s);
    read(j, "stranded_penalty_s", s.stranded_penalty_s);
    read(j, "visit_limit", s.visit_limit);
    read(j, "leg_limit", s.leg_limit);

    if (j.contains("vehicle")) read_vehicle(j.at("vehicle"), s.vehicle, s.induction);
    bool meds_given = false;
    if (j.contains("infrastructure")) {
      const Json& infra = j.at("infrastructure");
      check_keys(infra, {"scs", "med"}, "infrastructure");
      if (infra.contains("scs")) {
        s.scs.clear();
        for (const Json& st : infra.at("scs")) {
          check_keys(st, {"node", "rate_kw"}, "scs entry");
          s.scs.push_back({node_of(st.at("node")), st.value("rate_kw", kDefaultScsRateKw)});
        }
      }
      if (infra.contains("med")) {
        meds_given = true;
        s.meds.clear();
        for (const Json& m : infra.at("med")) {
          check_keys(m, {"cycle", "p_ind_kw", "battery_kwh", "start_offset_s"}, "med entry");
          s.meds.push_back({nodes_of(m.at("cycle")), m.value("p_ind_kw", s.induction.power_kw),
                            m.value("battery_kwh", kDefaultMedBatteryKwh),
                            m.value("start_offset_s", 0.0)});
        }
      }
    }
    if (!meds_given) {
      for (MedConfig& m : s.meds) m.p_ind_kw = s.induction.power_kw;
    }
    if (j.contains("radio")) {
      const Json& r = j.at("radio");
      check_keys(r, {"ptx_dbm", "f_ghz", "pth_dbm", "sinr_db", "block_prob", "beacon_period_s",
                     "relay_spacing_m"},
                 "radio");
      read(r, "ptx_dbm", s.comms.radio.tx_power_dbm);
      read(r, "f_ghz", s.comms.radio.frequency_ghz);
      read(r, "pth_dbm", s.comms.radio.sensitivity_dbm);
      read(r, "sinr_db", s.comms.radio.sinr_threshold_db);
      read(r, "block_prob", s.comms.block_prob);
      read(r, "beacon_period_s", s.comms.beacon_period_s);
      read(r, "relay_spacing_m", s.comms.relay_spacing_m);
    }
    if (j.contains("sweep")) {
      const Json& w = j.at("sweep");
      check_keys(w, {"ev_counts", "levels", "modes", "seeds"}, "sweep");
      SweepSpec spec;
      read(w, "ev_counts", spec.ev_counts);
      read(w, "seeds", spec.seeds);
      if (w.contains("levels")) {
        spec.levels.clear();
        for (const Json& l : w.at("levels")) spec.levels.push_back(parse_level(l.get<std::string>()));
      }
      if (w.contains("modes")) {
        spec.modes.clear();
        for (const Json& m : w.at("modes")) spec.modes.push_back(parse_mode(m.get<std::string>()));
      }
      spec.validate();
      file.sweep = std::move(spec);
    }
    s.validate();
    return file;
  });
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json(path), path.parent_path());
}

OracleInstance oracle_instance_from_json(const Json& j, const std::filesystem::path& base_dir) {
  return guarded("oracle instance", [&] {
    check_keys(j, {"graph", "request", "scs_wait_s", "med_wait_s", "scs_rate_kw", "induction",
                   "vehicle", "visit_limit"},
               "oracle instance");
    GraphSpec spec = graph_value(j.at("graph"), base_dir);
    VehicleParams vp;
    InductionParams ip;
    if (j.contains("vehicle")) read_vehicle(j.at("vehicle"), vp, ip);
    if (j.contains("induction")) {
      const Json& ind = j.at("induction");
      check_keys(ind, {"c_ind", "p_ind_kw"}, "induction");
      read(ind, "c_ind", ip.coeff);
      read(ind, "p_ind_kw", ip.power_kw);
    }
    read(j, "visit_limit", spec.visit_limit);
    resolve_arc_energy(spec, vp);

    OracleInstance inst;
    inst.graph = build_graph(std::move(spec));
    inst.induction = ip;
    const Json& r = j.at("request");
    check_keys(r, {"ev", "source", "dest", "energy_kwh", "capacity_kwh", "start_s"}, "request");
    inst.request.ev = r.value("ev", 0u);
    inst.request.source = node_of(r.at("source"));
    inst.request.dest = node_of(r.at("dest"));
    inst.request.energy_kwh = r.at("energy_kwh").get<double>();
    inst.request.capacity_kwh = r.value("capacity_kwh", vp.battery_capacity_kwh);
    inst.request.start_s = r.value("start_s", 0.0);
    if (j.contains("scs_wait_s")) inst.scs_wait_s = waits_of(j.at("scs_wait_s"));
    if (j.contains("med_wait_s")) inst.med_wait_s = waits_of(j.at("med_wait_s"));
    read(j, "scs_rate_kw", inst.scs_rate_kw);
    try {
      inst.validate();
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(e.what());
    }
    return inst;
  });
}

OracleInstance load_oracle_instance(const std::filesystem::path& path) {
  return oracle_instance_from_json(read_json(path), path.parent_path());
}

Json route_to_json(const RouteAssignment& a) {
  auto arcs = [](const std::vector<ArcRef>& list) {
    Json out = Json::array();
    for (const ArcRef& arc : list) out.push_back({arc.from.value, arc.to.value});
    return out;
  };
  Json stops = Json::array();
  for (const ChargeStop& s : a.stops) {
    Json stop = {{"kind", s.kind == ChargerKind::Scs ? "SCS" : "MED"},
                 {"charger", s.charger},
                 {"node", a.walk.at(s.walk_index).value},
                 {"walk_index", s.walk_index},
                 {"arrival_s", s.arrival_s},
                 {"wait_s", s.wait_s},
                 {"charge_s", s.charge_s},
                 {"energy_in_kwh", s.energy_in_kwh},
                 {"energy_out_kwh", s.energy_out_kwh}};
    if (s.kind == ChargerKind::Med) {
      stop["span"] = s.span;
      stop["cycle_index"] = s.cycle_index;
      stop["first_segment"] = s.first_segment;
      stop["cycle_number"] = s.cycle_number;
      stop["detach_node"] = a.walk.at(s.walk_index + s.span).value;
    }
    stops.push_back(std::move(stop));
  }
  return {{"ev", a.ev},
          {"source", a.source.value},
          {"dest", a.dest.value},
          {"start_s", a.start_s},
          {"walk", ids(a.walk)},
          {"x_arcs", arcs(a.x_arcs)},
          {"y_arcs", arcs(a.y_arcs)},
          {"stops", std::move(stops)},
          {"energy_trace", a.energy_trace},
          {"time_trace", a.time_trace},
          {"drive_s", a.drive_s},
          {"wait_s", a.wait_s},
          {"charge_s", a.charge_s},
          {"total_s", a.total_s}};
}

Json solution_to_json(const OracleSolution& solution) {
  Json out = {{"feasible", solution.feasible()}, {"explored", solution.explored}};
  if (solution.best) {
    out["objective_s"] = solution.objective;
    out["route"] = route_to_json(*solution.best);
  } else {
    out["objective_s"] = nullptr;
  }
  return out;
}

Json metrics_to_json(const Scenario& scenario, const RunResult& result) {
  const RunMetrics& m = result.metrics;
  return {{"mode", to_string(scenario.mode)},
          {"level", to_string(scenario.level)},
          {"ev_count", m.ev_count},
          {"seed", scenario.seed},
          {"mean_travel_time_s", m.mean_travel_time_s},
          {"mean_wait_s", m.mean_wait_s},
          {"med_share", m.med_share},
          {"scs_users", m.scs_users},
          {"med_users", m.med_users},
          {"stranded", m.stranded},
          {"occupancy_violations", result.occupancy_violations},
          {"route_violations", result.route_violations}};
}

}  // namespace medsim
