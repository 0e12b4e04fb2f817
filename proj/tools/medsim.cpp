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

// medsim command-line tool.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "medsim/energy_model.hpp"
#include "medsim/exact_oracle.hpp"
#include "medsim/io.hpp"
#include "medsim/road_graph.hpp"
#include "medsim/router.hpp"
#include "medsim/simulation.hpp"
#include "medsim/sweep.hpp"

namespace {

using namespace medsim;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Writes to a sibling temp file and renames, so a failed run leaves no
// partial artifact. An empty path means stdout.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw UsageError(fmt::format("cannot write {}", path));
    out << text;
    if (!out) throw Error(fmt::format("write to {} failed", path));
  }
  std::filesystem::rename(tmp, target);
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("MEDSIM_SEED");
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto seed = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument(v);
    return seed;
  } catch (const std::exception&) {
    throw UsageError(fmt::format("MEDSIM_SEED must be an unsigned integer, got '{}'", v));
  }
}

struct Overrides {
  std::string mode;
  std::string level;
  std::optional<std::uint64_t> seed;
  std::optional<int> evs;

  void apply(Scenario& s) const {
    if (!mode.empty()) s.mode = parse_mode(mode);
    if (!level.empty()) s.level = parse_level(level);
    if (seed) {
      s.seed = *seed;
    } else if (auto env = env_seed()) {
      s.seed = *env;
    }
    if (evs) s.ev_count = *evs;
    s.validate();
  }
};

Scenario scenario_or_default(const std::string& path) {
  return path.empty() ? default_scenario() : load_scenario(path).scenario;
}

std::vector<NodeId> to_nodes(const std::vector<std::uint32_t>& ids) {
  std::vector<NodeId> out;
  for (auto id : ids) out.emplace_back(id);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Routing and fleet simulation for EVs served by static and mobile chargers"};
  app.require_subcommand(1);

  // gen-grid
  auto* gen = app.add_subcommand("gen-grid", "Write a rows x cols grid graph as JSON");
  GridOptions grid;
  std::vector<std::uint32_t> scs_at;
  std::vector<std::uint32_t> med_cycle;
  std::vector<int> med_ring;
  std::string gen_out;
  gen->add_option("--rows", grid.rows, "Grid rows (>= 2)")->capture_default_str();
  gen->add_option("--cols", grid.cols, "Grid columns (>= 2)")->capture_default_str();
  gen->add_option("--arc-len", grid.arc_length_m, "Block length in meters")->capture_default_str();
  gen->add_option("--speed", grid.speed_mps, "Speed in m/s")->capture_default_str();
  gen->add_option("--scs", scs_at, "Station node ids")->delimiter(',');
  gen->add_option("--med-cycle", med_cycle, "MED cycle node ids in driving order")->delimiter(',');
  gen->add_option("--med-ring", med_ring, "MED ring as r0,c0,r1,c1")->delimiter(',')->expected(4);
  gen->add_option("--visit-limit", grid.visit_limit, "Visits per charger node")->capture_default_str();
  gen->add_option("--out", gen_out, "Output path (default stdout)");

  // route
  auto* route = app.add_subcommand("route", "Route one EV against a fixed ledger snapshot");
  std::string route_instance, route_scenario, route_out, route_mode;
  std::optional<std::uint32_t> route_source, route_dest;
  std::optional<double> route_energy;
  route->add_option("--instance", route_instance, "Oracle instance JSON (fixed waits)");
  route->add_option("--scenario", route_scenario, "Scenario JSON (empty ledgers)");
  route->add_option("--source", route_source, "Source node (with --scenario)");
  route->add_option("--dest", route_dest, "Destination node (with --scenario)");
  route->add_option("--energy", route_energy, "Initial energy in kWh (with --scenario)");
  route->add_option("--mode", route_mode, "SCS or SCS_MED");
  route->add_option("--out", route_out, "Output path (default stdout)");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Solve a small instance exactly");
  std::string oracle_instance, oracle_out;
  oracle->add_option("--instance", oracle_instance, "Oracle instance JSON")->required();
  oracle->add_option("--out", oracle_out, "Output path (default stdout)");

  // run
  auto* runc = app.add_subcommand("run", "Simulate one scenario");
  std::string run_scenario, run_out, run_metrics;
  Overrides run_over;
  runc->add_option("--scenario", run_scenario, "Scenario JSON (default built-in grid)");
  runc->add_option("--mode", run_over.mode, "SCS or SCS_MED");
  runc->add_option("--level", run_over.level, "L1, L2, L3 or none");
  runc->add_option("--seed", run_over.seed, "Seed (default $MEDSIM_SEED, then scenario)");
  runc->add_option("--evs", run_over.evs, "Number of EVs");
  runc->add_option("--out", run_out, "Per-EV CSV path (default stdout)");
  runc->add_option("--metrics", run_metrics, "Aggregate metrics JSON path");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run paired mode/level/EV-count/seed sweeps");
  std::string sweep_scenario, sweep_out;
  Overrides sweep_over;
  int jobs = 1;
  std::vector<std::uint64_t> sweep_seeds;
  sweep->add_option("--scenario", sweep_scenario, "Scenario JSON with optional sweep block");
  sweep->add_option("--mode", sweep_over.mode, "Restrict to one mode");
  sweep->add_option("--level", sweep_over.level, "Restrict to one level");
  sweep->add_option("--seed", sweep_over.seed, "Restrict to one seed");
  sweep->add_option("--seeds", sweep_seeds, "Seeds to sweep")->delimiter(',');
  sweep->add_option("--evs", sweep_over.evs, "Restrict to one EV count");
  sweep->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
  sweep->add_option("--out", sweep_out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) {
      if (grid.rows < 2 || grid.cols < 2) throw UsageError("grid needs at least 2 rows and 2 columns");
      grid.scs = to_nodes(scs_at);
      grid.med_cycle = to_nodes(med_cycle);
      if (!med_ring.empty()) {
        if (!grid.med_cycle.empty()) throw UsageError("give --med-cycle or --med-ring, not both");
        grid.med_cycle = grid_ring(grid.cols, med_ring[0], med_ring[1], med_ring[2], med_ring[3]);
      }
      GraphSpec spec = make_grid(grid);
      build_graph(spec);  // validates ids and the MED cycle
      emit(gen_out, graph_to_json(spec).dump(2) + "\n");
      return 0;
    }

    if (*route) {
      if (route_instance.empty() == route_scenario.empty()) {
        throw UsageError("route needs exactly one of --instance or --scenario");
      }
      Json out;
      if (!route_instance.empty()) {
        const OracleInstance inst = load_oracle_instance(route_instance);
        const ShortestPaths paths(inst.graph);
        const Router router(paths);
        PlanOptions opt;
        if (!route_mode.empty()) opt.allow_med = parse_mode(route_mode) == Mode::ScsMed;
        const RouteResult r = router.find_shortest_path(inst.request, frozen_view(inst), opt);
        out = {{"status", to_string(r.status)}, {"route", route_to_json(r.route)}};
        if (r.ok()) out["objective_s"] = evaluate_objective(inst, r.route);
      } else {
        if (!route_source || !route_dest || !route_energy) {
          throw UsageError("--scenario needs --source, --dest and --energy");
        }
        Scenario s = load_scenario(route_scenario).scenario;
        if (!route_mode.empty()) s.mode = parse_mode(route_mode);
        GraphSpec spec = s.graph;
        spec.scs.clear();
        for (const auto& st : s.scs) spec.scs.push_back(st.node);
        spec.med_cycle = s.meds.empty() ? std::vector<NodeId>{} : s.meds.front().cycle;
        spec.visit_limit = s.visit_limit;
        resolve_arc_energy(spec, s.vehicle);
        const RoadGraph g = build_graph(std::move(spec));
        const ShortestPaths paths(g);
        const Router router(paths);
        Infrastructure infra;
        for (const auto& st : s.scs) infra.stations.emplace_back(st.node, st.rate_kw);
        for (const auto& m : s.meds) {
          infra.meds.emplace_back(MedRoute(g, m.cycle, {s.induction.coeff, m.p_ind_kw}),
                                  m.battery_kwh, m.start_offset_s);
        }
        const EvRequest req{0, NodeId(*route_source), NodeId(*route_dest),
                            s.vehicle.battery_capacity_kwh, *route_energy, 0.0};
        if (!g.contains(req.source) || !g.contains(req.dest)) throw UsageError("unknown node");
        req.validate();
        PlanOptions opt;
        opt.leg_limit = s.leg_limit;
        opt.allow_med = s.mode == Mode::ScsMed;
        const RouteResult r = router.find_shortest_path(req, LedgerView(infra, 0.0), opt);
        out = {{"status", to_string(r.status)}, {"route", route_to_json(r.route)}};
      }
      emit(route_out, out.dump(2) + "\n");
      return 0;
    }

    if (*oracle) {
      const OracleInstance inst = load_oracle_instance(oracle_instance);
      emit(oracle_out, solution_to_json(solve_exact(inst)).dump(2) + "\n");
      return 0;
    }

    if (*runc) {
      Scenario s = scenario_or_default(run_scenario);
      run_over.apply(s);
      const RunResult result = run(s);
      std::ostringstream csv;
      write_ev_csv(csv, result);
      if (!run_metrics.empty()) emit(run_metrics, metrics_to_json(s, result).dump(2) + "\n");
      emit(run_out, csv.str());
      return 0;
    }

    if (*sweep) {
      ScenarioFile file;
      if (sweep_scenario.empty()) {
        file.scenario = default_scenario();
      } else {
        file = load_scenario(sweep_scenario);
      }
      SweepSpec spec = file.sweep.value_or(SweepSpec{});
      if (!sweep_over.mode.empty()) spec.modes = {parse_mode(sweep_over.mode)};
      if (!sweep_over.level.empty()) spec.levels = {parse_level(sweep_over.level)};
      if (sweep_over.evs) spec.ev_counts = {*sweep_over.evs};
      if (sweep_over.seed) {
        spec.seeds = {*sweep_over.seed};
      } else if (!sweep_seeds.empty()) {
        spec.seeds = sweep_seeds;
      } else if (!file.sweep) {
        spec.seeds = {env_seed().value_or(file.scenario.seed)};
      }
      if (jobs < 1) throw UsageError("--jobs must be at least 1");
      const auto rows = run_sweep(file.scenario, spec, jobs);
      std::ostringstream csv;
      write_sweep_csv(csv, rows);
      emit(sweep_out, csv.str());
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "medsim: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ScenarioError& e) {
    std::cerr << "medsim: " << e.what() << "\n";
    return kExitUsage;
  } catch (const GraphError& e) {
    std::cerr << "medsim: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "medsim: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "medsim: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
