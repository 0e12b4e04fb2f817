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

#ifndef MEDSIM_IO_HPP
#define MEDSIM_IO_HPP

#include <filesystem>
#include <optional>

#include "json.hpp"
#include "medsim/exact_oracle.hpp"
#include "medsim/road_graph.hpp"
#include "medsim/simulation.hpp"
#include "medsim/sweep.hpp"

namespace medsim {

using Json = nlohmann::json;

/// Reads a whole JSON file. Throws ScenarioError with the path on failure.
Json read_json(const std::filesystem::path& path);

/// Graph document: nodes [{id, x, y}], arcs [{i, j, length_m, speed_mps or
/// drive_time_s, energy_kwh?}], and optional scs, med_cycle, entries,
/// visit_limit.
GraphSpec graph_from_json(const Json& j);
Json graph_to_json(const GraphSpec& spec);

struct ScenarioFile {
  Scenario scenario;
  std::optional<SweepSpec> sweep;
};

/// Scenario document. Missing fields keep default_scenario() values; a
/// "graph" given as a string is a path relative to `base_dir`. Unknown keys
/// are rejected.
ScenarioFile scenario_from_json(const Json& j, const std::filesystem::path& base_dir = {});
ScenarioFile load_scenario(const std::filesystem::path& path);

/// Oracle instance document: graph, request, scs_wait_s and med_wait_s as
/// [{node, wait_s}], scs_rate_kw, induction {c_ind, p_ind_kw}, vehicle (for
/// arcs without energy_kwh), visit_limit.
OracleInstance oracle_instance_from_json(const Json& j,
                                         const std::filesystem::path& base_dir = {});
OracleInstance load_oracle_instance(const std::filesystem::path& path);

Json route_to_json(const RouteAssignment& route);
Json solution_to_json(const OracleSolution& solution);
Json metrics_to_json(const Scenario& scenario, const RunResult& result);

}  // namespace medsim

#endif  // MEDSIM_IO_HPP
