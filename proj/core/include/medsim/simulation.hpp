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

#ifndef MEDSIM_SIMULATION_HPP
#define MEDSIM_SIMULATION_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "medsim/charging.hpp"
#include "medsim/comms.hpp"
#include "medsim/energy_model.hpp"
#include "medsim/router.hpp"

namespace medsim {

enum class Mode { Scs, ScsMed };
/// Share of anxious EVs: None leaves it to chance, L1/L2/L3 target 20/60/95%.
enum class Level { None, L1, L2, L3 };

const char* to_string(Mode mode);
const char* to_string(Level level);
Mode parse_mode(const std::string& text);
Level parse_level(const std::string& text);
double level_target(Level level);

struct StationConfig {
  NodeId node;
  double rate_kw = kDefaultScsRateKw;
};

struct MedConfig {
  std::vector<NodeId> cycle;
  double p_ind_kw = 40.0;
  double battery_kwh = kDefaultMedBatteryKwh;
  double start_offset_s = 0.0;
};

struct Scenario {
  GraphSpec graph;  // arc energies may be left to the vehicle model
  Mode mode = Mode::ScsMed;
  int ev_count = 50;
  Level level = Level::L2;
  std::uint64_t seed = 1;
  double energy_min_kwh = 1.0;
  double energy_max_kwh = 6.0;
  double arrival_window_s = 3600.0;
  double stranded_penalty_s = 86400.0;
  int visit_limit = 2;
  int leg_limit = 4;
  VehicleParams vehicle;
  InductionParams induction;  // power is the default for MEDs without their own
  std::vector<StationConfig> scs;
  std::vector<MedConfig> meds;
  CommsParams comms;

  /// Throws ScenarioError on inconsistent fields.
  void validate() const;
};

/// 10 x 10 grid, 10 km blocks at 12.5 m/s, one SCS in the middle and one MED
/// on the ring through rows and columns 2..7.
Scenario default_scenario();

/// Deterministic stream for one decision of one EV.
std::mt19937_64 ev_stream(std::uint64_t seed, std::uint64_t ev, std::uint64_t decision);

/// True iff the EV cannot cover its time-shortest route on its initial energy.
bool classify_anxious(const EvRequest& request, const ShortestPaths& paths);

struct EvSpec {
  EvId ev = 0;
  double arrival_s = 0.0;
  NodeId source;
  NodeId dest;
  double energy_kwh = 0.0;
  bool anxious = false;
};

struct SamplerParams {
  double energy_min_kwh = 1.0;
  double energy_max_kwh = 6.0;
  double arrival_window_s = 3600.0;
  double capacity_kwh = 24.0;
};

/// Draws EV populations whose anxious share matches a level.
///
/// Exactly round(target * count) EVs are designated anxious. Each EV draws
/// its energy, then a source among the entry points and a destination whose
/// route cost is above (anxious) or within (calm) that energy, redrawing the
/// source when no such destination exists.
class PopulationSampler {
 public:
  PopulationSampler(Level level, const RoadGraph& g, const ShortestPaths& paths,
                    std::uint64_t seed, SamplerParams params);

  /// Throws CalibrationError when a draw fails or the realized share misses
  /// the target by more than 5 points (or half an EV for small counts).
  std::vector<EvSpec> sample(int count) const;

 private:
  Level level_;
  const RoadGraph* graph_;
  const ShortestPaths* paths_;
  std::uint64_t seed_;
  SamplerParams params_;
};

/// Throws CalibrationError on graphs with fewer than two nodes or no
/// entry points.
PopulationSampler calibrate_level(Level level, const RoadGraph& g, const ShortestPaths& paths,
                                  std::uint64_t seed, SamplerParams params = {});

struct EvOutcome {
  EvId ev = 0;
  double arrival_s = 0.0;
  NodeId source;
  NodeId dest;
  double initial_energy_kwh = 0.0;
  bool anxious = false;
  bool comms_blocked = false;
  std::optional<ChargerKind> charger;  // first charger used
  double travel_time_s = 0.0;
  double wait_s = 0.0;
  double charge_s = 0.0;  // SCS charging plus attached MED driving
  bool stranded = false;
  RouteStatus status = RouteStatus::Ok;
};

struct RunMetrics {
  int ev_count = 0;
  double mean_travel_time_s = 0.0;
  double mean_wait_s = 0.0;  // over EVs that charged
  double med_share = 0.0;    // EVs whose first charger is a MED, over all EVs
  int scs_users = 0;
  int med_users = 0;
  int stranded = 0;
  std::vector<double> wait_series;  // per EV in id order
};

/// Aggregates recomputed from per-EV rows.
RunMetrics aggregate(const std::vector<EvOutcome>& evs);

struct RunOptions {
  bool keep_routes = false;
  /// Check every route against the constraint verifier.
  bool verify_routes = true;
};

struct RunResult {
  std::vector<EvOutcome> evs;
  RunMetrics metrics;
  std::vector<RouteAssignment> routes;  // when keep_routes
  /// Concurrent SCS sessions or doubly booked MED segments seen on replay.
  int occupancy_violations = 0;
  /// Routes failing check_route() or verify().
  int route_violations = 0;
  std::string first_violation;
};

/// Runs the scenario to completion. Deterministic in the scenario alone.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

inline constexpr const char* kEvCsvHeader =
    "ev,arrival_s,source,dest,initial_energy_kwh,anxious,charger,travel_time_s,wait_s,charge_s,"
    "stranded,status";

void write_ev_csv(std::ostream& out, const RunResult& result);

}  // namespace medsim

#endif  // MEDSIM_SIMULATION_HPP
