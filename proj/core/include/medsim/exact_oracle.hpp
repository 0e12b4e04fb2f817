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

#ifndef MEDSIM_EXACT_ORACLE_HPP
#define MEDSIM_EXACT_ORACLE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "medsim/charging.hpp"
#include "medsim/router.hpp"

namespace medsim {

/// Single-EV instance with fixed waits at every charger point.
struct OracleInstance {
  static constexpr std::size_t kNodeLimit = 14;

  RoadGraph graph;
  EvRequest request;
  std::map<NodeId, double> scs_wait_s;  // missing means 0
  std::map<NodeId, double> med_wait_s;  // per MED point; missing means 0
  double scs_rate_kw = kDefaultScsRateKw;
  InductionParams induction;

  /// Throws std::invalid_argument on negative waits or a bad request.
  void validate() const;
};

/// The instance's waits as a router view.
FrozenWaits frozen_view(const OracleInstance& inst);

/// The instance's MED (empty when the graph has no MED cycle).
std::vector<MedRoute> med_routes(const OracleInstance& inst);

struct OracleSolution {
  std::optional<RouteAssignment> best;
  double objective = kInfinity;
  std::uint64_t explored = 0;

  bool feasible() const { return best.has_value(); }
};

/// Exhaustive search over walks in which every node is visited at most
/// visit_limit times, with SCS charging and MED attach runs at any visit
/// (one charging action per visit). Pruned by a drive-time lower bound to
/// the destination. Throws OracleBoundError when the graph, dummies
/// included, exceeds kNodeLimit nodes.
OracleSolution solve_exact(const OracleInstance& inst);

struct Verdict {
  bool ok = true;
  int constraint = 0;  // id of the first violated constraint, 2..11
  std::string detail;

  explicit operator bool() const { return ok; }
};

/// Checks an assignment constraint by constraint:
///   2  walk runs from source to destination with conserved flow
///   3  attached arcs are traversed arcs
///   4  energy propagates arc by arc, induction only on MED cycle arcs
///   5  energy never negative
///   6  energy never above capacity
///   7  full battery when leaving a station
///   8  enough energy to reach every charger
///   9  arcs exist and no node exceeds the visit limit
///  10  station stops only at station nodes
///  11  MED stops only at MED points
Verdict verify(const OracleInstance& inst, const RouteAssignment& a);
Verdict verify(const RoadGraph& g, const EvRequest& request, std::span<const MedRoute> meds,
               const RouteAssignment& a);

/// Drive time plus SCS wait and charge time plus MED wait, using the
/// instance's waits and rate.
double evaluate_objective(const OracleInstance& inst, const RouteAssignment& a);

}  // namespace medsim

#endif  // MEDSIM_EXACT_ORACLE_HPP
