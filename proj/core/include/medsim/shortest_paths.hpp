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

#ifndef MEDSIM_SHORTEST_PATHS_HPP
#define MEDSIM_SHORTEST_PATHS_HPP

#include <span>
#include <unordered_map>
#include <vector>

#include "medsim/road_graph.hpp"

namespace medsim {

enum class Weight { Time, Energy };

/// Node sequence from source to target inclusive; a single node for s == e.
struct Path {
  std::vector<NodeId> nodes;
  double cost = 0.0;

  std::size_t arc_count() const { return nodes.empty() ? 0 : nodes.size() - 1; }
};

/// Single-source shortest paths. Among equal-cost paths the
/// lexicographically smallest node sequence wins. Dummy nodes are skipped
/// unless `include_dummies` is set.
struct ShortestPathTree {
  NodeId source;
  std::vector<double> dist;
  std::vector<std::vector<NodeId>> paths;  // empty when unreachable
};

ShortestPathTree shortest_path_tree(const RoadGraph& g, NodeId source, Weight weight,
                                    bool include_dummies = false);

/// Point-to-point Dijkstra. Throws NoPathError when e is unreachable.
Path dijkstra(const RoadGraph& g, NodeId s, NodeId e, Weight weight = Weight::Time);

double path_drive_time(const RoadGraph& g, std::span<const NodeId> nodes);
double path_energy(const RoadGraph& g, std::span<const NodeId> nodes);

/// Lazily filled cache of drive-time trees over base nodes. Not thread-safe;
/// one instance per simulation run.
class ShortestPaths {
 public:
  explicit ShortestPaths(const RoadGraph& g) : graph_(&g) {}

  const RoadGraph& graph() const { return *graph_; }

  const ShortestPathTree& tree(NodeId source) const;
  bool reachable(NodeId s, NodeId e) const { return !tree(s).paths.at(e.value).empty(); }
  double time(NodeId s, NodeId e) const { return tree(s).dist.at(e.value); }
  /// Time-shortest node sequence; empty when unreachable.
  const std::vector<NodeId>& path(NodeId s, NodeId e) const { return tree(s).paths.at(e.value); }
  /// Energy along the time-shortest path (kInfinity when unreachable).
  double energy(NodeId s, NodeId e) const;

 private:
  const RoadGraph* graph_;
  mutable std::unordered_map<NodeId, ShortestPathTree> trees_;
  mutable std::unordered_map<std::uint64_t, double> energy_;
};

}  // namespace medsim

#endif  // MEDSIM_SHORTEST_PATHS_HPP
