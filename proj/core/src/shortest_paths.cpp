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

#include "medsim/shortest_paths.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include <fmt/format.h>

namespace medsim {

ShortestPathTree shortest_path_tree(const RoadGraph& g, NodeId source, Weight weight,
                                    bool include_dummies) {
  const std::size_t n = g.node_count();
  ShortestPathTree tree;
  tree.source = source;
  tree.dist.assign(n, kInfinity);
  tree.paths.assign(n, {});
  if (!g.contains(source)) throw GraphError(fmt::format("unknown node {}", source.value));

  std::vector<bool> settled(n, false);
  using Entry = std::pair<double, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  tree.dist[source.value] = 0.0;
  tree.paths[source.value] = {source};
  open.push({0.0, source.value});

  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (settled[u] || d > tree.dist[u]) continue;
    settled[u] = true;
    for (const auto& arc : g.out_arcs(NodeId(u))) {
      const std::uint32_t v = arc.to.value;
      if (settled[v]) continue;
      if (!include_dummies && g.is_dummy(arc.to)) continue;
      const double w = weight == Weight::Time ? arc.attr.drive_time_s : arc.attr.energy_kwh;
      const double candidate = d + w;
      const bool tie = nearly_equal(candidate, tree.dist[v]);
      if (!tie && candidate > tree.dist[v]) continue;
      std::vector<NodeId> p = tree.paths[u];
      p.push_back(arc.to);
      if (tie && !(p < tree.paths[v])) continue;
      if (!tie) {
        tree.dist[v] = candidate;
        open.push({candidate, v});
      }
      tree.paths[v] = std::move(p);
    }
  }
  return tree;
}

Path dijkstra(const RoadGraph& g, NodeId s, NodeId e, Weight weight) {
  if (!g.contains(s) || !g.contains(e)) {
    throw GraphError(fmt::format("dijkstra endpoints {}, {} not in graph", s.value, e.value));
  }
  const bool dummies = g.is_dummy(s) || g.is_dummy(e);
  auto tree = shortest_path_tree(g, s, weight, dummies);
  if (tree.paths[e.value].empty()) {
    throw NoPathError(fmt::format("node {} unreachable from {}", e.value, s.value));
  }
  return {std::move(tree.paths[e.value]), tree.dist[e.value]};
}

double path_drive_time(const RoadGraph& g, std::span<const NodeId> nodes) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) total += g.drive_time(nodes[k], nodes[k + 1]);
  return total;
}

double path_energy(const RoadGraph& g, std::span<const NodeId> nodes) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) total += g.energy_cost(nodes[k], nodes[k + 1]);
  return total;
}

const ShortestPathTree& ShortestPaths::tree(NodeId source) const {
  auto it = trees_.find(source);
  if (it == trees_.end()) {
    it = trees_.emplace(source, shortest_path_tree(*graph_, source, Weight::Time)).first;
  }
  return it->second;
}

double ShortestPaths::energy(NodeId s, NodeId e) const {
  const std::uint64_t key = (std::uint64_t{s.value} << 32) | e.value;
  auto it = energy_.find(key);
  if (it != energy_.end()) return it->second;
  const auto& p = path(s, e);
  const double value = p.empty() ? kInfinity : path_energy(*graph_, p);
  energy_.emplace(key, value);
  return value;
}

}  // namespace medsim
