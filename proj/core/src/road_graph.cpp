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

#include "medsim/road_graph.hpp"

#include <algorithm>
#include <string>

#include <fmt/format.h>

namespace medsim {

namespace {

const std::vector<NodeId> kNoCopies;

void check_node(std::size_t n, NodeId id, const char* what) {
  if (id.value >= n) {
    throw GraphError(fmt::format("{} references undeclared node {}", what, id.value));
  }
}

}  // namespace

std::span<const NodeId> RoadGraph::copies_of(NodeId base) const {
  return copies_.at(base.value);
}

const ArcAttr* RoadGraph::arc(NodeId i, NodeId j) const {
  if (!contains(i) || !contains(j)) return nullptr;
  const auto& out = out_[i.value];
  auto it = std::lower_bound(out.begin(), out.end(), j,
                             [](const OutArc& a, NodeId id) { return a.to < id; });
  if (it == out.end() || it->to != j) return nullptr;
  return &it->attr;
}

double RoadGraph::drive_time(NodeId i, NodeId j) const {
  if (i == j) throw GraphError(fmt::format("self arc ({0},{0}) is not part of the model", i.value));
  const ArcAttr* a = arc(i, j);
  return a ? a->drive_time_s : kInfinity;
}

double RoadGraph::energy_cost(NodeId i, NodeId j) const {
  if (i == j) throw GraphError(fmt::format("self arc ({0},{0}) is not part of the model", i.value));
  const ArcAttr* a = arc(i, j);
  return a ? a->energy_kwh : kInfinity;
}

bool RoadGraph::is_scs(NodeId n) const {
  if (!contains(n)) return false;
  const NodeId b = base_of(n);
  return std::find(scs_.begin(), scs_.end(), b) != scs_.end();
}

bool RoadGraph::is_med_point(NodeId n) const {
  if (!contains(n)) return false;
  const NodeId b = base_of(n);
  return std::find(med_cycle_.begin(), med_cycle_.end(), b) != med_cycle_.end();
}

double RoadGraph::med_cycle_time() const {
  double total = 0.0;
  for (std::size_t k = 0; k < med_cycle_.size(); ++k) {
    total += drive_time(med_cycle_[k], med_cycle_[(k + 1) % med_cycle_.size()]);
  }
  return total;
}

bool is_closed_cycle(const GraphSpec& spec, std::span<const NodeId> cycle) {
  if (cycle.size() < 2) return false;
  for (std::size_t k = 0; k < cycle.size(); ++k) {
    const NodeId a = cycle[k];
    const NodeId b = cycle[(k + 1) % cycle.size()];
    if (a == b) return false;
    const bool found = std::any_of(spec.arcs.begin(), spec.arcs.end(), [&](const ArcInput& arc) {
      return arc.from == a && arc.to == b;
    });
    if (!found) return false;
  }
  return true;
}

RoadGraph build_graph(GraphSpec spec) {
  if (spec.visit_limit < 1) throw GraphError("visit_limit must be at least 1");
  const std::size_t n = spec.nodes.size();

  std::vector<bool> seen(n, false);
  std::vector<Point> position(n);
  for (const auto& node : spec.nodes) {
    if (node.id.value >= n || seen[node.id.value]) {
      throw GraphError(fmt::format("node ids must be unique and dense in [0, {}); got {}", n,
                                   node.id.value));
    }
    seen[node.id.value] = true;
    position[node.id.value] = node.position;
  }

  for (const auto& arc : spec.arcs) {
    check_node(n, arc.from, "arc");
    check_node(n, arc.to, "arc");
    if (arc.from == arc.to) throw GraphError(fmt::format("self arc at node {}", arc.from.value));
    if (!(arc.attr.drive_time_s > 0.0) || !(arc.attr.length_m > 0.0) ||
        !(arc.attr.energy_kwh >= 0.0)) {
      throw GraphError(fmt::format("arc ({},{}) needs drive_time > 0, length > 0, energy >= 0",
                                   arc.from.value, arc.to.value));
    }
  }
  for (NodeId s : spec.scs) check_node(n, s, "scs list");
  for (NodeId m : spec.med_cycle) check_node(n, m, "med cycle");
  for (NodeId e : spec.entries) check_node(n, e, "entry list");

  if (!spec.med_cycle.empty() && !is_closed_cycle(spec, spec.med_cycle)) {
    throw GraphError("med_cycle is not a closed walk over existing arcs");
  }

  RoadGraph g;
  g.base_count_ = n;
  g.visit_limit_ = spec.visit_limit;
  g.position_ = position;
  g.copies_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.base_.push_back(NodeId(static_cast<std::uint32_t>(i)));
    g.copies_[i].push_back(NodeId(static_cast<std::uint32_t>(i)));
  }

  auto sorted_unique = [](std::vector<NodeId> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  g.scs_ = sorted_unique(spec.scs);
  g.med_cycle_ = spec.med_cycle;

  auto add_dummies = [&](NodeId b, std::vector<NodeId>& into) {
    while (g.copies_[b.value].size() < static_cast<std::size_t>(spec.visit_limit)) {
      const NodeId d(static_cast<std::uint32_t>(g.base_.size()));
      g.base_.push_back(b);
      g.position_.push_back(position[b.value]);
      g.copies_.emplace_back();
      g.copies_[b.value].push_back(d);
      into.push_back(d);
    }
  };
  for (NodeId s : g.scs_) add_dummies(s, g.scs_dummies_);
  for (NodeId m : sorted_unique(spec.med_cycle)) {
    if (g.copies_[m.value].size() == 1) add_dummies(m, g.med_dummies_);
  }
  // Dummies are their own only copy.
  for (std::size_t i = n; i < g.base_.size(); ++i) {
    g.copies_[i].push_back(NodeId(static_cast<std::uint32_t>(i)));
  }

  g.out_.assign(g.base_.size(), {});
  for (const auto& arc : spec.arcs) {
    for (NodeId ci : g.copies_[arc.from.value]) {
      for (NodeId cj : g.copies_[arc.to.value]) {
        g.out_[ci.value].push_back({cj, arc.attr});
      }
    }
  }
  for (auto& out : g.out_) {
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.to < b.to; });
    auto dup = std::adjacent_find(out.begin(), out.end(),
                                  [](const auto& a, const auto& b) { return a.to == b.to; });
    if (dup != out.end()) {
      throw GraphError(fmt::format("duplicate arc into node {}", dup->to.value));
    }
  }

  if (spec.entries.empty()) {
    for (std::size_t i = 0; i < n; ++i) g.entries_.push_back(NodeId(static_cast<std::uint32_t>(i)));
  } else {
    g.entries_ = sorted_unique(spec.entries);
  }
  g.spec_ = std::move(spec);
  return g;
}

std::vector<NodeId> grid_ring(int cols, int r0, int c0, int r1, int c1) {
  std::vector<NodeId> ring;
  for (int c = c0; c < c1; ++c) ring.push_back(grid_node(cols, r0, c));
  for (int r = r0; r < r1; ++r) ring.push_back(grid_node(cols, r, c1));
  for (int c = c1; c > c0; --c) ring.push_back(grid_node(cols, r1, c));
  for (int r = r1; r > r0; --r) ring.push_back(grid_node(cols, r, c0));
  return ring;
}

GraphSpec make_grid(const GridOptions& options) {
  if (options.rows < 1 || options.cols < 1 || options.rows * options.cols < 2) {
    throw GraphError("grid needs at least two cells");
  }
  if (!(options.arc_length_m > 0.0) || !(options.speed_mps > 0.0)) {
    throw GraphError("grid arc length and speed must be positive");
  }
  GraphSpec spec;
  spec.visit_limit = options.visit_limit;
  const ArcAttr attr{options.arc_length_m / options.speed_mps, 0.0, options.arc_length_m};
  for (int r = 0; r < options.rows; ++r) {
    for (int c = 0; c < options.cols; ++c) {
      const NodeId id = grid_node(options.cols, r, c);
      spec.nodes.push_back({id, {c * options.arc_length_m, r * options.arc_length_m}});
      if (r == 0 || c == 0 || r == options.rows - 1 || c == options.cols - 1) {
        spec.entries.push_back(id);
      }
      if (c + 1 < options.cols) {
        const NodeId right = grid_node(options.cols, r, c + 1);
        spec.arcs.push_back({id, right, attr, false});
        spec.arcs.push_back({right, id, attr, false});
      }
      if (r + 1 < options.rows) {
        const NodeId down = grid_node(options.cols, r + 1, c);
        spec.arcs.push_back({id, down, attr, false});
        spec.arcs.push_back({down, id, attr, false});
      }
    }
  }
  spec.scs = options.scs;
  spec.med_cycle = options.med_cycle;
  return spec;
}

}  // namespace medsim
