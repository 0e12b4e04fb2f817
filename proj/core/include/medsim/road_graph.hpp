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

#ifndef MEDSIM_ROAD_GRAPH_HPP
#define MEDSIM_ROAD_GRAPH_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "medsim/types.hpp"

namespace medsim {

struct ArcAttr {
  double drive_time_s = 0.0;
  double energy_kwh = 0.0;
  double length_m = 0.0;

  /// Mean speed over the arc.
  double speed_mps() const { return length_m / drive_time_s; }
};

struct Point {
  double x_m = 0.0;
  double y_m = 0.0;
};

struct NodeInput {
  NodeId id;
  Point position;
};

struct ArcInput {
  NodeId from;
  NodeId to;
  ArcAttr attr;
  /// False when attr.energy_kwh still has to be derived from a vehicle model.
  bool has_energy = true;
};

/// Raw description of a graph, as read from JSON or produced by make_grid().
struct GraphSpec {
  std::vector<NodeInput> nodes;
  std::vector<ArcInput> arcs;
  std::vector<NodeId> scs;
  std::vector<NodeId> med_cycle;
  /// Nodes where EVs enter the network. Empty means every base node.
  std::vector<NodeId> entries;
  int visit_limit = 2;
};

/// Immutable directed road network.
///
/// Static charging stations (S) and MED route points (M) each receive
/// visit_limit - 1 dummy copies (S', M'). A dummy has the same position and
/// the same incident arcs as its base node, so a walk that visits a charger
/// twice is a simple path once the second visit is relabelled to a dummy.
class RoadGraph {
 public:
  struct OutArc {
    NodeId to;
    ArcAttr attr;
  };

  RoadGraph() = default;

  std::size_t node_count() const { return base_.size(); }
  std::size_t base_node_count() const { return base_count_; }
  int visit_limit() const { return visit_limit_; }

  bool contains(NodeId n) const { return n.value < base_.size(); }
  bool is_dummy(NodeId n) const { return n.value >= base_count_; }
  NodeId base_of(NodeId n) const { return base_.at(n.value); }

  /// The node itself followed by its dummies (visit order).
  std::span<const NodeId> copies_of(NodeId base) const;

  /// Arc attributes, or nullptr when there is no arc i -> j.
  const ArcAttr* arc(NodeId i, NodeId j) const;
  /// Drive time of arc i -> j, or kInfinity when absent. Throws on i == j.
  double drive_time(NodeId i, NodeId j) const;
  /// Energy of arc i -> j, or kInfinity when absent. Throws on i == j.
  double energy_cost(NodeId i, NodeId j) const;

  std::span<const OutArc> out_arcs(NodeId i) const { return out_.at(i.value); }

  const std::vector<NodeId>& scs_nodes() const { return scs_; }
  const std::vector<NodeId>& scs_dummies() const { return scs_dummies_; }
  const std::vector<NodeId>& med_points() const { return med_cycle_; }
  const std::vector<NodeId>& med_dummies() const { return med_dummies_; }
  const std::vector<NodeId>& entry_points() const { return entries_; }

  bool is_scs(NodeId n) const;
  bool is_med_point(NodeId n) const;

  /// Sum of drive times around the MED cycle (0 when there is no MED).
  double med_cycle_time() const;

  Point position(NodeId n) const { return position_.at(n.value); }

  /// The GraphSpec this graph was built from (base nodes and arcs only).
  const GraphSpec& spec() const { return spec_; }

 private:
  friend RoadGraph build_graph(GraphSpec spec);

  GraphSpec spec_;
  std::size_t base_count_ = 0;
  int visit_limit_ = 2;
  std::vector<NodeId> base_;
  std::vector<Point> position_;
  std::vector<std::vector<OutArc>> out_;
  std::vector<std::vector<NodeId>> copies_;
  std::vector<NodeId> scs_;
  std::vector<NodeId> scs_dummies_;
  std::vector<NodeId> med_cycle_;
  std::vector<NodeId> med_dummies_;
  std::vector<NodeId> entries_;
};

/// Validates `spec` and builds the dummy-expanded graph.
///
/// Node ids must be exactly {0, ..., n-1}. Throws GraphError on a dangling
/// arc endpoint, a self arc, a non-positive drive time or length, an open or
/// degenerate MED cycle, or visit_limit < 1.
RoadGraph build_graph(GraphSpec spec);

/// Checks that consecutive cycle points (and last -> first) are joined by arcs.
bool is_closed_cycle(const GraphSpec& spec, std::span<const NodeId> cycle);

struct GridOptions {
  int rows = 10;
  int cols = 10;
  double arc_length_m = 10000.0;
  double speed_mps = 12.5;
  std::vector<NodeId> scs;
  std::vector<NodeId> med_cycle;
  int visit_limit = 2;
};

/// Node id of grid cell (row, col) in make_grid() numbering.
inline NodeId grid_node(int cols, int row, int col) {
  return NodeId(static_cast<std::uint32_t>(row * cols + col));
}

/// Clockwise rectangular ring through grid cells [r0, r1] x [c0, c1].
std::vector<NodeId> grid_ring(int cols, int r0, int c0, int r1, int c1);

/// rows x cols grid with bidirectional arcs between 4-neighbours. Arc
/// energies are left at 0; resolve them with resolve_arc_energy(). Boundary
/// cells become entry points.
GraphSpec make_grid(const GridOptions& options);

}  // namespace medsim

#endif  // MEDSIM_ROAD_GRAPH_HPP
